#include "bsq/integrator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bsq/operators.hpp"

namespace bsq {

std::string to_string(Scheme s) {
  return s == Scheme::etd_euler_maruyama ? "etd_euler_maruyama" : "semi_implicit_euler_maruyama";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "etd_euler_maruyama") return Scheme::etd_euler_maruyama;
  if (name == "semi_implicit_euler_maruyama") return Scheme::semi_implicit_euler_maruyama;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

void validate(const StepConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  if (cfg.dt > cfg.t_final * (1.0 + 1e-12)) throw std::invalid_argument("dt exceeds t_final");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

std::size_t step_count(const StepConfig& cfg) {
  validate(cfg);
  const auto n = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
  return n == 0 ? 1 : n;
}

Propagator::Propagator(const Grid& grid, double dt, Scheme scheme)
    : grid_(grid), dt_(dt), decay_(grid.size()), forcing_(grid.size()) {
  const auto k2 = grid.k2();
  const double c = 4.0 * std::numbers::pi * std::numbers::pi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lambda = c * k2[i];
    if (scheme == Scheme::etd_euler_maruyama) {
      decay_[i] = std::exp(-lambda * dt);
      forcing_[i] = lambda == 0.0 ? dt : -std::expm1(-lambda * dt) / lambda;
    } else {
      decay_[i] = 1.0 / (1.0 + lambda * dt);
      forcing_[i] = dt * decay_[i];
    }
  }
}

namespace {

State finish_step(State out) {
  auto projected = leray_project(out.velocity());
  for (int a = 0; a < 3; ++a) out.comp[a] = std::move(projected[a]);
  for (auto& c : out.comp) {
    c.zero_nyquist();
    c.zero_mean();
  }
  return out;
}

}  // namespace

State Propagator::advance(const State& u, const State& drift, const State& noise) const {
  State out(grid_);
  for (int j = 0; j < 4; ++j) {
    auto o = out.comp[j].coeffs();
    const auto uj = u.comp[j].coeffs();
    const auto nj = drift.comp[j].coeffs();
    const auto dj = noise.comp[j].coeffs();
    for (std::size_t i = 0; i < o.size(); ++i) {
      o[i] = decay_[i] * (uj[i] + dj[i]) + forcing_[i] * nj[i];
    }
  }
  return finish_step(std::move(out));
}

State Propagator::advance(const State& u, const State& drift, std::span<const State> diffusion,
                          std::span<const double> dw) const {
  State out(grid_);
  for (int j = 0; j < 4; ++j) {
    auto o = out.comp[j].coeffs();
    const auto uj = u.comp[j].coeffs();
    const auto nj = drift.comp[j].coeffs();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = uj[i];
    for (std::size_t m = 0; m < diffusion.size(); ++m) {
      const auto dj = diffusion[m].comp[j].coeffs();
      const double w = dw[m];
      for (std::size_t i = 0; i < o.size(); ++i) o[i] += w * dj[i];
    }
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = decay_[i] * o[i] + forcing_[i] * nj[i];
  }
  return finish_step(std::move(out));
}

IntegrationFailure::IntegrationFailure(std::size_t step, TrajectoryResult partial)
    : Error("integration failure: non-finite state at step " + std::to_string(step)),
      step_(step),
      partial_(std::move(partial)) {}

TrajectoryResult integrate(const State& u0, const StepConfig& cfg, const BrownianPath& path,
                           const StoppingRule& stop, double p, const RightHandSide& rhs) {
  const std::size_t n_steps = step_count(cfg);
  if (std::abs(path.dt() - cfg.dt) > 1e-12 * cfg.dt) {
    throw std::invalid_argument("Brownian path resolution does not match dt");
  }
  const Propagator prop(u0.grid(), cfg.dt, cfg.scheme);
  TrajectoryResult result;
  result.seed = path.fine.seed;
  result.path = path.fine.path;

  double horizon = stop.horizon > 0.0 ? stop.horizon : cfg.t_final;
  auto record = [&](const State& u, double t) {
    result.times.push_back(t);
    result.energies.push_back(make_record(u, t, p, cfg.weight_rate));
    if (cfg.keep_states) result.states.push_back(u);
    if (auto trig = evaluate(stop, result.energies.back()); trig && t <= horizon) {
      result.stopped = trig;
      return true;
    }
    return false;
  };

  State u = u0;
  bool halted = record(u, 0.0);
  std::size_t k = 0;
  for (; k < n_steps && !halted; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const auto dw = path.increments(k);
    StepTerms terms = rhs(k, t, u, dw);
    State next = terms.noise ? prop.advance(u, terms.drift, *terms.noise)
                             : prop.advance(u, terms.drift, terms.diffusion, dw);
    if (!next.all_finite()) {
      result.final_state = u;
      result.steps = k;
      throw IntegrationFailure(k, std::move(result));
    }
    u = std::move(next);
    const std::size_t done = k + 1;
    if (done % static_cast<std::size_t>(cfg.record_every) == 0 || done == n_steps) {
      halted = record(u, static_cast<double>(done) * cfg.dt);
    }
  }
  result.steps = k;
  result.final_state = std::move(u);
  return result;
}

State step(const State& u, const StepConfig& cfg, const NoiseModel& model, const SystemSpec& sys,
           std::span<const double> dw) {
  validate(cfg);
  validate_state(u);
  const Propagator prop(u.grid(), cfg.dt, cfg.scheme);
  SystemTerms t = evaluate_system(u, model, sys);
  State next = prop.advance(u, t.drift, t.diffusion, dw);
  if (!next.all_finite()) throw IntegrationFailure(0, TrajectoryResult{});
  return next;
}

TrajectoryResult run_trajectory(const State& u0, const StepConfig& cfg, const NoiseModel& model,
                                const SystemSpec& sys, const BrownianPath& path,
                                const StoppingRule& stop) {
  validate_state(u0);
  require_same_grid(u0.grid(), model.grid(), "run_trajectory");
  if (path.fine.dim_h != model.dim_h()) {
    throw std::invalid_argument("Brownian path dimension does not match the noise model");
  }
  return integrate(u0, cfg, path, stop, sys.p,
                   [&](std::size_t, double, const State& u, std::span<const double> dw) {
                     SystemIncrement t = evaluate_increment(u, model, sys, dw);
                     return StepTerms{std::move(t.drift), {}, std::move(t.noise)};
                   });
}

}  // namespace bsq
