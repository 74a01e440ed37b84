#include "bsq/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsq/operators.hpp"

namespace bsq {
namespace {

IterateSummary summarize(const TrajectoryResult& r) {
  IterateSummary s;
  for (const auto& e : r.energies) s.sup_lp_p = std::max(s.sup_lp_p, e.lp_p);
  if (!r.energies.empty()) s.terminal_lp_p = r.energies.back().lp_p;
  return s;
}

void require_solenoidal(const State& s, const char* what) {
  if (divergence_residual(s.velocity()) > 1e-10) {
    throw std::invalid_argument(std::string(what) + " must have a solenoidal velocity part");
  }
}

}  // namespace

TrajectoryResult solve_linear(const LinearProblem& prob, const StepConfig& cfg,
                              const NoiseModel& model, const BrownianPath& path, double p) {
  validate_state(prob.u0);
  if (prob.forcing) require_solenoidal(prob.forcing(0, 0.0), "forcing f");
  if (prob.noise_forcing) {
    const auto g0 = prob.noise_forcing(0, 0.0);
    if (static_cast<int>(g0.size()) != model.dim_h()) {
      throw std::invalid_argument("noise forcing g must have dim_h entries");
    }
    for (const auto& g : g0) require_solenoidal(g, "noise forcing g");
  }
  const Grid& grid = prob.u0.grid();
  const auto dim = static_cast<std::size_t>(model.dim_h());
  // sigma is replaced by the given g; only b enters through the model.
  const bool with_transport = prob.transport && model.has_transport();
  return integrate(prob.u0, cfg, path, StoppingRule{}, p,
                   [&](std::size_t k, double t, const State& u, std::span<const double> dw) {
                     StepTerms terms;
                     terms.drift = prob.buoyancy ? buoyancy(u) : State(grid);
                     if (prob.forcing) terms.drift += prob.forcing(k, t);
                     terms.noise = with_transport ? transport_increment(u, model, dw) : State(grid);
                     if (prob.noise_forcing) {
                       const auto g = prob.noise_forcing(k, t);
                       for (std::size_t m = 0; m < dim; ++m) terms.noise->axpy(dw[m], g[m]);
                     }
                     return terms;
                   });
}

std::vector<TrajectoryResult> mollified_family(const LinearProblem& prob,
                                               std::span<const double> eps_list,
                                               const StepConfig& cfg, const NoiseModel& model,
                                               const BrownianPath& path, double p) {
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("mollifier widths must be strictly decreasing");
    }
  }
  StepConfig run_cfg = cfg;
  run_cfg.keep_states = true;
  std::vector<TrajectoryResult> out;
  for (double eps : eps_list) {
    LinearProblem m = prob;
    m.u0 = mollify(prob.u0, eps);
    if (prob.forcing) {
      m.forcing = [f = prob.forcing, eps](std::size_t k, double t) { return mollify(f(k, t), eps); };
    }
    if (prob.noise_forcing) {
      m.noise_forcing = [g = prob.noise_forcing, eps](std::size_t k, double t) {
        auto v = g(k, t);
        for (auto& s : v) s = mollify(s, eps);
        return v;
      };
    }
    out.push_back(solve_linear(m, run_cfg, model, path, p));
  }
  return out;
}

TrajectoryResult iterate_level2(const State& u0, std::span<const State> v,
                                std::span<const State> u_prev, const StepConfig& cfg,
                                const NoiseModel& model, const SystemSpec& sys,
                                const BrownianPath& path) {
  const std::size_t n_steps = step_count(cfg);
  if (v.size() < n_steps || u_prev.size() < n_steps) {
    throw std::invalid_argument("iterate_level2 needs one state per step for V and U_prev");
  }
  // Cutoff products and the lagged terms are fixed before the solve.
  std::vector<double> factor(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double a = sys.truncated ? eval_phi(sys.cutoff, lp_norm(u_prev[k], sys.p)) : 1.0;
    const double b = sys.truncated ? eval_phi(sys.cutoff, lp_norm(v[k], sys.p)) : 1.0;
    factor[k] = a * b;
  }
  LinearProblem prob;
  prob.u0 = u0;
  prob.buoyancy = sys.buoyancy;
  prob.transport = true;
  if (sys.convection) {
    prob.forcing = [&](std::size_t k, double) {
      State b = convection(v[k]);
      b *= factor[k];
      return b;
    };
  }
  if (model.sigma().kind != SigmaKind::zero) {
    prob.noise_forcing = [&](std::size_t k, double) {
      auto s = apply_sigma(model.sigma(), v[k]);
      for (auto& x : s) x *= factor[k];
      return s;
    };
  }
  StepConfig run_cfg = cfg;
  run_cfg.record_every = 1;
  run_cfg.keep_states = true;
  return solve_linear(prob, run_cfg, model, path, sys.p);
}

PicardResult picard_solve(const State& u0, const StepConfig& cfg, const NoiseModel& model,
                          const SystemSpec& sys, const BrownianPath& path, int max_iter,
                          double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("picard tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

  LinearProblem base;
  base.u0 = u0;
  base.buoyancy = sys.buoyancy;
  StepConfig run_cfg = cfg;
  run_cfg.record_every = 1;
  run_cfg.keep_states = true;
  PicardResult out;
  out.trace.horizon = cfg.t_final;
  TrajectoryResult current = solve_linear(base, run_cfg, model, path, sys.p);
  out.trace.iterates.push_back(summarize(current));

  int consecutive_bad = 0;
  for (int level = 1; level <= max_iter; ++level) {
    // Explicit lagging: both cutoff factors read the norms of U^(n-1).
    TrajectoryResult next =
        iterate_level2(u0, current.states, current.states, cfg, model, sys, path);
    const double dnorm = sup_lp_difference(next.states, current.states, sys.p);
    out.trace.diff_norms.push_back(dnorm);
    out.trace.diffs.push_back(std::pow(dnorm, sys.p));
    out.trace.iterates.push_back(summarize(next));
    const std::size_t m = out.trace.diff_norms.size();
    if (m >= 2 && out.trace.diff_norms[m - 2] > 1e-14) {
      const double ratio = dnorm / out.trace.diff_norms[m - 2];
      out.trace.ratios.push_back(ratio);
      consecutive_bad = ratio >= 1.0 ? consecutive_bad + 1 : 0;
    }
    current = std::move(next);
    if (dnorm < tol) {
      out.trace.converged = true;
      break;
    }
    if (consecutive_bad >= 3) {
      std::ostringstream msg;
      msg << "picard iteration is not contracting (level " << level << ", ratio "
          << out.trace.ratios.back() << ")";
      throw NonContraction(msg.str(), std::move(out.trace));
    }
  }
  out.solution = std::move(current);
  return out;
}

HorizonSearch find_contraction_horizon(const State& u0, const StepConfig& cfg,
                                       const NoiseModel& model, const SystemSpec& sys,
                                       const BrownianPath& path, int max_iter, double tol,
                                       double ratio_target, int needed, int max_halvings) {
  StepConfig trial = cfg;
  for (int h = 0; h <= max_halvings; ++h) {
    try {
      PicardResult r = picard_solve(u0, trial, model, sys, path, max_iter, tol);
      const auto& ratios = r.trace.ratios;
      const bool all_small = std::all_of(ratios.begin(), ratios.end(),
                                         [&](double q) { return q < ratio_target; });
      const bool enough = r.trace.converged ||
                          static_cast<int>(ratios.size()) >= needed;
      if (all_small && enough) return HorizonSearch{trial.t_final, h, std::move(r)};
    } catch (const NonContraction&) {
    }
    if (trial.t_final / 2.0 < trial.dt) break;
    trial.t_final /= 2.0;
  }
  throw Error("no contracting horizon found down to t = " + std::to_string(trial.t_final));
}

}  // namespace bsq
