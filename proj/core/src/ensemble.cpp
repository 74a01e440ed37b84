#include "bsq/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "bsq/picard.hpp"

namespace bsq {
namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

void fill_energy_stats(PathResult& r, const TrajectoryResult& traj, double a, double delta0,
                       double p) {
  const auto w = weighted_energy(traj.energies, a);
  r.sup_weighted = w.sup_weighted;
  r.integral_weighted_dissipation = w.integral_weighted_dissipation;
  double sup_pp = 0.0;
  for (const auto& e : traj.energies) sup_pp = std::max(sup_pp, e.lp_p);
  r.sup_norm = std::pow(sup_pp, 1.0 / p);
  r.crossed = r.sup_norm >= 0.5 * delta0;
  r.survived = r.sup_weighted < 0.5 * delta0;
  r.stopped = traj.stopped;
  r.energies = traj.energies;
  r.final_state = traj.final_state;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::linear_estimate: return "linear_estimate";
    case Experiment::local_existence: return "local_existence";
    case Experiment::contraction: return "contraction";
    case Experiment::global_decay: return "global_decay";
    case Experiment::maximality: return "maximality";
  }
  return "global_decay";
}

Experiment experiment_from_string(const std::string& name) {
  if (name == "linear_estimate") return Experiment::linear_estimate;
  if (name == "local_existence") return Experiment::local_existence;
  if (name == "contraction") return Experiment::contraction;
  if (name == "global_decay") return Experiment::global_decay;
  if (name == "maximality") return Experiment::maximality;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

bool is_nonlinear(Experiment e) noexcept { return e != Experiment::linear_estimate; }

int default_workers() {
  if (const char* env = std::getenv("BSQ_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

PathResult run_path(const EnsembleConfig& cfg, std::size_t index) {
  PathResult r;
  r.index = index;
  r.seed = cfg.base_seed + index;
  const BrownianPath path{WienerSpec{cfg.noise.dim_h(), r.seed, index, cfg.step.dt}, 1};
  const double p = cfg.system.p;
  const double a = cfg.step.weight_rate;
  const double delta0 = cfg.system.cutoff.delta0;
  r.initial_lp_p = std::pow(lp_norm(cfg.u0, p), p);

  try {
    switch (cfg.experiment) {
      case Experiment::global_decay: {
        auto traj = run_trajectory(cfg.u0, cfg.step, cfg.noise, cfg.system, path);
        fill_energy_stats(r, traj, a, delta0, p);
        break;
      }
      case Experiment::local_existence: {
        SystemSpec sys = cfg.system;
        sys.truncated = false;
        auto traj = run_trajectory(cfg.u0, cfg.step, cfg.noise, sys, path, cfg.stop);
        fill_energy_stats(r, traj, a, delta0, p);
        r.extra["tau"] = traj.stopped ? traj.stopped->t : cfg.step.t_final;
        break;
      }
      case Experiment::linear_estimate: {
        LinearProblem prob;
        prob.u0 = cfg.u0;
        if (cfg.linear_g_amplitude != 0.0) {
          const double w = cfg.linear_g_amplitude / std::sqrt(static_cast<double>(cfg.noise.dim_h()));
          const State g = w * affine_profile(cfg.u0.grid());
          prob.noise_forcing = [g, dim = cfg.noise.dim_h()](std::size_t, double) {
            return std::vector<State>(static_cast<std::size_t>(dim), g);
          };
        }
        auto traj = solve_linear(prob, cfg.step, cfg.noise, path, p);
        fill_energy_stats(r, traj, a, delta0, p);
        break;
      }
      case Experiment::contraction: {
        PicardResult res;
        double horizon = cfg.step.t_final;
        if (cfg.picard_auto_horizon) {
          auto h = find_contraction_horizon(cfg.u0, cfg.step, cfg.noise, cfg.system, path,
                                            cfg.picard_max_iter, cfg.picard_tol);
          horizon = h.horizon;
          res = std::move(h.result);
        } else {
          res = picard_solve(cfg.u0, cfg.step, cfg.noise, cfg.system, path, cfg.picard_max_iter,
                             cfg.picard_tol);
        }
        fill_energy_stats(r, res.solution, a, delta0, p);
        r.extra["horizon"] = horizon;
        r.extra["converged"] = res.trace.converged;
        r.extra["levels"] = res.trace.diff_norms.size();
        r.extra["ratios"] = res.trace.ratios;
        r.extra["max_ratio"] = res.trace.ratios.empty()
                                   ? 0.0
                                   : *std::max_element(res.trace.ratios.begin(),
                                                       res.trace.ratios.end());
        r.extra["final_residual"] =
            res.trace.diff_norms.empty() ? 0.0 : res.trace.diff_norms.back();
        r.final_state = res.solution.final_state;
        r.energies = res.solution.energies;
        break;
      }
      case Experiment::maximality: {
        auto rep = maximality_scan(cfg.u0, cfg.levels, cfg.step, cfg.noise, cfg.system, path);
        fill_energy_stats(r, rep.runs.back(), a, delta0, p);
        nlohmann::json taus = nlohmann::json::array();
        for (const auto& lt : rep.levels) {
          taus.push_back({{"level", lt.level}, {"tau", lt.tau}, {"triggered", lt.triggered}});
        }
        r.extra["tau_n"] = taus;
        r.extra["tau_estimate"] = rep.tau_estimate;
        r.extra["monotone"] = rep.monotone;
        r.extra["max_deviation"] = rep.max_deviation;
        break;
      }
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

EnsembleSummary summarize(const EnsembleConfig& cfg, std::vector<PathResult> paths) {
  EnsembleSummary s;
  s.experiment = cfg.experiment;
  s.n_paths = static_cast<int>(paths.size());
  s.delta0 = cfg.system.cutoff.delta0;

  std::vector<double> sup_w, diss, init, crossed, survived;
  for (const auto& r : paths) {
    if (!r.ok) {
      ++s.n_failed;
      continue;
    }
    sup_w.push_back(r.sup_weighted);
    diss.push_back(r.integral_weighted_dissipation);
    init.push_back(r.initial_lp_p);
    crossed.push_back(r.crossed ? 1.0 : 0.0);
    survived.push_back(r.survived ? 1.0 : 0.0);
  }
  const auto n = static_cast<double>(sup_w.size());
  if (n > 0) {
    s.mean_sup_weighted = pairwise_sum(sup_w) / n;
    s.mean_integral_dissipation = pairwise_sum(diss) / n;
    s.mean_initial_lp_p = pairwise_sum(init) / n;
    s.crossing_fraction = pairwise_sum(crossed) / n;
    s.survival_fraction = pairwise_sum(survived) / n;
    if (s.mean_initial_lp_p > 0.0) s.c_fit = s.mean_sup_weighted / s.mean_initial_lp_p;
  }
  if (n > 1) {
    std::vector<double> dev(sup_w.size());
    for (std::size_t i = 0; i < sup_w.size(); ++i) {
      dev[i] = (sup_w[i] - s.mean_sup_weighted) * (sup_w[i] - s.mean_sup_weighted);
    }
    s.se_sup_weighted = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  }
  s.fatal = s.n_paths > 0 && static_cast<double>(s.n_failed) > 0.1 * s.n_paths;
  s.paths = std::move(paths);
  return s;
}

EnsembleSummary run_ensemble(const EnsembleConfig& cfg, int workers) {
  if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be positive");
  validate(cfg.step);
  const auto count = static_cast<std::size_t>(cfg.n_paths);
  std::vector<PathResult> results(count);
  const int n_workers = std::clamp(workers > 0 ? workers : default_workers(), 1, cfg.n_paths);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) results[i] = run_path(cfg, i);
  };
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  return summarize(cfg, std::move(results));
}

MarkovCheck markov_bound(const EnsembleSummary& summary, double delta0) {
  MarkovCheck m;
  m.bound = std::clamp(1.0 - 2.0 * summary.mean_sup_weighted / delta0, 0.0, 1.0);
  m.empirical_survival = summary.survival_fraction;
  const int ok = summary.n_paths - summary.n_failed;
  if (ok > 0) {
    m.binomial_se = std::sqrt(m.empirical_survival * (1.0 - m.empirical_survival) / ok);
  }
  return m;
}

}  // namespace bsq
