#include "bsq/stopping.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bsq {

MaximalityReport maximality_scan(const State& u0, std::span<const double> levels,
                                 const StepConfig& cfg, const NoiseModel& model,
                                 const SystemSpec& sys, const BrownianPath& path,
                                 double tolerance) {
  if (levels.empty()) throw std::invalid_argument("maximality_scan needs at least one level");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] < levels[i - 1]) throw std::invalid_argument("levels must be nondecreasing");
  }
  // tau_n is only observed at records, so every step is recorded.
  StepConfig run_cfg = cfg;
  run_cfg.record_every = 1;
  run_cfg.keep_states = true;

  MaximalityReport report;
  for (double level : levels) {
    if (!(level > 0.0)) throw std::invalid_argument("levels must be positive");
    SystemSpec level_sys = sys;
    level_sys.truncated = true;
    level_sys.cutoff.delta0 = level;
    const StoppingRule rule{StopKind::norm_threshold, level, cfg.t_final};
    auto run = run_trajectory(u0, run_cfg, model, level_sys, path, rule);
    LevelTau lt{level, cfg.t_final, run.stopped.has_value()};
    if (run.stopped) lt.tau = run.stopped->t;
    report.levels.push_back(lt);
    report.runs.push_back(std::move(run));
  }

  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    report.tau_estimate = std::max(report.tau_estimate, report.levels[i].tau);
    if (i > 0 && report.levels[i].tau < report.levels[i - 1].tau) report.monotone = false;
  }

  std::size_t bad_m = 0, bad_n = 0;
  double worst = 0.0;
  for (std::size_t m = 0; m < report.runs.size(); ++m) {
    for (std::size_t n = m + 1; n < report.runs.size(); ++n) {
      const double overlap = std::min(report.levels[m].tau, report.levels[n].tau);
      const auto& a = report.runs[m];
      const auto& b = report.runs[n];
      const std::size_t count = std::min(a.states.size(), b.states.size());
      for (std::size_t k = 0; k < count && a.times[k] <= overlap; ++k) {
        const double dev = lp_norm(a.states[k] - b.states[k], sys.p);
        if (dev > worst) {
          worst = dev;
          bad_m = m;
          bad_n = n;
        }
      }
    }
  }
  report.max_deviation = worst;
  if (worst > tolerance) {
    report.consistency = false;
    std::ostringstream msg;
    msg << "levels " << report.levels[bad_m].level << " and " << report.levels[bad_n].level
        << " disagree on their common interval by " << worst;
    throw ConsistencyViolation(msg.str(), std::move(report));
  }
  return report;
}

}  // namespace bsq
