#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bsq/integrator.hpp"
#include "bsq/stopping_rule.hpp"

namespace bsq {

struct LevelTau {
  double level = 0.0;
  double tau = 0.0;
  bool triggered = false;
};

/// Outcome of running the truncated system at delta0 = n for every level n.
struct MaximalityReport {
  std::vector<LevelTau> levels;
  double tau_estimate = 0.0;  ///< max_n tau_n, capped at the horizon
  bool monotone = true;       ///< tau_n nondecreasing in n
  bool consistency = true;    ///< paths agree on [0, tau_m ^ tau_n]
  double max_deviation = 0.0; ///< largest overlap ||U^(m) - U^(n)||_p
  std::vector<TrajectoryResult> runs;  ///< one per level, states kept at every record
};

class ConsistencyViolation : public Error {
 public:
  ConsistencyViolation(std::string what, MaximalityReport report)
      : Error(std::move(what)), report_(std::move(report)) {}
  [[nodiscard]] const MaximalityReport& report() const noexcept { return report_; }

 private:
  MaximalityReport report_;
};

/// Runs one truncated path per level on a shared Brownian path and records
/// tau_n. `levels` must be nondecreasing. Throws ConsistencyViolation when two
/// levels disagree on their common interval by more than `tolerance`.
MaximalityReport maximality_scan(const State& u0, std::span<const double> levels,
                                 const StepConfig& cfg, const NoiseModel& model,
                                 const SystemSpec& sys, const BrownianPath& path,
                                 double tolerance = 1e-10);

}  // namespace bsq
