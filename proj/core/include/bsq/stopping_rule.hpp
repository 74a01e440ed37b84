#pragma once

#include <optional>
#include <string>

#include "bsq/diagnostics.hpp"

namespace bsq {

enum class StopKind { none, norm_threshold };

/// tau_n = first recorded time with ||U||_p >= level / 2 (0 if already there
/// at t = 0), capped by `horizon`.
struct StoppingRule {
  StopKind kind = StopKind::none;
  double level = 1.0;
  double horizon = 0.0;  ///< 0 means the run's own t_final
};

struct StopInfo {
  double t = 0.0;
  double level = 0.0;
  double norm = 0.0;
  std::string reason;
};

/// Returns the trigger when `rec` satisfies the rule.
std::optional<StopInfo> evaluate(const StoppingRule& rule, const EnergyRecord& rec);

}  // namespace bsq
