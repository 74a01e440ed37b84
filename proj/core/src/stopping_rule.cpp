#include "bsq/stopping_rule.hpp"

#include <cmath>
#include <sstream>

namespace bsq {

std::optional<StopInfo> evaluate(const StoppingRule& rule, const EnergyRecord& rec) {
  if (rule.kind == StopKind::none) return std::nullopt;
  const double norm = std::pow(rec.lp_p, 1.0 / rec.p);
  if (norm < 0.5 * rule.level) return std::nullopt;
  std::ostringstream reason;
  reason << "||U||_p = " << norm << " >= " << 0.5 * rule.level;
  return StopInfo{rec.t, rule.level, norm, reason.str()};
}

}  // namespace bsq
