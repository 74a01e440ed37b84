#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsq/diagnostics.hpp"
#include "bsq/dynamics.hpp"
#include "bsq/error.hpp"
#include "bsq/noise.hpp"
#include "bsq/stopping_rule.hpp"

namespace bsq {

enum class Scheme { etd_euler_maruyama, semi_implicit_euler_maruyama };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct StepConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::etd_euler_maruyama;
  double t_final = 1.0;
  int record_every = 1;
  double weight_rate = 0.0;  ///< a in exp(a t) ||U||_p^p
  bool keep_states = false;  ///< keep the state at every record
};

/// Throws std::invalid_argument unless dt, t_final and record_every are
/// positive and dt <= t_final.
void validate(const StepConfig& cfg);
std::size_t step_count(const StepConfig& cfg);

/// Linear propagator for one step: exp(-4 pi^2 |n|^2 dt) for the exponential
/// scheme, 1 / (1 + 4 pi^2 |n|^2 dt) for the semi-implicit one.
class Propagator {
 public:
  Propagator(const Grid& grid, double dt, Scheme scheme);

  /// U+ = E (U + sum_m D_m dW_m) + Phi N, then the velocity is re-projected,
  /// Nyquist planes and means cleared. Phi = (1 - E) / lambda for the
  /// exponential scheme and dt * E for the semi-implicit one.
  [[nodiscard]] State advance(const State& u, const State& drift, std::span<const State> diffusion,
                              std::span<const double> dw) const;
  /// Same step with sum_m D_m dW_m supplied already contracted.
  [[nodiscard]] State advance(const State& u, const State& drift, const State& noise) const;

  [[nodiscard]] double dt() const noexcept { return dt_; }

 private:
  Grid grid_;
  double dt_;
  std::vector<double> decay_;
  std::vector<double> forcing_;
};

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<EnergyRecord> energies;
  std::vector<State> states;  ///< filled when StepConfig::keep_states
  State final_state;
  std::optional<StopInfo> stopped;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::size_t steps = 0;
};

/// Non-finite state. Carries the step that produced it and the trace so far.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(std::size_t step, TrajectoryResult partial);
  [[nodiscard]] std::size_t step() const noexcept { return step_; }
  [[nodiscard]] const TrajectoryResult& partial() const noexcept { return partial_; }

 private:
  std::size_t step_;
  TrajectoryResult partial_;
};

/// Explicit terms at one time level. When `noise` is set it holds
/// sum_m D_m dW_m and `diffusion` is ignored.
struct StepTerms {
  State drift;
  std::vector<State> diffusion;
  std::optional<State> noise;
};
using RightHandSide = std::function<StepTerms(std::size_t step, double t, const State& u,
                                              std::span<const double> dw)>;

/// Generic Ito time loop shared by the system solver and the linear kernel.
/// Records at step 0, every record_every steps, and at the last step.
TrajectoryResult integrate(const State& u0, const StepConfig& cfg, const BrownianPath& path,
                           const StoppingRule& stop, double p, const RightHandSide& rhs);

/// One step of the full (or truncated) system.
State step(const State& u, const StepConfig& cfg, const NoiseModel& model, const SystemSpec& sys,
           std::span<const double> dw);

TrajectoryResult run_trajectory(const State& u0, const StepConfig& cfg, const NoiseModel& model,
                                const SystemSpec& sys, const BrownianPath& path,
                                const StoppingRule& stop = {});

}  // namespace bsq
