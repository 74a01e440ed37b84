#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bsq/integrator.hpp"

namespace bsq {

/// dU = (Delta U + G U + f) dt + (P(b . grad U) + g) dW, U(0) = u0.
/// f and g are sampled once per step and may be left empty (zero).
struct LinearProblem {
  State u0;
  std::function<State(std::size_t step, double t)> forcing;
  std::function<std::vector<State>(std::size_t step, double t)> noise_forcing;
  bool transport = true;
  bool buoyancy = true;
};

/// Inner kernel of every iteration; records and kept states follow cfg.
TrajectoryResult solve_linear(const LinearProblem& prob, const StepConfig& cfg,
                              const NoiseModel& model, const BrownianPath& path, double p);

/// Same problem with u0, f and g mollified at each width in `eps_list`
/// (strictly decreasing), all driven by one Brownian path.
std::vector<TrajectoryResult> mollified_family(const LinearProblem& prob,
                                               std::span<const double> eps_list,
                                               const StepConfig& cfg, const NoiseModel& model,
                                               const BrownianPath& path, double p);

/// Second-level iteration: a linear solve with forcing
/// phi(||U_prev||) phi(||V||) B(V) and noise phi phi sigma(V) + P(b . grad U).
/// `v` and `u_prev` hold one state per step (index k at time k dt).
TrajectoryResult iterate_level2(const State& u0, std::span<const State> v,
                                std::span<const State> u_prev, const StepConfig& cfg,
                                const NoiseModel& model, const SystemSpec& sys,
                                const BrownianPath& path);

struct IterateSummary {
  double sup_lp_p = 0.0;
  double terminal_lp_p = 0.0;
};

struct IterationTrace {
  std::vector<IterateSummary> iterates;
  std::vector<double> diffs;       ///< sup_t ||U^(n+1) - U^(n)||_p^p
  std::vector<double> diff_norms;  ///< sup_t ||U^(n+1) - U^(n)||_p
  std::vector<double> ratios;      ///< diff_norms[i+1] / diff_norms[i] where the denominator > 1e-14
  bool converged = false;
  double horizon = 0.0;
};

class NonContraction : public Error {
 public:
  NonContraction(std::string what, IterationTrace trace)
      : Error(std::move(what)), trace_(std::move(trace)) {}
  [[nodiscard]] const IterationTrace& trace() const noexcept { return trace_; }

 private:
  IterationTrace trace_;
};

struct PicardResult {
  TrajectoryResult solution;
  IterationTrace trace;
};

/// Outer iteration for the truncated system. U^(0) solves the linear
/// transport-buoyancy problem; level n lags B and sigma on U^(n-1) and
/// evaluates both cutoff factors on the norms of U^(n-1). Stops once the
/// sup-in-time L^p change falls below `tol` or after `max_iter` levels.
/// Throws NonContraction after three consecutive ratios >= 1.
PicardResult picard_solve(const State& u0, const StepConfig& cfg, const NoiseModel& model,
                          const SystemSpec& sys, const BrownianPath& path, int max_iter,
                          double tol);

struct HorizonSearch {
  double horizon = 0.0;
  int halvings = 0;
  PicardResult result;
};

/// Halves cfg.t_final until picard_solve converges with every ratio below
/// `ratio_target` (and at least min(`needed`, available) ratios recorded).
HorizonSearch find_contraction_horizon(const State& u0, const StepConfig& cfg,
                                       const NoiseModel& model, const SystemSpec& sys,
                                       const BrownianPath& path, int max_iter, double tol,
                                       double ratio_target = 0.9, int needed = 5,
                                       int max_halvings = 12);

}  // namespace bsq
