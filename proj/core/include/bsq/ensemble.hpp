#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsq/integrator.hpp"
#include "bsq/stopping.hpp"

namespace bsq {

enum class Experiment { linear_estimate, local_existence, contraction, global_decay, maximality };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);
/// Experiments that involve the nonlinear system (p > 5 required).
bool is_nonlinear(Experiment e) noexcept;

struct EnsembleConfig {
  int n_paths = 2;
  std::uint64_t base_seed = 0;
  Experiment experiment = Experiment::global_decay;

  State u0;
  NoiseModel noise;
  StepConfig step;
  SystemSpec system;

  StoppingRule stop;                 ///< local_existence
  int picard_max_iter = 10;          ///< contraction
  double picard_tol = 1e-12;
  bool picard_auto_horizon = true;
  std::vector<double> levels;        ///< maximality
  double linear_g_amplitude = 0.0;   ///< linear_estimate: g_n = amplitude w_n F
};

struct PathResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double initial_lp_p = 0.0;
  double sup_weighted = 0.0;
  double integral_weighted_dissipation = 0.0;
  double sup_norm = 0.0;     ///< sup_t ||U(t)||_p
  bool crossed = false;      ///< sup_t ||U||_p >= delta0 / 2
  bool survived = false;     ///< sup_t exp(a t) ||U||_p^p < delta0 / 2
  std::optional<StopInfo> stopped;
  std::vector<EnergyRecord> energies;
  State final_state;
  nlohmann::json extra = nlohmann::json::object();
};

struct EnsembleSummary {
  Experiment experiment = Experiment::global_decay;
  int n_paths = 0;
  int n_failed = 0;
  double delta0 = 0.0;
  double mean_sup_weighted = 0.0;
  double se_sup_weighted = 0.0;
  double mean_integral_dissipation = 0.0;
  double mean_initial_lp_p = 0.0;
  double c_fit = 0.0;  ///< mean_sup_weighted / mean_initial_lp_p (0 when undefined)
  double crossing_fraction = 0.0;
  double survival_fraction = 0.0;
  bool fatal = false;  ///< more than 10% of paths failed
  std::vector<PathResult> paths;
};

/// Number of worker threads: BSQ_WORKERS when set, else hardware concurrency.
int default_workers();

/// Runs n_paths independent paths, path i seeded with base_seed + i.
/// Results are reduced in path order and do not depend on `workers`.
EnsembleSummary run_ensemble(const EnsembleConfig& cfg, int workers = 0);

/// Runs a single path of the ensemble.
PathResult run_path(const EnsembleConfig& cfg, std::size_t index);

/// Reduces per-path results (in the given order) into a summary.
EnsembleSummary summarize(const EnsembleConfig& cfg, std::vector<PathResult> paths);

struct MarkovCheck {
  double bound = 1.0;               ///< 1 - 2 E[sup weighted] / delta0, clipped to [0, 1]
  double empirical_survival = 1.0;  ///< fraction with sup weighted < delta0 / 2
  double binomial_se = 0.0;
};
MarkovCheck markov_bound(const EnsembleSummary& summary, double delta0);

}  // namespace bsq
