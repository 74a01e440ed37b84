#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsq/ensemble.hpp"
#include "bsq/error.hpp"
#include "bsq/noise.hpp"

namespace bsq {

/// Malformed or inconsistent experiment configuration. `field` is a dotted
/// path ("time.dt"); line/column are set for syntax errors (1-based, 0 if unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0, int column = 0);
  [[nodiscard]] const std::string& field() const noexcept { return field_; }
  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] int column() const noexcept { return column_; }

 private:
  std::string field_;
  int line_ = 0;
  int column_ = 0;
};

/// b(x) += amplitude * (sin|cos)(2 pi k.x)
struct TransportTerm {
  std::array<int, 3> wavevector{};
  std::array<double, 3> amplitude{};
  bool sine = true;
};

enum class TransportKind { none, random, explicit_modes };

struct TransportSpec {
  TransportKind kind = TransportKind::none;
  std::uint64_t seed = 0;
  int max_wavenumber = 1;
  double scale = 0.01;
  double nb2_target = 0.0;  ///< rescale so N_{b,2} equals this when > 0
  std::vector<std::vector<TransportTerm>> modes;
};

struct InitialSpec {
  bool random = true;
  std::uint64_t seed = 0;
  int max_wavenumber = 2;
  double lp_norm = 0.01;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::global_decay;
  std::string output_dir = "out";
  double p = 6.0;
  double a = 0.0;
  bool truncated = true;
  bool checkpoints = false;
  double stop_level = 0.0;  ///< local_existence: stop when ||U||_p >= stop_level / 2 (0 disables)

  int grid_n = 16;
  double dealias_fraction = 2.0 / 3.0;
  StepConfig step;

  int n_paths = 2;
  std::uint64_t base_seed = 0;

  InitialSpec initial;

  int dim_h = 8;
  double c_bdg = 2.0;
  TransportSpec transport;
  SigmaSpec sigma;
  Smallness smallness;

  double delta0 = 1e9;
  int picard_max_iter = 10;
  double picard_tol = 1e-12;
  bool picard_auto_horizon = true;
  std::vector<double> levels;
  double g_amplitude = 0.0;
};

/// JSON syntax check only; errors carry line and column.
nlohmann::json parse_config_document(std::string_view text);
std::string read_config_text(const std::filesystem::path& path);
/// Parses and validates a JSON document; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Canonical document with every default filled in.
nlohmann::json to_json(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical document.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

TransportCoefficients build_transport(const TransportSpec& spec, const Grid& grid, int dim_h);

/// Random real, mean-zero, dealiased state with divergence-free velocity,
/// modes |k_i| <= max_wavenumber, scaled so that ||U||_p = lp_target.
State random_solenoidal_state(const Grid& grid, std::uint64_t seed, int max_wavenumber,
                              double lp_target, double p);

struct PreparedRun {
  EnsembleConfig ensemble;
  AssumptionReport report;
  /// Gate failures that block the run (empty when the run may proceed).
  std::vector<std::string> gate_failures;
};

PreparedRun prepare(const ExperimentConfig& cfg);

}  // namespace bsq
