#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bsq/spectral_field.hpp"

namespace bsq {

/// Truncated cylindrical Wiener process W = sum_{k < dim_h} W_k e_k.
struct WienerSpec {
  int dim_h = 8;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  double dt = 1e-3;
};

/// Increments dW_k over step `step_index`, i.i.d. Normal(0, dt).
/// Pure in (seed, path, step_index): the same arguments give the same draw.
std::vector<double> sample_increments(const WienerSpec& spec, std::uint64_t step_index);

/// A Brownian path sampled at spec.dt and observed on a grid `coarsen`
/// times coarser. Coarse increments are sums of the fine ones, so runs at
/// different step sizes share one path.
struct BrownianPath {
  WienerSpec fine;
  int coarsen = 1;

  [[nodiscard]] double dt() const noexcept { return fine.dt * coarsen; }
  [[nodiscard]] std::vector<double> increments(std::uint64_t step_index) const;
};

/// Transport coefficients b_n, one divergence-free vector field per noise mode.
/// An empty list means b = 0.
struct TransportCoefficients {
  std::vector<VectorField> modes;
};

/// Smallest eigenvalue of I - (1/2) sum_n b_n b_n^T over the lattice.
/// Negative values report a violated super-parabolic condition.
double check_super_parabolic(const TransportCoefficients& b, const Grid& grid);

/// N_{b,k} = sum_n ||b_n||^2_{W^{k,inf}}. The squared norm is the sum over
/// multi-indices |alpha| <= k of (max_x |d^alpha b_n(x)|)^2, with |.| the
/// Euclidean norm over vector components and derivatives taken spectrally.
double compute_nbk(const TransportCoefficients& b, int k);

/// (p - 1) / (2 (p - 1) + p C_BDG^2). Throws std::invalid_argument for p <= 2.
double local_threshold(double p, double c_bdg);

/// Per mode max_x |div b_n(x)|.
std::vector<double> transport_divergence(const TransportCoefficients& b);

enum class SigmaKind { zero, diagonal_linear, affine };

/// Multiplicative noise sigma. For diagonal_linear, sigma_n(U) = eps0 w_n U
/// with w_n = dim_h^{-1/2}; affine adds c_affine w_n F for a fixed mean-zero
/// solenoidal profile F.
struct SigmaSpec {
  SigmaKind kind = SigmaKind::zero;
  double eps0 = 0.0;
  double c_affine = 0.0;
  int dim_h = 8;
};

std::string to_string(SigmaKind kind);
SigmaKind sigma_kind_from_string(const std::string& name);

/// The fixed profile F used by the affine kind.
State affine_profile(const Grid& grid);

/// sigma(U) = (P sigma^(1)(U), sigma^(2)(U)), one state per noise mode.
std::vector<State> apply_sigma(const SigmaSpec& spec, const State& u);
/// sum_n sigma_n(U) dW_n.
State apply_sigma_increment(const SigmaSpec& spec, const State& u, std::span<const double> dw);

/// Constants in sum_j ||sigma_j(U)||_{L^p} <= C_growth (||U||_p + 1) and
/// sum_j ||sigma_j(U) - sigma_j(V)||_{L^p} <= C_lip ||U - V||_p.
struct SigmaConstants {
  double growth = 0.0;
  double lipschitz = 0.0;
};
SigmaConstants sigma_constants(const SigmaSpec& spec, const Grid& grid, double p);

/// Thresholds standing in for "sufficiently small" in the global regime.
struct Smallness {
  double nb2 = 0.01;
  double eps0 = 0.01;
};

struct AssumptionReport {
  std::array<double, 3> n_b{};
  double nu = 1.0;
  double p = 6.0;
  double c_bdg = 2.0;
  double threshold_local = 0.0;
  bool pass_local = false;   ///< N_{b,0} < threshold_local
  bool pass_global = false;  ///< local, parabolic and solenoidal gates plus smallness
  bool parabolic_ok = false;
  bool solenoidal_ok = false;
  double eps0 = 0.0;
  SigmaKind sigma_kind = SigmaKind::zero;
  SigmaConstants sigma{};
  Smallness smallness{};
  std::vector<double> divergence;  ///< per mode
  std::vector<std::string> failures;
};

/// Evaluates every noise condition. `grid` is used when b is empty.
AssumptionReport assess_assumptions(const TransportCoefficients& b, const SigmaSpec& sigma,
                                    const Grid& grid, double p, double c_bdg,
                                    const Smallness& smallness = {},
                                    double divergence_tolerance = 1e-12);

/// Noise data consumed by the dynamics: transport coefficients, sigma, and
/// the lattice values of b_n cached for the physical-space products.
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(const Grid& grid, int dim_h, TransportCoefficients transport, SigmaSpec sigma);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] int dim_h() const noexcept { return dim_h_; }
  [[nodiscard]] bool has_transport() const noexcept { return !transport_.modes.empty(); }
  [[nodiscard]] const TransportCoefficients& transport() const noexcept { return transport_; }
  [[nodiscard]] const SigmaSpec& sigma() const noexcept { return sigma_; }
  /// physical_b()[n][j] = lattice values of b_n^j.
  [[nodiscard]] const std::vector<std::array<std::vector<double>, 3>>& physical_b() const noexcept {
    return physical_b_;
  }

 private:
  Grid grid_;
  int dim_h_ = 0;
  TransportCoefficients transport_;
  SigmaSpec sigma_;
  std::vector<std::array<std::vector<double>, 3>> physical_b_;
};

}  // namespace bsq
