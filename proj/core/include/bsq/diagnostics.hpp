#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "bsq/spectral_field.hpp"

namespace bsq {

/// One snapshot of the L^p energy functionals along a path.
struct EnergyRecord {
  double t = 0.0;
  double lp_p = 0.0;          ///< ||U||_p^p = sum_j ||U_j||_p^p
  double dissipation = 0.0;   ///< sum_j ||grad(|U_j|^{p/2})||_2^2
  double weighted = 0.0;      ///< exp(a t) * lp_p
  std::array<double, 4> component_lp{};  ///< ||U_j||_p^p
  double p = 2.0;             ///< exponent the record was taken at (not serialized)
};

/// (mean over the lattice of |f|^p)^{1/p}
double lp_norm(const SpectralField& f, double p);
double lp_norm(std::span<const double> physical, double p);

/// ||U||_p with the component-sum convention ||U||_p^p = sum_j ||U_j||_p^p.
double lp_norm(const State& u, double p);
std::array<double, 4> component_lp_p(const State& u, double p);

/// L^p norm of an l^2-valued family: (mean_x (sum_n |f_n(x)|^2)^{p/2})^{1/p}.
double hs_lp_norm(std::span<const SpectralField> family, double p);

/// The two sides of |grad |U_j|^{p/2}|^2 = (p^2/4)|U_j|^{p-2}|grad U_j|^2, summed over j.
struct Dissipation {
  double direct = 0.0;    ///< |U_j|^{p/2} formed on the lattice, then differentiated spectrally
  double identity = 0.0;  ///< chain-rule form, pointwise
};
Dissipation dissipation(const State& u, double p);

/// Ratios ||w||_q / ||grad w||_q for w = |v|^{p-1} and w = |v|^{p-2} v.
/// Gradients use the pointwise chain rule (p-1)|v|^{p-2} grad v.
/// Throws std::invalid_argument for an identically zero field.
std::pair<double, double> poincare_ratio(const SpectralField& v, double p, double q);

EnergyRecord make_record(const State& u, double t, double p, double a);

struct WeightedSummary {
  double sup_weighted = 0.0;
  double integral_weighted_dissipation = 0.0;
};
/// Supremum of exp(a t) lp_p and trapezoidal integral of exp(a t) * dissipation.
WeightedSummary weighted_energy(std::span<const EnergyRecord> history, double a);

/// max_k ||a_k - b_k||_p over paired snapshots.
double sup_lp_difference(std::span<const State> a, std::span<const State> b, double p);

}  // namespace bsq
