#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "bsq/noise.hpp"
#include "bsq/spectral_field.hpp"

namespace bsq::testing {

// Hand-rolled generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

/// Real band-limited field, modes |k_i| <= kmax, Nyquist clear.
SpectralField random_field(const Grid& g, Gen& gen, int kmax, bool mean_zero = true);
VectorField random_vector(const Grid& g, Gen& gen, int kmax);
VectorField random_solenoidal(const Grid& g, Gen& gen, int kmax);
/// Valid state (solenoidal velocity, zero means) scaled by `scale`.
State random_state(const Grid& g, Gen& gen, int kmax, double scale = 1.0);
TransportCoefficients random_transport(const Grid& g, Gen& gen, int modes, int kmax, double scale);

/// Samples f(x1, x2, x3) on the lattice.
SpectralField sample(const Grid& g, const std::function<double(double, double, double)>& f);
/// Single real mode amp * cos(2 pi k.x) (or sin).
SpectralField single_mode(const Grid& g, std::array<int, 3> k, double amp, bool sine = false);

double max_diff(const SpectralField& a, const SpectralField& b);
double max_diff(VectorView a, VectorView b);
double max_diff(const State& a, const State& b);
double max_abs_physical(const SpectralField& f);

/// grad Delta^-1 div (b . grad u), the direct form of the gradient part.
VectorField q_direct(VectorView b, VectorView u);

}  // namespace bsq::testing
