#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "bsq/fft.hpp"
#include "bsq/grid.hpp"

namespace bsq {

/// Fourier coefficients of one real scalar field on the torus.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, std::vector<Complex> coeffs);

  static SpectralField from_physical(const Grid& grid, std::span<const double> values);
  [[nodiscard]] std::vector<double> to_physical() const;

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<Complex> coeffs() noexcept { return coeffs_; }
  [[nodiscard]] std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::size_t size() const noexcept { return coeffs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return coeffs_.empty(); }

  Complex& operator[](std::size_t flat) noexcept { return coeffs_[flat]; }
  const Complex& operator[](std::size_t flat) const noexcept { return coeffs_[flat]; }

  /// Coefficient at wavevector k, each component in {-N/2+1, ..., N/2}.
  Complex& at(const std::array<int, 3>& k);
  [[nodiscard]] const Complex& at(const std::array<int, 3>& k) const;

  [[nodiscard]] Complex mean() const noexcept { return coeffs_.empty() ? Complex{} : coeffs_[0]; }
  [[nodiscard]] double max_abs() const noexcept;

  /// Applies the 2/3 mask and clears the Nyquist planes.
  void dealias() noexcept;
  void zero_nyquist() noexcept;
  void zero_mean() noexcept {
    if (!coeffs_.empty()) coeffs_[0] = 0.0;
  }
  /// Projects onto real fields: c(n) <- (c(n) + conj(c(-n))) / 2.
  void enforce_hermitian() noexcept;
  /// max_n |c(-n) - conj(c(n))|.
  [[nodiscard]] double hermitian_defect() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

using VectorField = std::array<SpectralField, 3>;
using VectorView = std::span<const SpectralField, 3>;

VectorField make_vector(const Grid& grid);
double max_abs(VectorView v) noexcept;

/// The solution variable U = (u1, u2, u3, rho).
struct State {
  std::array<SpectralField, 4> comp;

  State() = default;
  explicit State(const Grid& grid);
  State(VectorField u, SpectralField rho);

  [[nodiscard]] const Grid& grid() const noexcept { return comp[0].grid(); }
  [[nodiscard]] VectorView velocity() const noexcept { return VectorView(comp.data(), 3); }
  [[nodiscard]] const SpectralField& rho() const noexcept { return comp[3]; }
  SpectralField& rho() noexcept { return comp[3]; }

  State& operator+=(const State& other);
  State& operator-=(const State& other);
  State& operator*=(double s) noexcept;
  State& axpy(double s, const State& other);

  friend State operator+(State a, const State& b) { return a += b; }
  friend State operator-(State a, const State& b) { return a -= b; }
  friend State operator*(double s, State a) { return a *= s; }
  friend bool operator==(const State&, const State&) = default;

  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] bool all_finite() const noexcept;
};

}  // namespace bsq
