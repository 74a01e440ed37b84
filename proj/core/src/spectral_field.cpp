#include "bsq/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsq/error.hpp"

namespace bsq {

SpectralField::SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size()) {}

SpectralField::SpectralField(Grid grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw SpectralError("coefficient count does not match grid");
  }
}

SpectralField SpectralField::from_physical(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw SpectralError("physical sample count does not match grid");
  }
  return SpectralField(grid, forward_transform(grid, values));
}

std::vector<double> SpectralField::to_physical() const {
  return inverse_transform(grid_, coeffs_);
}

Complex& SpectralField::at(const std::array<int, 3>& k) {
  return coeffs_.at(grid_.flat_of_wavevector(k));
}

const Complex& SpectralField::at(const std::array<int, 3>& k) const {
  return coeffs_.at(grid_.flat_of_wavevector(k));
}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void SpectralField::dealias() noexcept {
  const auto mask = grid_.dealias_mask();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (!mask[i]) coeffs_[i] = 0.0;
  }
}

void SpectralField::zero_nyquist() noexcept {
  const auto nyq = grid_.nyquist_mask();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (nyq[i]) coeffs_[i] = 0.0;
  }
}

void SpectralField::enforce_hermitian() noexcept {
  const auto conj = grid_.conjugate_index();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::size_t j = conj[i];
    if (j < i) continue;
    const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
    coeffs_[i] = avg;
    coeffs_[j] = std::conj(avg);
  }
}

double SpectralField::hermitian_defect() const noexcept {
  const auto conj = grid_.conjugate_index();
  double m = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    m = std::max(m, std::abs(coeffs_[conj[i]] - std::conj(coeffs_[i])));
  }
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field addition");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field subtraction");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

VectorField make_vector(const Grid& grid) {
  return {SpectralField(grid), SpectralField(grid), SpectralField(grid)};
}

double max_abs(VectorView v) noexcept {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, c.max_abs());
  return m;
}

State::State(const Grid& grid)
    : comp{SpectralField(grid), SpectralField(grid), SpectralField(grid), SpectralField(grid)} {}

State::State(VectorField u, SpectralField rho)
    : comp{std::move(u[0]), std::move(u[1]), std::move(u[2]), std::move(rho)} {
  for (int j = 1; j < 4; ++j) require_same_grid(comp[0].grid(), comp[j].grid(), "state assembly");
}

State& State::operator+=(const State& other) {
  for (int j = 0; j < 4; ++j) comp[j] += other.comp[j];
  return *this;
}

State& State::operator-=(const State& other) {
  for (int j = 0; j < 4; ++j) comp[j] -= other.comp[j];
  return *this;
}

State& State::operator*=(double s) noexcept {
  for (auto& c : comp) c *= s;
  return *this;
}

State& State::axpy(double s, const State& other) {
  for (int j = 0; j < 4; ++j) comp[j].axpy(s, other.comp[j]);
  return *this;
}

double State::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : comp) m = std::max(m, c.max_abs());
  return m;
}

bool State::all_finite() const noexcept {
  for (const auto& c : comp) {
    for (const auto& z : c.coeffs()) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

}  // namespace bsq
