#include "bsq/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bsq/error.hpp"

namespace bsq {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralField derivative(const SpectralField& f, int axis) {
  const Grid& g = f.grid();
  const auto dk = g.derivative_wavenumbers(axis);
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = kTwoPi * dk[i];
    out[i] = Complex(-a * f[i].imag(), a * f[i].real());
  }
  return out;
}

void require_vector_grid(VectorView v, const char* what) {
  require_same_grid(v[0].grid(), v[1].grid(), what);
  require_same_grid(v[0].grid(), v[2].grid(), what);
}

}  // namespace

VectorField gradient(const SpectralField& f) {
  return {derivative(f, 0), derivative(f, 1), derivative(f, 2)};
}

SpectralField divergence(VectorView v) {
  require_vector_grid(v, "divergence");
  const Grid& g = v[0].grid();
  const std::array<std::span<const double>, 3> dk{
      g.derivative_wavenumbers(0), g.derivative_wavenumbers(1), g.derivative_wavenumbers(2)};
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Complex s = 0.0;
    for (int j = 0; j < 3; ++j) s += dk[j][i] * v[j][i];
    out[i] = Complex(0.0, kTwoPi) * s;
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const Grid& g = f.grid();
  const auto k2 = g.k2();
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = -kTwoPi * kTwoPi * k2[i] * f[i];
  return out;
}

SpectralField inv_laplacian(const SpectralField& f, double mean_tolerance) {
  const double scale = std::max(1.0, f.max_abs());
  if (std::abs(f.mean()) > mean_tolerance * scale) {
    throw SpectralError("inverse Laplacian requires a mean-zero field");
  }
  const Grid& g = f.grid();
  const auto k2 = g.k2();
  SpectralField out(g);
  for (std::size_t i = 1; i < g.size(); ++i) out[i] = -f[i] / (kTwoPi * kTwoPi * k2[i]);
  return out;
}

VectorField leray_project(VectorView f) {
  require_vector_grid(f, "leray_project");
  const Grid& g = f[0].grid();
  const auto k2 = g.k2();
  const std::array<std::span<const double>, 3> k{g.wavenumbers(0), g.wavenumbers(1),
                                                 g.wavenumbers(2)};
  VectorField out{f[0], f[1], f[2]};
  for (std::size_t i = 1; i < g.size(); ++i) {
    const Complex dot = k[0][i] * f[0][i] + k[1][i] * f[1][i] + k[2][i] * f[2][i];
    const Complex s = dot / k2[i];
    for (int j = 0; j < 3; ++j) out[j][i] -= k[j][i] * s;
  }
  return out;
}

SpectralField advect(VectorView b, const SpectralField& f) {
  require_vector_grid(b, "advect");
  require_same_grid(b[0].grid(), f.grid(), "advect");
  const Grid& g = f.grid();
  std::vector<double> acc(g.size(), 0.0);
  for (int j = 0; j < 3; ++j) {
    const auto bj = b[j].to_physical();
    const auto dj = derivative(f, j).to_physical();
    for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += bj[x] * dj[x];
  }
  auto out = SpectralField::from_physical(g, acc);
  out.dealias();
  return out;
}

VectorField advect(VectorView b, VectorView u) {
  return {advect(b, u[0]), advect(b, u[1]), advect(b, u[2])};
}

VectorField q_operator(VectorView b, VectorView u, double div_tolerance) {
  require_vector_grid(b, "q_operator");
  require_vector_grid(u, "q_operator");
  require_same_grid(b[0].grid(), u[0].grid(), "q_operator");
  if (divergence_residual(u) > div_tolerance) {
    throw SpectralError("q_operator requires a divergence-free velocity");
  }
  const Grid& g = u[0].grid();
  // s = sum_{k,l} (d_k b^l)(d_l u_k)
  std::array<std::array<std::vector<double>, 3>, 3> db;  // db[k][l] = d_k b^l
  for (int l = 0; l < 3; ++l) {
    for (int k = 0; k < 3; ++k) db[k][l] = derivative(b[l], k).to_physical();
  }
  std::vector<double> s(g.size(), 0.0);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      const auto du = derivative(u[k], l).to_physical();
      const auto& dbl = db[k][l];
      for (std::size_t x = 0; x < s.size(); ++x) s[x] += dbl[x] * du[x];
    }
  }
  auto source = SpectralField::from_physical(g, s);
  source.dealias();
  // The integral of s vanishes for solenoidal u; only roundoff sits in the mean.
  source.zero_mean();
  return gradient(inv_laplacian(source));
}

State q_operator(VectorView b, const State& u, double div_tolerance) {
  auto q = q_operator(b, u.velocity(), div_tolerance);
  return State(std::move(q), SpectralField(u.grid()));
}

SpectralField mollify(const SpectralField& f, double eps) {
  if (eps < 0.0) throw std::invalid_argument("mollifier width must be nonnegative");
  const Grid& g = f.grid();
  const auto k2 = g.k2();
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::exp(-0.5 * eps * eps * k2[i]) * f[i];
  return out;
}

State mollify(const State& u, double eps) {
  State out;
  for (int j = 0; j < 4; ++j) out.comp[j] = mollify(u.comp[j], eps);
  return out;
}

double divergence_residual(VectorView u) noexcept {
  const Grid& g = u[0].grid();
  const auto k2 = g.k2();
  const std::array<std::span<const double>, 3> k{g.wavenumbers(0), g.wavenumbers(1),
                                                 g.wavenumbers(2)};
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const Complex dot = k[0][i] * u[0][i] + k[1][i] * u[1][i] + k[2][i] * u[2][i];
    const double amp = std::sqrt(std::norm(u[0][i]) + std::norm(u[1][i]) + std::norm(u[2][i]));
    num = std::max(num, std::abs(dot));
    den = std::max(den, std::sqrt(k2[i]) * amp);
  }
  return den > 0.0 ? num / den : 0.0;
}

double divergence_sup(VectorView u) {
  const auto d = divergence(u).to_physical();
  double m = 0.0;
  for (double v : d) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace bsq
