#include "bsq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsq/operators.hpp"

namespace bsq {
namespace {

double lattice_mean(std::span<const double> v) {
  // Pairwise summation keeps the lattice quadrature order-independent in practice.
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return lattice_mean(v.first(h)) + lattice_mean(v.subspan(h));
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : lattice_mean(v) / static_cast<double>(v.size());
}

double sum_abs_pow(std::span<const double> v, double p) {
  std::vector<double> w(v.size());
  const double rounded = std::round(p);
  if (rounded == p && p >= 1.0 && p <= 16.0) {
    const int ip = static_cast<int>(rounded);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double a = std::abs(v[i]);
      double r = a;
      for (int k = 1; k < ip; ++k) r *= a;
      w[i] = r;
    }
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::pow(std::abs(v[i]), p);
  }
  return mean_of(w);
}

double max_abs_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// m * (sum of mean |x/m|^p)^{1/p}, m the largest magnitude. Scaling the data by a
// power of two scales the result by exactly the same factor.
double scaled_norm(std::span<const std::vector<double>> parts, double p) {
  double m = 0.0;
  for (const auto& v : parts) m = std::max(m, max_abs_of(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  std::vector<double> w;
  for (const auto& v : parts) {
    w.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] / m;
    s += sum_abs_pow(w, p);
  }
  return m * std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm(std::span<const double> physical, double p) {
  const std::vector<double> v(physical.begin(), physical.end());
  return scaled_norm(std::span<const std::vector<double>>(&v, 1), p);
}

double lp_norm(const SpectralField& f, double p) { return lp_norm(f.to_physical(), p); }

std::array<double, 4> component_lp_p(const State& u, double p) {
  std::array<double, 4> out{};
  for (int j = 0; j < 4; ++j) out[j] = sum_abs_pow(u.comp[j].to_physical(), p);
  return out;
}

double lp_norm(const State& u, double p) {
  const std::array<std::vector<double>, 4> v{u.comp[0].to_physical(), u.comp[1].to_physical(),
                                             u.comp[2].to_physical(), u.comp[3].to_physical()};
  return scaled_norm(v, p);
}

double hs_lp_norm(std::span<const SpectralField> family, double p) {
  if (family.empty()) return 0.0;
  std::vector<double> sq(family.front().grid().size(), 0.0);
  for (const auto& f : family) {
    const auto v = f.to_physical();
    for (std::size_t x = 0; x < sq.size(); ++x) sq[x] += v[x] * v[x];
  }
  for (auto& s : sq) s = std::pow(s, 0.5 * p);
  return std::pow(mean_of(sq), 1.0 / p);
}

Dissipation dissipation(const State& u, double p) {
  Dissipation d;
  const Grid& g = u.grid();
  for (int j = 0; j < 4; ++j) {
    const auto v = u.comp[j].to_physical();
    std::vector<double> w(v.size());
    for (std::size_t x = 0; x < v.size(); ++x) w[x] = std::pow(std::abs(v[x]), 0.5 * p);
    const auto gw = gradient(SpectralField::from_physical(g, w));
    const auto gv = gradient(u.comp[j]);
    std::vector<double> direct(v.size(), 0.0), ident(v.size(), 0.0);
    for (int a = 0; a < 3; ++a) {
      const auto gwa = gw[a].to_physical();
      const auto gva = gv[a].to_physical();
      for (std::size_t x = 0; x < v.size(); ++x) {
        direct[x] += gwa[x] * gwa[x];
        ident[x] += gva[x] * gva[x];
      }
    }
    for (std::size_t x = 0; x < v.size(); ++x) {
      ident[x] *= 0.25 * p * p * std::pow(std::abs(v[x]), p - 2.0);
    }
    d.direct += mean_of(direct);
    d.identity += mean_of(ident);
  }
  return d;
}

std::pair<double, double> poincare_ratio(const SpectralField& v, double p, double q) {
  const auto val = v.to_physical();
  double vmax = 0.0;
  for (double x : val) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0.0) throw std::invalid_argument("poincare_ratio: field is identically zero");

  const auto gv = gradient(v);
  std::array<std::vector<double>, 3> gphys;
  for (int a = 0; a < 3; ++a) gphys[a] = gv[a].to_physical();

  const std::size_t m = val.size();
  std::vector<double> w1(m), w2(m), grad_mag(m);
  for (std::size_t x = 0; x < m; ++x) {
    const double a = std::abs(val[x]);
    w1[x] = std::pow(a, p - 1.0);
    w2[x] = std::pow(a, p - 2.0) * val[x];
    const double gn = std::sqrt(gphys[0][x] * gphys[0][x] + gphys[1][x] * gphys[1][x] +
                                gphys[2][x] * gphys[2][x]);
    // |grad |v|^{p-1}| = |grad(|v|^{p-2} v)| = (p-1)|v|^{p-2}|grad v|
    grad_mag[x] = (p - 1.0) * std::pow(a, p - 2.0) * gn;
  }
  const double g = lp_norm(grad_mag, q);
  if (g == 0.0) throw std::invalid_argument("poincare_ratio: vanishing gradient");
  return {lp_norm(w1, q) / g, lp_norm(w2, q) / g};
}

EnergyRecord make_record(const State& u, double t, double p, double a) {
  EnergyRecord r;
  r.t = t;
  r.p = p;
  r.component_lp = component_lp_p(u, p);
  r.lp_p = r.component_lp[0] + r.component_lp[1] + r.component_lp[2] + r.component_lp[3];
  r.dissipation = dissipation(u, p).identity;
  r.weighted = std::exp(a * t) * r.lp_p;
  return r;
}

WeightedSummary weighted_energy(std::span<const EnergyRecord> history, double a) {
  WeightedSummary s;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& r = history[i];
    s.sup_weighted = std::max(s.sup_weighted, std::exp(a * r.t) * r.lp_p);
    if (i > 0) {
      const auto& q = history[i - 1];
      s.integral_weighted_dissipation +=
          0.5 * (r.t - q.t) * (std::exp(a * q.t) * q.dissipation + std::exp(a * r.t) * r.dissipation);
    }
  }
  return s;
}

double sup_lp_difference(std::span<const State> a, std::span<const State> b, double p) {
  const std::size_t n = std::min(a.size(), b.size());
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, lp_norm(a[k] - b[k], p));
  return m;
}

}  // namespace bsq
