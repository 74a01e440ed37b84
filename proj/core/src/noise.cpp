#include "bsq/noise.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bsq/diagnostics.hpp"
#include "bsq/error.hpp"
#include "bsq/operators.hpp"

namespace bsq {

std::vector<double> sample_increments(const WienerSpec& spec, std::uint64_t step_index) {
  if (!(spec.dt > 0.0)) throw std::invalid_argument("Wiener increments need dt > 0");
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(spec.seed), hi(spec.seed), lo(spec.path), hi(spec.path),
                    lo(step_index), hi(step_index)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(spec.dt));
  std::vector<double> dw(static_cast<std::size_t>(spec.dim_h));
  for (auto& x : dw) x = normal(engine);
  return dw;
}

std::vector<double> BrownianPath::increments(std::uint64_t step_index) const {
  if (coarsen == 1) return sample_increments(fine, step_index);
  std::vector<double> dw(static_cast<std::size_t>(fine.dim_h), 0.0);
  const auto c = static_cast<std::uint64_t>(coarsen);
  for (std::uint64_t s = 0; s < c; ++s) {
    const auto part = sample_increments(fine, step_index * c + s);
    for (std::size_t k = 0; k < dw.size(); ++k) dw[k] += part[k];
  }
  return dw;
}

double check_super_parabolic(const TransportCoefficients& b, const Grid& grid) {
  if (b.modes.empty()) return 1.0;
  std::vector<std::array<std::vector<double>, 3>> phys;
  for (const auto& mode : b.modes) {
    phys.push_back({mode[0].to_physical(), mode[1].to_physical(), mode[2].to_physical()});
  }
  double nu = 1.0;
  for (std::size_t x = 0; x < grid.size(); ++x) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    for (const auto& bn : phys) {
      const Eigen::Vector3d v(bn[0][x], bn[1][x], bn[2][x]);
      m -= 0.5 * v * v.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
    nu = std::min(nu, solver.eigenvalues().minCoeff());
  }
  return nu;
}

double compute_nbk(const TransportCoefficients& b, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("compute_nbk: k must be 0, 1 or 2");
  // Multi-indices of order <= k.
  std::vector<std::array<int, 3>> alphas{{0, 0, 0}};
  if (k >= 1) alphas.insert(alphas.end(), {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  if (k >= 2) {
    alphas.insert(alphas.end(),
                  {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  }
  double total = 0.0;
  for (const auto& mode : b.modes) {
    for (const auto& alpha : alphas) {
      std::vector<double> mag2(mode[0].grid().size(), 0.0);
      for (int c = 0; c < 3; ++c) {
        SpectralField f = mode[c];
        for (int axis = 0; axis < 3; ++axis) {
          for (int r = 0; r < alpha[axis]; ++r) f = gradient(f)[axis];
        }
        const auto v = f.to_physical();
        for (std::size_t x = 0; x < v.size(); ++x) mag2[x] += v[x] * v[x];
      }
      const double sup = std::sqrt(*std::max_element(mag2.begin(), mag2.end()));
      total += sup * sup;
    }
  }
  return total;
}

double local_threshold(double p, double c_bdg) {
  if (!(p > 2.0)) throw std::invalid_argument("local_threshold requires p > 2");
  return (p - 1.0) / (2.0 * (p - 1.0) + p * c_bdg * c_bdg);
}

std::vector<double> transport_divergence(const TransportCoefficients& b) {
  std::vector<double> out;
  out.reserve(b.modes.size());
  for (const auto& mode : b.modes) out.push_back(divergence_sup(mode));
  return out;
}

std::string to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::zero: return "zero";
    case SigmaKind::diagonal_linear: return "diagonal_linear";
    case SigmaKind::affine: return "affine";
  }
  return "zero";
}

SigmaKind sigma_kind_from_string(const std::string& name) {
  if (name == "zero") return SigmaKind::zero;
  if (name == "diagonal_linear" || name == "diagonal-linear") return SigmaKind::diagonal_linear;
  if (name == "affine") return SigmaKind::affine;
  throw std::invalid_argument("unknown sigma kind '" + name + "'");
}

State affine_profile(const Grid& grid) {
  const int n = grid.n();
  std::vector<double> u3(grid.size()), rho(grid.size());
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        const std::size_t f = grid.flat(i1, i2, i3);
        u3[f] = std::sin(2.0 * std::numbers::pi * i1 / n);
        rho[f] = std::cos(2.0 * std::numbers::pi * i2 / n);
      }
    }
  }
  State s(grid);
  s.comp[2] = SpectralField::from_physical(grid, u3);
  s.comp[3] = SpectralField::from_physical(grid, rho);
  for (auto& c : s.comp) c.zero_mean();
  return s;
}

namespace {

// Common profile of every sigma_n before the weight w_n.
State sigma_shape(const SigmaSpec& spec, const State& u) {
  const Grid& g = u.grid();
  State base = spec.eps0 * u;
  if (spec.kind == SigmaKind::affine && spec.c_affine != 0.0) {
    base.axpy(spec.c_affine, affine_profile(g));
  }
  auto projected = leray_project(base.velocity());
  State shaped(std::move(projected), base.comp[3]);
  for (auto& c : shaped.comp) c.zero_mean();
  return shaped;
}

}  // namespace

std::vector<State> apply_sigma(const SigmaSpec& spec, const State& u) {
  const Grid& g = u.grid();
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(spec.dim_h));
  if (spec.kind == SigmaKind::zero) {
    for (int n = 0; n < spec.dim_h; ++n) out.emplace_back(g);
    return out;
  }
  const double w = 1.0 / std::sqrt(static_cast<double>(spec.dim_h));
  const State shaped = sigma_shape(spec, u);
  for (int n = 0; n < spec.dim_h; ++n) out.push_back(w * shaped);
  return out;
}

State apply_sigma_increment(const SigmaSpec& spec, const State& u, std::span<const double> dw) {
  if (static_cast<int>(dw.size()) != spec.dim_h) {
    throw std::invalid_argument("increment count does not match dim_h");
  }
  if (spec.kind == SigmaKind::zero) return State(u.grid());
  double s = 0.0;
  for (double x : dw) s += x;
  return (s / std::sqrt(static_cast<double>(spec.dim_h))) * sigma_shape(spec, u);
}

SigmaConstants sigma_constants(const SigmaSpec& spec, const Grid& grid, double p) {
  if (spec.kind == SigmaKind::zero) return {};
  // sum_j ||U_j||_p <= 4^{1-1/p} ||U||_p under the component-sum convention.
  const double holder = std::pow(4.0, 1.0 - 1.0 / p);
  SigmaConstants c{spec.eps0 * holder, spec.eps0 * holder};
  if (spec.kind == SigmaKind::affine) {
    const State f = affine_profile(grid);
    double fsum = 0.0;
    for (const auto& comp : f.comp) fsum += lp_norm(comp, p);
    c.growth = std::max(c.growth, spec.c_affine * fsum);
  }
  return c;
}

AssumptionReport assess_assumptions(const TransportCoefficients& b, const SigmaSpec& sigma,
                                    const Grid& grid, double p, double c_bdg,
                                    const Smallness& smallness, double divergence_tolerance) {
  AssumptionReport r;
  r.p = p;
  r.c_bdg = c_bdg;
  r.smallness = smallness;
  r.eps0 = sigma.kind == SigmaKind::zero ? 0.0 : sigma.eps0;
  r.sigma_kind = sigma.kind;
  r.sigma = sigma_constants(sigma, grid, p);
  for (int k = 0; k < 3; ++k) r.n_b[k] = compute_nbk(b, k);
  r.nu = check_super_parabolic(b, grid);
  r.threshold_local = local_threshold(p, c_bdg);
  r.pass_local = r.n_b[0] < r.threshold_local;
  r.parabolic_ok = r.nu > 0.0;

  r.divergence = transport_divergence(b);
  r.solenoidal_ok = true;
  const double scale = std::max(1.0, std::sqrt(r.n_b[1]));
  for (std::size_t n = 0; n < r.divergence.size(); ++n) {
    if (r.divergence[n] > divergence_tolerance * scale) {
      r.solenoidal_ok = false;
      std::ostringstream msg;
      msg << "transport mode " << n << " is not divergence-free (max |div b_" << n
          << "| = " << r.divergence[n] << ")";
      r.failures.push_back(msg.str());
    }
  }
  if (!r.parabolic_ok) {
    std::ostringstream msg;
    msg << "super-parabolic condition violated: nu = " << r.nu;
    r.failures.push_back(msg.str());
  }
  if (!r.pass_local) {
    std::ostringstream msg;
    msg << "N_b0 = " << r.n_b[0] << " is not below the local threshold " << r.threshold_local
        << " (p = " << p << ", C_BDG = " << c_bdg << ")";
    r.failures.push_back(msg.str());
  }
  // N_b2 is compared with a 1e-12 relative allowance so that coefficients
  // rescaled onto the limit are not rejected by roundoff.
  const bool small = r.n_b[2] <= smallness.nb2 * (1.0 + 1e-12) && r.eps0 <= smallness.eps0 &&
                     !(sigma.kind == SigmaKind::affine && sigma.c_affine != 0.0);
  r.pass_global = small && r.pass_local && r.parabolic_ok && r.solenoidal_ok;
  return r;
}

NoiseModel::NoiseModel(const Grid& grid, int dim_h, TransportCoefficients transport,
                       SigmaSpec sigma)
    : grid_(grid), dim_h_(dim_h), transport_(std::move(transport)), sigma_(sigma) {
  if (dim_h <= 0) throw std::invalid_argument("dim_h must be positive");
  if (!transport_.modes.empty() && static_cast<int>(transport_.modes.size()) != dim_h) {
    throw std::invalid_argument("transport mode count must equal dim_h");
  }
  sigma_.dim_h = dim_h;
  for (const auto& mode : transport_.modes) {
    for (const auto& c : mode) require_same_grid(grid, c.grid(), "noise model");
    physical_b_.push_back({mode[0].to_physical(), mode[1].to_physical(), mode[2].to_physical()});
  }
}

}  // namespace bsq
