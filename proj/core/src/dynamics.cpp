#include "bsq/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsq/diagnostics.hpp"
#include "bsq/error.hpp"
#include "bsq/operators.hpp"

namespace bsq {
namespace {

// Lattice values of U_j and of its gradient.
struct Lattice {
  std::array<std::vector<double>, 4> value;
  std::array<std::array<std::vector<double>, 3>, 4> grad;
};

Lattice lattice_of(const State& u) {
  Lattice l;
  for (int j = 0; j < 4; ++j) {
    l.value[j] = u.comp[j].to_physical();
    const auto g = gradient(u.comp[j]);
    for (int a = 0; a < 3; ++a) l.grad[j][a] = g[a].to_physical();
  }
  return l;
}

// w . grad U_j for all four components, dealiased; velocity slots projected.
State advect_lattice(const Grid& grid, const std::array<const std::vector<double>*, 3>& w,
                     const Lattice& l) {
  State out;
  std::vector<double> prod(grid.size());
  for (int j = 0; j < 4; ++j) {
    for (std::size_t x = 0; x < prod.size(); ++x) {
      prod[x] = (*w[0])[x] * l.grad[j][0][x] + (*w[1])[x] * l.grad[j][1][x] +
                (*w[2])[x] * l.grad[j][2][x];
    }
    out.comp[j] = SpectralField::from_physical(grid, prod);
    out.comp[j].dealias();
  }
  auto projected = leray_project(out.velocity());
  for (int a = 0; a < 3; ++a) out.comp[a] = std::move(projected[a]);
  for (auto& c : out.comp) c.zero_mean();
  return out;
}

State convection_lattice(const Grid& grid, const Lattice& l) {
  State b = advect_lattice(grid, {&l.value[0], &l.value[1], &l.value[2]}, l);
  b *= -1.0;
  return b;
}

std::vector<State> transport_lattice(const Grid& grid, const NoiseModel& noise,
                                     const Lattice& l) {
  std::vector<State> out;
  out.reserve(noise.physical_b().size());
  for (const auto& bn : noise.physical_b()) {
    out.push_back(advect_lattice(grid, {&bn[0], &bn[1], &bn[2]}, l));
  }
  return out;
}

std::array<std::vector<double>, 3> contracted_b(const NoiseModel& noise,
                                               std::span<const double> dw) {
  std::array<std::vector<double>, 3> b;
  const auto& modes = noise.physical_b();
  if (dw.size() != modes.size()) {
    throw std::invalid_argument("increment count does not match the number of noise modes");
  }
  for (auto& c : b) c.assign(noise.grid().size(), 0.0);
  for (std::size_t n = 0; n < modes.size(); ++n) {
    for (int a = 0; a < 3; ++a) {
      const auto& src = modes[n][a];
      auto& dst = b[a];
      for (std::size_t x = 0; x < dst.size(); ++x) dst[x] += dw[n] * src[x];
    }
  }
  return b;
}

double norm_from_lattice(const Lattice& l, double p) {
  double s = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double c = lp_norm(l.value[j], p);
    s += std::pow(c, p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace

double eval_phi(const Cutoff& c, double x) {
  if (x < 0.0) throw std::invalid_argument("cutoff argument must be nonnegative");
  const double half = 0.5 * c.delta0;
  if (x <= half) return 1.0;
  if (x >= c.delta0) return 0.0;
  const double s = (x - half) / half;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double cutoff_lipschitz(const Cutoff& c) noexcept { return 15.0 / (4.0 * c.delta0); }

void validate_state(const State& u, double tolerance) {
  for (int j = 1; j < 4; ++j) require_same_grid(u.comp[0].grid(), u.comp[j].grid(), "state");
  const double res = divergence_residual(u.velocity());
  if (res > tolerance) {
    std::ostringstream msg;
    msg << "velocity is not divergence-free (relative residual " << res << ")";
    throw InvalidState(msg.str());
  }
  for (int j = 0; j < 4; ++j) {
    const double m = std::abs(u.comp[j].mean());
    if (m > tolerance * u.comp[j].max_abs()) {
      std::ostringstream msg;
      msg << "component " << j << " has nonzero mean " << m;
      throw InvalidState(msg.str());
    }
  }
}

State convection(const State& u) {
  validate_state(u);
  return convection_lattice(u.grid(), lattice_of(u));
}

State buoyancy(const State& u) {
  const Grid& g = u.grid();
  VectorField f{SpectralField(g), SpectralField(g), u.comp[3]};
  return State(leray_project(f), SpectralField(g));
}

DriftParts drift(const State& u) {
  validate_state(u);
  DriftParts d;
  d.laplacian = State();
  for (int j = 0; j < 4; ++j) d.laplacian.comp[j] = laplacian(u.comp[j]);
  d.convection = convection_lattice(u.grid(), lattice_of(u));
  d.buoyancy = buoyancy(u);
  return d;
}

std::vector<State> transport_noise(const State& u, const NoiseModel& noise) {
  validate_state(u);
  require_same_grid(u.grid(), noise.grid(), "transport_noise");
  return transport_lattice(u.grid(), noise, lattice_of(u));
}

std::vector<State> diffusion(const State& u, const NoiseModel& noise, const SystemSpec& sys) {
  validate_state(u);
  return evaluate_system(u, noise, sys).diffusion;
}

SystemTerms evaluate_system(const State& u, const NoiseModel& noise, const SystemSpec& sys) {
  const Grid& g = u.grid();
  const Lattice l = lattice_of(u);
  SystemTerms t;
  t.norm = norm_from_lattice(l, sys.p);
  if (sys.truncated) {
    const double phi = eval_phi(sys.cutoff, t.norm);
    t.gamma = phi * phi;
  }

  t.drift = State(g);
  if (sys.convection) t.drift.axpy(t.gamma, convection_lattice(g, l));
  if (sys.buoyancy) t.drift += buoyancy(u);

  const auto dim = static_cast<std::size_t>(noise.dim_h());
  t.diffusion = noise.has_transport() ? transport_lattice(g, noise, l) : std::vector<State>{};
  if (t.diffusion.empty()) t.diffusion.assign(dim, State(g));
  if (noise.sigma().kind != SigmaKind::zero) {
    const auto s = apply_sigma(noise.sigma(), u);
    for (std::size_t n = 0; n < dim; ++n) t.diffusion[n].axpy(t.gamma, s[n]);
  }
  return t;
}

SystemIncrement evaluate_increment(const State& u, const NoiseModel& noise, const SystemSpec& sys,
                                   std::span<const double> dw) {
  if (static_cast<int>(dw.size()) != noise.dim_h()) {
    throw std::invalid_argument("increment count does not match dim_h");
  }
  const Grid& g = u.grid();
  const Lattice l = lattice_of(u);
  SystemIncrement t;
  t.norm = norm_from_lattice(l, sys.p);
  if (sys.truncated) {
    const double phi = eval_phi(sys.cutoff, t.norm);
    t.gamma = phi * phi;
  }
  t.drift = State(g);
  if (sys.convection) t.drift.axpy(t.gamma, convection_lattice(g, l));
  if (sys.buoyancy) t.drift += buoyancy(u);

  if (noise.has_transport()) {
    const auto b = contracted_b(noise, dw);
    t.noise = advect_lattice(g, {&b[0], &b[1], &b[2]}, l);
  } else {
    t.noise = State(g);
  }
  if (noise.sigma().kind != SigmaKind::zero) {
    t.noise.axpy(t.gamma, apply_sigma_increment(noise.sigma(), u, dw));
  }
  return t;
}

State transport_increment(const State& u, const NoiseModel& noise, std::span<const double> dw) {
  if (!noise.has_transport()) return State(u.grid());
  const auto b = contracted_b(noise, dw);
  return advect_lattice(u.grid(), {&b[0], &b[1], &b[2]}, lattice_of(u));
}

}  // namespace bsq
