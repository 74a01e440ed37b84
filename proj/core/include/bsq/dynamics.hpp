#pragma once

#include <vector>

#include "bsq/noise.hpp"
#include "bsq/spectral_field.hpp"

namespace bsq {

/// Smooth decreasing cutoff: 1 on [0, delta0/2], 0 on [delta0, inf), quintic
/// smoothstep in between.
struct Cutoff {
  double delta0 = 1e9;
};

/// phi(x) for x >= 0; throws std::invalid_argument for negative x.
double eval_phi(const Cutoff& c, double x);

/// Sharp Lipschitz constant of phi, 15 / (4 delta0).
double cutoff_lipschitz(const Cutoff& c) noexcept;

/// Which system is being advanced and with which L^p exponent.
struct SystemSpec {
  double p = 6.0;
  Cutoff cutoff{};
  bool truncated = false;
  bool convection = true;
  bool buoyancy = true;
};

struct DriftParts {
  State laplacian;   ///< A U = (Delta u, Delta rho)
  State convection;  ///< B(U) = -P(u . grad U)
  State buoyancy;    ///< G(U) = P(rho e3, 0)
};

/// Throws InvalidState unless u is divergence-free and every component is
/// mean-zero, both relative to `tolerance`.
void validate_state(const State& u, double tolerance = 1e-10);

DriftParts drift(const State& u);
State convection(const State& u);
State buoyancy(const State& u);

/// P(b_n . grad U) for every noise mode (empty list when b = 0).
std::vector<State> transport_noise(const State& u, const NoiseModel& noise);

/// Per mode P(b_n . grad U) + gamma sigma_n(U), gamma = phi(||U||_p)^2 when
/// truncated and 1 otherwise.
std::vector<State> diffusion(const State& u, const NoiseModel& noise, const SystemSpec& sys);

/// Everything one explicit step needs, evaluated at a single state.
struct SystemTerms {
  double norm = 0.0;   ///< ||U||_p
  double gamma = 1.0;  ///< cutoff factor applied to B and sigma
  State drift;         ///< gamma B(U) + G(U); the Laplacian is left to the integrator
  std::vector<State> diffusion;
};

/// Unvalidated fast path used inside time stepping: shares the lattice
/// gradients of U between convection and transport products.
SystemTerms evaluate_system(const State& u, const NoiseModel& noise, const SystemSpec& sys);

struct SystemIncrement {
  double norm = 0.0;
  double gamma = 1.0;
  State drift;
  State noise;  ///< sum_n diffusion_n dW_n
};

/// evaluate_system with the diffusion contracted against dw. The transport
/// part is a single product with sum_n b_n dW_n.
SystemIncrement evaluate_increment(const State& u, const NoiseModel& noise, const SystemSpec& sys,
                                   std::span<const double> dw);

/// sum_n P(b_n . grad U) dW_n, unvalidated.
State transport_increment(const State& u, const NoiseModel& noise, std::span<const double> dw);

}  // namespace bsq
