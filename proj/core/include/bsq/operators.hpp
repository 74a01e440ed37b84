#pragma once

#include "bsq/spectral_field.hpp"

namespace bsq {

// Differential operators use the multiplier 2 pi i n_j. The derivative
// multiplier vanishes on the Nyquist index so real fields stay real.

VectorField gradient(const SpectralField& f);
SpectralField divergence(VectorView v);
SpectralField laplacian(const SpectralField& f);

/// Multiplier -1/(4 pi^2 |n|^2); the zero mode stays zero.
/// Throws SpectralError if the mean exceeds mean_tolerance * max(1, max|coeff|).
SpectralField inv_laplacian(const SpectralField& f, double mean_tolerance = 1e-12);

/// Leray projector, the multiplier I - n n^T / |n|^2 applied modewise.
/// The zero mode passes through unchanged.
VectorField leray_project(VectorView f);

/// b . grad f formed in physical space and dealiased.
SpectralField advect(VectorView b, const SpectralField& f);
/// Componentwise b . grad u.
VectorField advect(VectorView b, VectorView u);

/// Gradient part of b . grad u for solenoidal u, evaluated as
/// grad Delta^-1 sum_{k,l} (d_k b^l)(d_l u_k). Throws SpectralError when u
/// is not divergence-free to `div_tolerance` (relative).
VectorField q_operator(VectorView b, VectorView u, double div_tolerance = 1e-10);
/// Four-slot version acting on a state; the rho slot is identically zero.
State q_operator(VectorView b, const State& u, double div_tolerance = 1e-10);

/// Convolution with the Gaussian mollifier: multiplier exp(-eps^2 |n|^2 / 2).
/// eps == 0 is the identity; eps < 0 throws std::invalid_argument.
SpectralField mollify(const SpectralField& f, double eps);
State mollify(const State& u, double eps);

/// max_n |n . u^(n)| / max_n |n| |u^(n)|; zero for the zero field.
double divergence_residual(VectorView u) noexcept;

/// max_x |div u(x)| on the lattice.
double divergence_sup(VectorView u);

}  // namespace bsq
