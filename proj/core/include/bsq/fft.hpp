#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bsq/grid.hpp"

namespace bsq {

using Complex = std::complex<double>;

/// Fourier coefficients f^(n) = N^-3 sum_x f(x) exp(-2 pi i n.x).
/// Plans are cached per grid size; execution is thread-safe.
std::vector<Complex> forward_transform(const Grid& grid, std::span<const double> physical);

/// Inverse of forward_transform for Hermitian coefficients. Only the half
/// spectrum i3 <= N/2 is read; the rest is implied by symmetry.
std::vector<double> inverse_transform(const Grid& grid, std::span<const Complex> coeffs);

}  // namespace bsq
