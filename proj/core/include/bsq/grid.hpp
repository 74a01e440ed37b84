#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bsq {

/// Uniform N^3 lattice on [0,1)^3 together with its Fourier index set.
///
/// Storage order is row-major over (i1, i2, i3), i3 fastest. Index i maps to
/// wavenumber i for i <= N/2 and i - N otherwise, so the resolved set is
/// {-N/2+1, ..., N/2}^3. The physical point for (i1, i2, i3) is x = i/N.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n, double dealias_fraction = 2.0 / 3.0);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] double dealias_fraction() const noexcept { return dealias_fraction_; }
  [[nodiscard]] bool valid() const noexcept { return n_ > 0; }

  /// Largest |n_i| kept by the dealiasing mask (strictly below N/2).
  [[nodiscard]] int dealias_cutoff() const noexcept { return cutoff_; }

  [[nodiscard]] int wavenumber(int index) const noexcept {
    return index <= n_ / 2 ? index : index - n_;
  }
  [[nodiscard]] int index_of(int wavenumber) const noexcept {
    return wavenumber >= 0 ? wavenumber : wavenumber + n_;
  }
  [[nodiscard]] std::size_t flat(int i1, int i2, int i3) const noexcept {
    return (static_cast<std::size_t>(i1) * n_ + i2) * n_ + i3;
  }
  /// Flat index of the coefficient with wavevector k (components in range).
  [[nodiscard]] std::size_t flat_of_wavevector(const std::array<int, 3>& k) const noexcept {
    return flat(index_of(k[0]), index_of(k[1]), index_of(k[2]));
  }
  [[nodiscard]] std::array<int, 3> wavevector(std::size_t flat) const noexcept;

  /// |n|^2 per flat index.
  [[nodiscard]] std::span<const double> k2() const noexcept;
  /// n_axis per flat index, and the same with the Nyquist index mapped to 0.
  [[nodiscard]] std::span<const double> wavenumbers(int axis) const noexcept;
  [[nodiscard]] std::span<const double> derivative_wavenumbers(int axis) const noexcept;
  /// Flat index of -n, used for Hermitian symmetry.
  [[nodiscard]] std::span<const std::size_t> conjugate_index() const noexcept;
  /// 1 where all |n_i| <= dealias_cutoff(), 0 elsewhere.
  [[nodiscard]] std::span<const unsigned char> dealias_mask() const noexcept;
  /// 1 where some component equals N/2.
  [[nodiscard]] std::span<const unsigned char> nyquist_mask() const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.dealias_fraction_ == b.dealias_fraction_;
  }

 private:
  struct Tables;
  int n_ = 0;
  std::size_t size_ = 0;
  double dealias_fraction_ = 2.0 / 3.0;
  int cutoff_ = 0;
  std::shared_ptr<const Tables> tables_;
};

/// Throws SpectralError when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace bsq
