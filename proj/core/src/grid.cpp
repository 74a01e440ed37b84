#include "bsq/grid.hpp"

#include <cmath>
#include <string>

#include "bsq/error.hpp"

namespace bsq {

struct Grid::Tables {
  std::vector<double> k2;
  std::vector<std::size_t> conj;
  std::vector<unsigned char> dealias;
  std::vector<unsigned char> nyquist;
  std::array<std::vector<double>, 3> k;
  std::array<std::vector<double>, 3> dk;
};

Grid::Grid(int n, double dealias_fraction) : n_(n), dealias_fraction_(dealias_fraction) {
  if (n < 4 || n % 2 != 0) {
    throw SpectralError("grid size must be even and >= 4, got " + std::to_string(n));
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw SpectralError("dealias fraction must lie in (0, 1]");
  }
  size_ = static_cast<std::size_t>(n) * n * n;
  // The small offset keeps fractions such as 2/3 * 12 / 2 = 4 exact.
  cutoff_ = static_cast<int>(std::floor(dealias_fraction * n / 2.0 + 1e-9));
  if (cutoff_ >= n / 2) cutoff_ = n / 2 - 1;

  auto t = std::make_shared<Tables>();
  t->k2.resize(size_);
  t->conj.resize(size_);
  t->dealias.resize(size_);
  t->nyquist.resize(size_);
  for (int a = 0; a < 3; ++a) {
    t->k[a].resize(size_);
    t->dk[a].resize(size_);
  }
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      for (int i3 = 0; i3 < n; ++i3) {
        const std::size_t f = flat(i1, i2, i3);
        const int k1 = wavenumber(i1), k2v = wavenumber(i2), k3 = wavenumber(i3);
        t->k2[f] = static_cast<double>(k1 * k1 + k2v * k2v + k3 * k3);
        t->conj[f] = flat((n - i1) % n, (n - i2) % n, (n - i3) % n);
        const bool nyq = i1 == n / 2 || i2 == n / 2 || i3 == n / 2;
        t->nyquist[f] = nyq ? 1 : 0;
        const std::array<int, 3> idx{i1, i2, i3};
        const std::array<int, 3> kv{k1, k2v, k3};
        for (int a = 0; a < 3; ++a) {
          t->k[a][f] = static_cast<double>(kv[a]);
          t->dk[a][f] = idx[a] == n / 2 ? 0.0 : static_cast<double>(kv[a]);
        }
        t->dealias[f] = (std::abs(k1) <= cutoff_ && std::abs(k2v) <= cutoff_ &&
                         std::abs(k3) <= cutoff_)
                            ? 1
                            : 0;
      }
    }
  }
  tables_ = std::move(t);
}

std::array<int, 3> Grid::wavevector(std::size_t f) const noexcept {
  const auto nn = static_cast<std::size_t>(n_);
  const int i3 = static_cast<int>(f % nn);
  const int i2 = static_cast<int>((f / nn) % nn);
  const int i1 = static_cast<int>(f / (nn * nn));
  return {wavenumber(i1), wavenumber(i2), wavenumber(i3)};
}

std::span<const double> Grid::k2() const noexcept { return tables_->k2; }
std::span<const double> Grid::wavenumbers(int axis) const noexcept { return tables_->k[axis]; }
std::span<const double> Grid::derivative_wavenumbers(int axis) const noexcept {
  return tables_->dk[axis];
}
std::span<const std::size_t> Grid::conjugate_index() const noexcept { return tables_->conj; }
std::span<const unsigned char> Grid::dealias_mask() const noexcept { return tables_->dealias; }
std::span<const unsigned char> Grid::nyquist_mask() const noexcept { return tables_->nyquist; }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw SpectralError(std::string("grid mismatch in ") + what);
  }
}

}  // namespace bsq
