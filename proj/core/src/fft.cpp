#include "bsq/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bsq {
namespace {

struct Plans {
  fftw_plan forward = nullptr;   // r2c
  fftw_plan backward = nullptr;  // c2r
};

// FFTW's planner is not reentrant; executing an existing plan on new arrays is.
Plans plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t real_size = static_cast<std::size_t>(n) * n * n;
  const std::size_t half_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  auto* r = fftw_alloc_real(real_size);
  auto* c = fftw_alloc_complex(half_size);
  Plans p;
  p.forward = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(r);
  fftw_free(c);
  cache.emplace(n, p);
  return p;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<Complex> forward_transform(const Grid& grid, std::span<const double> physical) {
  const int n = grid.n();
  const int h = n / 2 + 1;
  const Plans p = plans_for(n);
  std::vector<double> in(physical.begin(), physical.end());
  std::vector<Complex> half(static_cast<std::size_t>(n) * n * h);
  fftw_execute_dft_r2c(p.forward, in.data(), as_fftw(half.data()));

  const double scale = 1.0 / static_cast<double>(grid.size());
  std::vector<Complex> out(grid.size());
  for (int i1 = 0; i1 < n; ++i1) {
    const int j1 = (n - i1) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int j2 = (n - i2) % n;
      const Complex* row = half.data() + (static_cast<std::size_t>(i1) * n + i2) * h;
      const Complex* mirror = half.data() + (static_cast<std::size_t>(j1) * n + j2) * h;
      Complex* dst = out.data() + grid.flat(i1, i2, 0);
      for (int i3 = 0; i3 < h; ++i3) dst[i3] = row[i3] * scale;
      for (int i3 = h; i3 < n; ++i3) dst[i3] = std::conj(mirror[n - i3]) * scale;
    }
  }
  return out;
}

std::vector<double> inverse_transform(const Grid& grid, std::span<const Complex> coeffs) {
  const int n = grid.n();
  const int h = n / 2 + 1;
  const Plans p = plans_for(n);
  std::vector<Complex> half(static_cast<std::size_t>(n) * n * h);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const Complex* src = coeffs.data() + grid.flat(i1, i2, 0);
      Complex* dst = half.data() + (static_cast<std::size_t>(i1) * n + i2) * h;
      for (int i3 = 0; i3 < h; ++i3) dst[i3] = src[i3];
    }
  }
  std::vector<double> values(grid.size());
  fftw_execute_dft_c2r(p.backward, as_fftw(half.data()), values.data());
  return values;
}

}  // namespace bsq
