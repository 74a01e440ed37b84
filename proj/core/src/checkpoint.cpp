#include "bsq/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "bsq/error.hpp"

namespace bsq {
namespace {

constexpr char kMagic[4] = {'B', 'S', 'Q', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw Error("checkpoint truncated");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  const int n = cp.grid.n();
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cp.components.size()));
  put_le<double>(out, cp.time);
  put_le<std::uint64_t>(out, cp.seed);
  for (const auto& field : cp.components) {
    require_same_grid(cp.grid, field.grid(), "checkpoint");
    for (int k1 = -n / 2 + 1; k1 <= n / 2; ++k1) {
      for (int k2 = -n / 2 + 1; k2 <= n / 2; ++k2) {
        for (int k3 = -n / 2 + 1; k3 <= n / 2; ++k3) {
          const Complex c = field.at({k1, k2, k3});
          put_le<double>(out, c.real());
          put_le<double>(out, c.imag());
        }
      }
    }
  }
  if (!out) throw Error("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in, double dealias_fraction) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("not a BSQ1 checkpoint");
  Checkpoint cp;
  const auto n = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint32_t>(in);
  cp.grid = Grid(static_cast<int>(n), dealias_fraction);
  cp.time = get_le<double>(in);
  cp.seed = get_le<std::uint64_t>(in);
  const int h = static_cast<int>(n) / 2;
  for (std::uint32_t c = 0; c < count; ++c) {
    SpectralField field(cp.grid);
    for (int k1 = -h + 1; k1 <= h; ++k1) {
      for (int k2 = -h + 1; k2 <= h; ++k2) {
        for (int k3 = -h + 1; k3 <= h; ++k3) {
          const double re = get_le<double>(in);
          const double im = get_le<double>(in);
          field.at({k1, k2, k3}) = Complex(re, im);
        }
      }
    }
    cp.components.push_back(std::move(field));
  }
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string());
  write_checkpoint(out, cp);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, double dealias_fraction) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in, dealias_fraction);
}

Checkpoint make_checkpoint(const State& u, double time, std::uint64_t seed) {
  Checkpoint cp{u.grid(), time, seed, {}};
  cp.components.assign(u.comp.begin(), u.comp.end());
  return cp;
}

State state_from_checkpoint(const Checkpoint& cp) {
  if (cp.components.size() != 4) throw Error("state checkpoint must hold 4 components");
  State s;
  for (int j = 0; j < 4; ++j) s.comp[j] = cp.components[j];
  return s;
}

}  // namespace bsq
