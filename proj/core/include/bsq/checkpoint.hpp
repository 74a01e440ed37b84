#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bsq/spectral_field.hpp"

namespace bsq {

/// Binary field checkpoint.
///
/// Layout (all little-endian):
///   char[4]  magic "BSQ1"
///   uint32   N
///   uint32   component count
///   float64  time
///   uint64   seed
/// followed, per component, by (re, im) float64 pairs for every wavevector
/// (n1, n2, n3) in row-major order with each n_i running -N/2+1 .. N/2.
struct Checkpoint {
  Grid grid;
  double time = 0.0;
  std::uint64_t seed = 0;
  std::vector<SpectralField> components;
};

void write_checkpoint(std::ostream& out, const Checkpoint& cp);
Checkpoint read_checkpoint(std::istream& in, double dealias_fraction = 2.0 / 3.0);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path, double dealias_fraction = 2.0 / 3.0);

Checkpoint make_checkpoint(const State& u, double time, std::uint64_t seed);
State state_from_checkpoint(const Checkpoint& cp);

}  // namespace bsq
