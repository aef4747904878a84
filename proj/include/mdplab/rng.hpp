#pragma once

#include <cstdint>
#include <random>

namespace mdplab {

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream seed for (master, replication, stream).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t stream = 0);

// mt19937_64 with fixed, library-independent conversions to uniforms and
// normals so that results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double normal();
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mdplab
