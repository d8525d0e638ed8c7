#pragma once

#include <cstdint>
#include <random>

namespace mrtc {

// Deterministic random stream. mt19937_64 output is pinned by the C++
// standard; the uniform mappings below avoid std::uniform_real_distribution,
// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on [-1, 1).
  double symmetric() { return 2.0 * unit() - 1.0; }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps the
  // draw unbiased and reproducible.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 gen_;
};

// Stable seed for a named substream of a master seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t step = 0);

}  // namespace mrtc
