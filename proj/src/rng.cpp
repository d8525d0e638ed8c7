#include "mrtc/rng.hpp"

#include <limits>
#include <stdexcept>

namespace mrtc {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - bound + 1;
  for (;;) {
    const std::uint64_t x = gen_();
    const std::uint64_t r = x % bound;
    if (x - r <= limit) return r;
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t step) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + step);
}

}  // namespace mrtc
