#include "rdsa/random.hpp"

#include <cmath>

namespace rdsa {

std::uint64_t RandomStream::splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Mix seed and stream index through two finalizer rounds so that
  // neighbouring (seed, stream) pairs land far apart in state space.
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x1ULL));
  gen_.seed(s);
}

double RandomStream::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  // Box-Muller, cosine branch. u1 is bounded away from zero so the log is
  // finite.
  double u1;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

}  // namespace rdsa
