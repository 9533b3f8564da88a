#pragma once

#include <cstdint>
#include <random>

namespace rdsa {

// Deterministic random stream: a (seed, stream) pair always yields the same
// sequence on every platform. The generator is std::mt19937_64, whose output
// sequence is fixed by the standard; uniform01 and gaussian avoid the
// std::*_distribution adapters because their algorithms are
// implementation-defined and would break cross-run reproducibility of
// emitted result files.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return gen_(); }

  // 53-bit uniform in [0, 1).
  double uniform01();

  // Standard normal via Box-Muller. Stateless between calls (the second
  // variate of each pair is not cached), so the mapping from generator
  // state to output is one-to-one and order-independent bugs cannot hide.
  double gaussian();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // SplitMix64 finalizer, exposed for stream derivation and tests.
  static std::uint64_t splitmix64(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 gen_;
};

}  // namespace rdsa
