#pragma once

#include <cmath>
#include <cstdint>

namespace twostation {

// Splittable 64-bit generator (splitmix64). Substreams for parallel
// replications are derived by hashing (master seed, stream index), so any
// subset of runs can be reproduced without generating the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Seed of the index-th substream of a master seed.
  static std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return mix(master + 0x9E3779B97F4A7C15ULL * (index + 1));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on the open interval (0,1); endpoints are never returned.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential(double rate) { return -std::log(next_unit()) / rate; }

  bool next_bernoulli(double p) { return next_unit() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace twostation
