#pragma once

#include <array>
#include <cstdint>

#include "opg/types.hpp"

namespace opg {

// Deterministic, splittable generator (xoshiro256++ seeded through
// SplitMix64). Every run derives its own stream from (master seed, run
// index), so sweep results do not depend on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t master_seed, std::uint64_t run_index);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double next_double();

  double uniform(double lo, double hi);

  // Inverse-CDF draw; deterministic linear scan.
  std::size_t sample(const SimplexPolicy& p);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace opg
