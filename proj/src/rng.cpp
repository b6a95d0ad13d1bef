#include "opg/rng.hpp"

namespace opg {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : state_) w = splitmix64(x);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t run_index) {
  std::uint64_t x = run_index;
  const std::uint64_t mixed = splitmix64(x);
  return Rng(master_seed ^ mixed);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::size_t Rng::sample(const SimplexPolicy& p) {
  const double u = next_double();
  double acc = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    acc += p[y];
    if (u < acc) return y;
  }
  // Rounding pushed the cumulative total below u; fall back to the last arm
  // carrying mass.
  for (std::size_t y = p.size(); y-- > 0;) {
    if (p[y] > 0.0) return y;
  }
  return p.size() - 1;
}

}  // namespace opg
