#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace mpmab {

// splitmix64 finalizer. Full-period 64-bit mixer; the basis for seed
// derivation and generator state initialization.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed for one repetition of a run. Distinct repetition indices give
// unrelated seeds, so repetitions can run in any order on any number of
// threads and still reproduce exactly.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed ^ mix64(index + 0x9e3779b97f4a7c15ull));
}

// xoshiro256** with splitmix64 state setup. (seed, stream) fully determines
// the output sequence on every platform. Distinct stream ids under the same
// seed give statistically independent sequences; the simulation gives the
// environment stream 0 and user n stream n+1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = mix64(seed) ^ mix64(stream * 0xd1342543de82ef95ull + 1);
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ull;
      word = mix64(x);
    }
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0)
      state_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling, so every value is exactly
  // equally likely.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t draw;
    do {
      draw = next();
    } while (draw >= limit);
    return draw % n;
  }

  // Uniform integer in [lo, hi], inclusive on both ends.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // True with probability p. p outside [0, 1] is clamped.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace mpmab
