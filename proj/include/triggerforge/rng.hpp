#ifndef TRIGGERFORGE_RNG_HPP_
#define TRIGGERFORGE_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "triggerforge/common.hpp"

namespace triggerforge::rng {

// splitmix64 step. Small, fast, and identical on every platform, which is
// what the byte-for-byte reproducibility guarantees rest on. std::
// distributions are avoided throughout because their outputs are
// implementation-defined.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// A counter-based stream: Stream(seed, k) and Stream(seed, k') are
// independent for k != k', so per-sentence / per-sample streams can be
// derived without sequencing constraints.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream_id = 0) {
    state_ = seed ^ 0x5851f42d4c957f2dull;
    (void)splitmix64(state_);
    state_ ^= stream_id * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
    (void)splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ValidationError("rng: below(0)");
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int index(std::size_t n) { return static_cast<int>(below(n)); }

  // Standard normal via Box-Muller (no cached spare, so each call consumes
  // exactly two uniforms and the stream stays position-deterministic).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Draws an index from an unnormalized nonnegative weight vector.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw ValidationError("rng: categorical with zero mass");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size() - 1);
  }

  // Fisher-Yates on indices 0..n-1.
  std::vector<int> permutation(std::size_t n) {
    std::vector<int> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = below(i);
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace triggerforge::rng

#endif  // TRIGGERFORGE_RNG_HPP_
