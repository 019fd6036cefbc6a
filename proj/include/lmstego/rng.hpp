#pragma once

#include <cstdint>
#include <vector>

#include "lmstego/errors.hpp"

namespace lmstego {

// splitmix64: the fixed 64-bit generator both parties run for context
// selection. Fully specified here so independent implementations agree:
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output z ^ (z >> 31)
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) by rejection: mask to the next power of two and
  // retry values >= n.
  uint64_t next_below(uint64_t n) {
    if (n == 0) throw Error(Errc::invalid_config, "next_below: n must be positive");
    uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      uint64_t v = next() & mask;
      if (v < n) return v;
    }
  }

private:
  uint64_t state_;
};

// k distinct indices in [0, n), in draw order: repeated rejection draws,
// skipping indices already taken.
inline std::vector<size_t> draw_distinct_indices(uint64_t seed, size_t n, size_t k) {
  if (k > n)
    throw Error(Errc::corpus_too_small, "cannot draw more distinct indices than available");
  SplitMix64 rng(seed);
  std::vector<bool> used(n, false);
  std::vector<size_t> out;
  out.reserve(k);
  while (out.size() < k) {
    size_t idx = static_cast<size_t>(rng.next_below(n));
    if (used[idx]) continue;
    used[idx] = true;
    out.push_back(idx);
  }
  return out;
}

}  // namespace lmstego
