#pragma once

// Portable seeded sampling. The standard distributions are
// implementation-defined, so transcripts would differ across standard
// libraries; everything here only relies on the fully specified mt19937_64.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace coracle {

using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  // 2^64 mod bound; values below it would bias the remainder.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t v = rng();
  while (v < threshold) v = rng();
  return v % bound;
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace coracle
