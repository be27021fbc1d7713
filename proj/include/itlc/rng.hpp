#pragma once

// xoshiro256** with splitmix64 seeding; deterministic across platforms, used
// for reproducible strategy draws and corpus generation.

#include <cstdint>

namespace itlc {

struct xoshiro256 {
  std::uint64_t s[4];

  explicit xoshiro256(std::uint64_t seed) {
    // splitmix64 expansion of the seed
    std::uint64_t x = seed;
    for (auto& word : s) {
      x += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      word = z ^ (z >> 31);
    }
  }

  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::uint64_t next() {
    std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // uniform in [0, bound)
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t fork() { return next() ^ 0xa3c59ac2ee914d5cull; }
};

} // namespace itlc
