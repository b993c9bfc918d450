#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace memdecay {

// Keyed, counter-derivable random streams built on splitmix64.
//
// Every consumer derives an independent stream from (seed, entity indices),
// so generation can be parallelized per entity and still produce the same
// dataset byte for byte. All draws are hand-rolled (no <random>
// distributions) because their algorithms are implementation-defined and
// would break cross-platform reproducibility.
//
// The key schedule and draw algorithms are part of the on-disk contract:
// changing them changes every seeded output.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a,
                             std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  s = k ^ a;
  k = splitmix64(s);
  s = k ^ b;
  k = splitmix64(s);
  s = k ^ c;
  return splitmix64(s);
}

// FNV-1a, used to fold string ids into stream keys and as the file digest.
inline std::uint64_t hash_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Inclusive integer range.
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace memdecay
