#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace factspan {

// 64-bit FNV-1a. Used for child-seed derivation and content digests.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xFFu;
    h *= 1099511628211ULL;
  }
  return h;
}

// Deterministic RNG wrapper. All bounded draws are hand-rolled rejection
// sampling on mt19937_64 output, so sequences are identical across
// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Child RNG keyed by (this seed, name). Reordering unrelated draws does
  // not perturb the child stream.
  static Rng child(std::uint64_t seed, std::string_view name) {
    return Rng(fnv1a64(name, fnv1a64_u64(seed, 1469598103934665603ULL)));
  }
  static Rng child(std::uint64_t seed, std::string_view name,
                   std::string_view subname) {
    std::uint64_t h = fnv1a64_u64(seed, 1469598103934665603ULL);
    h = fnv1a64(name, h);
    h = fnv1a64("/", h);
    return Rng(fnv1a64(subname, h));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::size_t bounded(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
  }

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Seeded Fisher-Yates; stable across platforms.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[bounded(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace factspan
