#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cim {

/// splitmix64 finalizer. Stateless mixing step used both by the generator
/// and for deriving independent sub-stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives a seed for an independent named sub-stream (model init, shuffle of
/// epoch t, train/test split, ...). Pinned so runs are reproducible from a
/// single user-facing seed.
inline std::uint64_t seed_for(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ull));
}

/// Deterministic counter-style generator (splitmix64). All randomness in the
/// toolkit flows through this class so that datasets, initializations and
/// shuffles are bit-reproducible for a given seed. The uniform and normal
/// mappings below are part of the pinned contract:
///   - next_double():  (next() >> 11) * 2^-53, in [0, 1)
///   - normal():       Box-Muller, cosine branch, drawing (u1, u2) in order
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double next_open_double() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Unbiased-enough bounded draw (Lemire multiply-shift).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Box-Muller. Uses only the cosine branch; the sine
  /// value is discarded to keep the draw sequence a pure function of the
  /// call count.
  double normal() {
    const double u1 = next_open_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle driven by the pinned generator.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  shuffle(p, rng);
  return p;
}

/// FNV-1a over raw double bits; used to fingerprint parameter vectors.
inline std::uint64_t param_digest(const std::vector<double>& values) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (double v : values) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    __builtin_memcpy(&bits, &v, sizeof(bits));
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xFFu;
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

}  // namespace cim
