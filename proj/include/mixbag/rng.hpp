#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mixbag {

// Deterministic 64-bit generator (splitmix64). The draw algorithms below are
// fixed so that a given seed produces the same sequence on every platform:
//   uniform():  u = (next() >> 11) * 2^-53                     in [0, 1)
//   normal():   Box-Muller, z = sqrt(-2 ln u1) * cos(2 pi u2)
//               with u1 = ((next() >> 11) + 1) * 2^-53 in (0, 1]
// Each normal() consumes exactly two raw draws. An Rng is single-owner;
// parallel call sites must derive independent seeds via derive_seed().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform real in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the Box-Muller transform stated above.
  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct elements sampled uniformly without replacement (pool unchanged).
  template <typename T>
  std::vector<T> sample_without_replacement(const std::vector<T>& pool, std::size_t k) {
    if (k > pool.size())
      throw std::invalid_argument("sample_without_replacement: k exceeds pool size");
    std::vector<T> work = pool;
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(work.size()));
      out.push_back(work[j]);
      work[j] = work.back();
      work.pop_back();
    }
    return out;
  }

  // Like sample_without_replacement, but removes the drawn elements from pool.
  template <typename T>
  std::vector<T> draw_and_remove(std::vector<T>& pool, std::size_t k) {
    if (k > pool.size()) throw std::invalid_argument("draw_and_remove: k exceeds pool size");
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(pool.size()));
      out.push_back(pool[j]);
      pool[j] = pool.back();
      pool.pop_back();
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

// Deterministic seed derivation for independent streams (per fold, per level,
// per purpose). Never reuse one Rng across logically parallel units.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mixbag
