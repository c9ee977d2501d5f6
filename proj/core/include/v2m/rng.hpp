#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace v2m {

/// Deterministic random stream. Wraps mt19937_64 and hand-rolls the
/// distributions so sequences are identical across standard libraries
/// (std::normal_distribution and std::shuffle are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling to stay unbiased
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r < threshold);
    return r % n;
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached spare; two uniforms per draw).
  double normal();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

/// FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Stage-keyed seed derivation: hashes the master seed's bytes followed by the
/// stage name, so every pipeline stage gets an independent reproducible
/// stream. Documented in the README under "Reproducibility".
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage);

}  // namespace v2m
