#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace lacogsea {

/// SplitMix64 finalizer. Used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a key sequence into a seed: derive_seed(seed, {dim, size}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) noexcept;

/// xoshiro256** with platform-independent bounded and real draws.
///
/// The standard library distributions are implementation-defined, so every
/// draw that ends up in an output file goes through this class instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the polar method.
  double normal() noexcept;

  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// k distinct indices from [0, n), unsorted. `marks` is reusable scratch.
  void sample_distinct(std::size_t n, std::size_t k, std::vector<std::size_t>& out,
                       std::vector<unsigned char>& marks);

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lacogsea
