#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

#include "mta/types.hpp"

namespace mta {

/// splitmix64 step: fast, full-period 64-bit generator used both as a stream
/// and as the mixer behind derive_seed.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds tags into a root seed one mixing step per tag. Equal inputs give
/// equal streams on every platform; unrelated tag tuples decorrelate.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64_next(s);
  for (std::uint64_t tag : tags) {
    s = h ^ tag;
    h = splitmix64_next(s);
  }
  return h;
}

inline std::uint64_t tag_of(std::string_view name) {
  return fnv1a64(name.data(), name.size());
}

/// Deterministic stream over a derived seed. Cheap enough to construct per
/// draw, which keeps every draw independent of evaluation order.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(next_u64());  // full range
    // Rejection-free modulo is biased for huge spans; spans here are far
    // below 2^63 so the bias is immaterial, but debias cheaply anyway.
    const std::uint64_t limit = ~0ULL - ~0ULL % span;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Standard normal via Box-Muller (two unit draws per call).
  double next_normal();

 private:
  std::uint64_t state_;
};

}  // namespace mta
