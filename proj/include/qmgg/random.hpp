#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace qmgg {

/// Seeded, splittable random source. Substreams are derived from the seed
/// alone, never from the draws already taken, so a match's stream depends
/// only on (root seed, path of split ids).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  RandomStream split(std::uint64_t stream_id) const;

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  template <class T>
  const T& pick(std::span<const T> items) {
    return items[below(items.size())];
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qmgg
