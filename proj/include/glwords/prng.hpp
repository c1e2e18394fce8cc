#pragma once

#include <cstdint>

namespace glwords {

/// Deterministic 64-bit PRNG (splitmix64).  The standard <random>
/// distributions are not required to produce identical streams across
/// platforms, and reproducibility of seeded runs is a hard requirement
/// here, so all randomized code draws from this generator directly.
class Prng {
 public:
  explicit Prng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform-ish value in [0, bound).  bound is tiny (field sizes, matrix
  /// dims) compared to 2^64, so modulo bias is irrelevant in practice.
  uint64_t below(uint64_t bound) { return bound ? next() % bound : 0; }

  bool coin() { return next() & 1; }

  /// Derive an independent seed from (seed, salt); used to give loop
  /// iterations decoupled streams whose values do not depend on how many
  /// draws earlier iterations consumed.
  static uint64_t derive(uint64_t seed, uint64_t salt) {
    Prng g(seed ^ (0x9e3779b97f4a7c15ULL * (salt + 0x632be59bd9b4e019ULL)));
    g.next();
    return g.next();
  }

 private:
  uint64_t state_;
};

}  // namespace glwords
