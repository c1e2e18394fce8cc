#pragma once

#include <cstdint>

#include "error.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace glwords {

/// Projective rank seminorm on GL_n(F_q):
///   ||g|| = min over nonzero lambda of rank(g - lambda I).
/// Zero exactly on scalars; conjugation-invariant; subadditive.  The induced
/// bi-invariant distance is dist(g, h) = ||g^{-1} h||.
inline uint32_t projective_norm(const Mat& g) {
  require(g.square(), "shape_mismatch", "seminorm of non-square matrix");
  const Fq& f = g.field();
  uint32_t n = g.rows();
  require(rank(g) == n, "not_invertible", "seminorm requires an invertible matrix");
  uint32_t best = n;
  for (uint32_t lambda = 1; lambda < f.q(); ++lambda) {
    uint32_t r = rank(g - Mat::scalar(f, n, lambda));
    if (r < best) best = r;
    if (best == 0) break;
  }
  return best;
}

inline uint32_t projective_dist(const Mat& g, const Mat& h) {
  require(g.field() == h.field(), "field_mismatch", "distance over different fields");
  require(g.rows() == h.rows() && g.square() && h.square(), "shape_mismatch",
          "distance between mismatched shapes");
  return projective_norm(inverse(g) * h);
}

inline Rational normalized_norm(const Mat& g) {
  return Rational((long long)projective_norm(g), (long long)g.rows());
}

inline Rational normalized_dist(const Mat& g, const Mat& h) {
  return Rational((long long)projective_dist(g, h), (long long)g.rows());
}

inline bool is_projectively_trivial(const Mat& g) { return projective_norm(g) == 0; }

}  // namespace glwords
