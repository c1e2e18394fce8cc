#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "prng.hpp"

namespace glwords {

/// Subspace of the row space F_q^n, stored as the reduced row echelon basis.
/// Two equal subspaces always hold bit-identical bases, so Subspace values
/// can be compared and hashed structurally.
class Subspace {
 public:
  static Subspace zero(const Fq& f, uint32_t n) { return Subspace(Mat(f, 0, n)); }

  static Subspace full(const Fq& f, uint32_t n) {
    return Subspace(Mat::identity(f, n));
  }

  static Subspace span(const Mat& vectors) { return Subspace(rref(vectors).mat); }

  static Subspace span(const Fq& f, const std::vector<Vec>& vectors, uint32_t n) {
    return span(Mat::from_rows(f, vectors, n));
  }

  const Mat& basis() const { return basis_; }
  uint32_t dim() const { return basis_.rows(); }
  uint32_t ambient() const { return basis_.cols(); }
  const Fq& field() const { return basis_.field(); }
  bool is_full() const { return dim() == ambient(); }

  /// Residual of v after eliminating against the basis; zero iff v is in
  /// the subspace.
  Vec reduce_vector(const Vec& v) const {
    require(v.size() == ambient(), "shape_mismatch", "vector/ambient mismatch");
    const Fq& f = field();
    Vec r = v;
    for (uint32_t row = 0; row < dim(); ++row) {
      uint32_t col = pivot_col(row);  // pivots are 1 in RREF
      if (r[col] == 0) continue;
      uint32_t c = r[col];
      for (uint32_t j = 0; j < ambient(); ++j)
        r[j] = f.sub(r[j], f.mul(c, basis_.at(row, j)));
    }
    return r;
  }

  bool contains(const Vec& v) const { return vec_is_zero(reduce_vector(v)); }

  bool operator==(const Subspace& o) const { return basis_ == o.basis_; }
  bool operator!=(const Subspace& o) const { return !(*this == o); }

  /// Image under an invertible (or arbitrary) right-acting matrix.
  Subspace apply(const Mat& g) const {
    require(g.rows() == ambient(), "shape_mismatch", "map/ambient mismatch");
    return span(basis_ * g);
  }

 private:
  explicit Subspace(Mat basis) : basis_(std::move(basis)) {
    // basis_ is assumed to already be in RREF with no zero rows
  }

  uint32_t pivot_col(uint32_t row) const {
    for (uint32_t col = 0; col < ambient(); ++col)
      if (basis_.at(row, col) != 0) return col;
    return ambient();
  }

  Mat basis_;
};

inline void check_compatible(const Subspace& a, const Subspace& b) {
  require(a.field() == b.field(), "field_mismatch", "subspaces over different fields");
  require(a.ambient() == b.ambient(), "shape_mismatch",
          "subspaces in different ambient spaces");
}

inline Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  check_compatible(a, b);
  const Fq& f = a.field();
  uint32_t n = a.ambient();
  Mat stacked(f, a.dim() + b.dim(), n);
  for (uint32_t i = 0; i < a.dim(); ++i) stacked.set_row(i, a.basis().row(i));
  for (uint32_t i = 0; i < b.dim(); ++i) stacked.set_row(a.dim() + i, b.basis().row(i));
  return Subspace::span(stacked);
}

/// Zassenhaus: rows [a_i | a_i] and [b_i | 0]; after elimination the right
/// halves of rows whose left half vanished span the intersection.
inline Subspace subspace_intersect(const Subspace& a, const Subspace& b) {
  check_compatible(a, b);
  const Fq& f = a.field();
  uint32_t n = a.ambient();
  Mat block(f, a.dim() + b.dim(), 2 * n);
  for (uint32_t i = 0; i < a.dim(); ++i)
    for (uint32_t j = 0; j < n; ++j) {
      block.set(i, j, a.basis().at(i, j));
      block.set(i, n + j, a.basis().at(i, j));
    }
  for (uint32_t i = 0; i < b.dim(); ++i)
    for (uint32_t j = 0; j < n; ++j) block.set(a.dim() + i, j, b.basis().at(i, j));
  RrefResult r = rref(block);
  std::vector<Vec> inter;
  for (uint32_t i = 0; i < r.rank; ++i) {
    bool left_zero = true;
    for (uint32_t j = 0; j < n && left_zero; ++j)
      if (r.mat.at(i, j) != 0) left_zero = false;
    if (left_zero) {
      Vec right(n);
      for (uint32_t j = 0; j < n; ++j) right[j] = r.mat.at(i, n + j);
      inter.push_back(right);
    }
  }
  return Subspace::span(f, inter, n);
}

/// Basis (as matrix columns packed into rows here) of {x : M x^T = 0},
/// i.e. the right kernel of M, returned as row vectors of length cols(M).
inline std::vector<Vec> right_kernel(const Mat& m) {
  const Fq& f = m.field();
  RrefResult r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (uint32_t c : r.pivots) is_pivot[c] = true;
  std::vector<Vec> out;
  for (uint32_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vec v(m.cols(), 0);
    v[free] = f.one();
    for (uint32_t i = 0; i < r.rank; ++i)
      v[r.pivots[i]] = f.neg(r.mat.at(i, free));
    out.push_back(v);
  }
  return out;
}

/// Preimage {v : v * c in s} for an arbitrary (possibly singular) square c.
inline Subspace subspace_preimage(const Mat& c, const Subspace& s) {
  require(c.square(), "shape_mismatch", "preimage under non-square matrix");
  require(c.field() == s.field(), "field_mismatch", "field mismatch");
  require(c.rows() == s.ambient(), "shape_mismatch", "map/ambient mismatch");
  const Fq& f = c.field();
  uint32_t n = c.rows();
  if (s.is_full()) return Subspace::full(f, n);
  // x in s  <=>  x * K = 0 where K's columns span the right kernel of the
  // basis of s; then v * c in s  <=>  v * (c K) = 0.
  std::vector<Vec> kern = right_kernel(s.basis());  // rows of length n
  Mat k(f, n, (uint32_t)kern.size());
  for (uint32_t col = 0; col < kern.size(); ++col)
    for (uint32_t i = 0; i < n; ++i) k.set(i, col, kern[col][i]);
  Mat ck = c * k;
  // v * ck = 0  <=>  ck^T v^T = 0
  return Subspace::span(f, right_kernel(ck.transpose()), n);
}

/// Deterministic point outside a union of proper subspaces: seeded random
/// candidates with a bounded retry budget, then exhaustive scan.  Errors if
/// any input is the full space (the union then covers everything) or if the
/// exhaustive scan finds nothing (possible only when the union covers the
/// ambient space).
inline Vec avoid_union(const Fq& f, uint32_t n, const std::vector<Subspace>& subs,
                       Prng& rng, uint32_t max_tries = 64) {
  for (const Subspace& s : subs) {
    require(s.field() == f, "field_mismatch", "avoid over mixed fields");
    require(s.ambient() == n, "shape_mismatch", "avoid ambient mismatch");
    require(!s.is_full(), "union_covers_space",
            "cannot avoid the full ambient space");
  }
  auto outside_all = [&](const Vec& v) {
    for (const Subspace& s : subs)
      if (s.contains(v)) return false;
    return true;
  };
  for (uint32_t t = 0; t < max_tries; ++t) {
    Vec v(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = (uint32_t)rng.below(f.q());
    if (vec_is_zero(v)) continue;
    if (outside_all(v)) return v;
  }
  // exhaustive odometer scan over all q^n - 1 nonzero vectors
  Vec v(n, 0);
  for (;;) {
    uint32_t i = 0;
    while (i < n) {
      if (++v[i] < f.q()) break;
      v[i] = 0;
      ++i;
    }
    if (i == n) break;  // wrapped around
    if (outside_all(v)) return v;
  }
  fail("union_covers_space", "union of subspaces covers the ambient space");
}

/// Extends linearly independent rows to a full basis by appending standard
/// basis vectors at non-pivot coordinates, in ascending coordinate order.
inline Mat extend_to_basis(const Fq& f, const std::vector<Vec>& vectors, uint32_t n) {
  Mat given = Mat::from_rows(f, vectors, n);
  RrefResult r = rref(given);
  require(r.rank == vectors.size(), "dependent_input",
          "vectors to extend are linearly dependent");
  std::vector<bool> is_pivot(n, false);
  for (uint32_t c : r.pivots) is_pivot[c] = true;
  Mat out(f, n, n);
  for (uint32_t i = 0; i < vectors.size(); ++i) out.set_row(i, vectors[i]);
  uint32_t next = (uint32_t)vectors.size();
  for (uint32_t j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    out.set(next, j, f.one());
    ++next;
  }
  return out;
}

/// Eigenvalues in F_q with geometric multiplicities, ascending by index.
inline std::vector<std::pair<uint32_t, uint32_t>> eigen_spectrum(const Mat& g) {
  require(g.square(), "shape_mismatch", "spectrum of non-square matrix");
  const Fq& f = g.field();
  uint32_t n = g.rows();
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t lambda = 0; lambda < f.q(); ++lambda) {
    uint32_t r = rank(g - Mat::scalar(f, n, lambda));
    if (r < n) out.emplace_back(lambda, n - r);
  }
  return out;
}

/// Given g acting as the scalar lambda on W with V = U (+) W, returns
/// (U', W') with U <= U', U' g-invariant, dim U' <= 2 dim U, and
/// V = U' (+) W' with W' <= W.  (U' = U + U g; W' = a complement of
/// U' n W inside W.)
inline std::pair<Subspace, Subspace> invariant_complement(const Mat& g, uint32_t lambda,
                                                          const Subspace& w,
                                                          const Subspace& u) {
  check_compatible(w, u);
  require(g.square() && g.rows() == w.ambient(), "shape_mismatch",
          "operator/ambient mismatch");
  require(g.field() == w.field(), "field_mismatch", "field mismatch");
  const Fq& f = g.field();
  uint32_t n = g.rows();
  for (uint32_t i = 0; i < w.dim(); ++i) {
    Vec wi = w.basis().row(i);
    Vec img = vec_mat(f, wi, g);
    Vec scaled(n);
    for (uint32_t j = 0; j < n; ++j) scaled[j] = f.mul(lambda, wi[j]);
    require(img == scaled, "not_scalar_on_w", "g does not act as lambda on W");
  }
  require(u.dim() + w.dim() == n &&
              subspace_intersect(u, w).dim() == 0,
          "not_complement", "U and W do not decompose the ambient space");

  Subspace uprime = subspace_sum(u, u.apply(g));
  Subspace x = subspace_intersect(uprime, w);
  // greedy complement of X inside W
  std::vector<Vec> chosen;
  Subspace acc = x;
  for (uint32_t i = 0; i < w.dim(); ++i) {
    Vec wi = w.basis().row(i);
    if (!acc.contains(wi)) {
      chosen.push_back(wi);
      std::vector<Vec> rows;
      for (uint32_t r = 0; r < acc.dim(); ++r) rows.push_back(acc.basis().row(r));
      rows.push_back(wi);
      acc = Subspace::span(f, rows, n);
    }
  }
  Subspace wprime = Subspace::span(f, chosen, n);
  require(uprime.dim() + wprime.dim() == n &&
              subspace_intersect(uprime, wprime).dim() == 0,
          "internal", "invariant complement construction failed");
  return {uprime, wprime};
}

}  // namespace glwords
