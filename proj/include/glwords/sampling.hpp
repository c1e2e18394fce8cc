#pragma once

#include <cstdint>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "prng.hpp"
#include "seminorm.hpp"
#include "subspace.hpp"
#include "word.hpp"

namespace glwords {

enum class GroupKind { GL, SL, PSL };

inline const char* group_name(GroupKind g) {
  switch (g) {
    case GroupKind::GL: return "gl";
    case GroupKind::SL: return "sl";
    case GroupKind::PSL: return "psl";
  }
  return "?";
}

inline Vec random_vec(const Fq& f, uint32_t n, Prng& rng) {
  Vec v(n);
  for (uint32_t i = 0; i < n; ++i) v[i] = (uint32_t)rng.below(f.q());
  return v;
}

inline Vec random_nonzero_vec(const Fq& f, uint32_t n, Prng& rng) {
  for (;;) {
    Vec v = random_vec(f, n, rng);
    if (!vec_is_zero(v)) return v;
  }
}

inline Mat random_matrix(const Fq& f, uint32_t n, Prng& rng) {
  Mat m(f, n, n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) m.set(i, j, (uint32_t)rng.below(f.q()));
  return m;
}

/// Rejection sampling; the invertible fraction is at least 1 - 1/(q-1) - ...
/// and in practice a few draws suffice.
inline Mat random_invertible(const Fq& f, uint32_t n, Prng& rng) {
  for (;;) {
    Mat m = random_matrix(f, n, rng);
    if (rank(m) == n) return m;
  }
}

/// Uniform-ish element of SL_n: invertible draw, then one row scaled to fix
/// the determinant.
inline Mat random_special(const Fq& f, uint32_t n, Prng& rng) {
  Mat m = random_invertible(f, n, rng);
  uint32_t d = det(m);
  if (d != f.one()) m.scale_row(0, f.inv(d));
  return m;
}

inline Mat random_in_group(const Fq& f, uint32_t n, GroupKind kind, Prng& rng) {
  require(kind == GroupKind::GL || kind == GroupKind::SL, "validation_error",
          "matrix sampling supports GL and SL");
  return kind == GroupKind::GL ? random_invertible(f, n, rng)
                               : random_special(f, n, rng);
}

inline std::vector<Mat> random_tuple(const Fq& f, uint32_t n, uint32_t r,
                                     GroupKind kind, Prng& rng) {
  std::vector<Mat> out;
  out.reserve(r);
  for (uint32_t k = 0; k < r; ++k) out.push_back(random_in_group(f, n, kind, rng));
  return out;
}

/// Invertible, non-scalar, seminorm <= max_norm: a block A (+) I with A a
/// small invertible block, conjugated by a random invertible matrix.
/// rank((A (+) I) - I) <= max_norm, and conjugation preserves the seminorm.
inline Mat random_low_norm(const Fq& f, uint32_t n, uint32_t max_norm, Prng& rng) {
  require(max_norm >= 1 && max_norm <= n, "validation_error",
          "norm budget out of range");
  for (;;) {
    Mat m = Mat::identity(f, n);
    uint32_t k = max_norm;
    // invertible k x k corner, redrawn until it is not the identity
    for (;;) {
      Mat a = random_invertible(f, k, rng);
      bool is_id = a.is_identity();
      if (k == n && a.scalar_value()) is_id = true;  // keep the result non-scalar
      if (!is_id) {
        for (uint32_t i = 0; i < k; ++i)
          for (uint32_t j = 0; j < k; ++j) m.set(i, j, a.at(i, j));
        break;
      }
    }
    Mat t = random_invertible(f, n, rng);
    Mat out = inverse(t) * m * t;
    if (!out.scalar_value()) return out;
  }
}

inline Mat random_non_scalar(const Fq& f, uint32_t n, Prng& rng) {
  for (;;) {
    Mat m = random_invertible(f, n, rng);
    if (!m.scalar_value()) return m;
  }
}

/// Subspace of exact dimension dim, sampled by drawing rows until the span
/// reaches the target.
inline Subspace random_subspace(const Fq& f, uint32_t n, uint32_t dim, Prng& rng) {
  require(dim <= n, "validation_error", "subspace dimension exceeds ambient");
  std::vector<Vec> rows;
  Subspace s = Subspace::zero(f, n);
  while (s.dim() < dim) {
    Vec v = random_nonzero_vec(f, n, rng);
    if (s.contains(v)) continue;
    rows.push_back(v);
    s = Subspace::span(f, rows, n);
  }
  return s;
}

/// Matrix with the given number of independent rows (full row rank).
inline Mat random_full_rank(const Fq& f, uint32_t rows, uint32_t cols, Prng& rng) {
  require(rows <= cols, "validation_error", "cannot have more independent rows");
  for (;;) {
    Mat m(f, rows, cols);
    for (uint32_t i = 0; i < rows; ++i)
      for (uint32_t j = 0; j < cols; ++j) m.set(i, j, (uint32_t)rng.below(f.q()));
    if (rank(m) == rows) return m;
  }
}

struct WordSamplingOptions {
  bool identity_boundary = true;  // c_0 = c_l = 1
  bool force_critical = false;    // guarantee at least one critical position
  bool forbid_critical = false;   // strong word
  bool nonsingular = false;       // nontrivial content
  uint32_t low_norm_critical = 0; // if > 0, critical constants get seminorm <= this
};

/// Seeded reduced word of exact length l.  Letters are drawn uniformly;
/// constants respect the position type so the result is reduced as built.
inline Word random_word(const Fq& f, uint32_t n, uint32_t r, uint32_t l, Prng& rng,
                        const WordSamplingOptions& opt = {}) {
  require(l >= 1, "validation_error", "random words need length >= 1");
  require(!(opt.force_critical && opt.forbid_critical), "validation_error",
          "contradictory critical-position options");
  require(!opt.force_critical || l >= 2, "validation_error",
          "critical positions need length >= 2");
  for (;;) {
    std::vector<Letter> L;
    L.reserve(l);
    for (uint32_t j = 0; j < l; ++j) {
      for (;;) {
        Letter t{1 + (uint32_t)rng.below(r), rng.coin() ? 1 : -1};
        if (opt.forbid_critical && !L.empty() && is_critical_pair(L.back(), t)) {
          if (r == 1 && l >= 2) {
            // only one variable: force a strong pattern by matching signs
            t.exp = L.back().exp;
          } else {
            continue;
          }
        }
        L.push_back(t);
        break;
      }
    }
    if (opt.force_critical) {
      bool has = false;
      for (size_t j = 0; j + 1 < L.size(); ++j)
        if (is_critical_pair(L[j], L[j + 1])) { has = true; break; }
      if (!has) {
        uint32_t j = (uint32_t)rng.below(l - 1);
        L[j + 1] = Letter{L[j].var, -L[j].exp};
      }
    }
    if (opt.nonsingular) {
      std::vector<Letter> stack;
      for (const Letter& t : L) {
        if (!stack.empty() && stack.back().var == t.var && stack.back().exp == -t.exp)
          stack.pop_back();
        else
          stack.push_back(t);
      }
      if (stack.empty()) continue;  // resample the letter pattern
    }

    std::vector<Mat> C;
    C.reserve(l + 1);
    C.push_back(opt.identity_boundary ? Mat::identity(f, n)
                                      : random_invertible(f, n, rng));
    for (uint32_t j = 1; j < l; ++j) {
      if (is_critical_pair(L[j - 1], L[j])) {
        C.push_back(opt.low_norm_critical > 0
                        ? random_low_norm(f, n, opt.low_norm_critical, rng)
                        : random_non_scalar(f, n, rng));
      } else {
        // identity half the time, otherwise a non-scalar
        C.push_back(rng.coin() ? Mat::identity(f, n) : random_non_scalar(f, n, rng));
      }
    }
    C.push_back(opt.identity_boundary ? Mat::identity(f, n)
                                      : random_invertible(f, n, rng));
    Word w(f, n, r, std::move(L), std::move(C));
    if (!is_reduced(w)) continue;  // cannot happen, but stay safe
    return w;
  }
}

}  // namespace glwords
