#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "seminorm.hpp"

namespace glwords {

/// One variable occurrence x_var^exp, exp in {+1, -1}, var in [1, r].
struct Letter {
  uint32_t var;
  int exp;
  bool operator==(const Letter& o) const { return var == o.var && exp == o.exp; }
};

/// Word with constants over GL_n(F_q):
///   w = c_0 x_{i1}^{e1} c_1 x_{i2}^{e2} ... x_{il}^{el} c_l
/// with every constant invertible.  Words are immutable; reduction and
/// strong reduction return new words.
class Word {
 public:
  Word(Fq f, uint32_t n, uint32_t r, std::vector<Letter> letters,
       std::vector<Mat> constants)
      : f_(std::move(f)), n_(n), r_(r), letters_(std::move(letters)),
        constants_(std::move(constants)) {
    require(n_ >= 2, "validation_error", "words require dimension n >= 2");
    require(constants_.size() == letters_.size() + 1, "validation_error",
            "a word of length l needs exactly l+1 constants");
    for (const Letter& t : letters_) {
      require(t.var >= 1 && t.var <= r_, "validation_error",
              "letter variable index out of range");
      require(t.exp == 1 || t.exp == -1, "validation_error",
              "letter exponent must be +1 or -1");
    }
    for (const Mat& c : constants_) {
      require(c.field() == f_, "field_mismatch", "constant over wrong field");
      require(c.square() && c.rows() == n_, "shape_mismatch",
              "constant has wrong dimensions");
      require(rank(c) == n_, "not_invertible", "word constants must be invertible");
    }
  }

  /// Length-zero word consisting of a single constant.
  static Word constant_word(const Fq& f, uint32_t n, uint32_t r, Mat c) {
    return Word(f, n, r, {}, {std::move(c)});
  }

  const Fq& field() const { return f_; }
  uint32_t dim() const { return n_; }
  uint32_t num_vars() const { return r_; }
  uint32_t length() const { return (uint32_t)letters_.size(); }
  const std::vector<Letter>& letters() const { return letters_; }
  const Letter& letter(uint32_t j) const { return letters_[j - 1]; }  // 1-based
  const Mat& constant(uint32_t j) const { return constants_[j]; }     // c_j
  const std::vector<Mat>& constants() const { return constants_; }

  Word with_constants(std::vector<Mat> constants) const {
    return Word(f_, n_, r_, letters_, std::move(constants));
  }

 private:
  Fq f_;
  uint32_t n_;
  uint32_t r_;
  std::vector<Letter> letters_;
  std::vector<Mat> constants_;
};

struct IndexClassification {
  std::vector<uint32_t> j0;      // variable changes at j -> j+1
  std::vector<uint32_t> jplus;   // same variable, same sign
  std::vector<uint32_t> jminus;  // same variable, opposite sign (critical)
};

inline bool is_critical_pair(const Letter& a, const Letter& b) {
  return a.var == b.var && a.exp == -b.exp;
}

/// Partitions the inner positions {1, ..., l-1} by comparing consecutive
/// letters.
inline IndexClassification classify_indices(const Word& w) {
  IndexClassification out;
  for (uint32_t j = 1; j + 1 <= w.length(); ++j) {
    const Letter& a = w.letter(j);
    const Letter& b = w.letter(j + 1);
    if (a.var != b.var) out.j0.push_back(j);
    else if (a.exp == b.exp) out.jplus.push_back(j);
    else out.jminus.push_back(j);
  }
  return out;
}

struct ReducednessOffense {
  uint32_t index;      // inner position j
  std::string reason;  // "critical_scalar" or "intermediate_scalar"
};

struct ReducednessReport {
  bool reduced = true;
  std::vector<ReducednessOffense> offenses;
  explicit operator bool() const { return reduced; }
};

/// A word is reduced when every critical constant is non-scalar and every
/// other inner constant is non-scalar or the identity.  (Scalars are the
/// centralizer of GL_n, so a scalar critical constant would let the
/// adjacent letters cancel.)
inline ReducednessReport is_reduced(const Word& w) {
  ReducednessReport rep;
  for (uint32_t j = 1; j + 1 <= w.length(); ++j) {
    auto sv = w.constant(j).scalar_value();
    if (!sv) continue;
    if (is_critical_pair(w.letter(j), w.letter(j + 1))) {
      rep.reduced = false;
      rep.offenses.push_back({j, "critical_scalar"});
    } else if (*sv != w.field().one()) {
      rep.reduced = false;
      rep.offenses.push_back({j, "intermediate_scalar"});
    }
  }
  return rep;
}

/// Rewrites to a reduced word representing the same map:
///  - x^e (lambda I) x^-e collapses, the scalar folds into the left
///    neighbour constant;
///  - non-identity scalars at non-critical positions migrate into c_0.
/// Evaluation is preserved exactly for every argument tuple.
inline Word reduce(const Word& w) {
  const Fq& f = w.field();
  uint32_t n = w.dim();
  std::vector<Letter> L = w.letters();
  std::vector<Mat> C = w.constants();
  for (;;) {
    bool changed = false;
    for (size_t j = 1; j + 1 <= L.size(); ++j) {  // inner constant positions
      if (!is_critical_pair(L[j - 1], L[j])) continue;
      auto sv = C[j].scalar_value();
      if (!sv) continue;
      C[j - 1] = (C[j - 1] * C[j + 1]).scaled(*sv);
      L.erase(L.begin() + (long)j - 1, L.begin() + (long)j + 1);
      C.erase(C.begin() + (long)j, C.begin() + (long)j + 2);
      changed = true;
      break;
    }
    if (changed) continue;
    for (size_t j = 1; j + 1 <= L.size(); ++j) {
      auto sv = C[j].scalar_value();
      if (!sv || *sv == f.one()) continue;
      // position is non-critical here, else the loop above would have fired
      C[0] = C[0].scaled(*sv);
      C[j] = Mat::identity(f, n);
      changed = true;
      break;
    }
    if (!changed) break;
  }
  return Word(f, n, w.num_vars(), std::move(L), std::move(C));
}

/// Image of w under constants -> 1: the underlying free word, freely
/// reduced.  Empty means w is singular.
inline std::vector<Letter> content(const Word& w) {
  std::vector<Letter> stack;
  for (const Letter& t : w.letters()) {
    if (!stack.empty() && stack.back().var == t.var && stack.back().exp == -t.exp)
      stack.pop_back();
    else
      stack.push_back(t);
  }
  return stack;
}

inline bool is_singular(const Word& w) { return content(w).empty(); }

/// Evaluates the word at an r-tuple of invertible matrices.
inline Mat evaluate(const Word& w, const std::vector<Mat>& h) {
  const Fq& f = w.field();
  uint32_t n = w.dim();
  require(h.size() == w.num_vars(), "validation_error",
          "tuple size differs from the word's variable count");
  for (const Mat& g : h) {
    require(g.field() == f, "field_mismatch", "tuple entry over wrong field");
    require(g.square() && g.rows() == n, "shape_mismatch",
            "tuple entry has wrong dimensions");
    require(rank(g) == n, "not_invertible", "tuple entries must be invertible");
  }
  std::vector<std::optional<Mat>> inv_cache(h.size());
  Mat acc = w.constant(0);
  for (uint32_t j = 1; j <= w.length(); ++j) {
    const Letter& t = w.letter(j);
    if (t.exp == 1) {
      acc = acc * h[t.var - 1];
    } else {
      if (!inv_cache[t.var - 1]) inv_cache[t.var - 1] = inverse(h[t.var - 1]);
      acc = acc * *inv_cache[t.var - 1];
    }
    acc = acc * w.constant(j);
  }
  return acc;
}

/// Critical length: min of the ambient diameter bound n and the seminorms
/// of the critical constants.  Strong words (no critical position) get n.
inline uint32_t critical_length(const Word& w) {
  require(bool(is_reduced(w)), "not_reduced",
          "critical length is defined for reduced words");
  uint32_t crit = w.dim();
  IndexClassification cls = classify_indices(w);
  for (uint32_t j : cls.jminus) {
    uint32_t nm = projective_norm(w.constant(j));
    if (nm < crit) crit = nm;
  }
  return crit;
}

inline bool is_strong(const Word& w) {
  return classify_indices(w).jminus.empty();
}

/// One strong-reduction step: the critical constant of minimal seminorm
/// (ties broken by smallest position) is replaced by the identity, the now
/// cancelling letter pair is removed, the flanking constants merge, and the
/// result is re-reduced.  The evaluation moves by at most that constant's
/// seminorm, pointwise.
inline Word strong_reduction_step(const Word& w) {
  require(bool(is_reduced(w)), "not_reduced", "strong reduction needs a reduced word");
  IndexClassification cls = classify_indices(w);
  require(!cls.jminus.empty(), "already_strong", "word has no critical position");
  uint32_t best_j = 0, best_norm = 0;
  for (uint32_t j : cls.jminus) {
    uint32_t nm = projective_norm(w.constant(j));
    if (best_j == 0 || nm < best_norm) { best_j = j; best_norm = nm; }
  }
  std::vector<Letter> L = w.letters();
  std::vector<Mat> C = w.constants();
  C[best_j - 1] = C[best_j - 1] * C[best_j + 1];
  L.erase(L.begin() + (long)best_j - 1, L.begin() + (long)best_j + 1);
  C.erase(C.begin() + (long)best_j, C.begin() + (long)best_j + 2);
  return reduce(Word(w.field(), w.dim(), w.num_vars(), std::move(L), std::move(C)));
}

/// Full strong-reduction chain w = w_0, w_1, ..., w_m with w_m strong.
/// Each step removes at least two letters, so m <= floor(l/2).
inline std::vector<Word> strong_reduction_chain(const Word& w) {
  std::vector<Word> chain;
  chain.push_back(w);
  while (!is_strong(chain.back()))
    chain.push_back(strong_reduction_step(chain.back()));
  return chain;
}

/// Concatenation (the boundary constants in the middle merge).  The result
/// is generally not reduced.
inline Word concat(const Word& a, const Word& b) {
  require(a.field() == b.field() && a.dim() == b.dim(), "validation_error",
          "concatenating words over different spaces");
  uint32_t r = std::max(a.num_vars(), b.num_vars());
  std::vector<Letter> L = a.letters();
  L.insert(L.end(), b.letters().begin(), b.letters().end());
  std::vector<Mat> C;
  for (uint32_t j = 0; j + 1 <= a.length(); ++j) C.push_back(a.constant(j));
  C.push_back(a.constant(a.length()) * b.constant(0));
  for (uint32_t j = 1; j <= b.length(); ++j) C.push_back(b.constant(j));
  return Word(a.field(), a.dim(), r, std::move(L), std::move(C));
}

}  // namespace glwords
