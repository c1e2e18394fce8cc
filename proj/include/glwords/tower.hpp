#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "prng.hpp"
#include "rational.hpp"
#include "seminorm.hpp"
#include "word.hpp"

namespace glwords {

/// Group element at a level of the tower GL_{2^0} c GL_{2^1} c ... glued by
/// the diagonal embedding g -> diag(g, g).  The normalized seminorm
/// ||g|| / 2^level is exactly invariant under embedding, which is what makes
/// the direct limit carry a well-defined metric.
struct TowerElement {
  uint32_t level;
  Mat matrix;
};

inline uint64_t level_dim(uint32_t level) {
  require(level <= 16, "validation_error", "tower level too large");
  return 1ull << level;
}

inline TowerElement make_tower_element(uint32_t level, Mat m) {
  uint64_t dim = level_dim(level);
  require(m.square() && m.rows() == dim, "shape_mismatch",
          "matrix dimension must be 2^level");
  require(rank(m) == m.rows(), "not_invertible", "tower elements are invertible");
  return {level, std::move(m)};
}

/// diag(g, g, ..., g) with 2^(target-level) diagonal copies.
inline TowerElement diagonal_embed(const TowerElement& g, uint32_t target_level) {
  require(target_level >= g.level, "level_decrease",
          "cannot embed into a lower level");
  if (target_level == g.level) return g;
  const Fq& f = g.matrix.field();
  uint32_t small = g.matrix.rows();
  uint64_t copies = 1ull << (target_level - g.level);
  uint64_t big = (uint64_t)small * copies;
  require(big <= (1ull << 16), "validation_error", "embedded dimension too large");
  Mat out(f, (uint32_t)big, (uint32_t)big);
  for (uint64_t c = 0; c < copies; ++c)
    for (uint32_t i = 0; i < small; ++i)
      for (uint32_t j = 0; j < small; ++j)
        out.set((uint32_t)(c * small + i), (uint32_t)(c * small + j),
                g.matrix.at(i, j));
  return {target_level, std::move(out)};
}

/// Distance in the limit metric: both elements are embedded into the common
/// higher level and the normalized seminorm distance is taken there.
inline Rational tower_dist(const TowerElement& a, const TowerElement& b) {
  require(a.matrix.field() == b.matrix.field(), "field_mismatch",
          "tower elements over different fields");
  uint32_t level = std::max(a.level, b.level);
  TowerElement ae = diagonal_embed(a, level);
  TowerElement be = diagonal_embed(b, level);
  return normalized_dist(ae.matrix, be.matrix);
}

inline Rational tower_norm(const TowerElement& a) {
  return normalized_norm(a.matrix);
}

/// Word whose constants are embedded to the target level (letters are
/// unchanged).
inline Word embed_word(const Word& w, uint32_t word_level, uint32_t target_level) {
  require(w.dim() == level_dim(word_level), "shape_mismatch",
          "word dimension must be 2^level");
  std::vector<Mat> constants;
  constants.reserve(w.constants().size());
  for (const Mat& c : w.constants())
    constants.push_back(diagonal_embed({word_level, c}, target_level).matrix);
  return Word(w.field(), (uint32_t)level_dim(target_level), w.num_vars(),
              w.letters(), std::move(constants));
}

struct PerturbationReport {
  Rational epsilon;
  uint32_t rank_budget;                  // floor(epsilon * 2^m)
  std::vector<Rational> constant_dists;  // normalized dist(c_j, c_j')
  Rational floor_perturbed;
  Rational difference;                   // |floor' - floor|
  Rational difference_bound;             // 2 (l+1) epsilon
  bool within_bound;
};

struct LevelFloorReport {
  uint32_t level;
  uint64_t dim;
  uint32_t critical;
  Rational critical_normalized;
  Rational floor;  // crit/2^m / l - 1/2^m
  bool positive;
  std::optional<PerturbationReport> perturbation;
};

/// Embeds a reduced word into level m and reports the normalized diameter
/// floor crit_norm / l - 1/2^m there.  With epsilon > 0, additionally
/// perturbs every constant within normalized distance epsilon (seeded
/// low-rank multiplicative noise) and reports the perturbed floor, whose
/// distance from the unperturbed one is bounded by 2 (l+1) epsilon.
inline LevelFloorReport levelwise_image_floor(const Word& w, uint32_t word_level,
                                              uint32_t target_level,
                                              const Rational& epsilon,
                                              uint64_t seed) {
  require(bool(is_reduced(w)), "not_reduced", "level floor needs a reduced word");
  require(w.length() >= 1, "validation_error", "level floor needs length >= 1");
  require(epsilon >= Rational(0) && epsilon <= Rational(1), "validation_error",
          "epsilon must lie in [0, 1]");
  Word wm = embed_word(w, word_level, target_level);
  require(bool(is_reduced(wm)), "internal", "embedding broke reducedness");

  uint32_t l = wm.length();
  long long n = (long long)wm.dim();
  uint32_t crit = critical_length(wm);

  LevelFloorReport rep;
  rep.level = target_level;
  rep.dim = wm.dim();
  rep.critical = crit;
  rep.critical_normalized = Rational(crit, n);
  rep.floor = rep.critical_normalized / Rational(l) - Rational(1, n);
  rep.positive = rep.floor > Rational(0);

  if (epsilon > Rational(0)) {
    const Fq& f = wm.field();
    // rank budget floor(eps * n) keeps every perturbation within eps exactly
    long long k_ll = (epsilon * Rational(n)).num() / (epsilon * Rational(n)).den();
    uint32_t k = (uint32_t)k_ll;
    PerturbationReport pert;
    pert.epsilon = epsilon;
    pert.rank_budget = k;
    Prng rng(Prng::derive(seed, target_level));
    std::vector<Mat> constants;
    for (uint32_t j = 0; j <= l; ++j) {
      const Mat& c = wm.constant(j);
      if (k == 0) {
        constants.push_back(c);
        pert.constant_dists.push_back(Rational(0));
        continue;
      }
      // c' = c (I + E) with E supported on at most k rows; then
      // dist(c, c') = ||I + E|| <= rank(E) <= k.
      for (;;) {
        Mat e(f, (uint32_t)n, (uint32_t)n);
        for (uint32_t t = 0; t < k; ++t) {
          uint32_t row = (uint32_t)rng.below((uint64_t)n);
          for (uint32_t col = 0; col < (uint32_t)n; ++col)
            e.set(row, col, (uint32_t)rng.below(f.q()));
        }
        Mat cp = c * (Mat::identity(f, (uint32_t)n) + e);
        if (rank(cp) != (uint32_t)n) continue;
        // keep the perturbed word reduced: inner constants must respect
        // their position type
        if (j >= 1 && j < l) {
          auto sv = cp.scalar_value();
          bool critical_pos = is_critical_pair(wm.letter(j), wm.letter(j + 1));
          if (sv && (critical_pos || *sv != f.one())) continue;
        }
        Rational dist = normalized_dist(c, cp);
        require(dist <= epsilon, "internal", "perturbation exceeded epsilon");
        pert.constant_dists.push_back(dist);
        constants.push_back(std::move(cp));
        break;
      }
    }
    Word wp = wm.with_constants(std::move(constants));
    require(bool(is_reduced(wp)), "internal", "perturbation broke reducedness");
    uint32_t crit_p = critical_length(wp);
    pert.floor_perturbed = Rational(crit_p, n) / Rational(l) - Rational(1, n);
    pert.difference = (pert.floor_perturbed - rep.floor).abs();
    pert.difference_bound = Rational(2) * Rational(l + 1) * epsilon;
    pert.within_bound = pert.difference <= pert.difference_bound;
    rep.perturbation = std::move(pert);
  }
  return rep;
}

}  // namespace glwords
