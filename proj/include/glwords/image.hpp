#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "sampling.hpp"
#include "seminorm.hpp"
#include "witness.hpp"
#include "word.hpp"

namespace glwords {

struct DiameterFloor {
  long long integer_floor;  // max realizable distance guarantee: ceil(crit/l) - 1
  Rational exact;           // crit/l - 1
  uint32_t critical;
  uint32_t length;
};

/// Lower bound on the diameter of the image of a reduced word map:
///   diam >= crit/l - 1,  integer form floor((crit-1)/l).
inline DiameterFloor diameter_floor(const Word& w) {
  require(bool(is_reduced(w)), "not_reduced", "diameter floor needs a reduced word");
  require(w.length() >= 1, "validation_error", "diameter floor needs length >= 1");
  uint32_t crit = critical_length(w);
  uint32_t l = w.length();
  Rational exact = Rational(crit, l) - Rational(1);
  long long integer_floor = (long long)((crit - 1) / l);  // = ceil(crit/l) - 1
  return {integer_floor, exact, crit, l};
}

struct DistantPair {
  Mat g, h;
  uint32_t dist;
  uint32_t d;  // the guarantee: dist >= d
  std::vector<Mat> tuple_g, tuple_h;
};

/// Produces two points of the word image at projective distance >= d by two
/// witness runs over SL: the first maps e_1..e_d to e_{d+1}..e_{2d}, the
/// second maps the same sources to a block T2 chosen so that the combined
/// rows stay independent.  Then for every lambda the vectors
/// (T2_i - lambda e_{d+i}) are independent, so rank(g^{-1} h - lambda) >= d.
/// Uses disjoint standard-basis blocks when 3d <= n, otherwise a seeded
/// random second block (2d <= n is required).
inline DistantPair realize_distant_pair(const Word& w, uint64_t seed,
                                        std::optional<uint32_t> d_override = {}) {
  require(bool(is_reduced(w)), "not_reduced", "distant pair needs a reduced word");
  require(w.length() >= 2, "validation_error", "distant pair needs length >= 2");
  const Fq& f = w.field();
  uint32_t n = w.dim();
  uint32_t l = w.length();
  uint32_t crit = critical_length(w);
  uint32_t d_max = (uint32_t)(std::min<uint64_t>(crit - 1, n) / l);
  uint32_t d = d_override ? *d_override : d_max;
  require(d >= 1, "hypotheses_fail", "no positive d is admissible for this word");
  require(d <= d_max, "hypotheses_fail", "requested d exceeds the admissible bound");
  require(2 * d <= n, "hypotheses_fail",
          "need 2d <= n to keep both target blocks independent");

  Mat sources(f, d, n);
  for (uint32_t i = 0; i < d; ++i) sources.set(i, i, f.one());

  const Letter& first = w.letter(1);
  const Letter& last = w.letter(l);
  bool caveat = first.var == last.var && first.exp == -last.exp;
  Subspace src_norm = Subspace::span(sources * w.constant(0));
  Mat c_last_inv = inverse(w.constant(l));

  auto caveat_ok = [&](const Mat& block) {
    if (!caveat) return true;
    Subspace t_norm = Subspace::span(block * c_last_inv);
    return subspace_intersect(src_norm, t_norm).dim() == 0;
  };
  auto basis_block = [&](uint32_t offset) {
    Mat b(f, d, n);
    for (uint32_t i = 0; i < d; ++i) b.set(i, offset + i, f.one());
    return b;
  };

  Prng rng(Prng::derive(seed, 0xb10cULL));
  Mat t1 = basis_block(d);
  while (!caveat_ok(t1)) t1 = random_full_rank(f, d, n, rng);

  auto t2_ok = [&](const Mat& block) {
    Mat both(f, 2 * d, n);
    for (uint32_t i = 0; i < d; ++i) {
      both.set_row(i, t1.row(i));
      both.set_row(d + i, block.row(i));
    }
    return rank(both) == 2 * d && caveat_ok(block);
  };
  Mat t2 = 3 * d <= n ? basis_block(2 * d) : random_full_rank(f, d, n, rng);
  while (!t2_ok(t2)) t2 = random_full_rank(f, d, n, rng);

  WitnessResult w1 = construct_witness(w, sources, t1, GroupKind::SL,
                                       Prng::derive(seed, 1));
  WitnessResult w2 = construct_witness(w, sources, t2, GroupKind::SL,
                                       Prng::derive(seed, 2));
  Mat g = evaluate(w, w1.h);
  Mat h = evaluate(w, w2.h);
  uint32_t dist = projective_dist(g, h);
  require(dist >= d, "verification_failed",
          "realized distance fell below the guarantee");
  return {std::move(g), std::move(h), dist, d, std::move(w1.h), std::move(w2.h)};
}

/// Max pairwise projective distance over `samples` seeded tuples; a lower
/// bound on the image diameter.
inline uint32_t empirical_diameter(const Word& w, GroupKind group, uint32_t samples,
                                   uint64_t seed) {
  require(samples >= 2, "validation_error", "need at least two samples");
  require(group == GroupKind::GL || group == GroupKind::SL, "validation_error",
          "empirical diameter supports GL and SL");
  const Fq& f = w.field();
  std::vector<Mat> images;
  images.reserve(samples);
  for (uint32_t s = 0; s < samples; ++s) {
    Prng rng(Prng::derive(seed, s));
    images.push_back(
        evaluate(w, random_tuple(f, w.dim(), w.num_vars(), group, rng)));
  }
  uint32_t best = 0;
  for (uint32_t a = 0; a < samples; ++a) {
    Mat inv_a = inverse(images[a]);
    for (uint32_t b = a + 1; b < samples; ++b) {
      uint32_t dd = projective_norm(inv_a * images[b]);
      if (dd > best) best = dd;
    }
  }
  return best;
}

/// Best constructive lower bound available for the image diameter: the
/// distant-pair construction when admissible (d capped so 2d <= n),
/// otherwise empirical sampling.
inline uint32_t realized_diameter_lower_bound(const Word& w, uint32_t samples,
                                              uint64_t seed) {
  uint32_t lb = 0;
  if (w.length() >= 2) {
    uint32_t crit = critical_length(w);
    uint32_t d_formula = (uint32_t)(std::min<uint64_t>(crit - 1, w.dim()) / w.length());
    uint32_t d = std::min(d_formula, w.dim() / 2);
    if (d >= 1) lb = realize_distant_pair(w, seed, d).dist;
  }
  if (samples >= 2)
    lb = std::max(lb, empirical_diameter(w, GroupKind::SL, samples, seed));
  return lb;
}

struct ChainStep {
  uint32_t length;
  uint32_t critical;
  long long floor_bound;   // ceil(crit/l) - 1, the corollary floor
  uint32_t realized;       // realized lower bound on the step's image diameter
  bool meets_floor;        // realized >= floor_bound
};

struct ChainBoundReport {
  Rational bound;         // 1 / ((1+2l)^{floor(l/2)} * l)
  Rational scaled;        // n * bound, the absolute diameter bound
  uint32_t chain_length;  // number of strong-reduction steps m
  std::vector<ChainStep> steps;
  uint32_t realized;      // realized lower bound for the original word
  bool verdict;           // n * bound <= realized + 1
};

/// Iterated strong reduction gives, for a non-singular reduced word of
/// length l over SL_n,
///   (diam + 1) / n >= 1 / ((1 + 2 l)^{floor(l/2)} * l).
/// The report carries the per-step data and checks the final inequality
/// against the realized lower bound.
inline ChainBoundReport chain_bound(const Word& w, uint32_t samples, uint64_t seed) {
  require(bool(is_reduced(w)), "not_reduced", "chain bound needs a reduced word");
  require(!is_singular(w), "singular_word",
          "chain bound applies to non-singular words");
  require(w.length() >= 1, "validation_error", "chain bound needs length >= 1");

  uint32_t n = w.dim();
  uint32_t l = w.length();
  Rational denom(1);
  for (uint32_t i = 0; i < l / 2; ++i) denom = denom * Rational(1 + 2 * (long long)l);
  denom = denom * Rational((long long)l);
  Rational bound = Rational(1) / denom;

  ChainBoundReport rep;
  rep.bound = bound;
  rep.scaled = Rational((long long)n) * bound;

  std::vector<Word> chain = strong_reduction_chain(w);
  rep.chain_length = (uint32_t)chain.size() - 1;
  for (size_t idx = 0; idx < chain.size(); ++idx) {
    const Word& wj = chain[idx];
    ChainStep step;
    step.length = wj.length();
    step.critical = wj.length() >= 1 ? critical_length(wj) : 0;
    step.floor_bound =
        wj.length() >= 1 ? (long long)((step.critical - 1) / wj.length()) : 0;
    step.realized = wj.length() >= 1
                        ? realized_diameter_lower_bound(wj, samples,
                                                        Prng::derive(seed, idx))
                        : 0;
    step.meets_floor = (long long)step.realized >= step.floor_bound;
    rep.steps.push_back(step);
  }
  rep.realized = rep.steps.front().realized;
  rep.verdict = rep.scaled <= Rational((long long)rep.realized + 1);
  return rep;
}

struct SubquotientCheck {
  uint32_t d;
  uint32_t samples;
  uint32_t succeeded;
  bool ok;  // every sampled target block was realized exactly
};

/// Samples random rank-d target blocks and checks that the witness
/// construction maps e_1..e_d onto each of them.  This is the executable
/// form of the rank-d subquotient property of the image.
inline SubquotientCheck rank_d_subquotient_check(const Word& w, uint32_t d,
                                                 GroupKind group, uint32_t samples,
                                                 uint64_t seed) {
  require(bool(is_reduced(w)), "not_reduced", "subquotient check needs a reduced word");
  require(w.length() >= 2, "validation_error", "subquotient check needs length >= 2");
  const Fq& f = w.field();
  uint32_t n = w.dim();
  if (d == 0) return {0, samples, samples, true};

  Mat sources(f, d, n);
  for (uint32_t i = 0; i < d; ++i) sources.set(i, i, f.one());

  const Letter& first = w.letter(1);
  const Letter& last = w.letter(w.length());
  bool caveat = first.var == last.var && first.exp == -last.exp;
  Subspace src_norm = Subspace::span(sources * w.constant(0));

  uint32_t succeeded = 0;
  for (uint32_t s = 0; s < samples; ++s) {
    Prng rng(Prng::derive(seed, s));
    Mat targets(f, d, n);
    for (;;) {
      targets = random_full_rank(f, d, n, rng);
      if (!caveat) break;
      Subspace t_norm = Subspace::span(targets * inverse(w.constant(w.length())));
      if (subspace_intersect(src_norm, t_norm).dim() == 0) break;
    }
    WitnessResult res = construct_witness(w, sources, targets, group,
                                          Prng::derive(seed, 0x5a5a5a5aULL + s));
    (void)res;  // construct_witness already verified the mapping exactly
    ++succeeded;
  }
  return {d, samples, succeeded, succeeded == samples};
}

}  // namespace glwords
