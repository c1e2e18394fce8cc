#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"
#include "matrix.hpp"
#include "prng.hpp"
#include "sampling.hpp"
#include "subspace.hpp"
#include "word.hpp"

namespace glwords {

using BigInt = boost::multiprecision::cpp_int;

struct HypothesesReport {
  bool ok = true;
  std::vector<std::string> violations;
  explicit operator bool() const { return ok; }
};

/// Checks the preconditions of the trajectory construction for mapping the
/// rows of `sources` to the rows of `targets` through the word map:
///  - word reduced, length >= 2, over GL or SL;
///  - source and target rows each linearly independent (d rows);
///  - admissibility d*l <= min(crit - 1, D) with D = n for GL, n-1 for SL;
///  - when the first letter equals the inverse of the last letter, the
///    (normalized) source and target spans must intersect trivially.
/// Boundary constants need not be the identity; the normalized instance is
/// what gets checked.
inline HypothesesReport check_hypotheses(const Word& w, const Mat& sources,
                                         const Mat& targets, GroupKind group) {
  HypothesesReport rep;
  auto flag = [&rep](const std::string& v) {
    rep.ok = false;
    rep.violations.push_back(v);
  };

  if (group != GroupKind::GL && group != GroupKind::SL)
    flag("group_kind: construction supports GL and SL only");
  if (sources.field() != w.field() || targets.field() != w.field())
    flag("field_mismatch: sources/targets over a different field");
  if (sources.cols() != w.dim() || targets.cols() != w.dim() ||
      sources.rows() != targets.rows()) {
    flag("shape_mismatch: sources/targets must be d x n with equal d");
    return rep;
  }
  if (w.length() < 2) flag("word_length: construction needs length >= 2");
  if (!is_reduced(w)) {
    flag("not_reduced: word must be reduced");
    return rep;
  }

  uint32_t n = w.dim();
  uint32_t d = sources.rows();
  uint32_t l = w.length();
  if (rank(sources) != d) flag("sources_dependent: source rows must be independent");
  if (rank(targets) != d) flag("targets_dependent: target rows must be independent");

  if (l >= 2) {
    uint32_t crit = critical_length(w);
    uint32_t cap = group == GroupKind::SL ? n - 1 : n;
    uint64_t bound = std::min<uint64_t>(crit - 1, cap);
    if ((uint64_t)d * l > bound)
      flag("admissibility: d*l exceeds min(crit-1, " + std::to_string(cap) + ")");

    const Letter& first = w.letter(1);
    const Letter& last = w.letter(l);
    if (d > 0 && first.var == last.var && first.exp == -last.exp) {
      Subspace u = Subspace::span(sources * w.constant(0));
      Subspace t = Subspace::span(targets * inverse(w.constant(l)));
      if (subspace_intersect(u, t).dim() != 0)
        flag("span_intersection: normalized source and target spans must not meet");
    }
  }
  return rep;
}

/// Folds the boundary constants into the endpoints: the instance
/// (w, u_i -> t_i) maps to (w~, u_i c_0 -> t_i c_l^{-1}) where w~ has
/// identity boundary constants.  Solving the normalized instance solves the
/// original one.
inline std::tuple<Word, Mat, Mat> normalize_for_witness(const Word& w,
                                                        const Mat& sources,
                                                        const Mat& targets) {
  require(sources.field() == w.field() && targets.field() == w.field(),
          "field_mismatch", "sources/targets over a different field");
  require(sources.cols() == w.dim() && targets.cols() == w.dim() &&
              sources.rows() == targets.rows(),
          "shape_mismatch", "sources/targets must be d x n with equal d");
  require(w.length() >= 1, "validation_error",
          "normalization needs distinct boundary constants (length >= 1)");
  std::vector<Mat> c = w.constants();
  Mat u = sources * c.front();
  Mat t = targets * inverse(c.back());
  c.front() = Mat::identity(w.field(), w.dim());
  c.back() = Mat::identity(w.field(), w.dim());
  return {w.with_constants(std::move(c)), u, t};
}

struct AvoidanceRecord {
  uint32_t row;        // i, 1-based
  uint32_t position;   // j, 1-based letter index whose output was chosen
  bool critical;       // J_- step (lambda family) vs two-subspace step
  std::vector<uint32_t> avoided_dims;
  uint32_t base_dim;   // dim of the slot-plus-anchor space A
  Vec chosen;
};

/// The literal counting bound used at critical steps: with dim A <= dl - 1,
///   (q - m + 1) q^{dl-1} + sum_k q^{dl-1+d_k} < q^n - 1
/// guarantees a vector outside the union of A and all lambda-preimages.
/// m = number of distinct nonzero eigenvalues of c_j in F_q, d_k their
/// geometric multiplicities.
struct CountingCertificate {
  uint32_t row;
  uint32_t position;
  uint32_t constant_norm;
  uint32_t base_dim;  // actual dim A, for reference
  bool base_dim_ok;   // dim A <= d*l - 1
  std::vector<std::pair<uint32_t, uint32_t>> spectrum;  // nonzero eigenvalues
  BigInt excluded;
  BigInt total;  // q^n - 1
  bool holds;
  bool norm_margin_ok;  // n - d_k >= ||c_j|| for every eigenvalue
};

struct TrajectoryTrace {
  uint32_t d = 0;
  uint32_t l = 0;
  // v_plus[i][j-1] / v_minus[i][j-1]: the pair h_{iota(j)} must map across,
  // i.e. v_plus * h = v_minus.  The letter's input is v_plus when exp = +1,
  // v_minus when exp = -1.
  std::vector<std::vector<Vec>> v_plus;
  std::vector<std::vector<Vec>> v_minus;
  std::vector<AvoidanceRecord> avoidance;
  std::vector<CountingCertificate> certificates;
};

namespace detail {

inline BigInt bigint_pow(uint64_t base, uint64_t exp) {
  BigInt b = base, r = 1;
  while (exp) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

struct SlotState {
  std::vector<Vec> vecs;       // accumulated trajectory vectors of this (var, sign)
  std::vector<Vec> anchor;     // rows of the anchor space basis
  Fq f;
  uint32_t n;

  SlotState(const Fq& field, uint32_t dim) : f(field), n(dim) {}

  Subspace span_with_anchor() const {
    std::vector<Vec> rows = anchor;
    rows.insert(rows.end(), vecs.begin(), vecs.end());
    return Subspace::span(f, rows, n);
  }

  Subspace span_vecs_only() const { return Subspace::span(f, vecs, n); }

  void push(const Vec& v) {
    require(!span_vecs_only().contains(v), "independence_broken",
            "trajectory vector fell into the span of its slot");
    vecs.push_back(v);
  }
};

}  // namespace detail

/// Runs the inductive trajectory construction.  Requires a normalized,
/// hypothesis-satisfying instance (identity boundary constants).  For every
/// row i and letter j it fixes a pair (input, output) so that
///  - the letter's group element must map input to output (orientation by
///    the letter's sign), and
///  - all vectors assigned to one (variable, sign) slot stay independent,
///    even from the not-yet-processed source/target rows (via the anchor
///    spaces).
/// Intermediate outputs are chosen outside a union of proper subspaces; at
/// critical positions the union runs over the whole lambda family
/// { v : v (c_j - lambda) in A }, and the counting certificate for that
/// step is recorded.
inline TrajectoryTrace build_trajectories(const Word& w, const Mat& sources,
                                          const Mat& targets, uint64_t seed) {
  HypothesesReport rep = check_hypotheses(w, sources, targets, GroupKind::GL);
  // build_trajectories itself has no determinant constraint; SL headroom is
  // solve_group_elements' concern and is re-checked by construct_witness.
  if (!rep) {
    std::string msg = "hypotheses not satisfied:";
    for (const auto& v : rep.violations) msg += " [" + v + "]";
    fail("hypotheses_fail", msg);
  }
  require(w.constant(0).is_identity() && w.constant(w.length()).is_identity(),
          "validation_error", "build_trajectories expects identity boundary constants");

  const Fq& f = w.field();
  uint32_t n = w.dim();
  uint32_t d = sources.rows();
  uint32_t l = w.length();
  Prng rng(seed);

  TrajectoryTrace trace;
  trace.d = d;
  trace.l = l;
  trace.v_plus.assign(d, std::vector<Vec>(l));
  trace.v_minus.assign(d, std::vector<Vec>(l));
  if (d == 0) return trace;

  Subspace uspan = Subspace::span(sources);
  Subspace wspan = Subspace::span(targets);

  // anchor per (variable, sign): U at the first letter's input slot, W at
  // the last letter's output slot, their sum if those slots coincide.
  const Letter& first = w.letter(1);
  const Letter& last = w.letter(l);
  auto anchor_rows = [&](uint32_t var, int sign) {
    std::vector<Vec> rows;
    bool at_first = (var == first.var && sign == first.exp);
    bool at_last = (var == last.var && sign == -last.exp);
    if (at_first)
      for (uint32_t i = 0; i < uspan.dim(); ++i) rows.push_back(uspan.basis().row(i));
    if (at_last)
      for (uint32_t i = 0; i < wspan.dim(); ++i) rows.push_back(wspan.basis().row(i));
    return rows;
  };

  // slots indexed by (var-1)*2 + (sign == -1)
  std::vector<detail::SlotState> slots;
  slots.reserve((size_t)w.num_vars() * 2);
  for (uint32_t k = 1; k <= w.num_vars(); ++k)
    for (int s = 0; s < 2; ++s) {
      detail::SlotState st(f, n);
      st.anchor = anchor_rows(k, s == 0 ? 1 : -1);
      slots.push_back(std::move(st));
    }
  auto slot_of = [&](uint32_t var, int sign) -> detail::SlotState& {
    return slots[(size_t)(var - 1) * 2 + (sign == -1 ? 1 : 0)];
  };

  auto record_pair = [&](uint32_t i, uint32_t j, const Vec& in, const Vec& out) {
    const Letter& t = w.letter(j);
    if (t.exp == 1) {
      trace.v_plus[i - 1][j - 1] = in;
      trace.v_minus[i - 1][j - 1] = out;
    } else {
      trace.v_plus[i - 1][j - 1] = out;
      trace.v_minus[i - 1][j - 1] = in;
    }
  };

  for (uint32_t i = 1; i <= d; ++i) {
    Vec current = sources.row(i - 1);
    for (uint32_t j = 1; j <= l; ++j) {
      const Letter& t = w.letter(j);
      slot_of(t.var, t.exp).push(current);  // the letter's input

      Vec out;
      if (j == l) {
        out = targets.row(i - 1);
      } else {
        detail::SlotState& out_slot = slot_of(t.var, -t.exp);
        Subspace a = out_slot.span_with_anchor();
        std::vector<Subspace> avoid = {a};
        const Letter& next = w.letter(j + 1);
        bool critical = is_critical_pair(t, next);
        if (!critical) {
          // J_0 / J_+: the next input out * c_j must avoid the next slot's
          // span B, i.e. out avoids B c_j^{-1}.
          Subspace b = slot_of(next.var, next.exp).span_with_anchor();
          avoid.push_back(b.apply(inverse(w.constant(j))));
        } else {
          // J_-: next input lands in this same slot, which will already
          // contain out itself; out * c_j independent of A + <out> is
          // equivalent to avoiding every lambda-preimage of A.
          const Mat& c = w.constant(j);
          for (uint32_t lambda = 0; lambda < f.q(); ++lambda)
            avoid.push_back(
                subspace_preimage(c - Mat::scalar(f, n, lambda), a));

          CountingCertificate cert;
          cert.row = i;
          cert.position = j;
          cert.constant_norm = projective_norm(c);
          cert.base_dim = a.dim();
          cert.base_dim_ok = a.dim() + 1 <= (uint64_t)d * l;
          cert.norm_margin_ok = true;
          uint32_t m = 0;
          BigInt excluded = 0;
          uint64_t dim_bound = (uint64_t)d * l - 1;
          for (auto [lambda, mult] : eigen_spectrum(c)) {
            if (lambda == 0) continue;  // c invertible, cannot occur
            ++m;
            cert.spectrum.emplace_back(lambda, mult);
            excluded += detail::bigint_pow(f.q(), dim_bound + mult);
            if (n - mult < cert.constant_norm) cert.norm_margin_ok = false;
          }
          excluded += BigInt(f.q() - m + 1) * detail::bigint_pow(f.q(), dim_bound);
          cert.excluded = excluded;
          cert.total = detail::bigint_pow(f.q(), n) - 1;
          cert.holds = cert.excluded < cert.total;
          trace.certificates.push_back(std::move(cert));
        }

        try {
          out = avoid_union(f, n, avoid, rng);
        } catch (const Error& e) {
          if (e.code() == "union_covers_space")
            fail("avoidance_impossible",
                 "no vector avoids the excluded subspaces at row " +
                     std::to_string(i) + ", position " + std::to_string(j));
          throw;
        }

        AvoidanceRecord rec;
        rec.row = i;
        rec.position = j;
        rec.critical = critical;
        for (const Subspace& s : avoid) rec.avoided_dims.push_back(s.dim());
        rec.base_dim = a.dim();
        rec.chosen = out;
        trace.avoidance.push_back(std::move(rec));
      }

      slot_of(t.var, -t.exp).push(out);
      record_pair(i, j, current, out);
      if (j < l) current = vec_mat(f, out, w.constant(j));
    }
  }
  return trace;
}

/// Solves S h_k = T per variable from the trajectory pairs, extending to
/// full bases with standard vectors.  For SL the first extension row of T
/// is rescaled to fix the determinant; the pair rows are untouched, so the
/// prescribed mappings survive.
inline std::vector<Mat> solve_group_elements(const Word& w,
                                             const TrajectoryTrace& trace,
                                             GroupKind group) {
  require(group == GroupKind::GL || group == GroupKind::SL, "validation_error",
          "solving supports GL and SL");
  const Fq& f = w.field();
  uint32_t n = w.dim();
  std::vector<Mat> out;
  out.reserve(w.num_vars());
  for (uint32_t k = 1; k <= w.num_vars(); ++k) {
    std::vector<Vec> plus, minus;
    for (uint32_t i = 0; i < trace.d; ++i)
      for (uint32_t j = 1; j <= trace.l; ++j) {
        if (w.letter(j).var != k) continue;
        plus.push_back(trace.v_plus[i][j - 1]);
        minus.push_back(trace.v_minus[i][j - 1]);
      }
    if (plus.empty()) {
      out.push_back(Mat::identity(f, n));
      continue;
    }
    Mat s = extend_to_basis(f, plus, n);
    Mat t = extend_to_basis(f, minus, n);
    Mat h = inverse(s) * t;
    if (group == GroupKind::SL) {
      uint32_t dt = det(h);
      if (dt != f.one()) {
        require(plus.size() < n, "determinant_unfixable",
                "no free row left to fix the determinant");
        t.scale_row((uint32_t)plus.size(), f.inv(dt));
        h = inverse(s) * t;
      }
    }
    out.push_back(std::move(h));
  }
  return out;
}

struct WitnessResult {
  std::vector<Mat> h;
  TrajectoryTrace trace;
  GroupKind group;
  Word normalized_word;
  Mat normalized_sources;
  Mat normalized_targets;
};

/// End-to-end witness: normalize, check hypotheses, build trajectories,
/// solve, and verify exactly that every source row maps to its target row
/// under the original word.  Throws rather than returning anything
/// unverified.
inline WitnessResult construct_witness(const Word& w, const Mat& sources,
                                       const Mat& targets, GroupKind group,
                                       uint64_t seed) {
  auto [wn, u, t] = normalize_for_witness(w, sources, targets);
  HypothesesReport rep = check_hypotheses(wn, u, t, group);
  if (!rep) {
    std::string msg = "hypotheses not satisfied:";
    for (const auto& v : rep.violations) msg += " [" + v + "]";
    fail("hypotheses_fail", msg);
  }
  TrajectoryTrace trace = build_trajectories(wn, u, t, seed);
  std::vector<Mat> h = solve_group_elements(wn, trace, group);

  const Fq& f = w.field();
  for (uint32_t k = 1; k <= w.num_vars(); ++k)
    for (uint32_t i = 0; i < trace.d; ++i)
      for (uint32_t j = 1; j <= trace.l; ++j) {
        if (w.letter(j).var != k) continue;
        require(vec_mat(f, trace.v_plus[i][j - 1], h[k - 1]) ==
                    trace.v_minus[i][j - 1],
                "verification_failed", "trajectory pair not realized");
      }
  if (group == GroupKind::SL)
    for (const Mat& g : h)
      require(det(g) == f.one(), "verification_failed", "witness left SL");

  if (trace.d > 0) {
    Mat img = evaluate(w, h);
    for (uint32_t i = 0; i < trace.d; ++i)
      require(vec_mat(f, sources.row(i), img) == targets.row(i),
              "verification_failed", "source row does not map to target row");
  }
  return {std::move(h), std::move(trace), group, std::move(wn), std::move(u),
          std::move(t)};
}

}  // namespace glwords
