#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"
#include "sampling.hpp"
#include "word.hpp"

namespace glwords {

/// Fully enumerated matrix group with a Cayley table, for groups of order
/// at most a few hundred.  PSL is represented by scalar-normalized
/// representatives of SL elements (first nonzero entry scaled to 1); the
/// normalization is a bijection on projective classes, so the table is a
/// faithful multiplication table of PSL itself.
struct SmallGroup {
  GroupKind kind;
  Fq field;
  uint32_t n;
  std::vector<Mat> elements;  // canonical representatives, sorted by entries
  std::vector<std::vector<uint16_t>> table;
  std::vector<uint16_t> inverse_idx;
  std::vector<bool> scalar_flag;  // representative is a scalar matrix
  uint16_t identity_idx = 0;
  uint64_t exponent = 1;

  uint32_t order() const { return (uint32_t)elements.size(); }

  Mat canonicalize(const Mat& g) const {
    if (kind != GroupKind::PSL) return g;
    for (uint32_t i = 0; i < g.rows(); ++i)
      for (uint32_t j = 0; j < g.cols(); ++j)
        if (g.at(i, j) != 0) return g.scaled(field.inv(g.at(i, j)));
    return g;  // zero matrix; never a group element
  }

  int index_of(const Mat& g) const {
    auto it = index_map_.find(canonicalize(g).data());
    return it == index_map_.end() ? -1 : (int)it->second;
  }

  uint16_t mul(uint16_t a, uint16_t b) const { return table[a][b]; }

  std::map<std::vector<uint32_t>, uint16_t> index_map_;
};

namespace detail {

/// |GL_n(q)| = prod_i (q^n - q^i), divided down for SL and PSL.  Saturates
/// at UINT64_MAX instead of overflowing; callers only compare against small
/// caps.
inline uint64_t group_order_formula(GroupKind kind, uint32_t q, uint32_t n) {
  uint64_t qn = 1;
  for (uint32_t i = 0; i < n; ++i) {
    if (qn > (1ull << 40)) return UINT64_MAX;
    qn *= q;
  }
  if (qn > (1ull << 40)) return UINT64_MAX;
  uint64_t order = 1, qi = 1;
  for (uint32_t i = 0; i < n; ++i) {
    uint64_t factor = qn - qi;
    if (factor != 0 && order > UINT64_MAX / factor) return UINT64_MAX;
    order *= factor;
    qi *= q;
  }
  if (kind == GroupKind::SL || kind == GroupKind::PSL) order /= (q - 1);
  if (kind == GroupKind::PSL) order /= std::gcd<uint64_t>(n, q - 1);
  return order;
}

}  // namespace detail

/// Enumerates GL_n(q), SL_n(q) or PSL_n(q) as long as the group order does
/// not exceed `cap`.
inline SmallGroup enumerate_group(GroupKind kind, const Fq& f, uint32_t n,
                                  uint64_t cap = 500) {
  require(n >= 2, "validation_error", "group enumeration needs n >= 2");
  uint64_t predicted = detail::group_order_formula(kind, f.q(), n);
  require(predicted <= cap, "group_too_large",
          "group order exceeds the enumeration cap " + std::to_string(cap));

  SmallGroup g{kind, f, n};

  // odometer over all n*n entry vectors
  std::vector<uint32_t> entries((size_t)n * n, 0);
  std::map<std::vector<uint32_t>, bool> seen;
  for (;;) {
    Mat m(f, n, n);
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j) m.set(i, j, entries[(size_t)i * n + j]);
    uint32_t dt = det(m);
    bool member = kind == GroupKind::GL ? dt != 0 : dt == f.one();
    if (member) {
      Mat canon = g.canonicalize(m);
      if (!seen.count(canon.data())) {
        seen[canon.data()] = true;
        g.elements.push_back(std::move(canon));
      }
    }
    size_t i = 0;
    while (i < entries.size()) {
      if (++entries[i] < f.q()) break;
      entries[i] = 0;
      ++i;
    }
    if (i == entries.size()) break;
  }

  std::sort(g.elements.begin(), g.elements.end(),
            [](const Mat& a, const Mat& b) { return a.data() < b.data(); });
  require(g.elements.size() == predicted, "internal",
          "enumerated order disagrees with the order formula");
  for (uint16_t i = 0; i < g.elements.size(); ++i)
    g.index_map_[g.elements[i].data()] = i;

  int id = g.index_of(Mat::identity(f, n));
  require(id >= 0, "internal", "identity not found in enumeration");
  g.identity_idx = (uint16_t)id;

  g.table.assign(g.order(), std::vector<uint16_t>(g.order()));
  for (uint16_t a = 0; a < g.order(); ++a)
    for (uint16_t b = 0; b < g.order(); ++b) {
      int idx = g.index_of(g.elements[a] * g.elements[b]);
      require(idx >= 0, "internal", "group not closed under multiplication");
      g.table[a][b] = (uint16_t)idx;
    }

  g.inverse_idx.resize(g.order());
  for (uint16_t a = 0; a < g.order(); ++a) {
    int idx = g.index_of(inverse(g.elements[a]));
    require(idx >= 0, "internal", "group not closed under inversion");
    g.inverse_idx[a] = (uint16_t)idx;
  }

  g.scalar_flag.resize(g.order());
  for (uint16_t a = 0; a < g.order(); ++a)
    g.scalar_flag[a] = g.elements[a].scalar_value().has_value();

  g.exponent = 1;
  for (uint16_t a = 0; a < g.order(); ++a) {
    uint64_t ord = 1;
    uint16_t acc = a;
    while (acc != g.identity_idx) {
      acc = g.table[acc][a];
      ++ord;
    }
    g.exponent = std::lcm(g.exponent, ord);
  }
  return g;
}

struct IdentityCheckResult {
  bool is_identity;
  bool singular;
  std::optional<std::vector<uint16_t>> counterexample;  // element indices
};

namespace detail {

struct IndexedWord {
  std::vector<Letter> letters;
  std::vector<uint16_t> constants;  // element indices, length l+1
};

inline uint16_t evaluate_indexed(const IndexedWord& iw, const SmallGroup& g,
                                 const std::vector<uint16_t>& tuple) {
  uint16_t acc = iw.constants[0];
  for (size_t j = 0; j < iw.letters.size(); ++j) {
    const Letter& t = iw.letters[j];
    uint16_t x = tuple[t.var - 1];
    acc = g.table[acc][t.exp == 1 ? x : g.inverse_idx[x]];
    acc = g.table[acc][iw.constants[j + 1]];
  }
  return acc;
}

/// Runs body for every tuple in [0, order)^r; body returns false to abort.
inline bool for_each_tuple(uint32_t r, uint32_t order,
                           const std::function<bool(const std::vector<uint16_t>&)>& body) {
  std::vector<uint16_t> tuple(r, 0);
  for (;;) {
    if (!body(tuple)) return false;
    uint32_t i = 0;
    while (i < r) {
      if (++tuple[i] < order) break;
      tuple[i] = 0;
      ++i;
    }
    if (i == r) return true;
  }
}

}  // namespace detail

/// Decides whether w evaluates to the identity (identity modulo scalars for
/// PSL) on every tuple, by exhaustive enumeration.  The word must be
/// nontrivial after reduction; constants must lie in the group.
inline IdentityCheckResult is_mixed_identity(const Word& w, const SmallGroup& g) {
  require(w.field() == g.field, "field_mismatch", "word over a different field");
  require(w.dim() == g.n, "shape_mismatch", "word dimension differs from the group");
  Word wr = reduce(w);
  bool trivial = wr.length() == 0 &&
                 (g.kind == GroupKind::PSL ? wr.constant(0).scalar_value().has_value()
                                           : wr.constant(0).is_identity());
  require(!trivial, "trivial_word",
          "word is trivial (reduces to the identity constant)");

  detail::IndexedWord iw;
  iw.letters = wr.letters();
  for (const Mat& c : wr.constants()) {
    int idx = g.index_of(c);
    require(idx >= 0, "validation_error", "word constant is not a group element");
    iw.constants.push_back((uint16_t)idx);
  }

  IdentityCheckResult out{true, is_singular(wr), std::nullopt};
  detail::for_each_tuple(wr.num_vars(), g.order(), [&](const std::vector<uint16_t>& t) {
    if (detail::evaluate_indexed(iw, g, t) != g.identity_idx) {
      out.is_identity = false;
      out.counterexample = t;
      return false;
    }
    return true;
  });
  return out;
}

struct LawCheckResult {
  bool holds;
  std::optional<std::vector<uint16_t>> counterexample;
};

/// Constant-free law check: does the freely reduced word evaluate to the
/// identity everywhere?
inline LawCheckResult is_law(const std::vector<Letter>& letters, uint32_t r,
                             const SmallGroup& g) {
  require(!letters.empty(), "empty_word", "law check needs a nonempty word");
  for (size_t j = 0; j + 1 < letters.size(); ++j)
    require(!(letters[j].var == letters[j + 1].var &&
              letters[j].exp == -letters[j + 1].exp),
            "validation_error", "law word must be freely reduced");
  for (const Letter& t : letters)
    require(t.var >= 1 && t.var <= r, "validation_error", "letter variable out of range");

  detail::IndexedWord iw;
  iw.letters = letters;
  iw.constants.assign(letters.size() + 1, g.identity_idx);
  LawCheckResult out{true, std::nullopt};
  detail::for_each_tuple(r, g.order(), [&](const std::vector<uint16_t>& t) {
    if (detail::evaluate_indexed(iw, g, t) != g.identity_idx) {
      out.holds = false;
      out.counterexample = t;
      return false;
    }
    return true;
  });
  return out;
}

struct SearchOptions {
  uint32_t num_vars = 1;
  uint32_t max_length = 4;
  bool nonsingular_only = false;
  uint64_t budget = 0;  // 0 = unlimited; counts search evaluations
  bool prune = true;
  uint32_t workers = 1;
  uint32_t start_length = 1;  // resume point (lengths below are assumed done)
  std::function<void(uint32_t completed_length, uint64_t evaluations)> on_length_done;
};

struct FoundIdentity {
  Word word;
  bool singular;
};

struct SearchReport {
  uint32_t max_length = 0;
  uint32_t found_length = 0;  // 0 = none found
  std::vector<FoundIdentity> identities;
  uint64_t evaluations = 0;
  uint64_t verification_evaluations = 0;
  uint64_t words_tested = 0;
  std::map<std::string, uint64_t> pruned;
  bool complete = false;
};

/// Thrown when the evaluation budget runs out; carries the partial report.
class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(SearchReport partial)
      : Error("budget_exceeded", "search evaluation budget exhausted"),
        partial_(std::move(partial)) {}
  const SearchReport& partial() const { return partial_; }

 private:
  SearchReport partial_;
};

namespace detail {

struct PatternSearchResult {
  std::vector<IndexedWord> found;
  uint64_t evaluations = 0;
  uint64_t words_tested = 0;
  uint64_t pruned_unreduced = 0;
  bool budget_hit = false;
};

/// Enumerates all constant assignments for one letter pattern and tests each
/// reduced-as-written candidate by exhaustive evaluation.  With pruning, the
/// constant left of each variable's first occurrence is pinned to the
/// identity: any mixed identity is equivalent under the substitutions
/// x_k -> g x_k (or x_k -> x_k g for an inverted first occurrence) to one of
/// the pinned candidates, applied in first-occurrence order.
inline PatternSearchResult search_pattern(const SmallGroup& g,
                                          const std::vector<Letter>& letters,
                                          bool prune, uint64_t eval_budget) {
  const uint32_t l = (uint32_t)letters.size();
  const uint32_t order = g.order();
  PatternSearchResult res;

  std::vector<bool> pinned(l + 1, false);
  if (prune) {
    std::vector<bool> seen_var(64, false);
    for (uint32_t j = 0; j < l; ++j) {
      if (!seen_var[letters[j].var]) {
        seen_var[letters[j].var] = true;
        pinned[j] = true;  // constant immediately left of the first occurrence
      }
    }
  }
  std::vector<uint32_t> free_pos;
  for (uint32_t j = 0; j <= l; ++j)
    if (!pinned[j]) free_pos.push_back(j);

  std::vector<bool> critical(l + 1, false);  // inner position j critical?
  for (uint32_t j = 1; j < l; ++j)
    critical[j] = is_critical_pair(letters[j - 1], letters[j]);

  IndexedWord iw;
  iw.letters = letters;
  iw.constants.assign(l + 1, g.identity_idx);

  std::vector<uint16_t> odo(free_pos.size(), 0);
  uint32_t r = 0;
  for (const Letter& t : letters) r = std::max(r, t.var);

  for (;;) {
    for (size_t k = 0; k < free_pos.size(); ++k) iw.constants[free_pos[k]] = odo[k];

    bool reduced = true;
    for (uint32_t j = 1; j < l && reduced; ++j) {
      uint16_t c = iw.constants[j];
      if (critical[j]) {
        if (g.scalar_flag[c]) reduced = false;
      } else if (g.scalar_flag[c] && c != g.identity_idx) {
        reduced = false;
      }
    }

    if (reduced) {
      ++res.words_tested;
      bool all_identity = true;
      bool ok = for_each_tuple(r, order, [&](const std::vector<uint16_t>& t) {
        if (eval_budget && res.evaluations >= eval_budget) return false;
        ++res.evaluations;
        if (evaluate_indexed(iw, g, t) != g.identity_idx) {
          all_identity = false;
          return false;
        }
        return true;
      });
      if (!ok && all_identity) {  // aborted by budget, not by a counterexample
        res.budget_hit = true;
        return res;
      }
      if (all_identity) res.found.push_back(iw);
    } else {
      ++res.pruned_unreduced;
    }

    size_t k = 0;
    while (k < odo.size()) {
      if (++odo[k] < order) break;
      odo[k] = 0;
      ++k;
    }
    if (k == odo.size()) break;
  }
  return res;
}

inline std::vector<std::vector<Letter>> letter_patterns(uint32_t r, uint32_t l) {
  std::vector<std::vector<Letter>> out;
  std::vector<uint32_t> odo(l, 0);  // digit: (var-1)*2 + (exp<0)
  for (;;) {
    std::vector<Letter> letters(l);
    for (uint32_t j = 0; j < l; ++j)
      letters[j] = Letter{1 + odo[j] / 2, (odo[j] % 2) ? -1 : 1};
    out.push_back(std::move(letters));
    uint32_t k = 0;
    while (k < l) {
      if (++odo[k] < 2 * r) break;
      odo[k] = 0;
      ++k;
    }
    if (k == l) break;
  }
  return out;
}

inline bool pattern_singular(const std::vector<Letter>& letters) {
  std::vector<Letter> stack;
  for (const Letter& t : letters) {
    if (!stack.empty() && stack.back().var == t.var && stack.back().exp == -t.exp)
      stack.pop_back();
    else
      stack.push_back(t);
  }
  return stack.empty();
}

}  // namespace detail

/// Breadth-first search for the shortest mixed identity: lengths 1, 2, ...
/// up to max_length, full constant enumeration per letter pattern, stopping
/// at the first length that yields identities.  Every hit is re-verified
/// against the actual matrices (not just the Cayley table) before being
/// reported.  Deterministic for every worker count: the pattern list is
/// fixed and workers only partition it.
inline SearchReport shortest_identity_search(const SmallGroup& g,
                                             const SearchOptions& opt) {
  require(opt.num_vars >= 1 && opt.num_vars <= 4, "validation_error",
          "search supports 1 to 4 variables");
  require(opt.workers >= 1, "validation_error", "workers must be >= 1");
  SearchReport rep;
  rep.max_length = opt.max_length;

  for (uint32_t l = opt.start_length; l <= opt.max_length; ++l) {
    auto patterns = detail::letter_patterns(opt.num_vars, l);
    std::vector<std::vector<Letter>> active;
    for (auto& pat : patterns) {
      if (opt.nonsingular_only && detail::pattern_singular(pat)) {
        rep.pruned["singular_patterns"] += 1;
        continue;
      }
      active.push_back(std::move(pat));
    }

    std::vector<detail::PatternSearchResult> results(active.size());
    uint64_t per_worker_budget =
        opt.budget == 0 ? 0 : std::max<uint64_t>(1, opt.budget / opt.workers);

    auto run_range = [&](uint32_t worker_id) {
      uint64_t spent = 0;
      for (size_t p = worker_id; p < active.size(); p += opt.workers) {
        if (per_worker_budget && spent >= per_worker_budget) {
          results[p].budget_hit = true;
          return;
        }
        uint64_t left = per_worker_budget == 0 ? 0 : per_worker_budget - spent;
        results[p] = detail::search_pattern(g, active[p], opt.prune, left);
        spent += results[p].evaluations;
        if (results[p].budget_hit) return;
      }
    };
    if (opt.workers == 1) {
      run_range(0);
    } else {
      std::vector<std::thread> threads;
      for (uint32_t t = 0; t < opt.workers; ++t)
        threads.emplace_back(run_range, t);
      for (auto& t : threads) t.join();
    }

    bool budget_hit = false;
    std::vector<detail::IndexedWord> found;
    for (auto& r : results) {
      rep.evaluations += r.evaluations;
      rep.words_tested += r.words_tested;
      rep.pruned["unreduced_words"] += r.pruned_unreduced;
      budget_hit = budget_hit || r.budget_hit;
      for (auto& iw : r.found) found.push_back(std::move(iw));
    }
    if (opt.prune) rep.pruned["pinned_patterns"] += (uint64_t)active.size();

    if (budget_hit) throw BudgetExceeded(std::move(rep));

    if (!found.empty()) {
      for (const auto& iw : found) {
        std::vector<Mat> constants;
        constants.reserve(iw.constants.size());
        for (uint16_t c : iw.constants) constants.push_back(g.elements[c]);
        Word w(g.field, g.n, opt.num_vars, iw.letters, std::move(constants));
        // independent re-verification on the actual matrices
        bool verified = true;
        detail::for_each_tuple(opt.num_vars, g.order(),
                               [&](const std::vector<uint16_t>& t) {
          ++rep.verification_evaluations;
          std::vector<Mat> tuple;
          tuple.reserve(t.size());
          for (uint16_t e : t) tuple.push_back(g.elements[e]);
          Mat img = evaluate(w, tuple);
          bool id = g.kind == GroupKind::PSL ? img.scalar_value().has_value()
                                             : img.is_identity();
          if (!id) { verified = false; return false; }
          return true;
        });
        require(verified, "internal",
                "table search hit failed matrix re-verification");
        rep.identities.push_back({std::move(w), detail::pattern_singular(iw.letters)});
      }
      rep.found_length = l;
      rep.complete = true;
      return rep;
    }
    if (opt.on_length_done) opt.on_length_done(l, rep.evaluations);
  }
  rep.complete = true;
  return rep;
}

}  // namespace glwords
