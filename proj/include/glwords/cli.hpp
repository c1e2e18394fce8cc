#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "error.hpp"
#include "image.hpp"
#include "io.hpp"
#include "rational.hpp"
#include "smallgroup.hpp"
#include "tower.hpp"
#include "witness.hpp"
#include "word.hpp"

namespace glwords {

namespace cli_detail {

struct UsageFailure {
  std::string message;
};

inline GroupKind parse_group(const std::string& s) {
  if (s == "gl") return GroupKind::GL;
  if (s == "sl") return GroupKind::SL;
  if (s == "psl") return GroupKind::PSL;
  throw UsageFailure{"--group must be gl, sl or psl"};
}

inline json rational_json(const Rational& r) {
  return json{{"num", r.num()}, {"den", r.den()}, {"str", r.str()}};
}

/// Word inputs: a DSL text file plus either a constants file (which carries
/// the field and dimension) or explicit --p/--e/--n flags for constant-free
/// words.
struct WordLoader {
  std::string word_path;
  std::string constants_path;
  uint32_t p = 0, e = 1, n = 0;

  void attach(CLI::App* cmd, bool constants_optional = true) {
    cmd->add_option("--word", word_path, "word DSL file")->required();
    auto* c = cmd->add_option("--constants", constants_path,
                              "constants JSON file (field, n, constants)");
    if (!constants_optional) c->required();
    cmd->add_option("--p", p, "field characteristic (constant-free words)");
    cmd->add_option("--e", e, "field extension degree (default 1)");
    cmd->add_option("--n", n, "matrix dimension (constant-free words)");
  }

  Word load() const {
    std::string text = load_text_file(word_path);
    if (!constants_path.empty()) {
      ConstantsFile cf = constants_from_json(load_json_file(constants_path));
      return parse_word(text, cf.field, cf.n, cf.constants);
    }
    if (p == 0 || n == 0)
      throw UsageFailure{"need --constants, or --p (and --n) for constant-free words"};
    return parse_word(text, Fq::make(p, e), n, {});
  }
};

inline int emit(const json& report, bool pretty, const std::string& out_path,
                std::ostream& os) {
  std::string text = pretty ? report.dump(2) : report.dump();
  text += "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    require(f.good(), "io_error", "cannot write " + out_path);
    f << text;
  } else {
    os << text;
  }
  return 0;
}

inline json matrix_list_json(const Fq& f, uint32_t n, const std::vector<Mat>& ms) {
  json arr = json::array();
  for (const Mat& m : ms) arr.push_back(matrix_entries(m));
  return json{{"field", field_to_json(f)}, {"n", n}, {"matrices", std::move(arr)}};
}

inline std::pair<uint32_t, uint32_t> parse_levels(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      uint32_t v = (uint32_t)std::stoul(s);
      return {v, v};
    }
    uint32_t a = (uint32_t)std::stoul(s.substr(0, dots));
    uint32_t b = (uint32_t)std::stoul(s.substr(dots + 2));
    if (a > b) throw UsageFailure{"--levels range must be increasing"};
    return {a, b};
  } catch (const UsageFailure&) {
    throw;
  } catch (const std::exception&) {
    throw UsageFailure{"--levels expects A..B or a single level"};
  }
}

inline uint32_t log2_exact(uint32_t v) {
  uint32_t k = 0;
  while ((1u << k) < v) ++k;
  require((1u << k) == v, "validation_error",
          "dimension must be a power of two for the tower");
  return k;
}

// --------------------------------------------------------------- selftest --

inline json run_selftest() {
  json checks = json::object();
  auto record = [&](const std::string& name, bool ok) { checks[name] = ok; };

  {
    bool ok = true;
    for (auto [p, e] : std::vector<std::pair<uint32_t, uint32_t>>{
             {2, 1}, {3, 1}, {2, 2}, {3, 2}, {5, 1}}) {
      Fq f = Fq::make(p, e);
      Prng rng(7);
      for (int t = 0; t < 200 && ok; ++t) {
        uint32_t a = (uint32_t)rng.below(f.q());
        uint32_t b = (uint32_t)rng.below(f.q());
        uint32_t c = (uint32_t)rng.below(f.q());
        ok = ok && f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
        ok = ok && f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a);
        if (a != 0) ok = ok && f.mul(a, f.inv(a)) == f.one();
      }
    }
    record("field_axioms", ok);
  }
  {
    Fq f = Fq::make(2, 1);
    Prng rng(11);
    bool ok = true;
    for (int t = 0; t < 50 && ok; ++t) {
      Mat m = random_matrix(f, 4, rng);
      Subspace s1 = Subspace::span(m);
      // shuffle rows: the canonical basis must not change
      Mat m2(f, 4, 4);
      for (uint32_t i = 0; i < 4; ++i) m2.set_row(i, m.row(3 - i));
      ok = ok && s1 == Subspace::span(m2);
    }
    record("subspace_canonical", ok);
  }
  {
    Fq f = Fq::make(2, 1);
    uint32_t n = 5;
    Mat c(f, n, n);
    for (uint32_t i = 0; i < n; ++i) c.set(i, i, 1);
    c.set(0, 1, 1);  // non-scalar, invertible
    std::vector<Letter> L{{1, 1}, {1, 1}};
    std::vector<Mat> C{Mat::identity(f, n), c, Mat::identity(f, n)};
    Word w(f, n, 1, L, C);
    Mat sources(f, 1, n), targets(f, 1, n);
    sources.set(0, 0, 1);
    targets.set(0, 1, 1);
    WitnessResult res = construct_witness(w, sources, targets, GroupKind::GL, 5);
    record("witness_small_instance", res.h.size() == 1);
  }
  {
    Fq f = Fq::make(2, 1);
    SmallGroup g = enumerate_group(GroupKind::GL, f, 2);
    record("gl2_f2_order", g.order() == 6);
    LawCheckResult law = is_law({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}}, 1, g);
    record("gl2_f2_exponent_law", law.holds && g.exponent == 6);
  }
  {
    Fq f = Fq::make(3, 1);
    Mat m = companion_matrix(f, irreducible_polynomial(f, 3));
    record("norm_of_irreducible_companion", projective_norm(m) == 3);
  }

  bool ok = true;
  for (auto it = checks.begin(); it != checks.end(); ++it)
    ok = ok && it.value().get<bool>();
  return json{{"command", "selftest"}, {"ok", ok}, {"checks", checks}};
}

}  // namespace cli_detail

/// Entry point used by the binary and by tests.  Returns the process exit
/// code: 0 success, 1 domain error (error JSON on stdout), 2 usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  using cli_detail::UsageFailure;
  using cli_detail::WordLoader;

  CLI::App app{"exact word maps with constants over GL_n(F_q)"};
  app.require_subcommand(1);
  bool pretty = false;
  std::string out_path;
  app.add_flag("--pretty", pretty, "indent the JSON report");
  app.add_option("--out", out_path, "write the report to a file instead of stdout");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a word at a tuple");
  WordLoader eval_word;
  eval_word.attach(eval_cmd);
  std::string eval_tuple;
  eval_cmd->add_option("--tuple", eval_tuple, "tuple JSON file")->required();

  // --- reduce ---
  auto* reduce_cmd = app.add_subcommand("reduce", "reduce a word");
  WordLoader reduce_word;
  reduce_word.attach(reduce_cmd);

  // --- classify ---
  auto* classify_cmd = app.add_subcommand("classify", "classify inner positions");
  WordLoader classify_word;
  classify_word.attach(classify_cmd);

  // --- norm ---
  auto* norm_cmd = app.add_subcommand("norm", "projective rank seminorm of a matrix");
  std::string norm_matrix;
  norm_cmd->add_option("--matrix", norm_matrix, "matrix JSON file")->required();

  // --- crit-length ---
  auto* crit_cmd = app.add_subcommand("crit-length", "critical length of a word");
  WordLoader crit_word;
  crit_word.attach(crit_cmd);

  // --- witness ---
  auto* wit_cmd = app.add_subcommand(
      "witness", "construct a tuple mapping prescribed sources to targets");
  WordLoader wit_word;
  wit_word.attach(wit_cmd);
  std::string wit_sources, wit_targets, wit_group = "gl";
  uint64_t wit_seed = 0;
  bool wit_trace = false;
  wit_cmd->add_option("--sources", wit_sources, "sources matrix JSON file")->required();
  wit_cmd->add_option("--targets", wit_targets, "targets matrix JSON file")->required();
  wit_cmd->add_option("--group", wit_group, "gl or sl");
  wit_cmd->add_option("--seed", wit_seed, "PRNG seed")->required();
  wit_cmd->add_flag("--trace", wit_trace, "include the trajectory trace");

  // --- diameter ---
  auto* diam_cmd = app.add_subcommand("diameter", "diameter bounds for a word image");
  WordLoader diam_word;
  diam_word.attach(diam_cmd);
  uint64_t diam_seed = 0;
  uint32_t diam_samples = 8;
  diam_cmd->add_option("--seed", diam_seed, "PRNG seed")->required();
  diam_cmd->add_option("--samples", diam_samples, "empirical sample count");

  // --- check-identity ---
  auto* chk_cmd = app.add_subcommand("check-identity",
                                     "exhaustively test a word on a small group");
  WordLoader chk_word;
  chk_word.attach(chk_cmd);
  std::string chk_group = "gl";
  uint64_t chk_cap = 500;
  chk_cmd->add_option("--group", chk_group, "gl, sl or psl");
  chk_cmd->add_option("--cap", chk_cap, "group order cap");

  // --- search-identity ---
  auto* search_cmd = app.add_subcommand(
      "search-identity", "breadth-first shortest mixed identity search");
  uint32_t se_p = 0, se_e = 1, se_n = 2, se_r = 1, se_maxlen = 4, se_workers = 1;
  std::string se_group = "gl", se_checkpoint;
  uint64_t se_budget = 0, se_cap = 500;
  bool se_nonsingular = false, se_noprune = false;
  search_cmd->add_option("--p", se_p, "field characteristic")->required();
  search_cmd->add_option("--e", se_e, "field extension degree");
  search_cmd->add_option("--n", se_n, "matrix dimension");
  search_cmd->add_option("--group", se_group, "gl, sl or psl");
  search_cmd->add_option("--r", se_r, "number of variables");
  search_cmd->add_option("--max-length", se_maxlen, "maximum word length")->required();
  search_cmd->add_option("--budget", se_budget, "evaluation budget (0 = unlimited)");
  search_cmd->add_option("--workers", se_workers, "worker threads");
  search_cmd->add_option("--cap", se_cap, "group order cap");
  search_cmd->add_flag("--nonsingular", se_nonsingular,
                       "search non-singular words only");
  search_cmd->add_flag("--no-prune", se_noprune, "disable symmetry pruning");
  search_cmd->add_option("--checkpoint", se_checkpoint,
                         "checkpoint file (resume at length granularity)");

  // --- aq-demo ---
  auto* aq_cmd = app.add_subcommand(
      "aq-demo", "diameter floors of a word along the diagonal-embedding tower");
  WordLoader aq_word;
  aq_word.attach(aq_cmd);
  std::string aq_levels, aq_epsilon = "0";
  uint64_t aq_seed = 0;
  bool aq_seed_given = false;
  aq_cmd->add_option("--levels", aq_levels, "level range A..B")->required();
  aq_cmd->add_option("--epsilon", aq_epsilon, "perturbation radius (rational)");
  auto* aq_seed_opt = aq_cmd->add_option("--seed", aq_seed, "PRNG seed");

  // --- selftest ---
  auto* self_cmd = app.add_subcommand("selftest", "run built-in consistency checks");

  for (CLI::App* sc : {eval_cmd, reduce_cmd, classify_cmd, norm_cmd, crit_cmd,
                       wit_cmd, diam_cmd, chk_cmd, search_cmd, aq_cmd, self_cmd})
    sc->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  aq_seed_given = aq_seed_opt->count() > 0;

  try {
    json report;
    if (eval_cmd->parsed()) {
      Word w = eval_word.load();
      std::vector<Mat> tuple = tuple_from_json(load_json_file(eval_tuple));
      for (const Mat& m : tuple)
        require(m.field() == w.field() && m.rows() == w.dim(), "validation_error",
                "tuple entries must match the word's field and dimension");
      Mat result = evaluate(w, tuple);
      report = json{{"command", "eval"},
                    {"word", word_to_json(w)},
                    {"result", matrix_file_json(result)}};
    } else if (reduce_cmd->parsed()) {
      Word w = reduce_word.load();
      ReducednessReport before = is_reduced(w);
      Word r = reduce(w);
      json offenses = json::array();
      for (const auto& o : before.offenses)
        offenses.push_back(json{{"position", o.index}, {"reason", o.reason}});
      report = json{{"command", "reduce"},
                    {"was_reduced", before.reduced},
                    {"offenses", std::move(offenses)},
                    {"reduced", word_to_json(r)}};
    } else if (classify_cmd->parsed()) {
      Word w = classify_word.load();
      IndexClassification cls = classify_indices(w);
      std::string content_str;
      for (const Letter& t : content(w)) {
        if (!content_str.empty()) content_str += " * ";
        content_str += "x" + std::to_string(t.var) + (t.exp < 0 ? "^-1" : "");
      }
      report = json{{"command", "classify"},
                    {"length", w.length()},
                    {"j0", cls.j0},
                    {"jplus", cls.jplus},
                    {"jminus", cls.jminus},
                    {"reduced", bool(is_reduced(w))},
                    {"singular", is_singular(w)},
                    {"content", content_str}};
    } else if (norm_cmd->parsed()) {
      Mat m = matrix_from_file_json(load_json_file(norm_matrix));
      uint32_t nm = projective_norm(m);
      report = json{{"command", "norm"},
                    {"n", m.rows()},
                    {"projective_norm", nm},
                    {"normalized", cli_detail::rational_json(normalized_norm(m))}};
    } else if (crit_cmd->parsed()) {
      Word w = crit_word.load();
      uint32_t crit = critical_length(w);
      IndexClassification cls = classify_indices(w);
      json norms = json::array();
      for (uint32_t j : cls.jminus)
        norms.push_back(json{{"position", j},
                             {"norm", projective_norm(w.constant(j))}});
      report = json{{"command", "crit-length"},
                    {"critical_length", crit},
                    {"length", w.length()},
                    {"dim", w.dim()},
                    {"strong", cls.jminus.empty()},
                    {"critical_norms", std::move(norms)}};
    } else if (wit_cmd->parsed()) {
      Word w = wit_word.load();
      GroupKind group = cli_detail::parse_group(wit_group);
      require(group != GroupKind::PSL, "validation_error",
              "witness construction supports gl and sl");
      Mat sources = matrix_from_file_json(load_json_file(wit_sources));
      Mat targets = matrix_from_file_json(load_json_file(wit_targets));
      WitnessResult res = construct_witness(w, sources, targets, group, wit_seed);
      json h = json::array();
      for (const Mat& m : res.h) h.push_back(matrix_entries(m));
      report = json{{"command", "witness"},
                    {"group", wit_group},
                    {"seed", wit_seed},
                    {"d", sources.rows()},
                    {"field", field_to_json(w.field())},
                    {"n", w.dim()},
                    {"verified", true},
                    {"h", std::move(h)}};
      if (wit_trace) report["trace"] = trace_to_json(w.field(), res.trace);
    } else if (diam_cmd->parsed()) {
      Word w = diam_word.load();
      DiameterFloor floor = diameter_floor(w);
      json realized = json{{"available", false}};
      uint32_t lb = 0;
      uint32_t crit = floor.critical;
      uint32_t d_formula =
          (uint32_t)(std::min<uint64_t>(crit - 1, w.dim()) / w.length());
      if (w.length() >= 2 && d_formula >= 1) {
        DistantPair pair = realize_distant_pair(w, diam_seed);
        realized = json{{"available", true},
                        {"d", pair.d},
                        {"dist", pair.dist}};
        lb = pair.dist;
      }
      uint32_t emp = diam_samples >= 2
                         ? empirical_diameter(w, GroupKind::SL, diam_samples, diam_seed)
                         : 0;
      lb = std::max(lb, emp);
      json chain = json();
      if (!is_singular(w)) {
        ChainBoundReport cb = chain_bound(w, diam_samples, diam_seed);
        json steps = json::array();
        for (const ChainStep& s : cb.steps)
          steps.push_back(json{{"length", s.length},
                               {"critical", s.critical},
                               {"floor", s.floor_bound},
                               {"realized", s.realized},
                               {"meets_floor", s.meets_floor}});
        chain = json{{"bound", cli_detail::rational_json(cb.bound)},
                     {"scaled", cli_detail::rational_json(cb.scaled)},
                     {"chain_length", cb.chain_length},
                     {"steps", std::move(steps)},
                     {"verdict", cb.verdict}};
      }
      report = json{{"command", "diameter"},
                    {"seed", diam_seed},
                    {"samples", diam_samples},
                    {"floor",
                     json{{"integer", floor.integer_floor},
                          {"exact", cli_detail::rational_json(floor.exact)},
                          {"critical_length", floor.critical},
                          {"length", floor.length}}},
                    {"realized", std::move(realized)},
                    {"empirical", emp},
                    {"lower_bound", lb},
                    {"floor_met", (long long)lb >= floor.integer_floor},
                    {"singular", is_singular(w)},
                    {"chain", std::move(chain)}};
    } else if (chk_cmd->parsed()) {
      Word w = chk_word.load();
      GroupKind group = cli_detail::parse_group(chk_group);
      SmallGroup g = enumerate_group(group, w.field(), w.dim(), chk_cap);
      IdentityCheckResult res = is_mixed_identity(w, g);
      json cx = json();
      if (res.counterexample) {
        json tuple = json::array();
        for (uint16_t idx : *res.counterexample)
          tuple.push_back(matrix_entries(g.elements[idx]));
        cx = json{{"indices", *res.counterexample}, {"matrices", std::move(tuple)}};
      }
      report = json{{"command", "check-identity"},
                    {"group", chk_group},
                    {"order", g.order()},
                    {"exponent", g.exponent},
                    {"is_identity", res.is_identity},
                    {"singular", res.singular},
                    {"counterexample", std::move(cx)}};
    } else if (search_cmd->parsed()) {
      if (se_p == 0) throw UsageFailure{"--p is required"};
      Fq f = Fq::make(se_p, se_e);
      GroupKind group = cli_detail::parse_group(se_group);
      SmallGroup g = enumerate_group(group, f, se_n, se_cap);
      SearchOptions opt;
      opt.num_vars = se_r;
      opt.max_length = se_maxlen;
      opt.nonsingular_only = se_nonsingular;
      opt.budget = se_budget;
      opt.prune = !se_noprune;
      opt.workers = se_workers;
      if (!se_checkpoint.empty()) {
        std::ifstream in(se_checkpoint);
        if (in.good()) {
          try {
            json cp;
            in >> cp;
            opt.start_length = cp.value("completed_length", 0u) + 1;
          } catch (const std::exception&) {
            // unreadable checkpoint: start from scratch
          }
        }
        opt.on_length_done = [&se_checkpoint](uint32_t len, uint64_t evals) {
          std::ofstream f(se_checkpoint, std::ios::binary);
          f << json{{"completed_length", len}, {"evaluations", evals}}.dump() << "\n";
        };
      }
      auto report_json = [&](const SearchReport& rep, bool budget_hit) {
        json ids = json::array();
        for (const FoundIdentity& fi : rep.identities)
          ids.push_back(json{{"word", word_to_json(fi.word)},
                             {"singular", fi.singular}});
        json pr = json::object();
        for (const auto& [k, v] : rep.pruned) pr[k] = v;
        return json{{"command", "search-identity"},
                    {"group", se_group},
                    {"order", g.order()},
                    {"r", se_r},
                    {"max_length", rep.max_length},
                    {"found_length", rep.found_length},
                    {"identities", std::move(ids)},
                    {"evaluations", rep.evaluations},
                    {"verification_evaluations", rep.verification_evaluations},
                    {"words_tested", rep.words_tested},
                    {"pruned", std::move(pr)},
                    {"pruning", !se_noprune},
                    {"complete", rep.complete},
                    {"budget_exceeded", budget_hit}};
      };
      try {
        SearchReport rep = shortest_identity_search(g, opt);
        report = report_json(rep, false);
      } catch (const BudgetExceeded& b) {
        json partial = report_json(b.partial(), true);
        report = json{{"error",
                       json{{"code", b.code()},
                            {"message", std::string(b.what())},
                            {"partial", std::move(partial)}}}};
        cli_detail::emit(report, pretty, "", out);
        return 1;
      }
    } else if (aq_cmd->parsed()) {
      Word w = aq_word.load();
      Rational eps = Rational::parse(aq_epsilon);
      if (eps != Rational(0) && !aq_seed_given)
        throw UsageFailure{"--seed is required when --epsilon is nonzero"};
      auto [a, b] = cli_detail::parse_levels(aq_levels);
      uint32_t base = cli_detail::log2_exact(w.dim());
      require(a >= base, "validation_error",
              "levels must not be below the word's own level");
      json levels = json::array();
      std::optional<Rational> crit_norm;
      bool invariant = true;
      for (uint32_t m = a; m <= b; ++m) {
        LevelFloorReport rep = levelwise_image_floor(w, base, m, eps, aq_seed);
        if (!crit_norm) crit_norm = rep.critical_normalized;
        invariant = invariant && (*crit_norm == rep.critical_normalized);
        json jr = json{{"level", rep.level},
                       {"dim", rep.dim},
                       {"critical_length", rep.critical},
                       {"critical_normalized",
                        cli_detail::rational_json(rep.critical_normalized)},
                       {"floor", cli_detail::rational_json(rep.floor)},
                       {"positive", rep.positive}};
        if (rep.perturbation) {
          const PerturbationReport& p = *rep.perturbation;
          json dists = json::array();
          for (const Rational& d : p.constant_dists)
            dists.push_back(cli_detail::rational_json(d));
          jr["perturbation"] =
              json{{"epsilon", cli_detail::rational_json(p.epsilon)},
                   {"rank_budget", p.rank_budget},
                   {"constant_dists", std::move(dists)},
                   {"floor_perturbed", cli_detail::rational_json(p.floor_perturbed)},
                   {"difference", cli_detail::rational_json(p.difference)},
                   {"difference_bound",
                    cli_detail::rational_json(p.difference_bound)},
                   {"within_bound", p.within_bound}};
        }
        levels.push_back(std::move(jr));
      }
      report = json{{"command", "aq-demo"},
                    {"base_level", base},
                    {"epsilon", aq_epsilon},
                    {"levels", std::move(levels)},
                    {"normalized_critical_invariant", invariant}};
    } else if (self_cmd->parsed()) {
      report = cli_detail::run_selftest();
      int code = report["ok"].get<bool>() ? 0 : 1;
      cli_detail::emit(report, pretty, out_path, out);
      return code;
    }
    return cli_detail::emit(report, pretty, out_path, out);
  } catch (const UsageFailure& u) {
    err << "usage error: " << u.message << "\n";
    return 2;
  } catch (const Error& e) {
    json ej{{"error", json{{"code", e.code()}, {"message", std::string(e.what())}}}};
    cli_detail::emit(ej, pretty, "", out);
    return 1;
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace glwords
