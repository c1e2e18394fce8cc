#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "matrix.hpp"
#include "subspace.hpp"
#include "witness.hpp"
#include "word.hpp"

namespace glwords {

using nlohmann::json;

// ---------------------------------------------------------------- fields --

inline json field_to_json(const Fq& f) { return json{{"p", f.p()}, {"e", f.e()}}; }

inline Fq field_from_json(const json& j) {
  require(j.is_object() && j.contains("p") && j.contains("e"), "parse_error",
          "field must be an object with p and e");
  require(j["p"].is_number_unsigned() && j["e"].is_number_unsigned(), "parse_error",
          "field p and e must be non-negative integers");
  return Fq::make(j["p"].get<uint32_t>(), j["e"].get<uint32_t>());
}

// --------------------------------------------------------------- entries --
// Prime-field entries serialize as plain integers; extension-field entries
// as coefficient lists low-to-high.  Integers are always accepted on input
// (embedded via Z -> F_p).

inline json entry_to_json(const Fq& f, uint32_t v) {
  if (f.e() == 1) return json(v);
  return json(f.coeffs(v));
}

inline uint32_t entry_from_json(const Fq& f, const json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    long long v = j.get<long long>();
    require(v >= 0, "parse_error", "matrix entries must be non-negative");
    return f.from_int((uint64_t)v);
  }
  require(j.is_array(), "parse_error", "entry must be an integer or coefficient list");
  std::vector<uint32_t> coeffs;
  for (const auto& c : j) {
    require(c.is_number_unsigned(), "parse_error", "coefficients must be integers");
    coeffs.push_back(c.get<uint32_t>());
  }
  return f.from_coeffs(coeffs);
}

// -------------------------------------------------------------- matrices --

inline json matrix_entries(const Mat& m) {
  json rows = json::array();
  for (uint32_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (uint32_t j = 0; j < m.cols(); ++j)
      row.push_back(entry_to_json(m.field(), m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_entries(const Fq& f, const json& j, uint32_t cols) {
  require(j.is_array() && !j.empty(), "parse_error", "matrix must be a nonempty array");
  Mat m(f, (uint32_t)j.size(), cols);
  for (uint32_t i = 0; i < j.size(); ++i) {
    require(j[i].is_array() && j[i].size() == cols, "parse_error",
            "matrix rows must all have length n");
    for (uint32_t c = 0; c < cols; ++c) m.set(i, c, entry_from_json(f, j[i][c]));
  }
  return m;
}

/// {"field": {...}, "n": ..., "matrix": [[...]]}
inline json matrix_file_json(const Mat& m) {
  return json{{"field", field_to_json(m.field())},
              {"n", m.cols()},
              {"matrix", matrix_entries(m)}};
}

inline Mat matrix_from_file_json(const json& j) {
  require(j.is_object() && j.contains("field") && j.contains("n") &&
              j.contains("matrix"),
          "parse_error", "expected an object with field, n, matrix");
  Fq f = field_from_json(j["field"]);
  uint32_t n = j["n"].get<uint32_t>();
  return matrix_from_entries(f, j["matrix"], n);
}

struct ConstantsFile {
  Fq field;
  uint32_t n;
  std::map<std::string, Mat> constants;
};

/// {"field": {...}, "n": ..., "constants": {"name": [[...]]}}
inline ConstantsFile constants_from_json(const json& j) {
  require(j.is_object() && j.contains("field") && j.contains("n") &&
              j.contains("constants"),
          "parse_error", "expected an object with field, n, constants");
  Fq f = field_from_json(j["field"]);
  uint32_t n = j["n"].get<uint32_t>();
  require(j["constants"].is_object(), "parse_error", "constants must be an object");
  ConstantsFile out{f, n, {}};
  for (auto it = j["constants"].begin(); it != j["constants"].end(); ++it)
    out.constants.emplace(it.key(), matrix_from_entries(f, it.value(), n));
  return out;
}

/// {"field": {...}, "n": ..., "matrices": [[[...]]]}
inline std::vector<Mat> tuple_from_json(const json& j) {
  require(j.is_object() && j.contains("field") && j.contains("n") &&
              j.contains("matrices"),
          "parse_error", "expected an object with field, n, matrices");
  Fq f = field_from_json(j["field"]);
  uint32_t n = j["n"].get<uint32_t>();
  require(j["matrices"].is_array(), "parse_error", "matrices must be an array");
  std::vector<Mat> out;
  for (const auto& m : j["matrices"]) out.push_back(matrix_from_entries(f, m, n));
  return out;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io_error", "cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const std::exception& e) {
    fail("parse_error", path + ": " + e.what());
  }
}

inline std::string load_text_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io_error", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// -------------------------------------------------------------- word DSL --
// w      := atom ('*' atom)*
// atom   := IDENT | 'x' INT | 'x' INT '^-1'
// IDENT  := [A-Za-z_][A-Za-z0-9_]*   (names refer to the constants map)
// Omitted constants (boundary or between letters) default to the identity.

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

inline bool atom_as_letter(const std::string& atom, Letter& out) {
  if (atom.size() < 2 || atom[0] != 'x' || !std::isdigit((unsigned char)atom[1]))
    return false;
  size_t i = 1;
  while (i < atom.size() && std::isdigit((unsigned char)atom[i])) ++i;
  int exp = 1;
  if (i != atom.size()) {
    if (atom.substr(i) != "^-1") return false;
    exp = -1;
  }
  unsigned long var = std::stoul(atom.substr(1, i - 1));
  require(var >= 1, "parse_error", "variable indices start at 1: " + atom);
  out = Letter{(uint32_t)var, exp};
  return true;
}

inline bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha((unsigned char)s[0]) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum((unsigned char)c) && c != '_') return false;
  return true;
}

}  // namespace detail

/// Parses the word DSL against a map of named constants.  The field and
/// dimension come from the surrounding context (the constants file or
/// explicit flags).
inline Word parse_word(const std::string& text, const Fq& f, uint32_t n,
                       const std::map<std::string, Mat>& constants) {
  std::vector<Letter> letters;
  std::vector<Mat> consts;
  Mat pending = Mat::identity(f, n);

  std::string body = detail::trim(text);
  require(!body.empty(), "parse_error", "empty word");
  std::vector<std::string> atoms;
  size_t start = 0;
  for (;;) {
    size_t star = body.find('*', start);
    atoms.push_back(detail::trim(body.substr(start, star - start)));
    if (star == std::string::npos) break;
    start = star + 1;
  }

  for (const std::string& atom : atoms) {
    require(!atom.empty(), "parse_error", "empty atom in word");
    Letter letter{0, 0};
    if (detail::atom_as_letter(atom, letter)) {
      consts.push_back(std::move(pending));
      pending = Mat::identity(f, n);
      letters.push_back(letter);
    } else {
      require(detail::is_ident(atom), "parse_error", "bad atom: " + atom);
      auto it = constants.find(atom);
      require(it != constants.end(), "unknown_constant",
              "constant not provided: " + atom);
      require(it->second.field() == f && it->second.rows() == n &&
                  it->second.cols() == n,
              "validation_error", "constant " + atom + " has the wrong shape");
      pending = pending * it->second;
    }
  }
  consts.push_back(std::move(pending));

  uint32_t r = 0;
  for (const Letter& t : letters) r = std::max(r, t.var);
  return Word(f, n, r, std::move(letters), std::move(consts));
}

struct WordJson {
  std::string dsl;
  json constants;  // object name -> entries
};

/// Renders a word back to DSL text plus a named-constants object (c0..cl,
/// identities omitted from the text and the map).
inline WordJson word_to_dsl(const Word& w) {
  WordJson out;
  out.constants = json::object();
  std::vector<std::string> atoms;
  for (uint32_t j = 0; j <= w.length(); ++j) {
    const Mat& c = w.constant(j);
    if (!c.is_identity()) {
      std::string name = "c" + std::to_string(j);
      atoms.push_back(name);
      out.constants[name] = matrix_entries(c);
    }
    if (j < w.length()) {
      const Letter& t = w.letter(j + 1);
      atoms.push_back("x" + std::to_string(t.var) +
                      (t.exp == -1 ? "^-1" : ""));
    }
  }
  if (atoms.empty()) {  // identity constant word
    atoms.push_back("c0");
    out.constants["c0"] = matrix_entries(w.constant(0));
  }
  std::string dsl;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (i) dsl += " * ";
    dsl += atoms[i];
  }
  out.dsl = std::move(dsl);
  return out;
}

inline json word_to_json(const Word& w) {
  WordJson pieces = word_to_dsl(w);
  return json{{"field", field_to_json(w.field())},
              {"n", w.dim()},
              {"r", w.num_vars()},
              {"length", w.length()},
              {"word", pieces.dsl},
              {"constants", pieces.constants}};
}

inline Word word_from_json(const json& j) {
  require(j.is_object() && j.contains("field") && j.contains("n") &&
              j.contains("word"),
          "parse_error", "expected an object with field, n, word");
  Fq f = field_from_json(j["field"]);
  uint32_t n = j["n"].get<uint32_t>();
  std::map<std::string, Mat> constants;
  if (j.contains("constants"))
    for (auto it = j["constants"].begin(); it != j["constants"].end(); ++it)
      constants.emplace(it.key(), matrix_from_entries(f, it.value(), n));
  return parse_word(j["word"].get<std::string>(), f, n, constants);
}

// ----------------------------------------------------------------- trace --

inline json vec_to_json(const Fq& f, const Vec& v) {
  json out = json::array();
  for (uint32_t x : v) out.push_back(entry_to_json(f, x));
  return out;
}

inline json trace_to_json(const Fq& f, const TrajectoryTrace& t) {
  json vp = json::array(), vm = json::array();
  for (uint32_t i = 0; i < t.d; ++i) {
    json rp = json::array(), rm = json::array();
    for (uint32_t j = 0; j < t.l; ++j) {
      rp.push_back(vec_to_json(f, t.v_plus[i][j]));
      rm.push_back(vec_to_json(f, t.v_minus[i][j]));
    }
    vp.push_back(std::move(rp));
    vm.push_back(std::move(rm));
  }
  json avoid = json::array();
  for (const AvoidanceRecord& a : t.avoidance)
    avoid.push_back(json{{"row", a.row},
                         {"position", a.position},
                         {"critical", a.critical},
                         {"avoided_dims", a.avoided_dims},
                         {"base_dim", a.base_dim},
                         {"chosen", vec_to_json(f, a.chosen)}});
  json certs = json::array();
  for (const CountingCertificate& c : t.certificates) {
    json spec = json::array();
    for (auto [lambda, mult] : c.spectrum)
      spec.push_back(json{{"lambda", entry_to_json(f, lambda)}, {"multiplicity", mult}});
    certs.push_back(json{{"row", c.row},
                         {"position", c.position},
                         {"constant_norm", c.constant_norm},
                         {"base_dim", c.base_dim},
                         {"base_dim_ok", c.base_dim_ok},
                         {"spectrum", std::move(spec)},
                         {"excluded", c.excluded.str()},
                         {"total", c.total.str()},
                         {"holds", c.holds},
                         {"norm_margin_ok", c.norm_margin_ok}});
  }
  return json{{"d", t.d},
              {"l", t.l},
              {"v_plus", std::move(vp)},
              {"v_minus", std::move(vm)},
              {"avoidance", std::move(avoid)},
              {"certificates", std::move(certs)}};
}

}  // namespace glwords
