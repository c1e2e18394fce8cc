#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "error.hpp"

namespace glwords {

/// The finite field F_q, q = p^e.  Elements are integer indices in [0, q):
/// the element with polynomial coordinates (a_0, ..., a_{e-1}) over F_p has
/// index a_0 + a_1 p + ... + a_{e-1} p^{e-1}.  For e = 1 the index is just
/// the residue.  Arithmetic is exact and O(1): multiplication and inversion
/// go through discrete-log tables built once per (p, e).
///
/// The modulus is the lexicographically smallest monic irreducible of degree
/// e (ordered by the integer encoding of the non-leading coefficients), so a
/// given (p, e) always yields the same element encoding.
class Fq {
 public:
  static constexpr uint64_t kMaxQ = 1u << 16;

  static Fq make(uint32_t p, uint32_t e);

  uint32_t p() const { return t_->p; }
  uint32_t e() const { return t_->e; }
  uint32_t q() const { return t_->q; }

  /// Monic modulus polynomial, low-to-high coefficients, length e+1.
  const std::vector<uint32_t>& modulus() const { return t_->modulus; }

  uint32_t zero() const { return 0; }
  uint32_t one() const { return 1 % t_->q; }  // q >= 2 always, so 1

  uint32_t add(uint32_t a, uint32_t b) const {
    const Tables& t = *t_;
    if (t.e == 1) return (a + b) % t.p;
    if (t.p == 2) return a ^ b;
    if (!t.add_table.empty()) return t.add_table[(size_t)a * t.q + b];
    return add_digitwise(a, b);
  }

  uint32_t neg(uint32_t a) const { return t_->neg_table[a]; }
  uint32_t sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }

  uint32_t mul(uint32_t a, uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    const Tables& t = *t_;
    return t.exp[((uint64_t)t.log[a] + t.log[b]) % (t.q - 1)];
  }

  uint32_t inv(uint32_t a) const {
    require(a != 0, "division_by_zero", "inverse of zero field element");
    const Tables& t = *t_;
    return t.exp[(t.q - 1 - t.log[a]) % (t.q - 1)];
  }

  uint32_t divq(uint32_t a, uint32_t b) const { return mul(a, inv(b)); }

  uint32_t pow(uint32_t a, uint64_t k) const {
    if (a == 0) return k == 0 ? one() : 0;
    const Tables& t = *t_;
    return t.exp[((uint64_t)t.log[a] * (k % (t.q - 1))) % (t.q - 1)];
  }

  /// Image of an ordinary integer under Z -> F_p c F_q.
  uint32_t from_int(uint64_t v) const { return (uint32_t)(v % t_->p); }

  /// Polynomial coordinates over F_p, length e, low-to-high.
  std::vector<uint32_t> coeffs(uint32_t a) const {
    std::vector<uint32_t> c(t_->e);
    for (uint32_t i = 0; i < t_->e; ++i) { c[i] = a % t_->p; a /= t_->p; }
    return c;
  }

  uint32_t from_coeffs(const std::vector<uint32_t>& c) const {
    require(c.size() <= t_->e, "validation_error",
            "coefficient list longer than extension degree");
    uint32_t a = 0;
    for (size_t i = c.size(); i-- > 0;) a = a * t_->p + (c[i] % t_->p);
    return a;
  }

  /// A fixed multiplicative generator (the smallest index of full order).
  uint32_t generator() const { return t_->generator; }

  bool operator==(const Fq& o) const { return t_->p == o.t_->p && t_->e == o.t_->e; }
  bool operator!=(const Fq& o) const { return !(*this == o); }

 private:
  struct Tables {
    uint32_t p, e, q;
    std::vector<uint32_t> modulus;
    std::vector<uint32_t> exp;        // exp[i] = generator^i, length q-1
    std::vector<uint32_t> log;        // log[exp[i]] = i, log[0] unused
    std::vector<uint32_t> neg_table;  // length q
    std::vector<uint16_t> add_table;  // flattened q*q, only for small q
    uint32_t generator = 0;
  };

  explicit Fq(std::shared_ptr<const Tables> t) : t_(std::move(t)) {}

  uint32_t add_digitwise(uint32_t a, uint32_t b) const {
    const Tables& t = *t_;
    uint32_t out = 0, mult = 1;
    for (uint32_t i = 0; i < t.e; ++i) {
      out += ((a % t.p) + (b % t.p)) % t.p * mult;
      a /= t.p; b /= t.p; mult *= t.p;
    }
    return out;
  }

  std::shared_ptr<const Tables> t_;

  friend class FqBuilder;
};

namespace detail {

// ---- polynomial helpers over F_p used only while building tables ----
// Polynomials are coefficient vectors, low-to-high, no trailing zeros
// (except the zero polynomial, which is the empty vector).

inline void poly_trim(std::vector<uint32_t>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::vector<uint32_t> poly_mul_p(const std::vector<uint32_t>& a,
                                        const std::vector<uint32_t>& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint32_t> c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + (uint64_t)a[i] * b[j]) % p;
  poly_trim(c);
  return c;
}

inline std::vector<uint32_t> poly_rem_p(std::vector<uint32_t> a,
                                        const std::vector<uint32_t>& b, uint32_t p) {
  // b monic
  while (a.size() >= b.size() && !a.empty()) {
    uint32_t c = a.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) {
      uint64_t sub = (uint64_t)c * b[i] % p;
      a[shift + i] = (uint32_t)((a[shift + i] + p - sub) % p);
    }
    poly_trim(a);
  }
  return a;
}

inline bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; (uint64_t)d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Non-leading coefficients of the integer-encoded candidate c, plus a monic
// leading 1: the polynomial sum_i digit_i(c) t^i + t^deg.
inline std::vector<uint32_t> monic_from_index(uint64_t c, uint32_t deg, uint32_t p) {
  std::vector<uint32_t> poly(deg + 1, 0);
  for (uint32_t i = 0; i < deg; ++i) { poly[i] = (uint32_t)(c % p); c /= p; }
  poly[deg] = 1;
  return poly;
}

inline bool poly_irreducible_p(const std::vector<uint32_t>& cand, uint32_t p) {
  uint32_t deg = (uint32_t)cand.size() - 1;
  if (deg == 1) return true;
  if (cand[0] == 0) return false;  // divisible by t
  for (uint32_t d = 1; 2 * d <= deg; ++d) {
    uint64_t count = 1;
    for (uint32_t i = 0; i < d; ++i) count *= p;
    for (uint64_t c = 0; c < count; ++c) {
      auto div = monic_from_index(c, d, p);
      if (poly_rem_p(cand, div, p).empty()) return false;
    }
  }
  return true;
}

inline std::vector<uint32_t> find_modulus(uint32_t p, uint32_t e) {
  if (e == 1) return {0, 1};  // the polynomial t
  uint64_t count = 1;
  for (uint32_t i = 0; i < e; ++i) count *= p;
  for (uint64_t c = 0; c < count; ++c) {
    auto cand = monic_from_index(c, e, p);
    if (poly_irreducible_p(cand, p)) return cand;
  }
  fail("internal", "no irreducible modulus found");  // unreachable
}

inline std::vector<uint32_t> prime_factors(uint32_t n) {
  std::vector<uint32_t> out;
  for (uint32_t d = 2; (uint64_t)d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

class FqBuilder {
 public:
  static std::shared_ptr<const Fq::Tables> build(uint32_t p, uint32_t e) {
    require(detail::is_prime_u32(p), "non_prime", "p = " + std::to_string(p) + " is not prime");
    require(e >= 1, "degree_zero", "extension degree must be >= 1");
    uint64_t q = 1;
    for (uint32_t i = 0; i < e; ++i) {
      q *= p;
      require(q <= Fq::kMaxQ, "field_too_large",
              "q = p^e exceeds the supported bound 2^16");
    }

    auto t = std::make_shared<Fq::Tables>();
    t->p = p; t->e = e; t->q = (uint32_t)q;
    t->modulus = detail::find_modulus(p, e);

    // index <-> coefficient helpers over F_p
    auto to_coeffs = [&](uint32_t a) {
      std::vector<uint32_t> c(e);
      for (uint32_t i = 0; i < e; ++i) { c[i] = a % p; a /= p; }
      detail::poly_trim(c);
      return c;
    };
    auto from_coeffs = [&](const std::vector<uint32_t>& c) {
      uint32_t a = 0;
      for (size_t i = c.size(); i-- > 0;) a = a * p + c[i];
      return a;
    };
    auto slow_mul = [&](uint32_t a, uint32_t b) {
      auto prod = detail::poly_mul_p(to_coeffs(a), to_coeffs(b), p);
      return from_coeffs(detail::poly_rem_p(prod, t->modulus, p));
    };
    auto slow_pow = [&](uint32_t a, uint64_t k) {
      uint32_t r = 1;
      while (k) {
        if (k & 1) r = slow_mul(r, a);
        a = slow_mul(a, a);
        k >>= 1;
      }
      return r;
    };

    t->neg_table.resize(q);
    for (uint32_t a = 0; a < q; ++a) {
      uint32_t out = 0, mult = 1, v = a;
      for (uint32_t i = 0; i < e; ++i) {
        out += (p - v % p) % p * mult;
        v /= p; mult *= p;
      }
      t->neg_table[a] = out;
    }

    // multiplicative generator: smallest index of order q-1
    uint32_t gen = 1;
    if (q > 2) {
      auto primes = detail::prime_factors(t->q - 1);
      for (uint32_t g = 2; g < q; ++g) {
        bool full = true;
        for (uint32_t r : primes) {
          if (slow_pow(g, (t->q - 1) / r) == 1) { full = false; break; }
        }
        if (full) { gen = g; break; }
      }
      require(gen != 1, "internal", "no multiplicative generator found");
    }
    t->generator = gen;

    t->exp.resize(t->q - 1);
    t->log.assign(t->q, 0);
    uint32_t acc = 1;
    for (uint32_t i = 0; i < t->q - 1; ++i) {
      t->exp[i] = acc;
      t->log[acc] = i;
      acc = slow_mul(acc, gen);
    }
    require(acc == 1, "internal", "generator order mismatch");

    if (e > 1 && p != 2 && q <= 512) {
      t->add_table.resize((size_t)q * q);
      for (uint32_t a = 0; a < q; ++a)
        for (uint32_t b = 0; b < q; ++b) {
          uint32_t out = 0, mult = 1, x = a, y = b;
          for (uint32_t i = 0; i < e; ++i) {
            out += ((x % p) + (y % p)) % p * mult;
            x /= p; y /= p; mult *= p;
          }
          t->add_table[(size_t)a * q + b] = (uint16_t)out;
        }
    }
    return t;
  }
};

inline Fq Fq::make(uint32_t p, uint32_t e) {
  static std::mutex mu;
  static std::map<std::pair<uint32_t, uint32_t>, std::shared_ptr<const Tables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, e);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, FqBuilder::build(p, e)).first;
  return Fq(it->second);
}

/// Lexicographically smallest monic irreducible of the given degree over F_q
/// (ordered by the base-q integer encoding of the non-leading coefficients).
/// Coefficients are field-element indices, low-to-high, length degree+1.
inline std::vector<uint32_t> irreducible_polynomial(const Fq& f, uint32_t degree) {
  require(degree >= 1, "validation_error", "degree must be >= 1");
  auto rem = [&](std::vector<uint32_t> a, const std::vector<uint32_t>& b) {
    while (!a.empty() && a.size() >= b.size()) {
      uint32_t c = a.back();
      size_t shift = a.size() - b.size();
      for (size_t i = 0; i < b.size(); ++i)
        a[shift + i] = f.sub(a[shift + i], f.mul(c, b[i]));
      while (!a.empty() && a.back() == 0) a.pop_back();
    }
    return a;
  };
  auto monic_at = [&](uint64_t c, uint32_t deg) {
    std::vector<uint32_t> poly(deg + 1, 0);
    for (uint32_t i = 0; i < deg; ++i) { poly[i] = (uint32_t)(c % f.q()); c /= f.q(); }
    poly[deg] = 1;
    return poly;
  };
  uint64_t count = 1;
  for (uint32_t i = 0; i < degree; ++i) {
    count *= f.q();
    require(count <= (1ull << 32), "validation_error", "degree too large to search");
  }
  for (uint64_t c = 0; c < count; ++c) {
    auto cand = monic_at(c, degree);
    if (degree > 1 && cand[0] == 0) continue;
    bool irred = true;
    for (uint32_t d = 1; irred && 2 * d <= degree; ++d) {
      uint64_t dcount = 1;
      for (uint32_t i = 0; i < d; ++i) dcount *= f.q();
      for (uint64_t dc = 0; dc < dcount; ++dc) {
        if (rem(cand, monic_at(dc, d)).empty()) { irred = false; break; }
      }
    }
    if (irred) return cand;
  }
  fail("internal", "no irreducible polynomial found");
}

}  // namespace glwords
