#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <set>
#include <vector>

#include <glwords/error.hpp>
#include <glwords/matrix.hpp>
#include <glwords/prng.hpp>
#include <glwords/sampling.hpp>
#include <glwords/subspace.hpp>

#include "oracles.hpp"

using namespace glwords;

namespace {
bool fails_with(const std::string& code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

Mat mat2(const Fq& f, std::vector<std::vector<uint32_t>> rows) {
  Mat m(f, (uint32_t)rows.size(), (uint32_t)rows[0].size());
  for (uint32_t i = 0; i < m.rows(); ++i)
    for (uint32_t j = 0; j < m.cols(); ++j) m.set(i, j, rows[i][j]);
  return m;
}
}  // namespace

TEST_CASE("matrix arithmetic basics") {
  Fq f = Fq::make(3, 1);
  Mat a = mat2(f, {{1, 2}, {0, 1}});
  Mat b = mat2(f, {{2, 0}, {1, 1}});
  CHECK(a * Mat::identity(f, 2) == a);
  CHECK((a * b) == mat2(f, {{1, 2}, {1, 1}}));
  CHECK((a + b) == mat2(f, {{0, 2}, {1, 2}}));
  CHECK((a - a).is_zero());
  CHECK(a.transpose() == mat2(f, {{1, 0}, {2, 1}}));
  CHECK(Mat::scalar(f, 2, 2).scalar_value() == std::optional<uint32_t>{2});
  CHECK(!a.scalar_value().has_value());

  Prng rng(1);
  Mat x = random_matrix(f, 3, rng), y = random_matrix(f, 3, rng),
      z = random_matrix(f, 3, rng);
  CHECK((x * y) * z == x * (y * z));
  CHECK(x * (y + z) == x * y + x * z);
}

TEST_CASE("rank, determinant and inverse match known values") {
  Fq f2 = Fq::make(2, 1);
  CHECK(rank(Mat::identity(f2, 4)) == 4);
  CHECK(rank(Mat(f2, 3, 3)) == 0);
  Mat sw = mat2(f2, {{0, 1}, {1, 0}});
  CHECK(rank(sw) == 2);
  CHECK(det(sw) == 1);  // -1 = 1 in characteristic 2
  CHECK(inverse(sw) == sw);

  Fq f3 = Fq::make(3, 1);
  Mat m = mat2(f3, {{1, 2}, {2, 1}});  // det = 1 - 4 = -3 = 0 mod 3
  CHECK(det(m) == 0);
  CHECK(rank(m) == 1);
  CHECK(fails_with("not_invertible", [&] { inverse(m); }));

  Mat u = mat2(f3, {{2, 1}, {1, 1}});  // det = 2 - 1 = 1
  CHECK(det(u) == 1);
  CHECK(u * inverse(u) == Mat::identity(f3, 2));
}

TEST_CASE("rank agrees with the enumeration oracle") {
  for (auto [p, n] : std::vector<std::pair<uint32_t, uint32_t>>{{2, 4}, {3, 3}}) {
    Fq f = Fq::make(p, 1);
    Prng rng(42 + p);
    for (int t = 0; t < 60; ++t) {
      Mat m = random_matrix(f, n, rng);
      REQUIRE(rank(m) == oracle::brute_rank(m));
    }
  }
}

TEST_CASE("determinant is multiplicative and detects singularity") {
  Fq f = Fq::make(5, 1);
  Prng rng(7);
  for (int t = 0; t < 50; ++t) {
    Mat a = random_matrix(f, 4, rng), b = random_matrix(f, 4, rng);
    REQUIRE(det(a * b) == f.mul(det(a), det(b)));
    REQUIRE((det(a) == 0) == (rank(a) < 4));
  }
  for (int t = 0; t < 20; ++t) {
    Mat g = random_invertible(f, 4, rng);
    REQUIRE(inverse(g) * g == Mat::identity(f, 4));
  }
}

TEST_CASE("rref produces a canonical basis") {
  Fq f = Fq::make(2, 1);
  Prng rng(9);
  for (int t = 0; t < 40; ++t) {
    Mat m = random_matrix(f, 4, rng);
    Subspace s = Subspace::span(m);
    // reversing rows, duplicating rows, and adding one row to another must
    // leave the canonical basis unchanged
    std::vector<Vec> rows;
    for (uint32_t i = 0; i < 4; ++i) rows.push_back(m.row(3 - i));
    rows.push_back(m.row(0));
    rows.push_back(oracle::vadd(f, m.row(1), m.row(2)));
    Subspace s2 = Subspace::span(f, rows, 4);
    REQUIRE(s == s2);
    REQUIRE(s.basis() == s2.basis());
  }
}

TEST_CASE("sum and intersection agree with set enumeration") {
  Fq f = Fq::make(2, 1);
  Prng rng(123);
  for (int t = 0; t < 60; ++t) {
    Subspace a = random_subspace(f, 4, (uint32_t)rng.below(4), rng);
    Subspace b = random_subspace(f, 4, (uint32_t)rng.below(4), rng);
    auto sa = oracle::subspace_set(a), sb = oracle::subspace_set(b);
    Subspace sum = subspace_sum(a, b);
    Subspace meet = subspace_intersect(a, b);
    REQUIRE(oracle::matches(sum, oracle::set_sum(f, sa, sb)));
    REQUIRE(oracle::matches(meet, oracle::set_intersection(sa, sb)));
    // dimension formula
    REQUIRE(sum.dim() + meet.dim() == a.dim() + b.dim());
  }
}

TEST_CASE("preimage under right multiplication") {
  Fq f = Fq::make(2, 1);
  // v * c with c = [[1,1],[0,1]] sends (a,b) to (a, a+b); the preimage of
  // span(e1) is the set with a+b = 0, i.e. span((1,1)).
  Mat c = mat2(f, {{1, 1}, {0, 1}});
  Subspace target = Subspace::span(f, {Mat::unit_vector(f, 2, 0)}, 2);
  Subspace pre = subspace_preimage(c, target);
  REQUIRE(pre.dim() == 1);
  CHECK(pre.contains({1, 1}));
  CHECK(!pre.contains({1, 0}));

  Prng rng(77);
  for (int t = 0; t < 60; ++t) {
    Mat g = random_matrix(f, 4, rng);  // preimage is defined for any map
    Subspace s = random_subspace(f, 4, (uint32_t)rng.below(5), rng);
    Subspace got = subspace_preimage(g, s);
    auto expect = oracle::brute_preimage(f, g, oracle::subspace_set(s));
    REQUIRE(oracle::matches(got, expect));
  }
}

TEST_CASE("preimage respects invertible composition") {
  Fq f = Fq::make(3, 1);
  Prng rng(5);
  for (int t = 0; t < 30; ++t) {
    Mat g = random_invertible(f, 4, rng);
    Subspace s = random_subspace(f, 4, 2, rng);
    Subspace pre = subspace_preimage(g, s);
    REQUIRE(pre.dim() == s.dim());
    REQUIRE(pre.apply(g) == s);
  }
}

TEST_CASE("avoid_union returns vectors outside every subspace") {
  Fq f = Fq::make(3, 1);
  Prng rng(31);
  for (int t = 0; t < 40; ++t) {
    std::vector<Subspace> subs;
    uint32_t k = 1 + (uint32_t)rng.below(3);
    for (uint32_t i = 0; i < k; ++i)
      subs.push_back(random_subspace(f, 4, 1 + (uint32_t)rng.below(3), rng));
    Prng r1(1000 + t), r2(1000 + t);
    Vec v = avoid_union(f, 4, subs, r1);
    for (const Subspace& s : subs) REQUIRE(!s.contains(v));
    REQUIRE(!vec_is_zero(v));
    // determinism: same seed, same vector
    REQUIRE(avoid_union(f, 4, subs, r2) == v);
  }
}

TEST_CASE("avoid_union rejects unions that cover the space") {
  Fq f = Fq::make(2, 1);
  // the three lines of F_2^2 cover it
  std::vector<Subspace> lines{
      Subspace::span(f, {{1, 0}}, 2),
      Subspace::span(f, {{0, 1}}, 2),
      Subspace::span(f, {{1, 1}}, 2),
  };
  Prng rng(3);
  CHECK(fails_with("union_covers_space", [&] { avoid_union(f, 2, lines, rng); }));
  std::vector<Subspace> full{Subspace::full(f, 3)};
  CHECK(fails_with("union_covers_space", [&] { avoid_union(f, 3, full, rng); }));
  // but q = 2 needs >= 3 lines: two lines leave a vector free
  std::vector<Subspace> two{lines[0], lines[1]};
  Vec v = avoid_union(f, 2, two, rng);
  CHECK(v == Vec{1, 1});
}

TEST_CASE("extend_to_basis completes independent rows to a basis") {
  Fq f = Fq::make(2, 1);
  Mat b = extend_to_basis(f, {{0, 1}}, 2);
  CHECK(b.row(0) == Vec{0, 1});
  CHECK(b.row(1) == Vec{1, 0});  // unit vector at the non-pivot column

  Prng rng(8);
  for (int t = 0; t < 40; ++t) {
    uint32_t n = 5, k = 1 + (uint32_t)rng.below(4);
    Mat fr = random_full_rank(f, k, n, rng);
    std::vector<Vec> rows;
    for (uint32_t i = 0; i < k; ++i) rows.push_back(fr.row(i));
    Mat ext = extend_to_basis(f, rows, n);
    REQUIRE(rank(ext) == n);
    for (uint32_t i = 0; i < k; ++i) REQUIRE(ext.row(i) == rows[i]);
  }
  CHECK(fails_with("dependent_input",
                   [&] { extend_to_basis(f, {{1, 1}, {1, 1}}, 2); }));
}

TEST_CASE("eigen spectrum on hand-checked matrices") {
  Fq f2 = Fq::make(2, 1);
  auto id_spec = eigen_spectrum(Mat::identity(f2, 2));
  REQUIRE(id_spec == std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}});

  // companion of t^2 + t + 1 has no eigenvalues over F_2
  Mat comp = companion_matrix(f2, {1, 1, 1});
  CHECK(eigen_spectrum(comp).empty());

  Fq f4 = Fq::make(2, 2);
  uint32_t a = f4.generator();
  Mat d = Mat::identity(f4, 3);
  d.set(2, 2, a);
  auto spec = eigen_spectrum(d);
  REQUIRE(spec.size() == 2);
  CHECK(spec[0] == std::pair<uint32_t, uint32_t>{1, 2});
  CHECK(spec[1] == std::pair<uint32_t, uint32_t>{a, 1});
}

TEST_CASE("eigen spectrum agrees with the enumeration oracle") {
  Fq f = Fq::make(3, 1);
  Prng rng(21);
  for (int t = 0; t < 40; ++t) {
    Mat m = random_matrix(f, 3, rng);
    REQUIRE(eigen_spectrum(m) == oracle::brute_eigen(m));
  }
}

TEST_CASE("invariant_complement grows U and shrinks W") {
  Fq f = Fq::make(2, 1);
  uint32_t n = 6;
  // g acts as identity on W = span(e3..e5) and shifts inside U
  Mat g = Mat::identity(f, n);
  g.set(0, 1, 1);
  Subspace u = Subspace::span(
      f, {Mat::unit_vector(f, n, 0), Mat::unit_vector(f, n, 1),
          Mat::unit_vector(f, n, 2)}, n);
  Subspace w = Subspace::span(
      f, {Mat::unit_vector(f, n, 3), Mat::unit_vector(f, n, 4),
          Mat::unit_vector(f, n, 5)}, n);
  auto [u2, w2] = invariant_complement(g, 1, w, u);
  CHECK(u2 == u);  // u was already invariant
  CHECK(w2 == w);
  CHECK(u2.apply(g) == u2);

  // now make g move a U-vector out of U: with U = span(e0 + e3), the image
  // (e0 + e3) g = e0 + e1 + e3 leaves U, so U' must grow to dimension 2
  Subspace u3 = Subspace::span(f, {{1, 0, 0, 1, 0, 0}}, n);
  Subspace w3 = Subspace::span(
      f, {Mat::unit_vector(f, n, 1), Mat::unit_vector(f, n, 2),
          Mat::unit_vector(f, n, 3), Mat::unit_vector(f, n, 4),
          Mat::unit_vector(f, n, 5)}, n);
  auto [u4, w4] = invariant_complement(g, 1, w3, u3);
  CHECK(u4.dim() == 2);
  CHECK(u4.dim() <= 2 * u3.dim());
  CHECK(u4.apply(g) == u4);
  CHECK(subspace_intersect(u4, w4).dim() == 0);
  CHECK(u4.dim() + w4.dim() == n);
  for (uint32_t i = 0; i < w4.dim(); ++i)
    REQUIRE(w3.contains(w4.basis().row(i)));  // W' <= W
}

TEST_CASE("invariant_complement validates its hypotheses") {
  Fq f = Fq::make(2, 1);
  Mat g = Mat::identity(f, 2);
  g.set(0, 1, 1);
  Subspace w = Subspace::span(f, {{1, 0}}, 2);  // e0 g = e0 + e1 != e0
  Subspace u = Subspace::span(f, {{0, 1}}, 2);
  CHECK(fails_with("not_scalar_on_w", [&] { invariant_complement(g, 1, w, u); }));
  Subspace w2 = Subspace::span(f, {{0, 1}}, 2);
  CHECK(fails_with("not_complement",
                   [&] { invariant_complement(g, 1, w2, w2); }));
}

TEST_CASE("invariant_complement postconditions hold on random instances") {
  Fq f = Fq::make(2, 1);
  uint32_t n = 6;
  Prng rng(55);
  int done = 0;
  while (done < 30) {
    // build g block-diagonally: arbitrary invertible on U0 = span(e0,e1),
    // identity on W0 = span(e2..e5); then conjugate to hide the splitting
    Mat block = random_invertible(f, 2, rng);
    Mat g(f, n, n);
    for (uint32_t i = 0; i < 2; ++i)
      for (uint32_t j = 0; j < 2; ++j) g.set(i, j, block.at(i, j));
    for (uint32_t i = 2; i < n; ++i) g.set(i, i, 1);
    Mat s = random_invertible(f, n, rng);
    Mat gc = inverse(s) * g * s;
    // under the row action, (y s) gc = (y g) s, so the standard splitting
    // transported by s is gc-compatible
    std::vector<Vec> urows, wrows;
    for (uint32_t i = 0; i < 2; ++i) urows.push_back(s.row(i));
    for (uint32_t i = 2; i < n; ++i) wrows.push_back(s.row(i));
    Subspace u = Subspace::span(f, urows, n);
    Subspace w = Subspace::span(f, wrows, n);
    auto [u2, w2] = invariant_complement(gc, 1, w, u);
    REQUIRE(u2.apply(gc) == u2);
    REQUIRE(u2.dim() <= 2 * u.dim());
    REQUIRE(u2.dim() + w2.dim() == n);
    REQUIRE(subspace_intersect(u2, w2).dim() == 0);
    for (uint32_t i = 0; i < w2.dim(); ++i) REQUIRE(w.contains(w2.basis().row(i)));
    ++done;
  }
}
