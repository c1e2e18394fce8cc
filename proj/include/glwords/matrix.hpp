#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace glwords {

using Vec = std::vector<uint32_t>;

/// Dense matrix over F_q, row-major.  Vectors are rows (1 x n) and act on
/// the right of matrices throughout the library: the image of u under g is
/// u * g.
class Mat {
 public:
  Mat(Fq f, uint32_t rows, uint32_t cols)
      : f_(std::move(f)), rows_(rows), cols_(cols), a_((size_t)rows * cols, 0) {}

  static Mat identity(const Fq& f, uint32_t n) {
    Mat m(f, n, n);
    for (uint32_t i = 0; i < n; ++i) m.set(i, i, f.one());
    return m;
  }

  static Mat scalar(const Fq& f, uint32_t n, uint32_t lambda) {
    Mat m(f, n, n);
    for (uint32_t i = 0; i < n; ++i) m.set(i, i, lambda);
    return m;
  }

  static Mat from_rows(const Fq& f, const std::vector<Vec>& rows, uint32_t cols) {
    Mat m(f, (uint32_t)rows.size(), cols);
    for (uint32_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == cols, "shape_mismatch", "row length mismatch");
      for (uint32_t j = 0; j < cols; ++j) m.set(i, j, rows[i][j]);
    }
    return m;
  }

  static Vec unit_vector(const Fq& f, uint32_t n, uint32_t i) {
    Vec v(n, 0);
    v[i] = f.one();
    return v;
  }

  const Fq& field() const { return f_; }
  uint32_t rows() const { return rows_; }
  uint32_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  uint32_t at(uint32_t i, uint32_t j) const { return a_[(size_t)i * cols_ + j]; }
  void set(uint32_t i, uint32_t j, uint32_t v) { a_[(size_t)i * cols_ + j] = v; }

  Vec row(uint32_t i) const {
    return Vec(a_.begin() + (size_t)i * cols_, a_.begin() + (size_t)(i + 1) * cols_);
  }
  void set_row(uint32_t i, const Vec& v) {
    require(v.size() == cols_, "shape_mismatch", "row length mismatch");
    for (uint32_t j = 0; j < cols_; ++j) set(i, j, v[j]);
  }

  Mat operator*(const Mat& o) const {
    check_same_field(o);
    require(cols_ == o.rows_, "shape_mismatch", "matrix product shape mismatch");
    Mat r(f_, rows_, o.cols_);
    for (uint32_t i = 0; i < rows_; ++i)
      for (uint32_t k = 0; k < cols_; ++k) {
        uint32_t v = at(i, k);
        if (v == 0) continue;
        for (uint32_t j = 0; j < o.cols_; ++j)
          r.set(i, j, f_.add(r.at(i, j), f_.mul(v, o.at(k, j))));
      }
    return r;
  }

  Mat operator+(const Mat& o) const {
    check_same_shape(o);
    Mat r(f_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f_.add(a_[i], o.a_[i]);
    return r;
  }

  Mat operator-(const Mat& o) const {
    check_same_shape(o);
    Mat r(f_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f_.sub(a_[i], o.a_[i]);
    return r;
  }

  bool operator==(const Mat& o) const {
    return f_ == o.f_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat scaled(uint32_t lambda) const {
    Mat r(f_, rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f_.mul(a_[i], lambda);
    return r;
  }

  void scale_row(uint32_t i, uint32_t lambda) {
    for (uint32_t j = 0; j < cols_; ++j) set(i, j, f_.mul(at(i, j), lambda));
  }

  Mat transpose() const {
    Mat r(f_, cols_, rows_);
    for (uint32_t i = 0; i < rows_; ++i)
      for (uint32_t j = 0; j < cols_; ++j) r.set(j, i, at(i, j));
    return r;
  }

  bool is_zero() const {
    for (uint32_t v : a_) if (v != 0) return false;
    return true;
  }

  bool is_identity() const {
    if (!square()) return false;
    return *this == identity(f_, rows_);
  }

  /// lambda such that this == lambda * I, if any (lambda = 0 means the zero
  /// matrix).  Non-square matrices are never scalar.
  std::optional<uint32_t> scalar_value() const {
    if (!square() || rows_ == 0) return std::nullopt;
    uint32_t lambda = at(0, 0);
    for (uint32_t i = 0; i < rows_; ++i)
      for (uint32_t j = 0; j < cols_; ++j)
        if (at(i, j) != (i == j ? lambda : 0)) return std::nullopt;
    return lambda;
  }

  const std::vector<uint32_t>& data() const { return a_; }

 private:
  void check_same_field(const Mat& o) const {
    require(f_ == o.f_, "field_mismatch", "matrices over different fields");
  }
  void check_same_shape(const Mat& o) const {
    check_same_field(o);
    require(rows_ == o.rows_ && cols_ == o.cols_, "shape_mismatch",
            "matrix shape mismatch");
  }

  Fq f_;
  uint32_t rows_, cols_;
  std::vector<uint32_t> a_;
};

inline Vec vec_mat(const Fq& f, const Vec& v, const Mat& m) {
  require(v.size() == m.rows(), "shape_mismatch", "vector-matrix shape mismatch");
  Vec r(m.cols(), 0);
  for (uint32_t i = 0; i < m.rows(); ++i) {
    if (v[i] == 0) continue;
    for (uint32_t j = 0; j < m.cols(); ++j)
      r[j] = f.add(r[j], f.mul(v[i], m.at(i, j)));
  }
  return r;
}

inline bool vec_is_zero(const Vec& v) {
  for (uint32_t x : v) if (x != 0) return false;
  return true;
}

struct RrefResult {
  Mat mat;                     // reduced row-echelon form, zero rows dropped
  std::vector<uint32_t> pivots;
  uint32_t rank;
};

/// Reduced row echelon form with unit pivots; canonical for the row space.
inline RrefResult rref(const Mat& m) {
  const Fq& f = m.field();
  std::vector<Vec> rows;
  rows.reserve(m.rows());
  for (uint32_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));

  std::vector<uint32_t> pivots;
  uint32_t r = 0;
  for (uint32_t col = 0; col < m.cols() && r < rows.size(); ++col) {
    uint32_t sel = r;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    uint32_t inv = f.inv(rows[r][col]);
    for (uint32_t j = col; j < m.cols(); ++j) rows[r][j] = f.mul(rows[r][j], inv);
    for (uint32_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      uint32_t c = rows[i][col];
      for (uint32_t j = col; j < m.cols(); ++j)
        rows[i][j] = f.sub(rows[i][j], f.mul(c, rows[r][j]));
    }
    pivots.push_back(col);
    ++r;
  }
  Mat out(f, r, m.cols());
  for (uint32_t i = 0; i < r; ++i) out.set_row(i, rows[i]);
  return {out, pivots, r};
}

inline uint32_t rank(const Mat& m) { return rref(m).rank; }

inline uint32_t det(const Mat& m) {
  require(m.square(), "shape_mismatch", "determinant of non-square matrix");
  const Fq& f = m.field();
  uint32_t n = m.rows();
  std::vector<Vec> rows;
  rows.reserve(n);
  for (uint32_t i = 0; i < n; ++i) rows.push_back(m.row(i));
  uint32_t d = f.one();
  for (uint32_t col = 0; col < n; ++col) {
    uint32_t sel = col;
    while (sel < n && rows[sel][col] == 0) ++sel;
    if (sel == n) return 0;
    if (sel != col) {
      std::swap(rows[col], rows[sel]);
      d = f.mul(d, f.neg(f.one()));
    }
    d = f.mul(d, rows[col][col]);
    uint32_t inv = f.inv(rows[col][col]);
    for (uint32_t i = col + 1; i < n; ++i) {
      if (rows[i][col] == 0) continue;
      uint32_t c = f.mul(rows[i][col], inv);
      for (uint32_t j = col; j < n; ++j)
        rows[i][j] = f.sub(rows[i][j], f.mul(c, rows[col][j]));
    }
  }
  return d;
}

inline Mat inverse(const Mat& m) {
  require(m.square(), "shape_mismatch", "inverse of non-square matrix");
  const Fq& f = m.field();
  uint32_t n = m.rows();
  Mat aug(f, n, 2 * n);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < n; ++j) aug.set(i, j, m.at(i, j));
    aug.set(i, n + i, f.one());
  }
  RrefResult r = rref(aug);
  require(r.rank == n && r.pivots.size() == n && r.pivots[n - 1] == n - 1,
          "not_invertible", "matrix is singular");
  Mat out(f, n, n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) out.set(i, j, r.mat.at(i, n + j));
  return out;
}

inline Mat mat_pow(Mat m, uint64_t k) {
  require(m.square(), "shape_mismatch", "power of non-square matrix");
  Mat r = Mat::identity(m.field(), m.rows());
  while (k) {
    if (k & 1) r = r * m;
    m = m * m;
    k >>= 1;
  }
  return r;
}

/// Companion matrix of a monic polynomial (coefficients low-to-high,
/// length deg+1).  Acts on row vectors: e_i -> e_{i+1}, and the last basis
/// vector maps to minus the non-leading coefficients.
inline Mat companion_matrix(const Fq& f, const std::vector<uint32_t>& monic) {
  require(monic.size() >= 2, "validation_error", "companion of degree < 1");
  require(monic.back() == f.one(), "validation_error", "polynomial not monic");
  uint32_t n = (uint32_t)monic.size() - 1;
  Mat m(f, n, n);
  for (uint32_t i = 0; i + 1 < n; ++i) m.set(i, i + 1, f.one());
  for (uint32_t j = 0; j < n; ++j) m.set(n - 1, j, f.neg(monic[j]));
  return m;
}

}  // namespace glwords
