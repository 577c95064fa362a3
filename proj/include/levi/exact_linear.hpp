#pragma once

#include <optional>
#include <vector>

#include "levi/errors.hpp"
#include "levi/rational.hpp"

namespace levi {

using RatVec = std::vector<Rational>;

/// Dense matrix over exact rationals. Row-major, sized at construction.
class RatMat {
 public:
  RatMat() : rows_(0), cols_(0) {}
  RatMat(int rows, int cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    require(rows >= 0 && cols >= 0, ErrorCode::InvalidInput,
            "negative matrix dimension");
  }

  static RatMat identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& at(int i, int j) {
    check_index(i, j);
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  const Rational& at(int i, int j) const {
    check_index(i, j);
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  bool operator==(const RatMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const RatMat& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != 0) return false;
    return true;
  }

  RatMat operator+(const RatMat& o) const {
    require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::DimensionMismatch,
            "matrix addition shape mismatch");
    RatMat r(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k)
      r.data_[k] = data_[k] + o.data_[k];
    return r;
  }

  RatMat operator-(const RatMat& o) const {
    require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::DimensionMismatch,
            "matrix subtraction shape mismatch");
    RatMat r(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k)
      r.data_[k] = data_[k] - o.data_[k];
    return r;
  }

  RatMat operator*(const RatMat& o) const {
    require(cols_ == o.rows_, ErrorCode::DimensionMismatch,
            "matrix product shape mismatch");
    RatMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Rational& a = at(i, k);
        if (a == 0) continue;
        for (int j = 0; j < o.cols_; ++j) {
          const Rational& b = o.at(k, j);
          if (b != 0) r.at(i, j) += a * b;
        }
      }
    return r;
  }

  RatMat operator*(const Rational& s) const {
    RatMat r(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] * s;
    return r;
  }

  RatVec operator*(const RatVec& v) const {
    require(static_cast<int>(v.size()) == cols_, ErrorCode::DimensionMismatch,
            "matrix-vector shape mismatch");
    RatVec r(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (at(i, j) != 0) r[static_cast<std::size_t>(i)] += at(i, j) * v[static_cast<std::size_t>(j)];
    return r;
  }

  RatMat transpose() const {
    RatMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  /// Gauss-Jordan reduced row echelon form; see struct Echelon below.
  struct Echelon;
  Echelon rref() const;

  int rank() const;

  Rational det() const {
    require(rows_ == cols_, ErrorCode::DimensionMismatch,
            "determinant of non-square matrix");
    RatMat m(*this);
    Rational d = 1;
    for (int col = 0; col < cols_; ++col) {
      int pivot = -1;
      for (int i = col; i < rows_; ++i)
        if (m.at(i, col) != 0) { pivot = i; break; }
      if (pivot < 0) return 0;
      if (pivot != col) {
        for (int j = 0; j < cols_; ++j) std::swap(m.at(pivot, j), m.at(col, j));
        d = -d;
      }
      d *= m.at(col, col);
      const Rational inv = Rational(1) / m.at(col, col);
      for (int i = col + 1; i < rows_; ++i) {
        if (m.at(i, col) == 0) continue;
        const Rational f = m.at(i, col) * inv;
        for (int j = col; j < cols_; ++j) m.at(i, j) -= f * m.at(col, j);
      }
    }
    return d;
  }

  std::optional<RatMat> inverse() const;

 private:
  void check_index(int i, int j) const {
    require(i >= 0 && i < rows_ && j >= 0 && j < cols_,
            ErrorCode::IndexOutOfRange, "matrix index out of range");
  }

  int rows_, cols_;
  std::vector<Rational> data_;
};

struct RatMat::Echelon {
  RatMat reduced;
  std::vector<int> pivot_cols;
  int rank = 0;
};

inline RatMat::Echelon RatMat::rref() const {
  Echelon e{*this, {}, 0};
  RatMat& m = e.reduced;
  int row = 0;
  for (int col = 0; col < cols_ && row < rows_; ++col) {
    int pivot = -1;
    for (int i = row; i < rows_; ++i)
      if (m.at(i, col) != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    if (pivot != row)
      for (int j = 0; j < cols_; ++j) std::swap(m.at(pivot, j), m.at(row, j));
    const Rational inv = Rational(1) / m.at(row, col);
    for (int j = col; j < cols_; ++j) m.at(row, j) *= inv;
    for (int i = 0; i < rows_; ++i) {
      if (i == row || m.at(i, col) == 0) continue;
      const Rational f = m.at(i, col);
      for (int j = col; j < cols_; ++j) m.at(i, j) -= f * m.at(row, j);
    }
    e.pivot_cols.push_back(col);
    ++row;
  }
  e.rank = row;
  return e;
}

inline int RatMat::rank() const { return rref().rank; }

inline std::optional<RatMat> RatMat::inverse() const {
  require(rows_ == cols_, ErrorCode::DimensionMismatch,
          "inverse of non-square matrix");
  RatMat aug(rows_, 2 * cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
    aug.at(i, cols_ + i) = 1;
  }
  const Echelon e = aug.rref();
  if (e.rank < rows_ || e.pivot_cols.back() >= cols_) return std::nullopt;
  RatMat inv(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) inv.at(i, j) = e.reduced.at(i, cols_ + j);
  return inv;
}

/// Solves A x = b exactly. Returns the particular solution with every free
/// variable set to zero, or nullopt when the system is inconsistent.
inline std::optional<RatVec> solve_linear(const RatMat& a, const RatVec& b) {
  require(static_cast<int>(b.size()) == a.rows(), ErrorCode::DimensionMismatch,
          "right-hand side length mismatch");
  RatMat aug(a.rows(), a.cols() + 1);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[static_cast<std::size_t>(i)];
  }
  const RatMat::Echelon e = aug.rref();
  if (!e.pivot_cols.empty() && e.pivot_cols.back() == a.cols())
    return std::nullopt;
  RatVec x(static_cast<std::size_t>(a.cols()));
  for (int r = 0; r < e.rank; ++r)
    x[static_cast<std::size_t>(e.pivot_cols[static_cast<std::size_t>(r)])] =
        e.reduced.at(r, a.cols());
  return x;
}

}  // namespace levi
