#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "posheaf/error.hpp"
#include "posheaf/field.hpp"

namespace posheaf {

template <class T>
using Vector = std::vector<T>;

/// Dense row-major matrix over the scalar type T. The field descriptor travels
/// with the matrix so prime-field zeros and ones carry their modulus.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(Field<T> field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), data_(rows * cols, field.zero()) {}

  static Matrix identity(Field<T> field, std::size_t n) {
    Matrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
    return m;
  }

  static Matrix from_rows(Field<T> field, const std::vector<std::vector<T>>& rows) {
    std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    Matrix m(field, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(ErrorCode::ShapeMismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  /// Convenience for tests and fixtures: integer entries.
  static Matrix from_ints(Field<T> field, std::size_t rows, std::size_t cols,
                          std::initializer_list<long long> entries) {
    Matrix m(field, rows, cols);
    if (entries.size() != rows * cols) throw Error(ErrorCode::ShapeMismatch, "entry count mismatch");
    std::size_t k = 0;
    for (long long v : entries) m.data_[k++] = field.from_int(v);
    return m;
  }

  const Field<T>& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  const std::vector<T>& data() const { return data_; }

  Vector<T> column(std::size_t j) const {
    Vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!field_.is_zero(x)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(field_, nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  /// Adds scale * m into the block starting at (r0, c0).
  void add_block(std::size_t r0, std::size_t c0, const Matrix& m, const T& scale) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!field_.is_zero(m(i, j))) (*this)(r0 + i, c0 + j) += scale * m(i, j);
  }

  Vector<T> apply(std::span<const T> x) const {
    if (x.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "vector length does not match columns");
    Vector<T> y(rows_, field_.zero());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!field_.is_zero((*this)(i, j))) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      throw Error(ErrorCode::ShapeMismatch, "cannot multiply " + a.shape() + " by " + b.shape());
    Matrix c(a.field_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (a.field_.is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }

  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x = s * x;
    return a;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      throw Error(ErrorCode::ShapeMismatch, "shape " + shape() + " vs " + b.shape());
  }

  Field<T> field_{};
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Entrywise conversion between scalar types (exact to real, or rational to Fp).
template <class To, class From>
Matrix<To> convert(const Matrix<From>& m, Field<To> to = {}) {
  Matrix<To> out(to, m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<From, Rational>)
        out(i, j) = to.from_rational(m(i, j));
      else if constexpr (std::is_same_v<From, To>)
        out(i, j) = m(i, j);
      else
        static_assert(std::is_same_v<From, Rational>, "unsupported conversion");
    }
  return out;
}

}  // namespace posheaf
