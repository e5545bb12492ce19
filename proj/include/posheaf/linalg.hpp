#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "posheaf/error.hpp"
#include "posheaf/field.hpp"
#include "posheaf/matrix.hpp"

namespace posheaf {

template <class T>
struct RrefResult {
  Matrix<T> reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
};

namespace detail {

// row_i -= factor * pivot_row, touching only the pivot row's nonzero columns.
template <class T>
void axpy_row(std::span<T> target, const T& factor, std::span<const T> source,
              const std::vector<std::size_t>& support) {
  for (std::size_t j : support) target[j] -= factor * source[j];
}

template <class T>
std::vector<std::size_t> support_of(const Field<T>& f, std::span<const T> row, std::size_t from = 0) {
  std::vector<std::size_t> s;
  for (std::size_t j = from; j < row.size(); ++j)
    if (!f.is_zero(row[j])) s.push_back(j);
  return s;
}

}  // namespace detail

/// Reduced row echelon form by Gauss-Jordan elimination.
template <ExactScalar T>
RrefResult<T> rref(Matrix<T> m) {
  const auto& f = m.field();
  RrefResult<T> out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && f.is_zero(m(p, c))) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    T inv = f.one() / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j)
      if (!f.is_zero(m(r, j))) m(r, j) *= inv;
    auto support = detail::support_of<T>(f, m.row(r), c);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || f.is_zero(m(i, c))) continue;
      T factor = m(i, c);
      detail::axpy_row<T>(m.row(i), factor, m.row(r), support);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.rank = r;
  out.reduced = std::move(m);
  return out;
}

/// Rank by forward elimination only.
template <ExactScalar T>
std::size_t rank(Matrix<T> m) {
  const auto& f = m.field();
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && f.is_zero(m(p, c))) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = c; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    T inv = f.one() / m(r, c);
    auto support = detail::support_of<T>(f, m.row(r), c);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (f.is_zero(m(i, c))) continue;
      T factor = m(i, c) * inv;
      detail::axpy_row<T>(m.row(i), factor, m.row(r), support);
    }
    ++r;
  }
  return r;
}

/// Right null space in free-variable form: one vector per non-pivot column,
/// carrying 1 at that column.
template <ExactScalar T>
std::vector<Vector<T>> kernel_basis(const Matrix<T>& m) {
  const auto& f = m.field();
  auto r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<Vector<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vector<T> v(m.cols(), f.zero());
    v[free] = f.one();
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.reduced(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Matrix inverse; throws NonInvertibleMap for singular or non-square input.
template <class T>
Matrix<T> inverse(const Matrix<T>& m) {
  const auto& f = m.field();
  const std::size_t n = m.rows();
  if (m.cols() != n) throw Error(ErrorCode::NonInvertibleMap, "non-square map " + m.shape());
  Matrix<T> a = m, inv = Matrix<T>::identity(f, n);
  double scale = 0.0;
  if constexpr (!ExactScalar<T>)
    for (const auto& x : m.data()) scale = std::max(scale, std::abs(x));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    if constexpr (ExactScalar<T>) {
      while (p < n && f.is_zero(a(p, c))) ++p;
      if (p == n) throw Error(ErrorCode::NonInvertibleMap, "singular map");
    } else {
      for (std::size_t i = c + 1; i < n; ++i)
        if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
      if (std::abs(a(p, c)) <= 1e-12 * std::max(scale, 1.0))
        throw Error(ErrorCode::NonInvertibleMap, "numerically singular map");
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(p, j), a(c, j));
      std::swap(inv(p, j), inv(c, j));
    }
    T piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) = a(c, j) / piv;
      inv(c, j) = inv(c, j) / piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || f.is_zero(a(i, c))) continue;
      T factor = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= factor * a(c, j);
        inv(i, j) -= factor * inv(c, j);
      }
    }
  }
  return inv;
}

/// Echelon set of fully reduced rows: each row has a leading 1 at its pivot
/// and zeros at every other row's pivot.
template <ExactScalar T>
class ReducedEchelon {
 public:
  explicit ReducedEchelon(Field<T> f) : field_(f) {}

  static ReducedEchelon row_space(const Matrix<T>& rows) {
    ReducedEchelon e(rows.field());
    auto r = rref(rows);
    for (std::size_t i = 0; i < r.rank; ++i) {
      auto row = r.reduced.row(i);
      e.rows_.emplace_back(row.begin(), row.end());
      e.pivots_.push_back(r.pivots[i]);
    }
    return e;
  }

  Vector<T> reduce(Vector<T> v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      T c = v[pivots_[k]];
      if (field_.is_zero(c)) continue;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (!field_.is_zero(rows_[k][j])) v[j] -= c * rows_[k][j];
    }
    return v;
  }

  /// Inserts a vector already reduced against this set. Returns false if zero.
  bool insert_reduced(Vector<T> r) {
    std::size_t p = 0;
    while (p < r.size() && field_.is_zero(r[p])) ++p;
    if (p == r.size()) return false;
    T inv = field_.one() / r[p];
    for (auto& x : r) x *= inv;
    for (auto& row : rows_) {
      T c = row[p];
      if (field_.is_zero(c)) continue;
      for (std::size_t j = 0; j < row.size(); ++j)
        if (!field_.is_zero(r[j])) row[j] -= c * r[j];
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  Field<T> field_;
  std::vector<Vector<T>> rows_;
  std::vector<std::size_t> pivots_;
};

template <ExactScalar T>
std::vector<Vector<T>> identity_vectors(const Field<T>& f, std::size_t n) {
  std::vector<Vector<T>> v(n, Vector<T>(n, f.zero()));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = f.one();
  return v;
}

/// Representatives of a basis of ker(out) / im(in) on a space of dimension n.
/// `out` maps the space away (n columns); `in` maps into it (n rows).
/// Cycles come in free-variable form and are reduced modulo an RREF basis of
/// the boundaries; the reduced vectors are kept.
template <ExactScalar T>
std::vector<Vector<T>> subquotient_basis(const Field<T>& f, std::size_t n, const Matrix<T>& out,
                                         const Matrix<T>& in) {
  auto cycles = out.rows() == 0 ? identity_vectors(f, n) : kernel_basis(out);
  auto boundaries = ReducedEchelon<T>::row_space(in.empty() ? Matrix<T>(f, 0, n) : in.transpose());
  auto span = boundaries;
  std::vector<Vector<T>> reps;
  for (auto& z : cycles) {
    auto residual = span.reduce(z);
    if (!span.insert_reduced(residual)) continue;
    reps.push_back(boundaries.reduce(std::move(z)));
  }
  return reps;
}

/// dim ker(out) - rank(in), by rank counts only.
template <ExactScalar T>
std::size_t subquotient_dim(std::size_t n, const Matrix<T>& out, const Matrix<T>& in) {
  std::size_t kernel = n - (out.empty() ? 0 : rank(out));
  return kernel - (in.empty() ? 0 : rank(in));
}

/// Augmented chain complex on generators A: boundary(b, a) is the coefficient
/// of b in the boundary of a. Degrees lie in {-1, 0, 1, ...}.
template <class T>
struct AugChainComplex {
  std::vector<int> degree;
  Matrix<T> boundary;

  std::size_t size() const { return degree.size(); }
};

template <class T>
struct HomologyBasisResult {
  std::vector<int> degree;
  std::vector<Vector<T>> chains;  // each of length |A|

  /// Number of generators per degree, indexed from degree -1.
  std::map<int, std::size_t> counts() const {
    std::map<int, std::size_t> c;
    for (int d : degree) ++c[d];
    return c;
  }
};

template <ExactScalar T>
void validate_complex(const AugChainComplex<T>& c) {
  const auto& m = c.boundary;
  const auto& f = m.field();
  if (m.rows() != c.size() || m.cols() != c.size())
    throw Error(ErrorCode::DimensionMismatch, "boundary matrix must be |A| x |A|");
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = 0; b < c.size(); ++b)
      if (!f.is_zero(m(b, a)) && c.degree[a] != c.degree[b] + 1)
        throw Error(ErrorCode::DegreeViolation, "generator " + std::to_string(a) + " of degree " +
                                                    std::to_string(c.degree[a]) + " hits degree " +
                                                    std::to_string(c.degree[b]));
  if (!(m * m).is_zero()) throw Error(ErrorCode::NotAComplex, "boundary does not square to zero");
}

template <ExactScalar T>
HomologyBasisResult<T> homology_basis(const AugChainComplex<T>& c) {
  validate_complex(c);
  const auto& f = c.boundary.field();
  std::map<int, std::vector<std::size_t>> by_degree;
  for (std::size_t a = 0; a < c.size(); ++a) by_degree[c.degree[a]].push_back(a);
  auto sub = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Matrix<T> b(f, rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) b(i, j) = c.boundary(rows[i], cols[j]);
    return b;
  };
  static const std::vector<std::size_t> none;
  auto at = [&](int d) -> const std::vector<std::size_t>& {
    auto it = by_degree.find(d);
    return it == by_degree.end() ? none : it->second;
  };
  HomologyBasisResult<T> result;
  for (const auto& [d, gens] : by_degree) {
    auto reps = subquotient_basis<T>(f, gens.size(), sub(at(d - 1), gens), sub(gens, at(d + 1)));
    for (auto& r : reps) {
      Vector<T> chain(c.size(), f.zero());
      for (std::size_t k = 0; k < gens.size(); ++k) chain[gens[k]] = r[k];
      result.degree.push_back(d);
      result.chains.push_back(std::move(chain));
    }
  }
  return result;
}

/// The B x B block of the complex; B must be closed under the boundary.
template <ExactScalar T>
AugChainComplex<T> restrict(const AugChainComplex<T>& c, const std::vector<std::size_t>& subset) {
  const auto& f = c.boundary.field();
  std::vector<bool> inside(c.size(), false);
  for (auto a : subset) {
    if (a >= c.size()) throw Error(ErrorCode::UnknownElement, "generator index out of range");
    inside[a] = true;
  }
  for (auto a : subset)
    for (std::size_t b = 0; b < c.size(); ++b)
      if (!inside[b] && !f.is_zero(c.boundary(b, a)))
        throw Error(ErrorCode::NotClosedUnderDifferential,
                    "boundary of generator " + std::to_string(a) + " leaves the subset");
  AugChainComplex<T> r{{}, Matrix<T>(f, subset.size(), subset.size())};
  for (std::size_t i = 0; i < subset.size(); ++i) {
    r.degree.push_back(c.degree[subset[i]]);
    for (std::size_t j = 0; j < subset.size(); ++j) r.boundary(j, i) = c.boundary(subset[j], subset[i]);
  }
  return r;
}

}  // namespace posheaf
