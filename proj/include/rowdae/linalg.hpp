#pragma once

// Small dense linear algebra: row-major matrices, LU with partial pivoting,
// triangular solves and inversion. Sized for stage counts and benchmark
// systems of a few hundred unknowns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rowdae/errors.hpp"

namespace rowdae {

using Vector = std::vector<double>;

class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  DenseMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) {
        throw DimensionMismatch("DenseMatrix: ragged initializer");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  bool operator==(const DenseMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

inline Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: size mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
  return y;
}

/// y += alpha * A x
inline void matvec_add(const DenseMatrix& a, std::span<const double> x, double alpha,
                       std::span<double> y) {
  if (a.cols() != x.size() || a.rows() != y.size()) {
    throw DimensionMismatch("matvec_add: size mismatch");
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    y[i] += alpha * std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
}

/// Row vector times matrix: (x^T A)^T.
inline Vector vecmat(std::span<const double> x, const DenseMatrix& a) {
  if (a.rows() != x.size()) throw DimensionMismatch("vecmat: size mismatch");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += x[i] * r[j];
  }
  return y;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: size mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

inline DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("matrix add: size mismatch");
  }
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
  return a;
}

inline DenseMatrix operator*(double s, DenseMatrix a) {
  for (double& v : a.data()) v *= s;
  return a;
}

inline Vector hadamard(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("hadamard: size mismatch");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * y[i];
  return z;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: size mismatch");
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

inline double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

/// Combined unit-lower L and upper U with the row permutation applied, so
/// that P·A = L·U where row i of P·A is row pivots[i] of A.
struct LUFactorization {
  DenseMatrix factors;
  std::vector<std::size_t> pivots;

  std::size_t size() const noexcept { return factors.rows(); }
};

/// Pivots with magnitude below this fraction of max|A| are treated as zero.
inline constexpr double kSingularityThreshold = 1e-14;

inline LUFactorization lu_factor(DenseMatrix a) {
  if (!a.square()) throw DimensionMismatch("lu_factor: matrix not square");
  if (!a.all_finite()) throw NonFiniteState("lu_factor: non-finite entry");
  const std::size_t n = a.rows();
  const double tiny = kSingularityThreshold * a.max_abs();

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best <= tiny || best == 0.0) {
      throw SingularMatrix("lu_factor: pivot " + std::to_string(k) + " below threshold");
    }
    if (p != k) {
      auto rk = a.row(k);
      auto rp = a.row(p);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
      std::swap(perm[k], perm[p]);
    }
    const double pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) / pivot;
      a(i, k) = m;
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  return {std::move(a), std::move(perm)};
}

inline Vector lu_solve(const LUFactorization& lu, std::span<const double> rhs) {
  const std::size_t n = lu.size();
  if (rhs.size() != n) throw DimensionMismatch("lu_solve: rhs length mismatch");
  const auto& f = lu.factors;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[lu.pivots[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f(i, j) * x[j];
    x[i] = s / f(i, i);
  }
  return x;
}

/// Inverse via column-wise solves. Triangular inputs are inverted by direct
/// substitution so that the zero pattern is reproduced exactly.
inline DenseMatrix invert(const DenseMatrix& a) {
  if (!a.square()) throw DimensionMismatch("invert: matrix not square");
  const std::size_t n = a.rows();

  bool lower = true;
  for (std::size_t i = 0; i < n && lower; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a(i, j) != 0.0) {
        lower = false;
        break;
      }
    }
  }

  if (lower) {
    const double tiny = kSingularityThreshold * a.max_abs();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(a(i, i)) <= tiny || a(i, i) == 0.0) {
        throw SingularMatrix("invert: zero diagonal in triangular matrix");
      }
    }
    DenseMatrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      inv(j, j) = 1.0 / a(j, j);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = j; k < i; ++k) s += a(i, k) * inv(k, j);
        inv(i, j) = -s / a(i, i);
      }
    }
    return inv;
  }

  const auto lu = lu_factor(a);
  DenseMatrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = lu_solve(lu, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace rowdae
