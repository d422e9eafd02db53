#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include "rowdae/errors.hpp"
#include "rowdae/linalg.hpp"

namespace rowdae {

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> out)>;
using JacobianFn = std::function<void(double t, std::span<const double> y, DenseMatrix& out)>;

/// M y' = f(t, y). A singular M makes this a DAE; M - h*gamma*f_y must stay
/// regular for small h near the solution.
struct MassMatrixProblem {
  std::size_t n = 0;
  DenseMatrix mass;
  RhsFn rhs;
  JacobianFn jacobian;     // optional f_y
  RhsFn time_derivative;   // optional f_t
  double t0 = 0.0;
  Vector y0;
};

using DaeFn = std::function<void(double t, std::span<const double> y, std::span<const double> z,
                                 std::span<double> out)>;
using DaeJacobianFn = std::function<void(double t, std::span<const double> y,
                                         std::span<const double> z, DenseMatrix& out)>;

/// y' = f(t, y, z), 0 = g(t, y, z) with g_z regular (index 1).
struct SemiExplicitDAE {
  std::size_t nf = 0;
  std::size_t ng = 0;
  DaeFn f;
  DaeFn g;            // unused when ng == 0
  DaeJacobianFn g_y;  // optional
  DaeJacobianFn g_z;  // optional
  DaeFn g_t;          // optional
  double t0 = 0.0;
  Vector y0;
  Vector z0;
};

/// Forward-difference increment sqrt(eps) * max(|u|, 1).
inline double fd_increment(double u) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(std::abs(u), 1.0);
}

inline void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw NonFiniteState(std::string(what) + " produced a non-finite value");
}

/// Evaluation counter shared by the finite-difference helpers; may be null.
using EvalCounter = std::size_t*;

/// Forward-difference Jacobian of an explicit right-hand side.
inline DenseMatrix jacobian_fd(const RhsFn& f, double t, std::span<const double> y,
                               std::span<const double> f0, EvalCounter evals = nullptr) {
  const std::size_t n = y.size();
  const std::size_t m = f0.size();
  DenseMatrix jac(m, n);
  Vector yp(y.begin(), y.end());
  Vector fp(m);
  for (std::size_t j = 0; j < n; ++j) {
    const double delta = fd_increment(y[j]);
    yp[j] = y[j] + delta;
    f(t, yp, fp);
    if (evals) ++*evals;
    require_finite(fp, "finite-difference Jacobian");
    for (std::size_t i = 0; i < m; ++i) jac(i, j) = (fp[i] - f0[i]) / delta;
    yp[j] = y[j];
  }
  return jac;
}

inline Vector time_derivative_fd(const RhsFn& f, double t, std::span<const double> y,
                                 std::span<const double> f0, EvalCounter evals = nullptr) {
  const double delta = fd_increment(t);
  Vector fp(f0.size());
  f(t + delta, y, fp);
  if (evals) ++*evals;
  require_finite(fp, "finite-difference time derivative");
  for (std::size_t i = 0; i < fp.size(); ++i) fp[i] = (fp[i] - f0[i]) / delta;
  return fp;
}

/// Partial derivatives of g needed by the half-explicit stepper.
struct AlgebraicJacobians {
  DenseMatrix g_y;
  DenseMatrix g_z;
  Vector g_t;
};

/// Fills in g_y, g_z, g_t, using analytic callbacks where supplied and forward
/// differences otherwise. g0 = g(t, y, z).
inline AlgebraicJacobians algebraic_jacobians(const SemiExplicitDAE& p, double t,
                                              std::span<const double> y,
                                              std::span<const double> z,
                                              std::span<const double> g0,
                                              EvalCounter evals = nullptr) {
  AlgebraicJacobians out{DenseMatrix(p.ng, p.nf), DenseMatrix(p.ng, p.ng), Vector(p.ng)};
  Vector gp(p.ng);
  if (p.g_y) {
    p.g_y(t, y, z, out.g_y);
  } else {
    Vector yp(y.begin(), y.end());
    for (std::size_t j = 0; j < p.nf; ++j) {
      const double delta = fd_increment(y[j]);
      yp[j] = y[j] + delta;
      p.g(t, yp, z, gp);
      if (evals) ++*evals;
      require_finite(gp, "finite-difference g_y");
      for (std::size_t i = 0; i < p.ng; ++i) out.g_y(i, j) = (gp[i] - g0[i]) / delta;
      yp[j] = y[j];
    }
  }
  if (p.g_z) {
    p.g_z(t, y, z, out.g_z);
  } else {
    Vector zp(z.begin(), z.end());
    for (std::size_t j = 0; j < p.ng; ++j) {
      const double delta = fd_increment(z[j]);
      zp[j] = z[j] + delta;
      p.g(t, y, zp, gp);
      if (evals) ++*evals;
      require_finite(gp, "finite-difference g_z");
      for (std::size_t i = 0; i < p.ng; ++i) out.g_z(i, j) = (gp[i] - g0[i]) / delta;
      zp[j] = z[j];
    }
  }
  if (p.g_t) {
    p.g_t(t, y, z, out.g_t);
  } else {
    const double delta = fd_increment(t);
    p.g(t + delta, y, z, gp);
    if (evals) ++*evals;
    require_finite(gp, "finite-difference g_t");
    for (std::size_t i = 0; i < p.ng; ++i) out.g_t[i] = (gp[i] - g0[i]) / delta;
  }
  return out;
}

struct RhsJacobians {
  DenseMatrix f_y;
  Vector f_t;
};

/// f_y and f_t at (t, y): analytic where the problem supplies them, forward
/// differences otherwise. f0 = f(t, y).
inline RhsJacobians rhs_jacobians(const MassMatrixProblem& p, double t,
                                  std::span<const double> y, std::span<const double> f0,
                                  EvalCounter evals = nullptr) {
  RhsJacobians out{DenseMatrix(p.n, p.n), Vector(p.n)};
  if (p.jacobian) {
    p.jacobian(t, y, out.f_y);
  } else {
    out.f_y = jacobian_fd(p.rhs, t, y, f0, evals);
  }
  if (p.time_derivative) {
    p.time_derivative(t, y, out.f_t);
  } else {
    out.f_t = time_derivative_fd(p.rhs, t, y, f0, evals);
  }
  return out;
}

/// Finite-difference f_y and f_t, ignoring any analytic callbacks.
inline RhsJacobians jacobians_fd(const MassMatrixProblem& p, double t,
                                 std::span<const double> y) {
  Vector f0(p.n);
  p.rhs(t, y, f0);
  require_finite(f0, "rhs");
  return {jacobian_fd(p.rhs, t, y, f0), time_derivative_fd(p.rhs, t, y, f0)};
}

/// Finite-difference g_y, g_z and g_t, ignoring any analytic callbacks.
inline AlgebraicJacobians jacobians_fd(const SemiExplicitDAE& p, double t,
                                       std::span<const double> y, std::span<const double> z) {
  SemiExplicitDAE bare = p;
  bare.g_y = nullptr;
  bare.g_z = nullptr;
  bare.g_t = nullptr;
  Vector g0(p.ng);
  p.g(t, y, z, g0);
  require_finite(g0, "g");
  return algebraic_jacobians(bare, t, y, z, g0);
}

/// Stacked initial state (y0) or (y0, z0).
inline Vector initial_state(const MassMatrixProblem& p) { return p.y0; }
inline Vector initial_state(const SemiExplicitDAE& p) {
  Vector u(p.y0);
  u.insert(u.end(), p.z0.begin(), p.z0.end());
  return u;
}
inline double initial_time(const MassMatrixProblem& p) { return p.t0; }
inline double initial_time(const SemiExplicitDAE& p) { return p.t0; }

}  // namespace rowdae
