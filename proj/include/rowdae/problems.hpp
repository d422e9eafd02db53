#pragma once

// Benchmark problems with exact solutions and error metrics.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rowdae/errors.hpp"
#include "rowdae/integrate.hpp"
#include "rowdae/linalg.hpp"
#include "rowdae/problem.hpp"

namespace rowdae {

struct Benchmark {
  std::string label;
  std::optional<MassMatrixProblem> mass_form;
  std::optional<SemiExplicitDAE> semi_form;
  double t_end = 0.0;
  /// Exact stacked state at t; empty when unknown.
  std::function<Vector(double)> exact;
  /// Components compared at t_end; empty means all.
  std::vector<std::size_t> endpoint_components;
  /// Deviation of a single state from an invariant; the custom metric is its
  /// maximum over all stored states.
  std::function<double(double, std::span<const double>)> custom;
  /// Stiff problems are refused for half-explicit methods unless forced.
  bool stiff = false;
};

/// Semi-explicit problem as M u' = F(t, u) with u = (y, z), M = diag(I, 0),
/// F = (f, g).
inline MassMatrixProblem to_mass_form(const SemiExplicitDAE& p) {
  const std::size_t nf = p.nf;
  const std::size_t ng = p.ng;
  MassMatrixProblem m;
  m.n = nf + ng;
  m.mass = DenseMatrix(m.n, m.n);
  for (std::size_t i = 0; i < nf; ++i) m.mass(i, i) = 1.0;
  m.rhs = [p](double t, std::span<const double> u, std::span<double> out) {
    const auto y = u.first(p.nf);
    const auto z = u.subspan(p.nf, p.ng);
    p.f(t, y, z, out.first(p.nf));
    if (p.ng > 0) p.g(t, y, z, out.subspan(p.nf, p.ng));
  };
  m.t0 = p.t0;
  m.y0 = initial_state(p);
  return m;
}

/// Explicit ODE y' = f(t, y) (identity mass matrix) as a semi-explicit problem
/// without algebraic variables.
inline SemiExplicitDAE to_semi_form(const MassMatrixProblem& m) {
  if (!(m.mass == DenseMatrix::identity(m.n))) {
    throw Error("only problems with identity mass matrix have a semi-explicit form");
  }
  SemiExplicitDAE p;
  p.nf = m.n;
  p.ng = 0;
  p.f = [rhs = m.rhs](double t, std::span<const double> y, std::span<const double>,
                      std::span<double> out) { rhs(t, y, out); };
  p.t0 = m.t0;
  p.y0 = m.y0;
  return p;
}

inline MassMatrixProblem mass_problem(const Benchmark& b) {
  if (b.mass_form) return *b.mass_form;
  return to_mass_form(b.semi_form.value());
}

inline SemiExplicitDAE semi_problem(const Benchmark& b) {
  if (b.semi_form) return *b.semi_form;
  return to_semi_form(b.mass_form.value());
}

/// y1' = y2/y1, 0 = y1/y2 - t on [2, 4]; y1 = ln t, y2 = ln t / t.
inline Benchmark prob1() {
  const double t0 = 2.0;
  const double y10 = std::log(2.0);
  const double y20 = std::log(2.0) / 2.0;

  SemiExplicitDAE se;
  se.nf = 1;
  se.ng = 1;
  se.f = [](double, std::span<const double> y, std::span<const double> z, std::span<double> out) {
    out[0] = z[0] / y[0];
  };
  se.g = [](double t, std::span<const double> y, std::span<const double> z,
            std::span<double> out) { out[0] = y[0] / z[0] - t; };
  se.g_y = [](double, std::span<const double>, std::span<const double> z, DenseMatrix& out) {
    out(0, 0) = 1.0 / z[0];
  };
  se.g_z = [](double, std::span<const double> y, std::span<const double> z, DenseMatrix& out) {
    out(0, 0) = -y[0] / (z[0] * z[0]);
  };
  se.g_t = [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = -1.0;
  };
  se.t0 = t0;
  se.y0 = {y10};
  se.z0 = {y20};

  MassMatrixProblem mm;
  mm.n = 2;
  mm.mass = DenseMatrix{{1.0, 0.0}, {0.0, 0.0}};
  mm.rhs = [](double t, std::span<const double> y, std::span<double> out) {
    out[0] = y[1] / y[0];
    out[1] = y[0] / y[1] - t;
  };
  mm.jacobian = [](double, std::span<const double> y, DenseMatrix& out) {
    out(0, 0) = -y[1] / (y[0] * y[0]);
    out(0, 1) = 1.0 / y[0];
    out(1, 0) = 1.0 / y[1];
    out(1, 1) = -y[0] / (y[1] * y[1]);
  };
  mm.time_derivative = [](double, std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
    out[1] = -1.0;
  };
  mm.t0 = t0;
  mm.y0 = {y10, y20};

  Benchmark b;
  b.label = "prob1";
  b.mass_form = std::move(mm);
  b.semi_form = std::move(se);
  b.t_end = 4.0;
  b.exact = [](double t) { return Vector{std::log(t), std::log(t) / t}; };
  b.endpoint_components = {0};
  return b;
}

/// y' = -lambda (y - g) + g' with g(t) = 10 - (10 + t) e^-t on [0, 2].
inline Benchmark prothero_robinson(double lambda = 10.0) {
  if (!(lambda > 0.0)) throw Error("prothero_robinson: lambda must be positive");
  auto gfun = [](double t) { return 10.0 - (10.0 + t) * std::exp(-t); };
  auto gdot = [](double t) { return (9.0 + t) * std::exp(-t); };
  auto gddot = [](double t) { return -(8.0 + t) * std::exp(-t); };

  MassMatrixProblem mm;
  mm.n = 1;
  mm.mass = DenseMatrix::identity(1);
  mm.rhs = [=](double t, std::span<const double> y, std::span<double> out) {
    out[0] = -lambda * (y[0] - gfun(t)) + gdot(t);
  };
  mm.jacobian = [=](double, std::span<const double>, DenseMatrix& out) { out(0, 0) = -lambda; };
  mm.time_derivative = [=](double t, std::span<const double>, std::span<double> out) {
    out[0] = lambda * gdot(t) + gddot(t);
  };
  mm.t0 = 0.0;
  mm.y0 = {gfun(0.0)};

  SemiExplicitDAE se;
  se.nf = 1;
  se.ng = 0;
  se.f = [=](double t, std::span<const double> y, std::span<const double>, std::span<double> out) {
    out[0] = -lambda * (y[0] - gfun(t)) + gdot(t);
  };
  se.t0 = 0.0;
  se.y0 = {gfun(0.0)};

  Benchmark b;
  b.label = "prothero-robinson";
  b.mass_form = std::move(mm);
  b.semi_form = std::move(se);
  b.t_end = 2.0;
  b.exact = [=](double t) { return Vector{gfun(t)}; };
  return b;
}

/// u_t = u_xx + u^2 + h(x, t) on [-1, 1] x [0, 1], u = x^3 e^t, central
/// differences on n_x interior points.
inline Benchmark parabolic(std::size_t nx = 250) {
  if (nx < 3) throw Error("parabolic: n_x must be at least 3");
  const double dx = 2.0 / static_cast<double>(nx + 1);
  Vector x(nx);
  for (std::size_t i = 0; i < nx; ++i) x[i] = -1.0 + static_cast<double>(i + 1) * dx;
  auto exact_u = [](double xi, double t) { return xi * xi * xi * std::exp(t); };
  auto forcing = [](double xi, double t) {
    const double et = std::exp(t);
    const double x3 = xi * xi * xi;
    return x3 * et - 6.0 * xi * et - x3 * x3 * et * et;
  };
  const double inv_dx2 = 1.0 / (dx * dx);

  MassMatrixProblem mm;
  mm.n = nx;
  mm.mass = DenseMatrix::identity(nx);
  mm.rhs = [=](double t, std::span<const double> u, std::span<double> out) {
    const double left = -std::exp(t);
    const double right = std::exp(t);
    for (std::size_t i = 0; i < nx; ++i) {
      const double um = i == 0 ? left : u[i - 1];
      const double up = i + 1 == nx ? right : u[i + 1];
      out[i] = (um - 2.0 * u[i] + up) * inv_dx2 + u[i] * u[i] + forcing(x[i], t);
    }
  };
  mm.jacobian = [=](double, std::span<const double> u, DenseMatrix& out) {
    out = DenseMatrix(nx, nx);
    for (std::size_t i = 0; i < nx; ++i) {
      out(i, i) = -2.0 * inv_dx2 + 2.0 * u[i];
      if (i > 0) out(i, i - 1) = inv_dx2;
      if (i + 1 < nx) out(i, i + 1) = inv_dx2;
    }
  };
  mm.time_derivative = [=](double t, std::span<const double>, std::span<double> out) {
    const double et = std::exp(t);
    for (std::size_t i = 0; i < nx; ++i) {
      const double xi = x[i];
      const double x3 = xi * xi * xi;
      out[i] = x3 * et - 6.0 * xi * et - 2.0 * x3 * x3 * et * et;
    }
    out[0] += -et * inv_dx2;
    out[nx - 1] += et * inv_dx2;
  };
  mm.t0 = 0.0;
  mm.y0.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) mm.y0[i] = exact_u(x[i], 0.0);

  Benchmark b;
  b.label = "parabolic";
  b.mass_form = std::move(mm);
  b.t_end = 1.0;
  b.exact = [=](double t) {
    Vector u(nx);
    for (std::size_t i = 0; i < nx; ++i) u[i] = exact_u(x[i], t);
    return u;
  };
  b.stiff = true;
  return b;
}

/// u_t = -u_x + g(x, t) on [0, 1] x [0, 1], u = (1 + x)/(1 + t), first-order
/// upwind differences on n_x points x_i = i/n_x, inflow at x = 0.
inline Benchmark hyperbolic(std::size_t nx = 250) {
  if (nx < 2) throw Error("hyperbolic: n_x must be at least 2");
  const double dx = 1.0 / static_cast<double>(nx);
  Vector x(nx);
  for (std::size_t i = 0; i < nx; ++i) x[i] = static_cast<double>(i + 1) * dx;
  const double inv_dx = 1.0 / dx;

  MassMatrixProblem mm;
  mm.n = nx;
  mm.mass = DenseMatrix::identity(nx);
  mm.rhs = [=](double t, std::span<const double> u, std::span<double> out) {
    const double s = 1.0 / (1.0 + t);
    for (std::size_t i = 0; i < nx; ++i) {
      const double um = i == 0 ? s : u[i - 1];
      out[i] = -(u[i] - um) * inv_dx + s - (1.0 + x[i]) * s * s;
    }
  };
  mm.jacobian = [=](double, std::span<const double>, DenseMatrix& out) {
    out = DenseMatrix(nx, nx);
    for (std::size_t i = 0; i < nx; ++i) {
      out(i, i) = -inv_dx;
      if (i > 0) out(i, i - 1) = inv_dx;
    }
  };
  mm.time_derivative = [=](double t, std::span<const double>, std::span<double> out) {
    const double s = 1.0 / (1.0 + t);
    for (std::size_t i = 0; i < nx; ++i) out[i] = -s * s + 2.0 * (1.0 + x[i]) * s * s * s;
    out[0] += -s * s * inv_dx;
  };
  mm.t0 = 0.0;
  mm.y0.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) mm.y0[i] = 1.0 + x[i];

  Benchmark b;
  b.label = "hyperbolic";
  b.mass_form = std::move(mm);
  b.t_end = 1.0;
  b.exact = [=](double t) {
    Vector u(nx);
    for (std::size_t i = 0; i < nx; ++i) u[i] = (1.0 + x[i]) / (1.0 + t);
    return u;
  };
  b.stiff = true;
  return b;
}

/// Planar chain of n point masses on massless rods hanging from the origin.
/// Angles are measured from the downward vertical.
struct PendulumParams {
  std::size_t n = 5;
  Vector masses;              // default all 1
  Vector lengths;             // default all 1
  double gravity = 9.81;
  Vector angles;              // default all pi/2 (horizontal line)
  Vector angular_velocities;  // default all 0
};

inline constexpr double kConsistencyTolerance = 1e-10;

namespace detail {

struct PendulumGeometry {
  std::size_t n;
  Vector m, len;
  double grav;
};

// Differences d_i = p_i - p_{i-1} with p_0 = 0, for positions and velocities.
inline void pendulum_differences(std::size_t n, std::span<const double> y, Vector& dx, Vector& dy,
                                 Vector& du, Vector& dv) {
  dx.assign(n, 0.0);
  dy.assign(n, 0.0);
  du.assign(n, 0.0);
  dv.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double px = i == 0 ? 0.0 : y[i - 1];
    const double py = i == 0 ? 0.0 : y[n + i - 1];
    const double pu = i == 0 ? 0.0 : y[2 * n + i - 1];
    const double pv = i == 0 ? 0.0 : y[3 * n + i - 1];
    dx[i] = y[i] - px;
    dy[i] = y[n + i] - py;
    du[i] = y[2 * n + i] - pu;
    dv[i] = y[3 * n + i] - pv;
  }
}

// Coefficient matrix A and right-hand side r of the constraint G = A lambda + r.
inline void pendulum_constraint_system(const PendulumGeometry& geo, std::span<const double> y,
                                       DenseMatrix& a, Vector& r) {
  const std::size_t n = geo.n;
  Vector dx, dy, du, dv;
  pendulum_differences(n, y, dx, dy, du, dv);
  auto dd = [&](std::size_t i, std::size_t j) { return dx[i] * dx[j] + dy[i] * dy[j]; };
  a = DenseMatrix(n, n);
  r.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 1.0 / geo.m[i] + (i > 0 ? 1.0 / geo.m[i - 1] : 0.0);
    a(i, i) = c * dd(i, i);
    if (i + 1 < n) a(i, i + 1) = -dd(i, i + 1) / geo.m[i];
    if (i > 0) a(i, i - 1) = -dd(i, i - 1) / geo.m[i - 1];
    r[i] = du[i] * du[i] + dv[i] * dv[i];
  }
  r[0] -= geo.grav * dy[0];
}

}  // namespace detail

/// Multi-pendulum as a semi-explicit index-1 DAE. Differential state
/// (x_1..x_n, y_1..y_n, u_1..u_n, v_1..v_n) with velocities (u, v), algebraic
/// state lambda_1..lambda_n. The constraint is the position constraint
/// differentiated twice with the accelerations substituted, so it is linear in
/// lambda. The initial lambda is solved for from that linear system.
inline SemiExplicitDAE pendulum_problem(const detail::PendulumGeometry& geo, Vector y0) {
  const std::size_t n = geo.n;
  for (std::size_t i = 0; i < n; ++i) {
    const double px = i == 0 ? 0.0 : y0[i - 1];
    const double py = i == 0 ? 0.0 : y0[n + i - 1];
    const double dist = std::hypot(y0[i] - px, y0[n + i] - py);
    if (!(std::abs(dist - geo.len[i]) <= kConsistencyTolerance)) {
      throw InconsistentInitialState("pendulum: rod " + std::to_string(i + 1) + " has length " +
                                     std::to_string(dist) + ", expected " +
                                     std::to_string(geo.len[i]));
    }
  }

  SemiExplicitDAE p;
  p.nf = 4 * n;
  p.ng = n;
  p.f = [geo](double, std::span<const double> y, std::span<const double> lam,
              std::span<double> out) {
    const std::size_t n = geo.n;
    Vector dx, dy, du, dv;
    detail::pendulum_differences(n, y, dx, dy, du, dv);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = y[2 * n + i];
      out[n + i] = y[3 * n + i];
      double ax = lam[i] * dx[i];
      double ay = lam[i] * dy[i];
      if (i + 1 < n) {
        ax -= lam[i + 1] * dx[i + 1];
        ay -= lam[i + 1] * dy[i + 1];
      }
      out[2 * n + i] = ax / geo.m[i];
      out[3 * n + i] = ay / geo.m[i] - geo.grav;
    }
  };
  p.g = [geo](double, std::span<const double> y, std::span<const double> lam,
              std::span<double> out) {
    DenseMatrix a;
    Vector r;
    detail::pendulum_constraint_system(geo, y, a, r);
    std::copy(r.begin(), r.end(), out.begin());
    matvec_add(a, lam, 1.0, out);
  };
  p.g_z = [geo](double, std::span<const double> y, std::span<const double>, DenseMatrix& out) {
    Vector r;
    detail::pendulum_constraint_system(geo, y, out, r);
  };
  p.g_y = [geo](double, std::span<const double> y, std::span<const double> lam,
                DenseMatrix& out) {
    const std::size_t n = geo.n;
    Vector dx, dy, du, dv;
    detail::pendulum_differences(n, y, dx, dy, du, dv);
    out = DenseMatrix(n, 4 * n);
    // Derivatives with respect to the differences, then d_k = p_k - p_{k-1}
    // spreads each onto p_k (+) and p_{k-1} (-).
    auto add_diff = [&](std::size_t i, std::size_t k, std::size_t block, double val) {
      out(i, block * n + k) += val;
      if (k > 0) out(i, block * n + k - 1) -= val;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double c = 1.0 / geo.m[i] + (i > 0 ? 1.0 / geo.m[i - 1] : 0.0);
      double gx = 2.0 * c * lam[i] * dx[i];
      double gy = 2.0 * c * lam[i] * dy[i];
      if (i + 1 < n) {
        const double w = lam[i + 1] / geo.m[i];
        gx -= w * dx[i + 1];
        gy -= w * dy[i + 1];
        add_diff(i, i + 1, 0, -w * dx[i]);
        add_diff(i, i + 1, 1, -w * dy[i]);
      }
      if (i > 0) {
        const double w = lam[i - 1] / geo.m[i - 1];
        gx -= w * dx[i - 1];
        gy -= w * dy[i - 1];
        add_diff(i, i - 1, 0, -w * dx[i]);
        add_diff(i, i - 1, 1, -w * dy[i]);
      }
      if (i == 0) gy -= geo.grav;
      add_diff(i, i, 0, gx);
      add_diff(i, i, 1, gy);
      add_diff(i, i, 2, 2.0 * du[i]);
      add_diff(i, i, 3, 2.0 * dv[i]);
    }
  };
  p.g_t = [](double, std::span<const double>, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  p.t0 = 0.0;

  DenseMatrix a;
  Vector r;
  detail::pendulum_constraint_system(geo, y0, a, r);
  for (double& v : r) v = -v;
  p.z0 = lu_solve(lu_factor(a), r);
  p.y0 = std::move(y0);
  return p;
}

/// Sum of rod lengths minus its nominal value.
inline double pendulum_length_error(const detail::PendulumGeometry& geo,
                                    std::span<const double> y) {
  const std::size_t n = geo.n;
  double total = 0.0;
  double nominal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double px = i == 0 ? 0.0 : y[i - 1];
    const double py = i == 0 ? 0.0 : y[n + i - 1];
    total += std::hypot(y[i] - px, y[n + i] - py);
    nominal += geo.len[i];
  }
  return std::abs(total - nominal);
}

namespace detail {

inline PendulumGeometry pendulum_geometry(const PendulumParams& prm) {
  const std::size_t n = prm.n;
  if (n < 1) throw Error("pendulum: need at least one mass");
  auto fill = [n](const Vector& v, double def, const char* what) {
    if (v.empty()) return Vector(n, def);
    if (v.size() != n) throw DimensionMismatch(std::string("pendulum: ") + what + " needs n entries");
    return v;
  };
  PendulumGeometry geo{n, fill(prm.masses, 1.0, "masses"), fill(prm.lengths, 1.0, "lengths"),
                       prm.gravity};
  for (std::size_t i = 0; i < n; ++i) {
    if (!(geo.m[i] > 0.0) || !(geo.len[i] > 0.0)) {
      throw Error("pendulum: masses and lengths must be positive");
    }
  }
  return geo;
}

inline Benchmark pendulum_benchmark(const PendulumGeometry& geo, Vector y0, double t_end) {
  Benchmark b;
  b.label = "pendulum";
  b.semi_form = pendulum_problem(geo, std::move(y0));
  b.t_end = t_end;
  b.custom = [geo](double, std::span<const double> state) {
    return pendulum_length_error(geo, state);
  };
  return b;
}

}  // namespace detail

/// Pendulum from angles and angular velocities on [0, t_end].
inline Benchmark pendulum(const PendulumParams& prm = {}, double t_end = 100.0) {
  const auto geo = detail::pendulum_geometry(prm);
  const std::size_t n = geo.n;
  const Vector th = prm.angles.empty() ? Vector(n, std::numbers::pi / 2) : prm.angles;
  const Vector om = prm.angular_velocities.empty() ? Vector(n, 0.0) : prm.angular_velocities;
  if (th.size() != n || om.size() != n) {
    throw DimensionMismatch("pendulum: angles and angular velocities need n entries");
  }
  Vector y0(4 * n);
  double px = 0.0, py = 0.0, pu = 0.0, pv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = geo.len[i];
    px += l * std::sin(th[i]);
    py -= l * std::cos(th[i]);
    pu += l * om[i] * std::cos(th[i]);
    pv += l * om[i] * std::sin(th[i]);
    y0[i] = px;
    y0[n + i] = py;
    y0[2 * n + i] = pu;
    y0[3 * n + i] = pv;
  }
  return detail::pendulum_benchmark(geo, std::move(y0), t_end);
}

/// Pendulum from Cartesian positions and velocities, stacked as
/// (x, y, u, v). Rod lengths must match to within 1e-10.
inline Benchmark pendulum_from_state(const PendulumParams& prm, Vector y0,
                                     double t_end = 100.0) {
  const auto geo = detail::pendulum_geometry(prm);
  if (y0.size() != 4 * geo.n) throw DimensionMismatch("pendulum: state needs 4n entries");
  return detail::pendulum_benchmark(geo, std::move(y0), t_end);
}

struct ErrorMetrics {
  std::optional<double> endpoint;  // max abs error over the endpoint components
  std::optional<double> l2_steps;  // RMS over stored states and components
  std::optional<double> l2_interp; // RMS over 100 evenly spaced interpolated times
  std::optional<double> custom;    // max of the benchmark's invariant deviation
};

inline constexpr std::size_t kInterpolationPoints = 100;

inline double endpoint_error(const Benchmark& b, double t, std::span<const double> state) {
  const auto ex = b.exact(t);
  double e = 0.0;
  if (b.endpoint_components.empty()) {
    for (std::size_t i = 0; i < ex.size(); ++i) e = std::max(e, std::abs(state[i] - ex[i]));
  } else {
    for (auto i : b.endpoint_components) e = std::max(e, std::abs(state[i] - ex[i]));
  }
  return e;
}

inline ErrorMetrics error_metrics(const Trajectory& traj, const Benchmark& b) {
  if (!b.exact && !b.custom) {
    throw MissingExactSolution("benchmark '" + b.label + "' has neither exact solution nor metric");
  }
  if (traj.states.empty()) throw Error("error_metrics: empty trajectory");
  ErrorMetrics m;
  if (b.exact) {
    m.endpoint = endpoint_error(b, traj.times.back(), traj.states.back());
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const auto ex = b.exact(traj.times[k]);
      for (std::size_t i = 0; i < ex.size(); ++i) {
        const double d = traj.states[k][i] - ex[i];
        sum += d * d;
      }
      count += ex.size();
    }
    m.l2_steps = std::sqrt(sum / static_cast<double>(count));
    if (!traj.segments.empty() && traj.segments.front().tableau->dense()) {
      const double ta = traj.segments.front().t0;
      const double tb = traj.segments.back().t0 + traj.segments.back().h;
      double isum = 0.0;
      std::size_t icount = 0;
      for (std::size_t k = 0; k < kInterpolationPoints; ++k) {
        const double t =
            ta + (tb - ta) * static_cast<double>(k) / static_cast<double>(kInterpolationPoints - 1);
        const auto y = traj.at(t);
        const auto ex = b.exact(t);
        for (std::size_t i = 0; i < ex.size(); ++i) {
          const double d = y[i] - ex[i];
          isum += d * d;
        }
        icount += ex.size();
      }
      m.l2_interp = std::sqrt(isum / static_cast<double>(icount));
    }
  }
  if (b.custom) {
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      worst = std::max(worst, b.custom(traj.times[k], traj.states[k]));
    }
    m.custom = worst;
  }
  return m;
}

}  // namespace rowdae
