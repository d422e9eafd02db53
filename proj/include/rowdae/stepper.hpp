#pragma once

// Single steps of both schemes. States and stages of semi-explicit problems
// are stacked as (y, z) and (l_i, k_i).

#include <cstddef>
#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rowdae/errors.hpp"
#include "rowdae/linalg.hpp"
#include "rowdae/problem.hpp"
#include "rowdae/tableau.hpp"

namespace rowdae {

/// Per-integration work counters.
struct IntegrationStats {
  std::size_t nsucc = 0;  // accepted steps
  std::size_t nfail = 0;  // rejected steps
  std::size_t nf = 0;     // f evaluations in stages
  std::size_t ng = 0;     // g evaluations in stages
  std::size_t nfd = 0;    // f/g evaluations spent on finite differences
  std::size_t njac = 0;   // Jacobian builds
  std::size_t nlu = 0;    // matrix factorizations
};

struct StepOutcome {
  double t0 = 0.0;
  double h = 0.0;
  Vector y0;
  Vector y1;
  Vector yhat;  // empty when the tableau has no embedded weights
  std::vector<Vector> stages;
  double error = std::numeric_limits<double>::quiet_NaN();  // set by the driver
};

class KindMismatch : public Error {
public:
  using Error::Error;
};

namespace detail {

inline Vector weighted_sum(std::span<const double> base, std::span<const double> weights,
                           const std::vector<Vector>& stages) {
  Vector out(base.begin(), base.end());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * stages[i][k];
  }
  return out;
}

}  // namespace detail

/// One step of the linearly implicit scheme on M y' = f(t, y):
///   (M - h gamma f_y) k_i = h f(t0 + alpha_i h, y0 + sum_{j<i} alpha_ij k_j)
///                         + h f_y sum_{j<i} gamma_ij k_j + h^2 gamma_i f_t
///   y1 = y0 + sum b_i k_i
/// with f_y, f_t taken at (t0, y0) and one factorization per step.
inline StepOutcome row_step(const MassMatrixProblem& p, const RowTableau& t, double t0,
                            std::span<const double> y0, double h,
                            IntegrationStats* stats = nullptr) {
  if (t.kind() != MethodKind::row) {
    throw KindMismatch("row_step: tableau '" + t.name() + "' is not a ROW tableau");
  }
  const std::size_t n = p.n;
  const std::size_t s = t.stages();
  if (y0.size() != n) throw DimensionMismatch("row_step: state size mismatch");
  const auto& alpha = t.alpha();
  const auto& gm = t.gamma_matrix();
  const auto& ai = t.alpha_sums();
  const auto& gi = t.gamma_sums();

  Vector f0(n);
  p.rhs(t0, y0, f0);
  if (stats) ++stats->nf;
  require_finite(f0, "rhs");

  std::size_t fd_evals = 0;
  const auto jac = rhs_jacobians(p, t0, y0, f0, &fd_evals);
  if (stats) {
    ++stats->njac;
    stats->nfd += fd_evals;
  }

  DenseMatrix e = p.mass + (-h * t.gamma()) * jac.f_y;
  if (stats) ++stats->nlu;
  const auto lu = lu_factor(std::move(e));

  StepOutcome out;
  out.t0 = t0;
  out.h = h;
  out.y0.assign(y0.begin(), y0.end());
  out.stages.reserve(s);

  Vector stage_state(n), fi(n), gsum(n), rhs(n);
  for (std::size_t i = 0; i < s; ++i) {
    std::copy(y0.begin(), y0.end(), stage_state.begin());
    std::fill(gsum.begin(), gsum.end(), 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      const double a = alpha(i, j);
      const double g = gm(i, j);
      const auto& kj = out.stages[j];
      for (std::size_t k = 0; k < n; ++k) {
        stage_state[k] += a * kj[k];
        gsum[k] += g * kj[k];
      }
    }
    // Stage 1 sits at (t0, y0); reuse f0.
    if (i == 0 && ai[0] == 0.0) {
      fi = f0;
    } else {
      p.rhs(t0 + ai[i] * h, stage_state, fi);
      if (stats) ++stats->nf;
      require_finite(fi, "rhs");
    }
    for (std::size_t k = 0; k < n; ++k) rhs[k] = h * fi[k] + h * h * gi[i] * jac.f_t[k];
    if (i > 0) matvec_add(jac.f_y, gsum, h, rhs);
    out.stages.push_back(lu_solve(lu, rhs));
    require_finite(out.stages.back(), "stage");
  }

  out.y1 = detail::weighted_sum(y0, t.b(), out.stages);
  if (t.has_embedded()) out.yhat = detail::weighted_sum(y0, t.bhat(), out.stages);
  return out;
}

/// One step of the half-explicit scheme on y' = f, 0 = g:
///   l_i = h f(t0 + alpha_i h, Y_i, Z_i)
///   -gamma g_z k_i = g(t0 + alpha_i h, Y_i, Z_i) + g_y sum_{j<=i} gamma_ij l_j
///                    + h gamma_i g_t + g_z sum_{j<i} gamma_ij k_j
/// with Y_i = y0 + sum_{j<i} alpha_ij l_j, Z_i = z0 + sum_{j<i} alpha_ij k_j
/// and the Jacobians taken at (t0, y0, z0). Only g_z is factorized; with no
/// algebraic variables the step is the explicit Runge-Kutta step (alpha, b).
/// y0 is the stacked state (y, z).
inline StepOutcome half_explicit_step(const SemiExplicitDAE& p, const RowTableau& t,
                                      double t0, std::span<const double> state0, double h,
                                      IntegrationStats* stats = nullptr) {
  if (t.kind() != MethodKind::half_explicit) {
    throw KindMismatch("half_explicit_step: tableau '" + t.name() +
                       "' is not a half-explicit tableau");
  }
  const std::size_t nf = p.nf;
  const std::size_t ng = p.ng;
  const std::size_t s = t.stages();
  if (state0.size() != nf + ng) throw DimensionMismatch("half_explicit_step: state size mismatch");
  const auto y0 = state0.first(nf);
  const auto z0 = state0.subspan(nf, ng);
  const auto& alpha = t.alpha();
  const auto& gm = t.gamma_matrix();
  const auto& ai = t.alpha_sums();
  const auto& gi = t.gamma_sums();
  const double gamma = t.gamma();

  AlgebraicJacobians jac;
  std::optional<LUFactorization> lu;
  if (ng > 0) {
    Vector g0(ng);
    p.g(t0, y0, z0, g0);
    if (stats) ++stats->ng;
    require_finite(g0, "g");
    std::size_t fd_evals = 0;
    jac = algebraic_jacobians(p, t0, y0, z0, g0, &fd_evals);
    if (stats) {
      ++stats->njac;
      stats->nfd += fd_evals;
      ++stats->nlu;
    }
    lu = lu_factor(jac.g_z);
  }

  StepOutcome out;
  out.t0 = t0;
  out.h = h;
  out.y0.assign(state0.begin(), state0.end());
  out.stages.assign(s, Vector(nf + ng, 0.0));

  Vector ys(nf), zs(ng), fi(nf), gi_val(ng), lsum(nf), ksum(ng), rhs(ng);
  for (std::size_t i = 0; i < s; ++i) {
    std::copy(y0.begin(), y0.end(), ys.begin());
    std::copy(z0.begin(), z0.end(), zs.begin());
    for (std::size_t j = 0; j < i; ++j) {
      const double a = alpha(i, j);
      if (a == 0.0) continue;
      const auto& st = out.stages[j];
      for (std::size_t k = 0; k < nf; ++k) ys[k] += a * st[k];
      for (std::size_t k = 0; k < ng; ++k) zs[k] += a * st[nf + k];
    }
    const double ti = t0 + ai[i] * h;
    p.f(ti, ys, zs, fi);
    if (stats) ++stats->nf;
    require_finite(fi, "f");
    auto& stage = out.stages[i];
    for (std::size_t k = 0; k < nf; ++k) stage[k] = h * fi[k];

    if (ng == 0) continue;

    p.g(ti, ys, zs, gi_val);
    if (stats) ++stats->ng;
    require_finite(gi_val, "g");
    std::fill(lsum.begin(), lsum.end(), 0.0);
    std::fill(ksum.begin(), ksum.end(), 0.0);
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = gm(i, j);
      if (g == 0.0) continue;
      const auto& st = out.stages[j];
      for (std::size_t k = 0; k < nf; ++k) lsum[k] += g * st[k];
      if (j < i) {
        for (std::size_t k = 0; k < ng; ++k) ksum[k] += g * st[nf + k];
      }
    }
    for (std::size_t k = 0; k < ng; ++k) rhs[k] = gi_val[k] + h * gi[i] * jac.g_t[k];
    matvec_add(jac.g_y, lsum, 1.0, rhs);
    matvec_add(jac.g_z, ksum, 1.0, rhs);
    const auto sol = lu_solve(*lu, rhs);
    for (std::size_t k = 0; k < ng; ++k) stage[nf + k] = -sol[k] / gamma;
    require_finite(stage, "stage");
  }

  out.y1 = detail::weighted_sum(state0, t.b(), out.stages);
  if (t.has_embedded()) out.yhat = detail::weighted_sum(state0, t.bhat(), out.stages);
  return out;
}

inline StepOutcome step(const MassMatrixProblem& p, const RowTableau& t, double t0,
                        std::span<const double> y0, double h, IntegrationStats* stats) {
  return row_step(p, t, t0, y0, h, stats);
}

inline StepOutcome step(const SemiExplicitDAE& p, const RowTableau& t, double t0,
                        std::span<const double> y0, double h, IntegrationStats* stats) {
  return half_explicit_step(p, t, t0, y0, h, stats);
}

}  // namespace rowdae
