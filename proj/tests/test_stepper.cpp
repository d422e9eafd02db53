#include <gtest/gtest.h>

#include <cmath>

#include "rowdae/conditions.hpp"
#include "rowdae/problems.hpp"
#include "rowdae/stepper.hpp"

using namespace rowdae;

namespace {

MassMatrixProblem linear_diagonal(const Vector& lambda) {
  MassMatrixProblem p;
  p.n = lambda.size();
  p.mass = DenseMatrix::identity(p.n);
  p.rhs = [lambda](double, std::span<const double> y, std::span<double> out) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = lambda[i] * y[i];
  };
  p.jacobian = [lambda](double, std::span<const double>, DenseMatrix& out) {
    for (std::size_t i = 0; i < lambda.size(); ++i) out(i, i) = lambda[i];
  };
  p.time_derivative = [](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  p.y0 = Vector(p.n, 1.0);
  return p;
}

RowTableau as_row(const RowTableau& t) {
  auto d = t.data();
  d.kind = MethodKind::row;
  return RowTableau(d);
}

// y1' = y2 cos t - y1^2, y2' = -y1 + sin(t) y2: a smooth nonstiff test ODE.
void ode_rhs(double t, std::span<const double> y, std::span<double> out) {
  out[0] = y[1] * std::cos(t) - y[0] * y[0];
  out[1] = -y[0] + std::sin(t) * y[1];
}

}  // namespace

TEST(RowStep, EulerOnDecay) {
  const auto p = linear_diagonal({-1.0});
  IntegrationStats st;
  const auto out = row_step(p, linearly_implicit_euler(), 0.0, p.y0, 0.5, &st);
  EXPECT_NEAR(out.y1[0], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(st.nlu, 1u);
  EXPECT_EQ(st.njac, 1u);
  EXPECT_EQ(st.nf, 1u);
}

TEST(RowStep, ZeroRhsGivesZeroStages) {
  MassMatrixProblem p;
  p.n = 2;
  p.mass = DenseMatrix::identity(2);
  p.rhs = [](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  p.y0 = {1.0, -2.0};
  const auto out = row_step(p, ros2(), 0.0, p.y0, 0.1, nullptr);
  for (const auto& k : out.stages) {
    for (double v : k) EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(out.y1, p.y0);
}

TEST(RowStep, LinearSystemMatchesStabilityFunction) {
  const Vector lambda{-0.5, -3.0, -40.0, 2.0};
  const auto p = linear_diagonal(lambda);
  const double h = 0.1;
  for (const auto& t : {ros2(), linearly_implicit_euler(), as_row(tsit5da())}) {
    const auto out = row_step(p, t, 0.0, p.y0, h, nullptr);
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const double r = stability_function(t, {h * lambda[i], 0.0}).real();
      EXPECT_NEAR(out.y1[i], r, 1e-12 * std::max(1.0, std::abs(r))) << t.name() << " " << i;
    }
  }
}

TEST(RowStep, StageOneReusesInitialRhs) {
  const auto p = linear_diagonal({-1.0, -2.0});
  IntegrationStats st;
  row_step(p, ros2(), 0.0, p.y0, 0.1, &st);
  EXPECT_EQ(st.nf, 2u);
}

TEST(RowStep, KindMismatch) {
  const auto p = linear_diagonal({-1.0});
  EXPECT_THROW(row_step(p, tsit5da(), 0.0, p.y0, 0.1), KindMismatch);
  const auto b = prob1();
  const auto se = semi_problem(b);
  EXPECT_THROW(half_explicit_step(se, ros2(), se.t0, initial_state(se), 0.1), KindMismatch);
}

TEST(RowStep, SingularIterationMatrix) {
  MassMatrixProblem p;
  p.n = 1;
  p.mass = DenseMatrix(1, 1);
  p.rhs = [](double, std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  p.y0 = {0.0};
  EXPECT_THROW(row_step(p, linearly_implicit_euler(), 0.0, p.y0, 0.1), SingularMatrix);
}

TEST(HalfExplicitStep, NoAlgebraicPartIsExplicitRungeKutta) {
  const auto t = tsit5da();
  SemiExplicitDAE p;
  p.nf = 2;
  p.ng = 0;
  p.f = [](double tt, std::span<const double> y, std::span<const double>, std::span<double> out) {
    ode_rhs(tt, y, out);
  };
  p.t0 = 0.3;
  p.y0 = {0.7, -0.4};

  const double h = 0.05;
  IntegrationStats st;
  const auto out = half_explicit_step(p, t, p.t0, initial_state(p), h, &st);

  // Reference explicit Runge-Kutta step with the same alpha and b.
  const std::size_t s = t.stages();
  std::vector<Vector> k(s, Vector(2));
  for (std::size_t i = 0; i < s; ++i) {
    Vector yi = p.y0;
    for (std::size_t j = 0; j < i; ++j) {
      for (std::size_t c = 0; c < 2; ++c) yi[c] += h * t.alpha()(i, j) * k[j][c];
    }
    ode_rhs(p.t0 + t.alpha_sums()[i] * h, yi, k[i]);
  }
  Vector ref = p.y0;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t c = 0; c < 2; ++c) ref[c] += h * t.b()[i] * k[i][c];
  }
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_NEAR(out.y1[c], ref[c], 1e-13 * std::abs(ref[c])) << c;
  }
  EXPECT_EQ(st.nlu, 0u);
  EXPECT_EQ(st.njac, 0u);
  EXPECT_EQ(st.ng, 0u);
  EXPECT_EQ(st.nf, s);
}

TEST(HalfExplicitStep, OneStageHandRecursion) {
  // y' = z, 0 = z - t^2 with a single stage: z1 is the linearization
  // t0^2 + 2 h t0 (gamma = 1) and y1 = y0 + h z0.
  TableauData d;
  d.kind = MethodKind::half_explicit;
  d.gamma = 1.0;
  d.alpha = DenseMatrix(1, 1);
  d.gamma_matrix = DenseMatrix{{1.0}};
  d.b = {1.0};
  const RowTableau t(d);

  SemiExplicitDAE p;
  p.nf = 1;
  p.ng = 1;
  p.f = [](double, std::span<const double>, std::span<const double> z, std::span<double> out) {
    out[0] = z[0];
  };
  p.g = [](double tt, std::span<const double>, std::span<const double> z,
           std::span<double> out) { out[0] = z[0] - tt * tt; };
  const double t0 = 1.5;
  const double h = 0.2;
  const Vector state{0.3, 2.0};
  IntegrationStats st;
  const auto out = half_explicit_step(p, t, t0, state, h, &st);
  EXPECT_NEAR(out.y1[0], 0.3 + h * 2.0, 1e-15);
  EXPECT_NEAR(out.y1[1], t0 * t0 + 2.0 * h * t0, 1e-6);
  EXPECT_EQ(st.nlu, 1u);
}

TEST(HalfExplicitStep, OneStageGammaScaling) {
  // With general gamma, k1 = -(z0 - t0^2 - 2 h gamma t0) / gamma.
  TableauData d;
  d.kind = MethodKind::half_explicit;
  d.gamma = 0.4;
  d.alpha = DenseMatrix(1, 1);
  d.gamma_matrix = DenseMatrix{{0.4}};
  d.b = {1.0};
  const RowTableau t(d);

  SemiExplicitDAE p;
  p.nf = 1;
  p.ng = 1;
  p.f = [](double, std::span<const double>, std::span<const double> z, std::span<double> out) {
    out[0] = z[0];
  };
  p.g = [](double tt, std::span<const double>, std::span<const double> z,
           std::span<double> out) { out[0] = z[0] - tt * tt; };
  p.g_y = [](double, std::span<const double>, std::span<const double>, DenseMatrix& out) {
    out(0, 0) = 0.0;
  };
  p.g_z = [](double, std::span<const double>, std::span<const double>, DenseMatrix& out) {
    out(0, 0) = 1.0;
  };
  p.g_t = [](double tt, std::span<const double>, std::span<const double>,
             std::span<double> out) { out[0] = -2.0 * tt; };
  const double t0 = 1.5;
  const double h = 0.2;
  const double z0 = 2.0;
  const auto out = half_explicit_step(p, t, t0, Vector{0.3, z0}, h);
  const double k1 = -(z0 - t0 * t0 - 2.0 * h * 0.4 * t0) / 0.4;
  EXPECT_NEAR(out.y1[1], z0 + k1, 1e-14);
}

TEST(HalfExplicitStep, Prob1StepIsAccurate) {
  const auto b = prob1();
  const auto se = semi_problem(b);
  const double h = 0.01;
  const auto out = half_explicit_step(se, tsit5da(), se.t0, initial_state(se), h);
  const auto ex = b.exact(se.t0 + h);
  EXPECT_NEAR(out.y1[0], ex[0], 1e-13);
  EXPECT_NEAR(out.y1[1], ex[1], 1e-12);
  EXPECT_EQ(out.yhat.size(), 2u);
}

TEST(JacobiansFd, LinearRhs) {
  const DenseMatrix a{{1.0, 2.0}, {-3.0, 0.5}};
  MassMatrixProblem p;
  p.n = 2;
  p.mass = DenseMatrix::identity(2);
  p.rhs = [a](double, std::span<const double> y, std::span<double> out) {
    const auto v = matvec(a, y);
    std::copy(v.begin(), v.end(), out.begin());
  };
  const auto j = jacobians_fd(p, 0.0, Vector{0.4, -1.2});
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(j.f_y(r, c), a(r, c), 1e-7);
    EXPECT_EQ(j.f_t[r], 0.0);
  }
}

TEST(JacobiansFd, Prob1AlgebraicDerivatives) {
  const auto se = semi_problem(prob1());
  const auto j = jacobians_fd(se, se.t0, se.y0, se.z0);
  EXPECT_NEAR(j.g_z(0, 0), -4.0 / std::log(2.0), 1e-6);
  EXPECT_NEAR(j.g_y(0, 0), 2.0 / std::log(2.0), 1e-6);
  EXPECT_NEAR(j.g_t[0], -1.0, 1e-6);
}

TEST(JacobiansFd, AnalyticMatchesFiniteDifferences) {
  const auto mm = mass_problem(prob1());
  Vector f0(2);
  mm.rhs(mm.t0, mm.y0, f0);
  const auto an = rhs_jacobians(mm, mm.t0, mm.y0, f0);
  const auto fd = jacobians_fd(mm, mm.t0, mm.y0);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(an.f_y(r, c), fd.f_y(r, c), 1e-6);
    EXPECT_NEAR(an.f_t[r], fd.f_t[r], 1e-6);
  }
}
