// One line per acceptance criterion. Tolerances are pinned below; a red
// criterion prints the measured numbers and a short diagnostic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "condition_oracle.hpp"
#include "rowdae/harness.hpp"

using namespace rowdae;

namespace {

// Criterion 1
constexpr double kConditionTol = 1e-8;
constexpr double kRInfinityTol = 1e-12;
constexpr double kVerifySeconds = 1.0;
// Criteria 2 and 3
constexpr double kErrorFactor = 3.0;
constexpr double kOrderTol = 0.3;
constexpr double kTableSeconds = 5.0;
constexpr double kInstabilityThreshold = 1e1;
// Criterion 4
constexpr double kEquivalenceTol = 1e-13;
// Criterion 5
constexpr double kDenseRatioLow = 12.0;
constexpr double kDenseRatioHigh = 20.0;
// Criterion 6
constexpr double kFixtureOrderTol = 0.1;
constexpr double kLinearStepTol = 1e-12;
// Criterion 7
constexpr double kLengthErrTol = 1e-3;
constexpr double kInitialResidualTol = 1e-10;
constexpr double kPendulumSeconds = 60.0;
// Criterion 8
constexpr double kNodalResidualTol = 1e-10;
// Criterion 9
constexpr double kOracleTol = 1e-12;

struct Outcome {
  bool pass;
  std::string detail;
  std::vector<std::string> diagnostics;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string e3(double v) { return fmt("%.3e", v); }
std::string f2(double v) { return fmt("%.2f", v); }

bool within_factor(double measured, double expected, double factor) {
  return measured > 0.0 && measured / expected <= factor && expected / measured <= factor;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const auto t = tsit5da();
  const auto r = verify_tableau(t);
  double main = 0.0;
  for (const auto& c : r.main.residuals) main = std::max(main, c.residual);
  double emb = 0.0;
  for (const auto& c : r.embedded->residuals) {
    if (c.order <= 4) emb = std::max(emb, c.residual);
  }
  double simp = 0.0;
  for (double v : r.simplifying) simp = std::max(simp, v);
  const double secs = seconds_since(start);
  const bool pass = main <= kConditionTol && emb <= kConditionTol && simp <= kConditionTol &&
                    r.stiffly_accurate.ok && r.r_inf <= kRInfinityTol && secs < kVerifySeconds;
  return {pass,
          "63 conditions max " + e3(main) + ", embedded order<=4 max " + e3(emb) +
              ", simplifying max " + e3(simp) + ", stiffly accurate " +
              (r.stiffly_accurate.ok ? "yes" : "no") + ", |R(inf)| " + e3(r.r_inf) + ", " +
              f2(secs) + " s",
          {}};
}

Outcome criterion2() {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = order_test(tsit5da(), prob1(), 0.125, 5);
  const double secs = seconds_since(start);
  const double err[] = {1.51e-7, 4.03e-9, 1.22e-10, 3.79e-12, 1.19e-13};
  const double ord[] = {5.22, 5.04, 5.01, 4.99};
  // Embedded errors at h = 3.12e-2, 1.56e-2, 7.81e-3.
  const double emb[] = {1.77e-8, 1.38e-9, 9.79e-11};
  bool pass = secs < kTableSeconds;
  std::string d = "err";
  for (std::size_t k = 0; k < 5; ++k) {
    pass = pass && within_factor(rows[k].err_main, err[k], kErrorFactor);
    d += " " + e3(rows[k].err_main);
  }
  d += ", order";
  for (std::size_t k = 1; k < 5; ++k) {
    pass = pass && std::abs(*rows[k].order_main - ord[k - 1]) <= kOrderTol;
    d += " " + f2(*rows[k].order_main);
  }
  d += ", embedded";
  for (std::size_t k = 2; k < 5; ++k) {
    pass = pass && within_factor(*rows[k].err_embedded, emb[k - 2], kErrorFactor);
    d += " " + e3(*rows[k].err_embedded);
  }
  return {pass, d + ", " + f2(secs) + " s", {}};
}

Outcome criterion3() {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = order_test(tsit5da(), prothero_robinson(), 0.5, 7);
  const double secs = seconds_since(start);
  const double err[] = {2.30e-7, 4.19e-9, 9.26e-11, 2.35e-12};
  bool pass = secs < kTableSeconds && rows[0].err_main > kInstabilityThreshold;
  std::string d = "err(h=0.5) " + e3(rows[0].err_main) + ", err";
  for (std::size_t k = 3; k < 7; ++k) {
    pass = pass && within_factor(rows[k].err_main, err[k - 3], kErrorFactor);
    d += " " + e3(rows[k].err_main);
  }
  // Orders approach 5 from above.
  const double ord[] = {6.14, 5.78, 5.50, 5.30};
  d += ", order";
  for (std::size_t k = 3; k < 7; ++k) {
    const double p = *rows[k].order_main;
    pass = pass && std::abs(p - ord[k - 3]) <= kOrderTol && p > 5.0;
    if (k > 3) pass = pass && p < *rows[k - 1].order_main;
    d += " " + f2(p);
  }
  return {pass, d + ", " + f2(secs) + " s", {}};
}

Outcome criterion4() {
  const auto t = tsit5da();
  const auto b = prothero_robinson();
  const auto se = semi_problem(b);
  const std::size_t s = t.stages();
  IntegrationStats st;
  Vector y = se.y0;
  double tc = se.t0;
  const double h = 0.0625;
  double worst = 0.0;
  for (int n = 0; n < 32; ++n) {
    const auto out = half_explicit_step(se, t, tc, y, h, &st);
    std::vector<double> k(s);
    for (std::size_t i = 0; i < s; ++i) {
      double yi = y[0];
      for (std::size_t j = 0; j < i; ++j) yi += h * t.alpha()(i, j) * k[j];
      Vector fi(1);
      se.f(tc + t.alpha_sums()[i] * h, Vector{yi}, Vector{}, fi);
      k[i] = fi[0];
    }
    double ref = y[0];
    for (std::size_t i = 0; i < s; ++i) ref += h * t.b()[i] * k[i];
    worst = std::max(worst, std::abs(out.y1[0] - ref) / std::max(std::abs(ref), 1e-300));
    y = out.y1;
    tc += h;
  }
  const bool pass = worst <= kEquivalenceTol && st.nlu == 0;
  return {pass,
          "32 steps, max relative difference " + e3(worst) + ", factorizations " +
              std::to_string(st.nlu),
          {}};
}

Outcome criterion5() {
  const auto b = prob1();
  const auto se = semi_problem(b);
  std::vector<double> errs;
  bool exact = true;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const auto tr = integrate_fixed(se, tsit5da(), h, b.t_end);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.segments.size(); ++k) {
      const auto& seg = tr.segments[k];
      exact = exact && interpolate(seg, 1.0) == seg.y1;
      if (k + 1 < tr.segments.size()) exact = exact && interpolate(seg, 1.0) == tr.segments[k + 1].y0;
      for (int j = 0; j <= 20; ++j) {
        const double tau = j / 20.0;
        const auto y = interpolate(seg, tau);
        const auto ex = b.exact(seg.t0 + tau * seg.h);
        for (std::size_t i = 0; i < ex.size(); ++i) worst = std::max(worst, std::abs(y[i] - ex[i]));
      }
    }
    errs.push_back(worst);
  }
  exact = exact && tsit5da().dense_weights(1.0) == tsit5da().b();
  bool pass = exact;
  std::string d = "max error";
  for (double e : errs) d += " " + e3(e);
  d += ", ratios";
  for (std::size_t k = 1; k < errs.size(); ++k) {
    const double r = errs[k - 1] / errs[k];
    pass = pass && r >= kDenseRatioLow && r <= kDenseRatioHigh;
    d += " " + f2(r);
  }
  d += std::string(", endpoints and continuity ") + (exact ? "exact" : "NOT exact");
  return {pass, d, {}};
}

std::vector<double> fixed_errors(const RowTableau& t, const Benchmark& b, double h0, int levels) {
  std::vector<double> out;
  for (const auto& r : order_test(t, b, h0, levels)) out.push_back(r.err_main);
  return out;
}

Outcome criterion6() {
  const auto b = prothero_robinson();
  Outcome o{true, "", {}};
  for (const auto& [t, expected] : {std::pair{linearly_implicit_euler(), 1.0}, std::pair{ros2(), 2.0}}) {
    const auto errs = fixed_errors(t, b, 0.125, 5);
    const double last = std::log2(errs[3] / errs[4]);
    const bool ok = std::abs(last - expected) <= kFixtureOrderTol;
    o.pass = o.pass && ok;
    o.detail += t.name() + " order " + f2(last) + " (errors";
    for (double e : errs) o.detail += " " + e3(e);
    o.detail += "); ";
    if (!ok) {
      // Finer levels show where the asymptotic regime starts.
      const auto fine = fixed_errors(t, b, 0.125, 11);
      std::string line = t.name() + " observed orders h=2^-4..2^-13:";
      for (std::size_t k = 1; k < fine.size(); ++k) line += " " + f2(std::log2(fine[k - 1] / fine[k]));
      o.diagnostics.push_back(line);
      o.diagnostics.push_back(
          "the global error of this one-stage scheme behaves like h |g''| (1 - h lambda) / "
          "(2 lambda), so with lambda = 10 the h^1 regime begins only for h well below "
          "1/lambda; h = 2^-7 gives h lambda = 0.078");
    }
  }
  // Linear test system.
  const Vector lambda{-0.5, -3.0, -40.0, -1e4, 2.0};
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
  const Vector y0{1.0, -2.0, 0.5, 3.0, 1.5};
  const double h = 0.1;
  double worst = 0.0;
  for (const auto& t : {linearly_implicit_euler(), ros2()}) {
    const auto out = row_step(p, t, 0.0, y0, h);
    for (std::size_t i = 0; i < p.n; ++i) {
      const double ref = stability_function(t, {h * lambda[i], 0.0}).real() * y0[i];
      worst = std::max(worst, std::abs(out.y1[i] - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  o.pass = o.pass && worst <= kLinearStepTol;
  o.detail += "linear system vs R(h lambda) max " + e3(worst);
  return o;
}

Outcome criterion7() {
  const auto start = std::chrono::steady_clock::now();
  const auto t = tsit5da();
  const auto b = pendulum();
  const auto r7 = pendulum_run(t, b, 1e-7, 1e-7);
  const auto r8 = pendulum_run(t, b, 1e-8, 1e-8);
  const double secs = seconds_since(start);
  const bool err_ok = r7.err_length <= kLengthErrTol;
  const bool pass = err_ok && r7.initial_residual <= kInitialResidualTol &&
                    r8.err_length < r7.err_length && r8.stats.nsucc > r7.stats.nsucc &&
                    secs < kPendulumSeconds;
  Outcome o{pass,
            "tol 1e-7: ERR " + e3(r7.err_length) + " nsucc " + std::to_string(r7.stats.nsucc) +
                " nfail " + std::to_string(r7.stats.nfail) + "; tol 1e-8: ERR " +
                e3(r8.err_length) + " nsucc " + std::to_string(r8.stats.nsucc) +
                "; initial residual " + e3(r7.initial_residual) + ", " + f2(secs) + " s",
            {}};
  if (!err_ok) {
    const auto rm = pendulum_run(t, b, 1e-7, 1e-7, ErrorNorm::max);
    o.diagnostics.push_back("same run with the max error norm: ERR " + e3(rm.err_length) +
                            " nsucc " + std::to_string(rm.stats.nsucc) + " nfail " +
                            std::to_string(rm.stats.nfail));
    o.diagnostics.push_back(
        "the RMS norm over 25 components is up to 5x looser than the max norm, so the "
        "controller takes fewer steps and the length drift exceeds 1e-3; the max-norm run is "
        "close to the step count and error of the table4 golden row");
  }
  return o;
}

Outcome criterion8() {
  const auto t = ros2();
  const std::vector<double> tols{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  bool pass = true;
  std::string d;
  for (const auto& b : {parabolic(250), hyperbolic(250)}) {
    const auto rows = work_precision(t, b, tols);
    int violations = 0;
    d += b.label + " err";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].status != "ok" || !rows[k].err_l2) {
        pass = false;
        d += " failed";
        continue;
      }
      d += " " + e3(*rows[k].err_l2);
      if (k > 0 && rows[k - 1].err_l2 && !(*rows[k].err_l2 < *rows[k - 1].err_l2)) ++violations;
    }
    pass = pass && violations <= 1;
    d += "; ";
  }
  // Nodal exact solution of the hyperbolic benchmark: u = (1 + x)/(1 + t),
  // u_t = -(1 + x)/(1 + t)^2.
  const std::size_t nx = 250;
  const auto b = hyperbolic(nx);
  const auto mm = mass_problem(b);
  double worst = 0.0;
  for (double tt : {0.0, 0.25, 0.5, 1.0}) {
    const auto u = b.exact(tt);
    Vector f(nx);
    mm.rhs(tt, u, f);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = static_cast<double>(i + 1) / static_cast<double>(nx);
      worst = std::max(worst, std::abs(f[i] + (1.0 + x) / ((1.0 + tt) * (1.0 + tt))));
    }
  }
  pass = pass && worst <= kNodalResidualTol;
  d += "hyperbolic semi-discrete residual at the nodal solution " + e3(worst);
  return {pass, d, {}};
}

Outcome criterion9() {
  double worst = 0.0;
  int checked = 0;
  int skipped = 0;
  for (auto family : {ConditionFamily::row, ConditionFamily::half_explicit}) {
    for (std::size_t s = 1; s <= 5; ++s) {
      // Five-stage ROW trees with more than 1e8 index tuples are skipped; the
      // four-stage run covers every tree.
      const double budget = s == 5 && family == ConditionFamily::row ? 1e8 : 1e300;
      const auto c = oracle::compare_family(family, s, 100 + static_cast<unsigned>(s), budget);
      worst = std::max(worst, c.worst);
      checked += c.checked;
      skipped += c.skipped;
    }
  }
  return {worst <= kOracleTol,
          std::to_string(checked) + " comparisons (" + std::to_string(skipped) +
              " large five-stage trees skipped), max relative difference " + e3(worst),
          {}};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tableau verification", criterion1},
      {"prob1 fixed-step errors and orders", criterion2},
      {"Prothero-Robinson fixed-step errors and orders", criterion3},
      {"pure ODE equivalence", criterion4},
      {"dense output", criterion5},
      {"generic ROW engine", criterion6},
      {"pendulum", criterion7},
      {"parabolic and hyperbolic work-precision", criterion8},
      {"condition oracle", criterion9},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    std::printf("%s criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    for (const auto& line : o.diagnostics) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
