#pragma once

// Command implementations behind the command-line tool. Each command writes
// CSV to a stream: a '#' header echoing the configuration, a column line and
// data rows. Numbers use 17 significant digits in scientific notation.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rowdae/conditions.hpp"
#include "rowdae/errors.hpp"
#include "rowdae/integrate.hpp"
#include "rowdae/problems.hpp"
#include "rowdae/tableau.hpp"
#include "rowdae/tableau_io.hpp"

namespace rowdae {

class UsageError : public Error {
public:
  using Error::Error;
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

struct RunConfig {
  std::string command;
  std::string method = "tsit5da";
  std::string tableau;  // path; overrides method when set
  std::string problem = "prob1";
  double h0 = 0.125;
  int levels = 5;
  std::vector<double> tols{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  double rtol = 1e-7;
  double atol = 1e-7;
  std::optional<double> tend;
  std::size_t nx = 250;
  std::size_t n = 5;
  double lambda = 10.0;
  double gravity = 9.81;
  std::optional<double> angle;  // common initial angle of all rods
  std::string norm = "rms";
  std::optional<int> order;  // verify-tableau: required attained order
  double ymin = 1e-2;
  double ymax = 1e6;
  int points_per_decade = 20;
  std::string out;  // empty: stdout
  bool force = false;
};

namespace detail {

inline std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string opt_sci(const std::optional<double>& v) { return v ? sci(*v) : ""; }

inline std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + short_num(v[i]);
  return s;
}

// RFC 4180 quoting for free-text fields.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace detail

/// Command line that reproduces the run, every option spelled out.
inline std::string echo_config(const RunConfig& c) {
  using detail::short_num;
  std::string s = "rowdae " + c.command;
  if (!c.tableau.empty()) {
    s += " --tableau " + c.tableau;
  } else {
    s += " --method " + c.method;
  }
  if (c.command == "order-test" || c.command == "work-precision") s += " --problem " + c.problem;
  if (c.command == "order-test") {
    s += " --h0 " + short_num(c.h0) + " --levels " + std::to_string(c.levels);
  }
  if (c.command == "work-precision") s += " --tols " + detail::join_numbers(c.tols);
  if (c.command == "pendulum") {
    s += " --rtol " + short_num(c.rtol) + " --atol " + short_num(c.atol);
    s += " --n " + std::to_string(c.n) + " --gravity " + short_num(c.gravity);
    if (c.angle) s += " --angle " + short_num(*c.angle);
  }
  if (c.command == "work-precision" || c.command == "pendulum") s += " --norm " + c.norm;
  if (c.command == "order-test" || c.command == "work-precision" || c.command == "pendulum") {
    if (c.tend) s += " --tend " + short_num(*c.tend);
    if (c.problem == "parabolic" || c.problem == "hyperbolic") s += " --nx " + std::to_string(c.nx);
    if (c.problem == "prothero-robinson") s += " --lambda " + short_num(c.lambda);
  }
  if (c.command == "verify-tableau" && c.order) s += " --order " + std::to_string(*c.order);
  if (c.command == "stability") {
    s += " --ymin " + short_num(c.ymin) + " --ymax " + short_num(c.ymax) +
         " --points-per-decade " + std::to_string(c.points_per_decade);
  }
  if (c.force) s += " --force";
  return s;
}

inline RowTableau builtin_tableau(const std::string& name) {
  if (name == "tsit5da") return tsit5da();
  if (name == "li-euler") return linearly_implicit_euler();
  if (name == "ros2") return ros2();
  throw UsageError("unknown method '" + name + "' (built-in: tsit5da, li-euler, ros2)");
}

inline RowTableau resolve_tableau(const RunConfig& c) {
  if (!c.tableau.empty()) return load_tableau(c.tableau);
  return builtin_tableau(c.method);
}

inline Benchmark resolve_benchmark(const RunConfig& c) {
  Benchmark b;
  if (c.problem == "prob1") {
    b = prob1();
  } else if (c.problem == "prothero-robinson") {
    b = prothero_robinson(c.lambda);
  } else if (c.problem == "parabolic") {
    b = parabolic(c.nx);
  } else if (c.problem == "hyperbolic") {
    b = hyperbolic(c.nx);
  } else if (c.problem == "pendulum") {
    PendulumParams prm;
    prm.n = c.n;
    prm.gravity = c.gravity;
    if (c.angle) prm.angles.assign(c.n, *c.angle);
    b = pendulum(prm);
  } else {
    throw UsageError("unknown problem '" + c.problem +
                     "' (prob1, prothero-robinson, parabolic, hyperbolic, pendulum)");
  }
  if (c.tend) {
    if (b.exact == nullptr && !b.custom) throw UsageError("--tend needs a benchmark metric");
    b.t_end = *c.tend;
  }
  return b;
}

inline ErrorNorm parse_norm(const std::string& s) {
  if (s == "rms") return ErrorNorm::rms;
  if (s == "max") return ErrorNorm::max;
  throw UsageError("unknown norm '" + s + "' (rms, max)");
}

inline void check_stiff_gate(const RunConfig& c, const RowTableau& t, const Benchmark& b,
                             std::ostream& warn) {
  if (t.kind() == MethodKind::half_explicit && b.stiff) {
    if (!c.force) {
      throw UsageError("half-explicit method '" + t.name() + "' on stiff benchmark '" + b.label +
                       "' refused; pass --force to run anyway");
    }
    warn << "warning: running half-explicit method on stiff benchmark '" << b.label << "'\n";
  }
}

/// Integrates the benchmark in the form matching the tableau kind.
template <class Fn>
decltype(auto) with_problem(const RowTableau& t, const Benchmark& b, Fn&& fn) {
  if (t.kind() == MethodKind::row) return fn(mass_problem(b));
  return fn(semi_problem(b));
}

// -- order-test ------------------------------------------------------------

struct OrderRow {
  double h;
  double err_main;
  std::optional<double> order_main;
  std::optional<double> err_embedded;
  std::optional<double> order_embedded;
};

inline std::optional<double> observed_order(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0)) return std::nullopt;
  return std::log2(err_coarse / err_fine);
}

/// Fixed-step errors at h0, h0/2, ... for the main scheme and, when present,
/// the embedded scheme run as a method of its own.
inline std::vector<OrderRow> order_test(const RowTableau& t, const Benchmark& b, double h0,
                                        int levels) {
  if (levels < 1) throw UsageError("--levels must be at least 1");
  if (!(h0 > 0.0)) throw UsageError("--h0 must be positive");
  if (!b.exact) throw MissingExactSolution("benchmark '" + b.label + "' has no exact solution");
  std::optional<RowTableau> emb;
  if (t.has_embedded()) emb = t.with_weights(t.bhat(), t.name() + "-embedded");
  FixedOptions fo{false, false};

  auto endpoint = [&](const RowTableau& tab, double h) {
    return with_problem(tab, b, [&](const auto& p) {
      const auto traj = integrate_fixed(p, tab, h, b.t_end, fo);
      return endpoint_error(b, traj.times.back(), traj.states.back());
    });
  };

  std::vector<OrderRow> rows;
  double h = h0;
  for (int k = 0; k < levels; ++k, h /= 2.0) {
    OrderRow r{h, endpoint(t, h), std::nullopt, std::nullopt, std::nullopt};
    if (emb) r.err_embedded = endpoint(*emb, h);
    if (!rows.empty()) {
      r.order_main = observed_order(rows.back().err_main, r.err_main);
      if (emb) r.order_embedded = observed_order(*rows.back().err_embedded, *r.err_embedded);
    }
    rows.push_back(r);
  }
  return rows;
}

inline void write_order_csv(std::ostream& out, const std::vector<OrderRow>& rows) {
  out << "h,err_main,order_main,err_embedded,order_embedded\n";
  for (const auto& r : rows) {
    out << detail::sci(r.h) << ',' << detail::sci(r.err_main) << ','
        << detail::opt_sci(r.order_main) << ',' << detail::opt_sci(r.err_embedded) << ','
        << detail::opt_sci(r.order_embedded) << '\n';
  }
}

inline int cmd_order_test(const RunConfig& c, std::ostream& out, std::ostream& warn) {
  const auto t = resolve_tableau(c);
  const auto b = resolve_benchmark(c);
  check_stiff_gate(c, t, b, warn);
  const auto rows = order_test(t, b, c.h0, c.levels);
  out << "# " << echo_config(c) << '\n';
  write_order_csv(out, rows);
  return kExitSuccess;
}

// -- work-precision --------------------------------------------------------

struct WorkPrecisionRow {
  double rtol;
  std::optional<double> err_l2;
  std::optional<double> err_interp;
  IntegrationStats stats;
  double wall_seconds = 0.0;
  std::string status = "ok";
};

inline WorkPrecisionRow work_precision_row(const RowTableau& t, const Benchmark& b, double tol,
                                           ErrorNorm norm) {
  WorkPrecisionRow row{tol, std::nullopt, std::nullopt, {}, 0.0, "ok"};
  AdaptiveOptions o;
  o.rtol = tol;
  o.atol = tol;
  o.norm = norm;
  o.keep_dense = t.dense().has_value();
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto traj = with_problem(t, b, [&](const auto& p) {
      return integrate_adaptive(p, t, b.t_end, o);
    });
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto m = error_metrics(traj, b);
    row.err_l2 = m.l2_steps;
    row.err_interp = m.l2_interp;
    row.stats = traj.stats;
  } catch (const StepUnderflow& e) {
    row.status = std::string("failed: ") + e.what();
  } catch (const MaxStepsExceeded& e) {
    row.status = std::string("failed: ") + e.what();
  }
  return row;
}

inline std::vector<WorkPrecisionRow> work_precision(const RowTableau& t, const Benchmark& b,
                                                    const std::vector<double>& tols,
                                                    ErrorNorm norm = ErrorNorm::rms) {
  if (tols.empty()) throw UsageError("tolerance list is empty");
  for (double tol : tols) {
    if (!(tol > 0.0)) throw UsageError("tolerances must be positive");
  }
  std::vector<WorkPrecisionRow> rows;
  for (double tol : tols) rows.push_back(work_precision_row(t, b, tol, norm));
  return rows;
}

inline void write_work_precision_csv(std::ostream& out, const std::vector<WorkPrecisionRow>& rows) {
  out << "rtol,err_l2,err_L2_interp,nsucc,nfail,nf,ng,njac,wall_seconds,status\n";
  for (const auto& r : rows) {
    out << detail::sci(r.rtol) << ',' << detail::opt_sci(r.err_l2) << ','
        << detail::opt_sci(r.err_interp) << ',' << r.stats.nsucc << ',' << r.stats.nfail << ','
        << r.stats.nf << ',' << r.stats.ng << ',' << r.stats.njac << ','
        << detail::sci(r.wall_seconds) << ',' << detail::csv_field(r.status) << '\n';
  }
}

inline int cmd_work_precision(const RunConfig& c, std::ostream& out, std::ostream& warn) {
  const auto t = resolve_tableau(c);
  const auto b = resolve_benchmark(c);
  check_stiff_gate(c, t, b, warn);
  const auto rows = work_precision(t, b, c.tols, parse_norm(c.norm));
  out << "# " << echo_config(c) << '\n';
  write_work_precision_csv(out, rows);
  bool any_failed = false;
  for (const auto& r : rows) any_failed = any_failed || r.status != "ok";
  return any_failed ? kExitNumerical : kExitSuccess;
}

// -- pendulum --------------------------------------------------------------

struct PendulumRow {
  std::string method;
  double rtol;
  IntegrationStats stats;
  double err_length;
  double initial_residual;  // max |g| at the consistent initial point
  double wall_seconds;
};

inline PendulumRow pendulum_run(const RowTableau& t, const Benchmark& b, double rtol, double atol,
                                ErrorNorm norm = ErrorNorm::rms) {
  const auto semi = semi_problem(b);
  Vector g0(semi.ng);
  semi.g(semi.t0, semi.y0, semi.z0, g0);

  AdaptiveOptions o;
  o.rtol = rtol;
  o.atol = atol;
  o.norm = norm;
  o.keep_dense = false;
  o.keep_states = false;
  double worst = 0.0;
  o.observer = [&](double tt, std::span<const double> state) {
    worst = std::max(worst, b.custom(tt, state));
  };
  const auto start = std::chrono::steady_clock::now();
  const auto traj = with_problem(t, b, [&](const auto& p) {
    return integrate_adaptive(p, t, b.t_end, o);
  });
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {t.name(), rtol, traj.stats, worst, norm_inf(g0), secs};
}

inline int cmd_pendulum(const RunConfig& c, std::ostream& out, std::ostream&) {
  RunConfig pc = c;
  pc.problem = "pendulum";
  const auto t = resolve_tableau(pc);
  const auto b = resolve_benchmark(pc);
  const auto r = pendulum_run(t, b, c.rtol, c.atol, parse_norm(c.norm));
  out << "# " << echo_config(c) << '\n';
  out << "# initial constraint residual " << detail::sci(r.initial_residual) << '\n';
  out << "method,rtol,nsucc,nfail,nf,ng,err_length,wall_seconds\n";
  out << detail::csv_field(r.method) << ',' << detail::sci(r.rtol) << ',' << r.stats.nsucc << ','
      << r.stats.nfail << ',' << r.stats.nf << ',' << r.stats.ng << ','
      << detail::sci(r.err_length) << ',' << detail::sci(r.wall_seconds) << '\n';
  return kExitSuccess;
}

// -- verify-tableau --------------------------------------------------------

struct VerificationReport {
  ConditionReport main;
  std::optional<ConditionReport> embedded;
  StifflyAccurateCheck stiffly_accurate;
  Vector simplifying;
  double r_inf;
  int attained;
  std::optional<int> attained_embedded;
};

inline ConditionFamily family_of(const RowTableau& t) {
  return t.kind() == MethodKind::row ? ConditionFamily::row : ConditionFamily::half_explicit;
}

inline VerificationReport verify_tableau(const RowTableau& t,
                                         double tol = kDefaultConditionTolerance) {
  const auto family = family_of(t);
  VerificationReport r{condition_residuals(family, t, t.b()),
                       std::nullopt,
                       check_stiffly_accurate(t),
                       simplifying_residuals(t),
                       r_infinity(t),
                       0,
                       std::nullopt};
  r.attained = r.main.attained_order(tol);
  if (t.has_embedded()) {
    r.embedded = condition_residuals(family, t, t.bhat());
    r.attained_embedded = r.embedded->attained_order(tol);
  }
  return r;
}

inline void write_verification_csv(std::ostream& out, const RowTableau& t,
                                   const VerificationReport& r) {
  using detail::sci;
  out << "section,key,value\n";
  out << "tableau,name," << detail::csv_field(t.name()) << '\n';
  out << "tableau,kind," << to_string(t.kind()) << '\n';
  out << "tableau,stages," << t.stages() << '\n';
  for (const auto& [p, v] : r.main.max_residual_by_order()) {
    out << "max_residual_main,order_" << p << ',' << sci(v) << '\n';
  }
  out << "attained_order,main," << r.attained << '\n';
  out << "attained_order,main_ode," << r.main.attained_ode_order() << '\n';
  if (r.embedded) {
    for (const auto& [p, v] : r.embedded->max_residual_by_order()) {
      out << "max_residual_embedded,order_" << p << ',' << sci(v) << '\n';
    }
    out << "attained_order,embedded," << *r.attained_embedded << '\n';
    out << "attained_order,embedded_ode," << r.embedded->attained_ode_order() << '\n';
  }
  out << "stiffly_accurate,main," << (r.stiffly_accurate.ok ? "true" : "false") << '\n';
  if (t.has_embedded()) {
    out << "stiffly_accurate,embedded," << (r.stiffly_accurate.embedded_ok ? "true" : "false")
        << '\n';
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < r.simplifying.size(); ++i) {
    out << "simplifying,stage_" << i + 2 << ',' << sci(r.simplifying[i]) << '\n';
    worst = std::max(worst, r.simplifying[i]);
  }
  out << "simplifying,max," << sci(worst) << '\n';
  out << "r_infinity,abs," << sci(r.r_inf) << '\n';
}

inline int cmd_verify_tableau(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto t = resolve_tableau(c);
  const auto r = verify_tableau(t);
  out << "# " << echo_config(c) << '\n';
  write_verification_csv(out, t, r);
  const int required = c.order.value_or(t.order().value_or(1));
  return r.attained >= required ? kExitSuccess : kExitNumerical;
}

// -- stability -------------------------------------------------------------

struct StabilityRow {
  double y;
  std::optional<double> abs_r;
};

inline std::vector<StabilityRow> stability_scan(const RowTableau& t, double ymin, double ymax,
                                                int per_decade) {
  if (!(ymin > 0.0) || !(ymax > ymin) || per_decade < 1) {
    throw UsageError("stability scan needs 0 < ymin < ymax and points per decade >= 1");
  }
  const double lo = std::log10(ymin);
  const double hi = std::log10(ymax);
  const int n = static_cast<int>(std::lround((hi - lo) * per_decade));
  std::vector<StabilityRow> rows;
  for (int k = 0; k <= n; ++k) {
    const double y = k == n ? ymax : std::pow(10.0, lo + (hi - lo) * k / n);
    StabilityRow r{y, std::nullopt};
    try {
      r.abs_r = std::abs(stability_function(t, {0.0, y}));
    } catch (const SingularMatrix&) {
    }
    rows.push_back(r);
  }
  return rows;
}

inline int cmd_stability(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto t = resolve_tableau(c);
  const auto rows = stability_scan(t, c.ymin, c.ymax, c.points_per_decade);
  out << "# " << echo_config(c) << '\n';
  out << "y,abs_R,status\n";
  for (const auto& r : rows) {
    out << detail::sci(r.y) << ',' << detail::opt_sci(r.abs_r) << ','
        << (r.abs_r ? "ok" : "singular") << '\n';
  }
  out << "inf," << detail::sci(r_infinity(t)) << ",ok\n";
  return kExitSuccess;
}

}  // namespace rowdae
