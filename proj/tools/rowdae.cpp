#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rowdae/harness.hpp"
#include "rowdae/reproduce.hpp"

#ifndef ROWDAE_GOLDEN_DIR
#define ROWDAE_GOLDEN_DIR "data/golden"
#endif

namespace {

using rowdae::RunConfig;

void add_method(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--method", c.method, "built-in method: tsit5da, li-euler, ros2")
      ->capture_default_str();
  cmd->add_option("--tableau", c.tableau, "tableau file (overrides --method)");
}

void add_problem(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--problem", c.problem,
                  "prob1, prothero-robinson, parabolic, hyperbolic, pendulum")
      ->capture_default_str();
  cmd->add_option("--tend", c.tend, "end time (default: benchmark interval)");
  cmd->add_option("--nx", c.nx, "grid points of the PDE benchmarks")->capture_default_str();
  cmd->add_option("--n", c.n, "pendulum masses")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "Prothero-Robinson stiffness")->capture_default_str();
  cmd->add_flag("--force", c.force, "run half-explicit methods on stiff benchmarks");
}

void add_output(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out, "output file (default stdout)");
}

template <class Fn>
int run(const RunConfig& c, Fn&& fn) {
  std::ostringstream buf;
  const int code = fn(c, buf, std::cerr);
  if (c.out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(c.out);
    if (!f) throw rowdae::UsageError("cannot write '" + c.out + "'");
    f << buf.str();
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rosenbrock methods for index-1 DAEs: order tests and benchmarks"};
  app.require_subcommand(1);
  RunConfig c;

  auto* order = app.add_subcommand("order-test", "fixed-step errors and observed orders");
  add_method(order, c);
  add_problem(order, c);
  order->add_option("--h0", c.h0, "largest step size")->capture_default_str();
  order->add_option("--levels", c.levels, "number of step halvings + 1")->capture_default_str();
  add_output(order, c);

  auto* wp = app.add_subcommand("work-precision", "adaptive runs over a tolerance list");
  add_method(wp, c);
  add_problem(wp, c);
  wp->add_option("--tols", c.tols, "comma-separated tolerances (rtol = atol)")
      ->delimiter(',')
      ->capture_default_str();
  wp->add_option("--norm", c.norm, "error norm: rms or max")->capture_default_str();
  add_output(wp, c);

  auto* pend = app.add_subcommand("pendulum", "multi-pendulum statistics row");
  add_method(pend, c);
  pend->add_option("--rtol", c.rtol)->capture_default_str();
  pend->add_option("--atol", c.atol)->capture_default_str();
  pend->add_option("--n", c.n, "number of masses")->capture_default_str();
  pend->add_option("--gravity", c.gravity)->capture_default_str();
  pend->add_option("--angle", c.angle, "initial angle of every rod from the downward vertical");
  pend->add_option("--tend", c.tend, "end time (default 100)");
  pend->add_option("--norm", c.norm, "error norm: rms or max")->capture_default_str();
  add_output(pend, c);

  auto* verify = app.add_subcommand("verify-tableau", "order conditions and structural checks");
  add_method(verify, c);
  verify->add_option("--order", c.order, "required attained order (default: declared order)");
  add_output(verify, c);

  auto* stab = app.add_subcommand("stability", "|R(iy)| on a logarithmic grid");
  add_method(stab, c);
  stab->add_option("--ymin", c.ymin)->capture_default_str();
  stab->add_option("--ymax", c.ymax)->capture_default_str();
  stab->add_option("--points-per-decade", c.points_per_decade)->capture_default_str();
  add_output(stab, c);

  auto* repro = app.add_subcommand("reproduce", "compare against the golden tables");
  std::string golden = ROWDAE_GOLDEN_DIR;
  bool quick = false;
  repro->add_option("--golden", golden, "directory of golden CSV files")->capture_default_str();
  repro->add_flag("--quick", quick, "problem prob1 and tableau verification only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rowdae::kExitSuccess : rowdae::kExitUsage;
  }

  try {
    if (*order) {
      c.command = "order-test";
      return run(c, rowdae::cmd_order_test);
    }
    if (*wp) {
      c.command = "work-precision";
      return run(c, rowdae::cmd_work_precision);
    }
    if (*pend) {
      c.command = "pendulum";
      c.problem = "pendulum";
      return run(c, rowdae::cmd_pendulum);
    }
    if (*verify) {
      c.command = "verify-tableau";
      return run(c, rowdae::cmd_verify_tableau);
    }
    if (*stab) {
      c.command = "stability";
      return run(c, rowdae::cmd_stability);
    }
    if (*repro) {
      return rowdae::reproduce(golden, quick, std::cout) == 0 ? rowdae::kExitSuccess
                                                              : rowdae::kExitNumerical;
    }
  } catch (const rowdae::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return rowdae::kExitUsage;
  } catch (const rowdae::MissingExactSolution& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return rowdae::kExitUsage;
  } catch (const rowdae::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rowdae::kExitUsage;
  } catch (const rowdae::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return rowdae::kExitNumerical;
  }
  return rowdae::kExitUsage;
}
