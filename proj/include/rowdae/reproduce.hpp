#pragma once

// Golden-table comparison: regenerates the published Tsit5DA numbers and
// checks them cell by cell against CSV files with per-cell tolerances.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rowdae/harness.hpp"

namespace rowdae {

enum class CellCheck { factor, abs, above, below };

struct GoldenCell {
  std::string file;
  std::size_t line = 0;
  std::string table;
  std::string row;
  std::string column;
  double expected = 0.0;
  CellCheck check = CellCheck::factor;
  double tolerance = 0.0;
  std::string provenance;
};

inline CellCheck parse_check(const std::string& s, std::size_t line) {
  if (s == "factor") return CellCheck::factor;
  if (s == "abs") return CellCheck::abs;
  if (s == "above") return CellCheck::above;
  if (s == "below") return CellCheck::below;
  throw ParseError(line, "unknown check '" + s + "'");
}

inline std::vector<GoldenCell> load_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open golden file '" + path + "'");
  std::vector<GoldenCell> cells;
  std::string raw;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    f.push_back(cur);
    if (!header_seen) {
      if (f.size() != 7 || f[0] != "table") throw ParseError(lineno, "bad golden header");
      header_seen = true;
      continue;
    }
    if (f.size() != 7) throw ParseError(lineno, "expected 7 fields");
    cells.push_back({path, lineno, f[0], f[1], f[2], detail::parse_double(f[3], lineno),
                     parse_check(f[4], lineno), detail::parse_double(f[5], lineno), f[6]});
  }
  return cells;
}

inline bool cell_passes(const GoldenCell& c, double measured) {
  if (!std::isfinite(measured)) return false;
  switch (c.check) {
    case CellCheck::factor:
      if (!(measured > 0.0) || !(c.expected > 0.0)) return false;
      return measured / c.expected <= c.tolerance && c.expected / measured <= c.tolerance;
    case CellCheck::abs:
      return std::abs(measured - c.expected) <= c.tolerance;
    case CellCheck::above:
      return measured > c.expected;
    case CellCheck::below:
      return measured <= c.expected;
  }
  return false;
}

/// Measured values keyed by (table, row, column).
using Measurements = std::map<std::tuple<std::string, std::string, std::string>, double>;

namespace detail {

inline std::string step_label(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", h);
  return buf;
}

inline std::string tol_label(double tol) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", tol);
  return buf;
}

inline void add_order_rows(Measurements& m, const std::string& table,
                           const std::vector<OrderRow>& rows) {
  for (const auto& r : rows) {
    const auto row = step_label(r.h);
    m[{table, row, "err_main"}] = r.err_main;
    if (r.order_main) m[{table, row, "order_main"}] = *r.order_main;
    if (r.err_embedded) m[{table, row, "err_embedded"}] = *r.err_embedded;
    if (r.order_embedded) m[{table, row, "order_embedded"}] = *r.order_embedded;
  }
}

}  // namespace detail

inline void measure_table1(Measurements& m) {
  detail::add_order_rows(m, "table1", order_test(tsit5da(), prob1(), 0.125, 5));
}

inline void measure_table2(Measurements& m) {
  detail::add_order_rows(m, "table2", order_test(tsit5da(), prothero_robinson(), 0.5, 7));
}

inline void measure_table3(Measurements& m) {
  const auto t = tsit5da();
  const auto r = verify_tableau(t);
  const std::string row = "tsit5da";
  m[{"table3", row, "attained_order_main"}] = r.attained;
  m[{"table3", row, "attained_order_embedded"}] = r.attained_embedded.value_or(0);
  double worst = 0.0;
  for (const auto& c : r.main.residuals) worst = std::max(worst, c.residual);
  m[{"table3", row, "max_residual_main"}] = worst;
  worst = 0.0;
  for (const auto& c : r.embedded->residuals) {
    if (c.order <= 4) worst = std::max(worst, c.residual);
  }
  m[{"table3", row, "max_residual_embedded_order_le_4"}] = worst;
  worst = 0.0;
  for (double v : r.simplifying) worst = std::max(worst, v);
  m[{"table3", row, "max_simplifying_residual"}] = worst;
  m[{"table3", row, "stiffly_accurate"}] = r.stiffly_accurate.ok ? 1.0 : 0.0;
  m[{"table3", row, "stiffly_accurate_embedded"}] = r.stiffly_accurate.embedded_ok ? 1.0 : 0.0;
  m[{"table3", row, "r_infinity"}] = r.r_inf;
}

inline void measure_table4(Measurements& m) {
  const auto t = tsit5da();
  const auto b = pendulum();
  for (double tol : {1e-7, 1e-8}) {
    const auto r = pendulum_run(t, b, tol, tol);
    const auto row = detail::tol_label(tol);
    m[{"table4", row, "nsucc"}] = static_cast<double>(r.stats.nsucc);
    m[{"table4", row, "nfail"}] = static_cast<double>(r.stats.nfail);
    m[{"table4", row, "err_length"}] = r.err_length;
    m[{"table4", row, "initial_residual"}] = r.initial_residual;
  }
}

struct CellResult {
  GoldenCell cell;
  std::optional<double> measured;
  bool pass;
};

inline std::vector<CellResult> compare_golden(const std::vector<GoldenCell>& cells,
                                              const Measurements& m) {
  std::vector<CellResult> out;
  for (const auto& c : cells) {
    const auto it = m.find({c.table, c.row, c.column});
    if (it == m.end()) {
      out.push_back({c, std::nullopt, false});
    } else {
      out.push_back({c, it->second, cell_passes(c, it->second)});
    }
  }
  return out;
}

inline std::vector<std::string> golden_files(bool quick) {
  if (quick) return {"table1.csv", "table3.csv"};
  return {"table1.csv", "table2.csv", "table3.csv", "table4.csv"};
}

/// Runs the measurements needed by the golden files in dir and prints one line
/// per cell. Returns the number of failing cells.
inline std::size_t reproduce(const std::string& dir, bool quick, std::ostream& out) {
  Measurements m;
  std::size_t failures = 0;
  for (const auto& name : golden_files(quick)) {
    const auto path = (std::filesystem::path(dir) / name).string();
    const auto cells = load_golden(path);
    if (name == "table1.csv") measure_table1(m);
    if (name == "table2.csv") measure_table2(m);
    if (name == "table3.csv") measure_table3(m);
    if (name == "table4.csv") measure_table4(m);
    for (const auto& r : compare_golden(cells, m)) {
      const auto& c = r.cell;
      out << (r.pass ? "PASS " : "FAIL ") << c.table << " row=" << c.row << " column=" << c.column
          << " expected=" << detail::short_num(c.expected)
          << " measured=" << (r.measured ? detail::sci(*r.measured) : std::string("missing"))
          << " [" << c.provenance << "]";
      if (!r.pass) {
        out << " at " << c.file << ':' << c.line;
        ++failures;
      }
      out << '\n';
    }
  }
  out << (failures == 0 ? "all cells pass" : std::to_string(failures) + " cell(s) failed") << '\n';
  return failures;
}

}  // namespace rowdae
