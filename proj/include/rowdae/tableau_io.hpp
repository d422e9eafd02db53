#pragma once

// Plain-text tableau format:
//
//   # comment
//   kind: row | half_explicit
//   s: <int>
//   gamma: <float>
//   name: <text>                (optional)
//   order: <int>                (optional)
//   embedded_order: <int>       (optional)
//   alpha:
//   <s lines of s floats>
//   gammaM:
//   <s lines of s floats>
//   b: <s floats>
//   bhat: <s floats>            (optional)
//   c: / d: / e: / f: <s floats> (optional; c, d, e together)
//
// Floats are written with 17 significant digits so a save/load round trip
// reproduces every coefficient bit for bit.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rowdae/errors.hpp"
#include "rowdae/tableau.hpp"

namespace rowdae {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  // from_chars rejects a leading '+', which strtod-style writers may emit.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  }
  return v;
}

inline Vector parse_floats(std::string_view text, std::size_t line) {
  Vector out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == ',')) {
      ++pos;
    }
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != ',') {
      ++end;
    }
    out.push_back(parse_double(text.substr(pos, end - pos), line));
    pos = end;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline RowTableau parse_tableau(std::istream& in) {
  TableauData d;
  std::optional<std::size_t> s;
  bool have_kind = false;
  bool have_gamma = false;
  std::vector<Vector> alpha_rows;
  std::vector<Vector> gamma_rows;
  std::vector<Vector>* block = nullptr;
  std::size_t block_line = 0;
  std::optional<Vector> c, dd, e, f;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      if (block == nullptr) throw ParseError(lineno, "expected 'key: value'");
      if (!s) throw ParseError(lineno, "matrix block before 's:'");
      auto row = detail::parse_floats(line, lineno);
      if (row.size() != *s) {
        throw ParseError(lineno, "matrix row has " + std::to_string(row.size()) +
                                     " entries, expected " + std::to_string(*s));
      }
      block->push_back(std::move(row));
      if (block->size() == *s) block = nullptr;
      continue;
    }
    if (block != nullptr) {
      throw ParseError(lineno, "matrix block started at line " + std::to_string(block_line) +
                                   " has too few rows");
    }

    const std::string key(detail::trim(line.substr(0, colon)));
    const auto value = detail::trim(line.substr(colon + 1));

    auto need_s = [&] {
      if (!s) throw ParseError(lineno, "'" + key + "' before 's:'");
    };
    auto read_vector = [&]() {
      need_s();
      auto v = detail::parse_floats(value, lineno);
      if (v.size() != *s) {
        throw ParseError(lineno, "'" + key + "' has " + std::to_string(v.size()) +
                                     " entries, expected " + std::to_string(*s));
      }
      return v;
    };

    if (key == "kind") {
      if (value == "row") {
        d.kind = MethodKind::row;
      } else if (value == "half_explicit") {
        d.kind = MethodKind::half_explicit;
      } else {
        throw ParseError(lineno, "unknown kind '" + std::string(value) + "'");
      }
      have_kind = true;
    } else if (key == "s") {
      const double v = detail::parse_double(value, lineno);
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw ParseError(lineno, "s must be a positive integer");
      }
      s = static_cast<std::size_t>(v);
    } else if (key == "gamma") {
      d.gamma = detail::parse_double(value, lineno);
      have_gamma = true;
    } else if (key == "name") {
      d.name = std::string(value);
    } else if (key == "order") {
      d.order = static_cast<int>(detail::parse_double(value, lineno));
    } else if (key == "embedded_order") {
      d.embedded_order = static_cast<int>(detail::parse_double(value, lineno));
    } else if (key == "alpha" || key == "gammaM") {
      need_s();
      if (!value.empty()) throw ParseError(lineno, "'" + key + ":' must be on its own line");
      block = key == "alpha" ? &alpha_rows : &gamma_rows;
      if (!block->empty()) throw ParseError(lineno, "duplicate block '" + key + "'");
      block_line = lineno;
    } else if (key == "b") {
      d.b = read_vector();
    } else if (key == "bhat") {
      d.bhat = read_vector();
    } else if (key == "c") {
      c = read_vector();
    } else if (key == "d") {
      dd = read_vector();
    } else if (key == "e") {
      e = read_vector();
    } else if (key == "f") {
      f = read_vector();
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }

  if (block != nullptr) {
    throw ParseError(lineno, "matrix block started at line " + std::to_string(block_line) +
                                 " has too few rows");
  }
  if (!have_kind) throw ParseError(lineno, "missing 'kind:'");
  if (!s) throw ParseError(lineno, "missing 's:'");
  if (!have_gamma) throw ParseError(lineno, "missing 'gamma:'");
  if (alpha_rows.size() != *s) throw ParseError(lineno, "missing 'alpha:' block");
  if (gamma_rows.size() != *s) throw ParseError(lineno, "missing 'gammaM:' block");
  if (d.b.empty()) throw ParseError(lineno, "missing 'b:'");
  if (c || dd || e || f) {
    if (!c || !dd || !e) throw ParseError(lineno, "dense output needs c, d and e");
    d.dense = DenseCoefficients{*c, *dd, *e, f.value_or(Vector{})};
  }
  d.alpha = detail::from_rows(alpha_rows);
  d.gamma_matrix = detail::from_rows(gamma_rows);
  return RowTableau(std::move(d));
}

inline RowTableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_tableau(in);
}

inline void write_tableau(const RowTableau& t, std::ostream& out) {
  const std::size_t s = t.stages();
  auto write_vec = [&](const char* key, const Vector& v) {
    out << key << ':';
    for (double x : v) out << ' ' << detail::format_double(x);
    out << '\n';
  };
  auto write_mat = [&](const char* key, const DenseMatrix& m) {
    out << key << ":\n";
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        out << (j ? " " : "") << detail::format_double(m(i, j));
      }
      out << '\n';
    }
  };
  if (!t.name().empty()) out << "name: " << t.name() << '\n';
  out << "kind: " << to_string(t.kind()) << '\n';
  out << "s: " << s << '\n';
  out << "gamma: " << detail::format_double(t.gamma()) << '\n';
  if (t.order()) out << "order: " << *t.order() << '\n';
  if (t.embedded_order()) out << "embedded_order: " << *t.embedded_order() << '\n';
  write_mat("alpha", t.alpha());
  write_mat("gammaM", t.gamma_matrix());
  write_vec("b", t.b());
  if (t.has_embedded()) write_vec("bhat", t.bhat());
  if (const auto& dc = t.dense()) {
    write_vec("c", dc->c);
    write_vec("d", dc->d);
    write_vec("e", dc->e);
    if (!dc->f.empty()) write_vec("f", dc->f);
  }
}

inline void save_tableau(const RowTableau& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_tableau(t, out);
}

}  // namespace rowdae
