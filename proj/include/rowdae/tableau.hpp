#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rowdae/errors.hpp"
#include "rowdae/linalg.hpp"

namespace rowdae {

/// Which stage equations a tableau drives: the classical linearly implicit
/// scheme on M y' = f(t, y), or the half-explicit scheme that treats the
/// differential part explicitly and the algebraic part linearly implicitly.
enum class MethodKind { row, half_explicit };

inline const char* to_string(MethodKind k) {
  return k == MethodKind::row ? "row" : "half_explicit";
}

/// Coefficient sets of the continuous extension
///   b_i(tau) = tau (b_i - c_i) + tau^2 (c_i - d_i) + tau^3 (d_i - e_i)
///            + tau^4 (e_i - f_i) + tau^5 f_i.
/// An empty f means all zeros (quartic interpolant).
struct DenseCoefficients {
  Vector c, d, e, f;
};

/// Raw coefficients as supplied by a user, a built-in, or a file.
struct TableauData {
  std::string name;
  MethodKind kind = MethodKind::row;
  double gamma = 0.0;
  DenseMatrix alpha;         // strictly lower triangular
  DenseMatrix gamma_matrix;  // lower triangular, diagonal == gamma
  Vector b;
  Vector bhat;  // empty when the method has no embedded scheme
  std::optional<DenseCoefficients> dense;
  std::optional<int> order;
  std::optional<int> embedded_order;
};

/// Validated, immutable tableau. beta = alpha + gamma_matrix (with gamma on
/// the diagonal) is always derived here, never taken from input.
class RowTableau {
public:
  explicit RowTableau(TableauData data) : d_(std::move(data)) {
    validate();
    derive();
  }

  const std::string& name() const noexcept { return d_.name; }
  MethodKind kind() const noexcept { return d_.kind; }
  std::size_t stages() const noexcept { return d_.b.size(); }
  double gamma() const noexcept { return d_.gamma; }
  const DenseMatrix& alpha() const noexcept { return d_.alpha; }
  const DenseMatrix& gamma_matrix() const noexcept { return d_.gamma_matrix; }
  const DenseMatrix& beta() const noexcept { return beta_; }
  const Vector& b() const noexcept { return d_.b; }
  const Vector& bhat() const noexcept { return d_.bhat; }
  bool has_embedded() const noexcept { return !d_.bhat.empty(); }
  const std::optional<DenseCoefficients>& dense() const noexcept { return d_.dense; }
  std::optional<int> order() const noexcept { return d_.order; }
  std::optional<int> embedded_order() const noexcept { return d_.embedded_order; }
  const TableauData& data() const noexcept { return d_; }

  /// alpha_i = sum_j alpha_ij (stage time offsets).
  const Vector& alpha_sums() const noexcept { return alpha_sums_; }
  /// gamma_i = gamma + sum_{j<i} gamma_ij.
  const Vector& gamma_sums() const noexcept { return gamma_sums_; }

  /// Same stages, weights replaced. Used to run an embedded scheme as a
  /// stand-alone method.
  RowTableau with_weights(const Vector& weights, std::string new_name) const {
    TableauData copy = d_;
    copy.b = weights;
    copy.name = std::move(new_name);
    copy.order = std::nullopt;
    return RowTableau(std::move(copy));
  }

  /// Continuous-extension weights b_i(tau). Written in the equivalent form
  /// tau b + (tau^2 - tau) c + (tau^3 - tau^2) d + ... so that tau = 1 yields
  /// b exactly and tau = 0 yields zeros exactly.
  Vector dense_weights(double tau) const {
    if (!d_.dense) {
      throw MissingDenseCoefficients("tableau '" + d_.name + "' has no dense output");
    }
    const auto& dc = *d_.dense;
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    const double t4 = t3 * tau;
    const double t5 = t4 * tau;
    Vector w(stages());
    for (std::size_t i = 0; i < stages(); ++i) {
      double v = tau * d_.b[i] + (t2 - tau) * dc.c[i] + (t3 - t2) * dc.d[i] +
                 (t4 - t3) * dc.e[i];
      if (!dc.f.empty()) v += (t5 - t4) * dc.f[i];
      w[i] = v;
    }
    return w;
  }

private:
  void validate() const {
    const std::size_t s = d_.b.size();
    if (s == 0) throw ShapeError("tableau must have at least one stage");
    auto check_square = [s](const DenseMatrix& m, const char* what) {
      if (m.rows() != s || m.cols() != s) {
        throw ShapeError(std::string(what) + " must be " + std::to_string(s) + "x" +
                         std::to_string(s));
      }
    };
    check_square(d_.alpha, "alpha");
    check_square(d_.gamma_matrix, "gammaM");
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i; j < s; ++j) {
        if (d_.alpha(i, j) != 0.0) {
          throw ShapeError("alpha(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ") must be zero: alpha is strictly lower triangular");
        }
        if (j > i && d_.gamma_matrix(i, j) != 0.0) {
          throw ShapeError("gammaM(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ") must be zero: gammaM is lower triangular");
        }
      }
      if (d_.gamma_matrix(i, i) != d_.gamma) {
        throw InvariantError("gammaM diagonal entry " + std::to_string(i + 1) +
                             " differs from gamma");
      }
    }
    if (!d_.bhat.empty() && d_.bhat.size() != s) throw ShapeError("bhat must have s entries");
    if (d_.dense) {
      const auto& dc = *d_.dense;
      if (dc.c.size() != s || dc.d.size() != s || dc.e.size() != s ||
          (!dc.f.empty() && dc.f.size() != s)) {
        throw ShapeError("dense-output vectors must have s entries");
      }
    }
    if (!d_.alpha.all_finite() || !d_.gamma_matrix.all_finite() || !all_finite(d_.b) ||
        !all_finite(d_.bhat) || !std::isfinite(d_.gamma)) {
      throw InvariantError("non-finite coefficient");
    }
  }

  void derive() {
    const std::size_t s = stages();
    beta_ = d_.alpha + d_.gamma_matrix;
    alpha_sums_.assign(s, 0.0);
    gamma_sums_.assign(s, d_.gamma);
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        alpha_sums_[i] += d_.alpha(i, j);
        gamma_sums_[i] += d_.gamma_matrix(i, j);
      }
    }
  }

  TableauData d_;
  DenseMatrix beta_;
  Vector alpha_sums_;
  Vector gamma_sums_;
};

inline const DenseMatrix& beta_matrix(const RowTableau& t) { return t.beta(); }

/// W = beta^{-1}. Throws SingularMatrix when gamma == 0.
inline DenseMatrix w_matrix(const RowTableau& t) {
  if (t.gamma() == 0.0) throw SingularMatrix("w_matrix: gamma is zero");
  return invert(t.beta());
}

/// Residuals of the stiffly-accurate identities for the main weights
/// (b_i = beta_{s,i}, b_s = gamma, alpha_s = 1) and, when present, the
/// embedded weights (bhat_i = beta_{s-1,i}, bhat_{s-1} = gamma,
/// alpha_{s-1} = 1, bhat_s = 0). One-stage tableaus pass vacuously.
struct StifflyAccurateCheck {
  bool ok = true;
  bool embedded_ok = true;
  Vector main_residuals;
  Vector embedded_residuals;
};

inline StifflyAccurateCheck check_stiffly_accurate(const RowTableau& t, double tol = 1e-12) {
  StifflyAccurateCheck out;
  const std::size_t s = t.stages();
  if (s < 2) return out;
  const auto& beta = t.beta();
  const auto& a = t.alpha_sums();

  for (std::size_t i = 0; i + 1 < s; ++i) {
    out.main_residuals.push_back(std::abs(t.b()[i] - beta(s - 1, i)));
  }
  out.main_residuals.push_back(std::abs(t.b()[s - 1] - t.gamma()));
  out.main_residuals.push_back(std::abs(a[s - 1] - 1.0));
  for (double r : out.main_residuals) out.ok = out.ok && r <= tol;

  if (t.has_embedded()) {
    const auto& bh = t.bhat();
    for (std::size_t i = 0; i + 2 < s; ++i) {
      out.embedded_residuals.push_back(std::abs(bh[i] - beta(s - 2, i)));
    }
    out.embedded_residuals.push_back(std::abs(bh[s - 2] - t.gamma()));
    out.embedded_residuals.push_back(std::abs(bh[s - 1]));
    out.embedded_residuals.push_back(std::abs(a[s - 2] - 1.0));
    for (double r : out.embedded_residuals) out.embedded_ok = out.embedded_ok && r <= tol;
  }
  return out;
}

namespace detail {

inline DenseMatrix from_rows(const std::vector<Vector>& rows) {
  DenseMatrix m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace detail

/// Twelve-stage half-explicit method of order 5(4) whose explicit part is
/// Tsit5, stiffly accurate, with a quartic continuous extension.
inline RowTableau tsit5da() {
  TableauData d;
  d.name = "tsit5da";
  d.kind = MethodKind::half_explicit;
  d.gamma = 0.15;
  d.order = 5;
  d.embedded_order = 4;
  // clang-format off
  d.alpha = detail::from_rows({
      {},
      {0.3},
      {0.4},
      {0.161},
      {-0.008480655492356989, 0.0, 0.0, 0.335480655492357},
      {2.8971530571054935, 0.0, 0.0, -6.359448489975075, 4.3622954328695815},
      {5.325864828439257, 0.0, 0.0, -11.748883564062828, 7.4955393428898365,
       -0.09249506636175525},
      {5.86145544294642, 0.0, 0.0, -12.92096931784711, 8.159367898576159,
       -0.071584973281401, -0.028269050394068383},
      {0.09646076681806523, 0.0, 0.0, 0.01, 0.4798896504144996, 1.379008574103742,
       -3.290069515436081, 2.324710524099774},
      {0.09468075576583945, 0.0, 0.0, 0.009183565540343254, 0.4877705284247616,
       1.234297566930479, -2.7077123499835256, 1.866628418170587, 0.015151515151515152},
      {0.09646076681806523, 0.0, 0.0, 0.01, 0.4798896504144996, 1.379008574103742,
       -3.290069515436081, 2.324710524099774, 0.0, 0.0},
      {0.09468075576583945, 0.0, 0.0, 0.009183565540343254, 0.4877705284247616,
       1.234297566930479, -2.7077123499835256, 1.866628418170587, -0.13484848484848483,
       0.0, 0.15},
  });
  d.gamma_matrix = detail::from_rows({
      {0.15},
      {0.5470689774431368, 0.15},
      {-0.0723537422175421, 0.0666666666666667, 0.15},
      {-0.11997574346406034, -0.20497635844374418, 0.1257585188328081, 0.15},
      {0.3751214208728726, -0.6896518858336065, 0.355777003175544, 0.09308620463102296,
       0.15},
      {-2.339423457351162, -1.8924202822866893, 1.3476713525236836, 7.143916166630147,
       -3.8352059902547007, 0.15},
      {-4.632327787862374, -0.9275563213580595, 1.3114822266754764, 12.288465257549579,
       -7.550172308571812, 0.11237010207373185, 0.15},
      {-5.308384000531637, -1.235796359903477, 1.4327893840055572, 13.611173348816065,
       -8.203424318957262, 0.23478742833475824, -0.06966253474809248, 0.15},
      {0.6035096617978578, 3.7030920005107406, 9.236101686975612, 1.1223090015867678,
       -8.707588403514192, -10.01583191268519, 3.226138565592647, 3.563871912389068, 0.15},
      {0.5358920454864625, 0.5149989566328188, -2.906166595272873, 0.28758667283221606,
       0.4409793917839428, -1.2462207699816854, 2.8597299754852776, -1.7759657086671305,
       0.7624212212647992, 0.15},
      {-0.0017800110522257773, 0.0, 0.0, -0.0008164344596567463, 0.007880878010261994,
       -0.1447110071732629, 0.5823571654525552, -0.45808210592918686,
       -0.13484848484848483, 0.0, 0.15},
      {0.0017800110522257773, 0.0, 0.0, 0.0008164344596567463, -0.007880878010261994,
       0.1447110071732629, -0.5823571654525552, 0.45808210592918686,
       0.13484848484848483, -0.15, -0.15, 0.15},
  });
  d.b = {0.09646076681806523, 0.0, 0.0, 0.01, 0.4798896504144996, 1.379008574103742,
         -3.290069515436081, 2.324710524099774, 0.0, -0.15, 0.0, 0.15};
  d.bhat = {0.09468075576583945, 0.0, 0.0, 0.009183565540343254, 0.4877705284247616,
            1.234297566930479, -2.7077123499835256, 1.866628418170587,
            -0.13484848484848483, 0.0, 0.15, 0.0};
  DenseCoefficients dc;
  dc.c = {-0.8556749116393667, 0.1165263061110306, -0.038120922841221455,
          -0.15789728749504028, 0.54499490500098, 1.0853086321284309,
          -2.2958098031370873, 1.566895939698076, 8.34587614295097,
          -0.4162190065087707, -8.314552638841711, 0.41867264457370923};
  dc.d = {5.79723517059224, 9.361429135834928, -3.062538663421373, -13.568052287784441,
          1.3736819148585004, -2.344366172070166, 9.053170825304539, -7.042985092806263,
          -147.11116130708155, -1.0678265669046618, 147.34646739130434, 1.264945652173913};
  dc.e = {-7.347103241623678, -14.93483561943059, 4.885847112946526, 21.54749924818453,
          -5.148057565540175, 8.136928580553082, -27.90674208255712, 21.23889269084667,
          292.95889431249236, -0.20306256630643107, -293.11684782608694,
          -0.11141304347826086};
  // clang-format on
  d.dense = std::move(dc);
  return RowTableau(std::move(d));
}

/// One-stage linearly implicit Euler: R(z) = 1/(1 - z), order 1, no embedded
/// scheme.
inline RowTableau linearly_implicit_euler() {
  TableauData d;
  d.name = "li-euler";
  d.kind = MethodKind::row;
  d.gamma = 1.0;
  d.alpha = DenseMatrix(1, 1);
  d.gamma_matrix = DenseMatrix{{1.0}};
  d.b = {1.0};
  d.order = 1;
  return RowTableau(std::move(d));
}

/// Two-stage L-stable ROW of order 2 with gamma = 1 - 1/sqrt(2). The
/// embedded weights (1, 0) are the linearly implicit Euler step contained in
/// the first stage.
inline RowTableau ros2() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  TableauData d;
  d.name = "ros2";
  d.kind = MethodKind::row;
  d.gamma = g;
  d.alpha = DenseMatrix{{0.0, 0.0}, {1.0, 0.0}};
  d.gamma_matrix = DenseMatrix{{g, 0.0}, {-2.0 * g, g}};
  d.b = {0.5, 0.5};
  d.bhat = {1.0, 0.0};
  d.order = 2;
  d.embedded_order = 1;
  return RowTableau(std::move(d));
}

}  // namespace rowdae
