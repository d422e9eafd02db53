#pragma once

// Fixed-step and adaptive drivers plus dense output over a stored trajectory.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rowdae/conditions.hpp"
#include "rowdae/errors.hpp"
#include "rowdae/stepper.hpp"
#include "rowdae/tableau.hpp"

namespace rowdae {

/// One accepted step with everything needed for the continuous extension.
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  Vector y0;
  Vector y1;
  std::vector<Vector> stages;
  std::shared_ptr<const RowTableau> tableau;
};

/// y(t0 + tau h) = y0 + sum_i b_i(tau) stage_i.
inline Vector interpolate(const DenseSegment& seg, double tau) {
  if (!seg.tableau) throw MissingDenseCoefficients("segment has no tableau");
  const auto w = seg.tableau->dense_weights(tau);
  return detail::weighted_sum(seg.y0, w, seg.stages);
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<DenseSegment> segments;  // empty unless dense output was kept
  IntegrationStats stats;

  /// Continuous solution at time t inside the integration interval.
  Vector at(double t) const {
    if (segments.empty()) throw MissingDenseCoefficients("trajectory kept no dense segments");
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const DenseSegment& s) { return v < s.t0; });
    const auto& seg = it == segments.begin() ? segments.front() : *std::prev(it);
    const double tau = std::clamp((t - seg.t0) / seg.h, 0.0, 1.0);
    return interpolate(seg, tau);
  }
};

enum class ErrorNorm { rms, max };

/// Weighted norm of y1 - yhat with per-component scale
/// atol + rtol max(|y0_i|, |y1_i|). RMS by default.
inline double error_norm(std::span<const double> y0, std::span<const double> y1,
                         std::span<const double> yhat, double rtol, double atol,
                         ErrorNorm kind = ErrorNorm::rms) {
  if (y1.empty()) return 0.0;
  double sum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < y1.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = (y1[i] - yhat[i]) / sc;
    sum += e * e;
    worst = std::max(worst, std::abs(e));
  }
  if (kind == ErrorNorm::max) return worst;
  return std::sqrt(sum / static_cast<double>(y1.size()));
}

namespace detail {

inline void push_step(Trajectory& traj, StepOutcome&& out, double t1, bool keep_states,
                      bool keep_dense, const std::shared_ptr<const RowTableau>& tab) {
  if (keep_states) {
    traj.times.push_back(t1);
    traj.states.push_back(out.y1);
  }
  if (keep_dense) {
    traj.segments.push_back(
        {out.t0, out.h, std::move(out.y0), std::move(out.y1), std::move(out.stages), tab});
  }
}

inline std::shared_ptr<const RowTableau> share(const RowTableau& t) {
  return std::make_shared<const RowTableau>(t);
}

}  // namespace detail

struct FixedOptions {
  bool keep_states = true;
  bool keep_dense = true;
};

/// Constant step size h from the problem's t0 to t_end. (t_end - t0)/h must
/// be an integer to within half an ulp; the k-th step ends at t0 + k h.
template <class Problem>
Trajectory integrate_fixed(const Problem& p, const RowTableau& t, double h, double t_end,
                           FixedOptions opts = {}) {
  const double t0 = initial_time(p);
  if (!(h > 0.0)) throw Error("integrate_fixed: step size must be positive");
  const double ratio = (t_end - t0) / h;
  const double n_real = std::round(ratio);
  const double half_ulp = 0.5 * (std::nextafter(n_real, HUGE_VAL) - n_real);
  if (n_real < 1.0 || std::abs(ratio - n_real) > half_ulp) {
    throw Error("integrate_fixed: interval length is not a multiple of h");
  }
  const auto n = static_cast<std::size_t>(n_real);
  const auto tab = detail::share(t);

  Trajectory traj;
  Vector y = initial_state(p);
  if (opts.keep_states) {
    traj.times.push_back(t0);
    traj.states.push_back(y);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = t0 + static_cast<double>(k) * h;
    auto out = step(p, t, tk, y, h, &traj.stats);
    ++traj.stats.nsucc;
    y = out.y1;
    const double t1 = k + 1 == n ? t_end : t0 + static_cast<double>(k + 1) * h;
    detail::push_step(traj, std::move(out), t1, opts.keep_states, opts.keep_dense, tab);
  }
  if (!opts.keep_states) {
    traj.times.push_back(t_end);
    traj.states.push_back(std::move(y));
  }
  return traj;
}

struct AdaptiveOptions {
  double rtol = 1e-6;
  double atol = 1e-6;
  bool keep_states = true;
  bool keep_dense = true;
  ErrorNorm norm = ErrorNorm::rms;
  std::size_t max_steps = 10'000'000;  // attempted steps
  /// Called after every accepted step with (t1, state).
  std::function<void(double, std::span<const double>)> observer;
};

class MaxStepsExceeded : public Error {
public:
  using Error::Error;
};

inline constexpr double kSafetyFactor = 0.9;
inline constexpr double kMinStepFactor = 0.2;
inline constexpr double kMaxStepFactor = 5.0;
inline constexpr double kUnderflowFraction = 1e-14;

/// Order used by the step-size controller: the tableau's declared embedded
/// order, else the attained order of the embedded weights.
inline int controller_order(const RowTableau& t) {
  if (!t.has_embedded()) {
    throw Error("tableau '" + t.name() + "' has no embedded weights for error control");
  }
  if (t.embedded_order()) return *t.embedded_order();
  const auto family =
      t.kind() == MethodKind::row ? ConditionFamily::row : ConditionFamily::half_explicit;
  return std::max(1, condition_residuals(family, t, t.bhat()).attained_order());
}

/// Adaptive integration with embedded error estimation. Rejected steps and
/// failed steps (singular iteration matrix, non-finite values) count as nfail.
template <class Problem>
Trajectory integrate_adaptive(const Problem& p, const RowTableau& t, double t_end,
                              const AdaptiveOptions& opts = {}) {
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) {
    throw Error("integrate_adaptive: tolerances must be positive");
  }
  const double t0 = initial_time(p);
  const double span = t_end - t0;
  if (!(span > 0.0)) throw Error("integrate_adaptive: t_end must exceed t0");
  const int q = controller_order(t);
  const double expo = 1.0 / (q + 1);
  const double h_min = kUnderflowFraction * span;
  const auto tab = detail::share(t);

  Trajectory traj;
  Vector y = initial_state(p);
  if (opts.keep_states) {
    traj.times.push_back(t0);
    traj.states.push_back(y);
  }
  double tc = t0;
  double h = std::min(span / 10.0, std::pow(opts.rtol, expo));
  std::size_t attempts = 0;

  while (tc < t_end) {
    if (++attempts > opts.max_steps) {
      throw MaxStepsExceeded("integrate_adaptive: more than " + std::to_string(opts.max_steps) +
                             " attempted steps");
    }
    bool last = false;
    if (tc + h >= t_end || t_end - (tc + h) < 1e-10 * span) {
      h = t_end - tc;
      last = true;
    }
    if (h < h_min) {
      throw StepUnderflow("integrate_adaptive: step size " + std::to_string(h) +
                          " underflow at t = " + std::to_string(tc));
    }

    StepOutcome out;
    try {
      out = step(p, t, tc, y, h, &traj.stats);
    } catch (const SingularMatrix&) {
      ++traj.stats.nfail;
      h *= 0.5;
      continue;
    } catch (const NonFiniteState&) {
      ++traj.stats.nfail;
      h *= 0.5;
      continue;
    }
    const double err = error_norm(y, out.y1, out.yhat, opts.rtol, opts.atol, opts.norm);
    if (!std::isfinite(err)) {
      ++traj.stats.nfail;
      h *= 0.5;
      continue;
    }
    const double factor =
        err == 0.0 ? kMaxStepFactor
                   : std::min(kMaxStepFactor,
                              std::max(kMinStepFactor, kSafetyFactor * std::pow(err, -expo)));
    out.error = err;
    if (err <= 1.0) {
      ++traj.stats.nsucc;
      const double t1 = last ? t_end : tc + h;
      y = out.y1;
      if (opts.observer) opts.observer(t1, y);
      detail::push_step(traj, std::move(out), t1, opts.keep_states, opts.keep_dense, tab);
      tc = t1;
    } else {
      ++traj.stats.nfail;
    }
    h *= factor;
  }
  if (!opts.keep_states) {
    traj.times.push_back(tc);
    traj.states.push_back(std::move(y));
  }
  return traj;
}

}  // namespace rowdae
