#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <type_traits>
#include <vector>

#include "tshobam/error.hpp"

namespace tshobam {

enum class ScaleKind { Continuum, UniformGrid, PeriodicUnion };

/// A sampled point of a time scale. `graininess` is forward_jump(t) - t.
struct GridPoint {
  double t = 0.0;
  bool is_right_scattered = false;
  double graininess = 0.0;
};

/// Computable time scale: the real line, a uniform grid, or the periodic union
/// of closed intervals [t0 + k(a+g), t0 + k(a+g) + a].
///
/// `resolution` is the sampling step used inside continuum pieces for
/// quadrature and stepping. Dense samples sit on the lattice
/// (segment start) + j * resolution so that windows sharing a segment share
/// their interior nodes.
class TimeScale {
 public:
  static TimeScale continuum(double resolution = 1e-3);
  static TimeScale uniform_grid(double step, double anchor = 0.0);
  /// Degenerate inputs normalise: on_length == 0 gives a grid of step
  /// gap_length, gap_length == 0 gives the continuum.
  static TimeScale periodic_union(double on_length, double gap_length, double anchor,
                                  double resolution = 1e-3);

  ScaleKind kind() const noexcept { return kind_; }
  double step() const noexcept { return step_; }
  double on_length() const noexcept { return on_; }
  double gap_length() const noexcept { return gap_; }
  double anchor() const noexcept { return anchor_; }
  double period() const noexcept { return on_ + gap_; }
  double resolution() const noexcept { return resolution_; }

  TimeScale with_resolution(double resolution) const;

  bool contains(double t) const;
  /// sup of the graininess over the whole scale: 0, h or g.
  double sup_graininess() const noexcept;

  /// Absolute tolerance used for membership and node matching near t.
  static double tolerance(double t) noexcept { return 1e-9 * std::max(1.0, std::abs(t)); }

 private:
  TimeScale() = default;

  ScaleKind kind_ = ScaleKind::Continuum;
  double step_ = 0.0;
  double on_ = 0.0;
  double gap_ = 0.0;
  double anchor_ = 0.0;
  double resolution_ = 1e-3;
};

double forward_jump(const TimeScale& ts, double t);
double graininess(const TimeScale& ts, double t);
/// sup{s in T : s <= t}
double project_backward(const TimeScale& ts, double t);
/// inf{s in T : s >= t}; the a* convention for integration limits.
double project_forward(const TimeScale& ts, double t);

/// Points of T in [from, to], increasing. Dense pieces are sampled at the
/// scale's resolution; every right-scattered point appears once with its
/// true graininess. The last point's flag describes T, not the window.
std::vector<GridPoint> enumerate_grid(const TimeScale& ts, double from, double to);

namespace detail {

template <class R>
R zero_like(const R& sample) {
  if constexpr (std::is_arithmetic_v<R>) {
    return R{0};
  } else {
    return R(sample * 0.0);
  }
}

}  // namespace detail

/// Delta integral over [a, b]. Endpoints are lifted with project_forward;
/// right-scattered points contribute f(t) * graininess(t), dense pieces use
/// the trapezoid rule at the scale resolution. The cell that closes a dense
/// piece uses its midpoint instead, so f is never sampled at the jump point
/// from the left. f may return a scalar or an Eigen vector.
template <class F>
auto delta_integral(const TimeScale& ts, F&& f, double a, double b) {
  using R = std::decay_t<std::invoke_result_t<F&, double>>;
  if (b < a) {
    throw Error(ErrorKind::EmptyWindow, "delta_integral requires a <= b");
  }
  const double lo = project_forward(ts, a);
  const double hi = project_forward(ts, b);
  if (!(lo < hi - TimeScale::tolerance(hi))) {
    R probe = f(lo);
    return detail::zero_like(probe);
  }
  const auto pts = enumerate_grid(ts, lo, hi);
  std::vector<R> vals;
  vals.reserve(pts.size());
  for (const auto& p : pts) vals.push_back(f(p.t));
  R acc = detail::zero_like(vals.front());
  for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
    if (pts[q].is_right_scattered) {
      acc += vals[q] * pts[q].graininess;
    } else if (pts[q + 1].is_right_scattered) {
      const double width = pts[q + 1].t - pts[q].t;
      acc += f(pts[q].t + 0.5 * width) * width;
    } else {
      const double width = pts[q + 1].t - pts[q].t;
      acc += (vals[q] + vals[q + 1]) * (0.5 * width);
    }
  }
  return acc;
}

/// Delta derivative at t in T: difference quotient across a jump, otherwise a
/// central difference with step = resolution (one-sided at segment edges).
double delta_derivative(const TimeScale& ts, const std::function<double(double)>& f, double t);

enum class Regressivity { Regressive, PositivelyRegressive, Neither };

/// Classifies p on [a, b] by scanning 1 + graininess * p over enumerate_grid.
Regressivity is_regressive(const TimeScale& ts, const std::function<double(double)>& p, double a,
                           double b);

/// Time-scale exponential e_p(t, s) for s, t in T.
double ts_exp(const TimeScale& ts, const std::function<double(double)>& p, double t, double s);

/// Values e_p(t_k, t_0) for every point of `grid` (which must come from
/// enumerate_grid on `ts`), computed in one forward pass.
std::vector<double> ts_exp_along(const TimeScale& ts, const std::function<double(double)>& p,
                                 const std::vector<GridPoint>& grid);

/// t -> -p(t) / (1 + graininess(t) p(t)); throws NonRegressive when evaluated
/// where the denominator vanishes.
std::function<double(double)> circle_minus(const TimeScale& ts, std::function<double(double)> p);

}  // namespace tshobam
