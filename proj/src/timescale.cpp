#include "tshobam/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace tshobam {

namespace {

std::string fmt(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

[[noreturn]] void not_in_scale(double t) {
  throw Error(ErrorKind::NotInScale, "t = " + fmt(t) + " is not a point of the time scale");
}

// Segment of a periodic union holding (or preceding) t.
struct Segment {
  std::int64_t k;
  double start;
  double end;
  double local;  // t - start
};

Segment segment_of(const TimeScale& ts, double t) {
  const double P = ts.period();
  const double tol = TimeScale::tolerance(t);
  const auto k = static_cast<std::int64_t>(std::floor((t - ts.anchor() + tol) / P));
  const double start = ts.anchor() + static_cast<double>(k) * P;
  return {k, start, start + ts.on_length(), t - start};
}

struct GridIndex {
  double q;        // (t - anchor) / h
  std::int64_t k;  // nearest node index
  bool on_node;
};

GridIndex grid_index(const TimeScale& ts, double t) {
  const double q = (t - ts.anchor()) / ts.step();
  const auto k = static_cast<std::int64_t>(std::llround(q));
  const double node = ts.anchor() + static_cast<double>(k) * ts.step();
  return {q, k, std::abs(t - node) <= TimeScale::tolerance(t)};
}

double grid_node(const TimeScale& ts, std::int64_t k) {
  return ts.anchor() + static_cast<double>(k) * ts.step();
}

double snap_tol(double t, double res) { return std::min(TimeScale::tolerance(t), 1e-6 * res); }

// Dense samples lo, base + j*res (strictly inside), hi.
void append_dense(std::vector<GridPoint>& out, double lo, double hi, double base, double res) {
  out.push_back({lo, false, 0.0});
  if (hi <= lo + snap_tol(hi, res)) return;
  auto j = static_cast<std::int64_t>(std::ceil((lo - base) / res));
  for (;; ++j) {
    const double t = base + static_cast<double>(j) * res;
    if (t <= lo + snap_tol(t, res)) continue;
    if (t >= hi - snap_tol(t, res)) break;
    out.push_back({t, false, 0.0});
  }
  out.push_back({hi, false, 0.0});
}

}  // namespace

TimeScale TimeScale::continuum(double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorKind::ConfigError, "resolution must be positive");
  TimeScale ts;
  ts.kind_ = ScaleKind::Continuum;
  ts.resolution_ = resolution;
  return ts;
}

TimeScale TimeScale::uniform_grid(double step, double anchor) {
  if (!(step > 0.0)) throw Error(ErrorKind::ConfigError, "grid step must be positive");
  TimeScale ts;
  ts.kind_ = ScaleKind::UniformGrid;
  ts.step_ = step;
  ts.anchor_ = anchor;
  ts.resolution_ = step;
  return ts;
}

TimeScale TimeScale::periodic_union(double on_length, double gap_length, double anchor,
                                    double resolution) {
  if (on_length < 0.0 || gap_length < 0.0) {
    throw Error(ErrorKind::ConfigError, "periodic union lengths must be non-negative");
  }
  if (on_length == 0.0 && gap_length == 0.0) {
    throw Error(ErrorKind::ConfigError, "periodic union needs a positive period");
  }
  if (on_length == 0.0) return uniform_grid(gap_length, anchor);
  if (gap_length == 0.0) return continuum(resolution);
  if (!(resolution > 0.0)) throw Error(ErrorKind::ConfigError, "resolution must be positive");
  TimeScale ts;
  ts.kind_ = ScaleKind::PeriodicUnion;
  ts.on_ = on_length;
  ts.gap_ = gap_length;
  ts.anchor_ = anchor;
  ts.resolution_ = resolution;
  return ts;
}

TimeScale TimeScale::with_resolution(double resolution) const {
  if (!(resolution > 0.0)) throw Error(ErrorKind::ConfigError, "resolution must be positive");
  TimeScale ts = *this;
  if (kind_ != ScaleKind::UniformGrid) ts.resolution_ = resolution;
  return ts;
}

bool TimeScale::contains(double t) const {
  if (!std::isfinite(t)) return false;
  switch (kind_) {
    case ScaleKind::Continuum:
      return true;
    case ScaleKind::UniformGrid:
      return grid_index(*this, t).on_node;
    case ScaleKind::PeriodicUnion:
      return segment_of(*this, t).local <= on_ + tolerance(t);
  }
  return false;
}

double TimeScale::sup_graininess() const noexcept {
  switch (kind_) {
    case ScaleKind::Continuum: return 0.0;
    case ScaleKind::UniformGrid: return step_;
    case ScaleKind::PeriodicUnion: return gap_;
  }
  return 0.0;
}

double forward_jump(const TimeScale& ts, double t) {
  if (!ts.contains(t)) not_in_scale(t);
  switch (ts.kind()) {
    case ScaleKind::Continuum:
      return t;
    case ScaleKind::UniformGrid:
      return grid_node(ts, grid_index(ts, t).k + 1);
    case ScaleKind::PeriodicUnion: {
      const Segment s = segment_of(ts, t);
      if (std::abs(s.local - ts.on_length()) <= TimeScale::tolerance(t)) {
        return s.start + ts.period();
      }
      return t;
    }
  }
  return t;
}

double graininess(const TimeScale& ts, double t) {
  if (!ts.contains(t)) not_in_scale(t);
  switch (ts.kind()) {
    case ScaleKind::Continuum:
      return 0.0;
    case ScaleKind::UniformGrid:
      return ts.step();
    case ScaleKind::PeriodicUnion: {
      const Segment s = segment_of(ts, t);
      return std::abs(s.local - ts.on_length()) <= TimeScale::tolerance(t) ? ts.gap_length() : 0.0;
    }
  }
  return 0.0;
}

double project_backward(const TimeScale& ts, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::EmptyWindow, "non-finite time");
  switch (ts.kind()) {
    case ScaleKind::Continuum:
      return t;
    case ScaleKind::UniformGrid: {
      const GridIndex g = grid_index(ts, t);
      if (g.on_node) return grid_node(ts, g.k);
      return grid_node(ts, static_cast<std::int64_t>(std::floor(g.q)));
    }
    case ScaleKind::PeriodicUnion: {
      const Segment s = segment_of(ts, t);
      if (s.local <= ts.on_length() + TimeScale::tolerance(t)) return std::min(t, s.end);
      return s.end;
    }
  }
  return t;
}

double project_forward(const TimeScale& ts, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::EmptyWindow, "non-finite time");
  switch (ts.kind()) {
    case ScaleKind::Continuum:
      return t;
    case ScaleKind::UniformGrid: {
      const GridIndex g = grid_index(ts, t);
      if (g.on_node) return grid_node(ts, g.k);
      return grid_node(ts, static_cast<std::int64_t>(std::ceil(g.q)));
    }
    case ScaleKind::PeriodicUnion: {
      const Segment s = segment_of(ts, t);
      if (s.local <= ts.on_length() + TimeScale::tolerance(t)) return std::max(t, s.start);
      return s.start + ts.period();
    }
  }
  return t;
}

std::vector<GridPoint> enumerate_grid(const TimeScale& ts, double from, double to) {
  if (!(from <= to) || !std::isfinite(from) || !std::isfinite(to)) {
    throw Error(ErrorKind::EmptyWindow, "window [" + fmt(from) + ", " + fmt(to) + "] is empty");
  }
  std::vector<GridPoint> out;
  const double res = ts.resolution();
  switch (ts.kind()) {
    case ScaleKind::Continuum: {
      out.reserve(static_cast<std::size_t>((to - from) / res) + 2);
      append_dense(out, from, to, 0.0, res);
      break;
    }
    case ScaleKind::UniformGrid: {
      const double h = ts.step();
      const double eps = 1e-9 * std::max(1.0, std::max(std::abs(from), std::abs(to))) / h;
      const auto lo = static_cast<std::int64_t>(std::ceil((from - ts.anchor()) / h - eps));
      const auto hi = static_cast<std::int64_t>(std::floor((to - ts.anchor()) / h + eps));
      if (lo <= hi) out.reserve(static_cast<std::size_t>(hi - lo + 1));
      for (std::int64_t k = lo; k <= hi; ++k) out.push_back({grid_node(ts, k), true, h});
      break;
    }
    case ScaleKind::PeriodicUnion: {
      const Segment first = segment_of(ts, from);
      const Segment last = segment_of(ts, to);
      for (std::int64_t k = first.k; k <= last.k; ++k) {
        const double start = ts.anchor() + static_cast<double>(k) * ts.period();
        const double end = start + ts.on_length();
        const double lo = std::max(from, start);
        const bool reaches_end = end <= to + TimeScale::tolerance(end);
        const double hi = reaches_end ? end : to;
        if (lo > hi + TimeScale::tolerance(hi)) continue;
        const std::size_t mark = out.size();
        if (lo >= hi - snap_tol(hi, res)) {
          out.push_back({reaches_end ? end : lo, false, 0.0});
        } else {
          append_dense(out, lo, hi, start, res);
        }
        if (reaches_end && out.size() > mark) {
          out.back().t = end;
          out.back().is_right_scattered = true;
          out.back().graininess = ts.gap_length();
        }
      }
      break;
    }
  }
  if (out.empty()) {
    throw Error(ErrorKind::EmptyWindow,
                "no point of the time scale in [" + fmt(from) + ", " + fmt(to) + "]");
  }
  return out;
}

double delta_derivative(const TimeScale& ts, const std::function<double(double)>& f, double t) {
  const double mu = graininess(ts, t);
  if (mu > 0.0) return (f(t + mu) - f(t)) / mu;
  const double h = ts.resolution();
  if (ts.kind() == ScaleKind::Continuum) return (f(t + h) - f(t - h)) / (2.0 * h);
  const Segment s = segment_of(ts, t);
  const double tol = TimeScale::tolerance(t);
  const bool left = t - h >= s.start - tol;
  const bool right = t + h <= s.end + tol;
  if (left && right) return (f(t + h) - f(t - h)) / (2.0 * h);
  if (right) return (f(t + h) - f(t)) / h;
  if (left) return (f(t) - f(t - h)) / h;
  // Segment shorter than the resolution: use its longer side.
  const double fwd = s.end - t;
  const double bwd = t - s.start;
  if (fwd >= bwd) return (f(s.end) - f(t)) / fwd;
  return (f(t) - f(s.start)) / bwd;
}

Regressivity is_regressive(const TimeScale& ts, const std::function<double(double)>& p, double a,
                           double b) {
  bool positive = true;
  for (const auto& g : enumerate_grid(ts, a, b)) {
    const double v = 1.0 + g.graininess * p(g.t);
    if (v == 0.0) return Regressivity::Neither;
    if (!(v > 0.0)) positive = false;
  }
  return positive ? Regressivity::PositivelyRegressive : Regressivity::Regressive;
}

double ts_exp(const TimeScale& ts, const std::function<double(double)>& p, double t, double s) {
  if (!ts.contains(t)) not_in_scale(t);
  if (!ts.contains(s)) not_in_scale(s);
  if (t == s) return 1.0;
  if (t < s) return 1.0 / ts_exp(ts, p, s, t);
  const auto grid = enumerate_grid(ts, s, t);
  return ts_exp_along(ts, p, grid).back();
}

std::vector<double> ts_exp_along(const TimeScale& ts, const std::function<double(double)>& p,
                                 const std::vector<GridPoint>& grid) {
  (void)ts;
  std::vector<double> out(grid.size(), 1.0);
  if (grid.empty()) return out;
  double prod = 1.0;
  double log_part = 0.0;
  double p_prev = p(grid.front().t);
  for (std::size_t q = 0; q + 1 < grid.size(); ++q) {
    const double p_next = p(grid[q + 1].t);
    if (grid[q].is_right_scattered) {
      const double factor = 1.0 + grid[q].graininess * p_prev;
      if (factor == 0.0) {
        throw Error(ErrorKind::NonRegressive, "1 + graininess * p vanishes at t = " + fmt(grid[q].t));
      }
      prod *= factor;
    } else if (grid[q + 1].is_right_scattered) {
      const double width = grid[q + 1].t - grid[q].t;
      log_part += width * p(grid[q].t + 0.5 * width);
    } else {
      log_part += 0.5 * (grid[q + 1].t - grid[q].t) * (p_prev + p_next);
    }
    out[q + 1] = prod * std::exp(log_part);
    p_prev = p_next;
  }
  return out;
}

std::function<double(double)> circle_minus(const TimeScale& ts, std::function<double(double)> p) {
  return [ts, p = std::move(p)](double t) {
    const double pt = p(t);
    const double denom = 1.0 + graininess(ts, t) * pt;
    if (denom == 0.0) {
      throw Error(ErrorKind::NonRegressive, "1 + graininess * p vanishes at t = " + fmt(t));
    }
    return -pt / denom;
  };
}

}  // namespace tshobam
