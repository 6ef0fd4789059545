#include "tshobam/simulate.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tshobam/model.hpp"

namespace tshobam {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

constexpr double kRunaway = 1e12;

std::string num(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string fmt(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

// Uniform on [0, 1) from the top 53 bits; identical on every platform.
double uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

void check_finite(const VectorXd& v, double t) {
  for (Index q = 0; q < v.size(); ++q) {
    if (!std::isfinite(v(q)) || std::abs(v(q)) > kRunaway) {
      throw Error(ErrorKind::NonFinite, "state left the finite range at t = " + fmt(t));
    }
  }
}

void fill_component(const TimeScale& ts, const Expr& phi, const Expr* given_delta,
                    const std::vector<GridPoint>& grid,
                    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> state,
                    Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> delta) {
  const auto N = static_cast<Index>(grid.size());
  state(0) = phi(grid.front().t);
  for (Index k = 0; k < N; ++k) {
    const GridPoint& g = grid[static_cast<std::size_t>(k)];
    if (given_delta != nullptr) {
      state(k) = phi(g.t);
      delta(k) = (*given_delta)(g.t);
      continue;
    }
    if (g.is_right_scattered) {
      const double mu = g.graininess;
      delta(k) = (phi(g.t + mu) - state(k)) / mu;
      if (k + 1 < N) state(k + 1) = state(k) + mu * delta(k);
    } else {
      delta(k) = delta_derivative(ts, [&phi](double s) { return phi(s); }, g.t);
      if (k + 1 < N) state(k + 1) = phi(grid[static_cast<std::size_t>(k + 1)].t);
    }
  }
}

}  // namespace

Trajectory initial_trajectory(const TimeScale& ts, const InitialHistory& init, double theta) {
  const std::size_t n = init.x.size();
  const std::size_t m = init.y.size();
  if (!init.derive_delta && (init.dx.size() != n || init.dy.size() != m)) {
    throw Error(ErrorKind::ConfigError, "initial delta channels are required without derive_delta");
  }
  const double hi = project_backward(ts, 0.0);
  const double lo = std::min(project_backward(ts, -theta), hi);
  Trajectory tr = Trajectory::on_grid(enumerate_grid(ts, lo, hi), n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Index>(i);
    fill_component(ts, init.x[i], init.derive_delta ? nullptr : &init.dx[i], tr.grid, tr.x.row(row),
                   tr.dx.row(row));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = static_cast<Index>(j);
    fill_component(ts, init.y[j], init.derive_delta ? nullptr : &init.dy[j], tr.grid, tr.y.row(row),
                   tr.dy.row(row));
  }
  return tr;
}

InitialHistory constant_history(const VectorXd& x, const VectorXd& y) {
  InitialHistory h;
  for (Index i = 0; i < x.size(); ++i) {
    h.x.push_back(Expr::constant(x(i)));
    h.dx.push_back(Expr::constant(0.0));
  }
  for (Index j = 0; j < y.size(); ++j) {
    h.y.push_back(Expr::constant(y(j)));
    h.dy.push_back(Expr::constant(0.0));
  }
  h.derive_delta = false;
  return h;
}

InitialHistory random_history(std::size_t n, std::size_t m, std::uint64_t seed, double amplitude) {
  std::mt19937_64 gen(seed);
  auto draw = [&] {
    const double a = amplitude * (2.0 * uniform(gen) - 1.0);
    const double b = 0.5 * amplitude * uniform(gen);
    const double w = 0.5 + 1.5 * uniform(gen);
    const double phase = 2.0 * std::numbers::pi * uniform(gen);
    return parse(num(a) + " + " + num(b) + "*sin(" + num(w) + "*t + " + num(phase) + ")");
  };
  InitialHistory h;
  for (std::size_t i = 0; i < n; ++i) h.x.push_back(draw());
  for (std::size_t j = 0; j < m; ++j) h.y.push_back(draw());
  h.derive_delta = true;
  return h;
}

InitialHistory perturbed_history(const InitialHistory& base, std::uint64_t seed, double amplitude) {
  std::mt19937_64 gen(seed);
  auto bump = [&](const Expr& e) {
    const double w = 0.5 + 1.5 * uniform(gen);
    const double sign = uniform(gen) < 0.5 ? -1.0 : 1.0;
    return parse("(" + to_string(e) + ") + " + num(sign * amplitude) + "*sin(" + num(w) + "*t)");
  };
  InitialHistory h;
  for (const auto& e : base.x) h.x.push_back(bump(e));
  for (const auto& e : base.y) h.y.push_back(bump(e));
  h.derive_delta = true;
  return h;
}

Trajectory simulate(const TimeScale& ts, const NetworkSpec& net, const Trajectory& init,
                    double horizon) {
  if (init.size() == 0) throw Error(ErrorKind::HistoryTooShort, "empty initial history");
  if (init.n() != net.n || init.m() != net.m) {
    throw Error(ErrorKind::ConfigError, "initial history dimensions do not match the network");
  }
  const double start = init.upper_bound();
  if (!(horizon > start)) {
    throw Error(ErrorKind::EmptyWindow, "horizon must lie past the end of the initial history");
  }
  auto grid = enumerate_grid(ts, init.lower_bound(), horizon);
  if (grid.size() < init.size()) throw Error(ErrorKind::GridMismatch, "initial history grid mismatch");
  for (std::size_t k = 0; k < init.size(); ++k) {
    if (std::abs(grid[k].t - init.grid[k].t) > TimeScale::tolerance(grid[k].t)) {
      throw Error(ErrorKind::GridMismatch,
                  "initial history point " + fmt(init.grid[k].t) + " is not on the time-scale grid");
    }
  }
  Trajectory tr = Trajectory::on_grid(grid, net.n, net.m);
  const auto filled = static_cast<Index>(init.size());
  tr.x.leftCols(filled) = init.x;
  tr.y.leftCols(filled) = init.y;
  tr.dx.leftCols(filled) = init.dx;
  tr.dy.leftCols(filled) = init.dy;

  History h(std::move(tr), init.size(), &net.activation);
  const std::size_t N = grid.size();
  CoefficientSnapshot here = CoefficientSnapshot::at(net, grid[init.size() - 1].t);
  for (std::size_t k = init.size() - 1; k + 1 < N; ++k) {
    const GridPoint& g = grid[k];
    const auto col = static_cast<Index>(k);
    const VectorXd x0 = h.trajectory().x.col(col);
    const VectorXd y0 = h.trajectory().y.col(col);
    const LayerVectors k1 = rhs(ts, net, h, here);
    h.set_delta(k, k1.x, k1.y);
    const double t1 = grid[k + 1].t;
    CoefficientSnapshot next = CoefficientSnapshot::at(net, t1);
    if (g.is_right_scattered) {
      const double mu = g.graininess;
      const VectorXd x1 = x0 + mu * k1.x;
      const VectorXd y1 = y0 + mu * k1.y;
      check_finite(x1, t1);
      check_finite(y1, t1);
      h.set_node(k + 1, x1, y1, k1.x, k1.y);
    } else {
      const double step = t1 - g.t;
      const double mid = g.t + 0.5 * step;
      const CoefficientSnapshot half = CoefficientSnapshot::at(net, mid);
      h.set_tail(mid, x0 + 0.5 * step * k1.x, y0 + 0.5 * step * k1.y, k1.x, k1.y);
      const LayerVectors k2 = rhs(ts, net, h, half);
      h.set_tail(mid, x0 + 0.5 * step * k2.x, y0 + 0.5 * step * k2.y, k2.x, k2.y);
      const LayerVectors k3 = rhs(ts, net, h, half);
      h.set_tail(t1, x0 + step * k3.x, y0 + step * k3.y, k3.x, k3.y);
      const LayerVectors k4 = rhs(ts, net, h, next);
      h.clear_tail();
      const VectorXd x1 = x0 + (step / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      const VectorXd y1 = y0 + (step / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
      check_finite(x1, t1);
      check_finite(y1, t1);
      h.set_node(k + 1, x1, y1, k4.x, k4.y);
    }
    here = std::move(next);
  }
  const LayerVectors last = rhs(ts, net, h, here);
  h.set_delta(N - 1, last.x, last.y);
  return h.release();
}

Trajectory sample_function(const TimeScale& ts, const Expr& f, double a, double b) {
  Trajectory tr = Trajectory::on_grid(enumerate_grid(ts, a, b), 1, 0);
  for (std::size_t k = 0; k < tr.size(); ++k) tr.x(0, static_cast<Index>(k)) = f(tr.grid[k].t);
  return tr;
}

namespace {

// Scalar history whose x-channel holds g applied to f at every grid point.
template <class G>
History transformed(const ChannelRef& f, G&& g) {
  if (f.traj == nullptr) throw Error(ErrorKind::EmptyWindow, "no trajectory");
  const Eigen::MatrixXd& ch = f.traj->channel(f.channel);
  if (static_cast<Index>(f.index) >= ch.rows()) {
    throw Error(ErrorKind::ConfigError, "channel index out of range");
  }
  Trajectory tr = Trajectory::on_grid(f.traj->grid, 1, 0);
  for (Index k = 0; k < ch.cols(); ++k) tr.x(0, k) = g(ch(static_cast<Index>(f.index), k));
  const std::size_t size = tr.size();
  return History(std::move(tr), size, nullptr);
}

}  // namespace

double stepanov_norm(const ChannelRef& f, const StepanovParams& params, const TimeScale& ts,
                     double a, double b) {
  (void)ts;
  if (!(params.p >= 1.0) || !(params.l > 0.0)) {
    throw Error(ErrorKind::ConfigError, "Stepanov parameters need p >= 1 and l > 0");
  }
  if (b - a < params.l - TimeScale::tolerance(b)) {
    throw Error(ErrorKind::EmptyWindow, "window shorter than the Stepanov length");
  }
  const History h = transformed(f, [p = params.p](double v) { return std::pow(std::abs(v), p); });
  if (a < h.first_time() - TimeScale::tolerance(a) || b > h.last_time() + TimeScale::tolerance(b)) {
    throw Error(ErrorKind::HistoryTooShort, "trajectory does not cover the Stepanov window");
  }
  double best = 0.0;
  bool any = false;
  const double last_start = b - params.l + TimeScale::tolerance(b);
  for (const auto& g : f.traj->grid) {
    if (g.t < a - TimeScale::tolerance(a)) continue;
    if (g.t > last_start) break;
    const double mean = h.integral(Channel::X, 0, g.t, std::min(g.t + params.l, b)) / params.l;
    best = std::max(best, std::pow(std::max(mean, 0.0), 1.0 / params.p));
    any = true;
  }
  if (!any) throw Error(ErrorKind::EmptyWindow, "no grid translate inside the Stepanov window");
  return best;
}

ErgodicMean ergodic_mean(const ChannelRef& f, const WeightFunction& nu, const TimeScale& ts,
                         double t0, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::EmptyWindow, "r must be positive");
  const History h = transformed(f, [](double v) { return std::abs(v); });
  const double a = t0 - r;
  const double b = t0 + r;
  if (a < h.first_time() - TimeScale::tolerance(a) || b > h.last_time() + TimeScale::tolerance(b)) {
    throw Error(ErrorKind::HistoryTooShort, "trajectory does not cover [t0 - r, t0 + r]");
  }
  auto weight = [&](double s) {
    const double v = nu.expr(s);
    if (!(v > 0.0)) {
      throw Error(ErrorKind::NonPositiveWeight, "weight is not positive at t = " + fmt(s));
    }
    return v;
  };
  const double lo = std::max(project_forward(ts, a), h.first_time());
  const double hi = std::min(project_forward(ts, b), h.last_time());
  ErgodicMean out;
  out.m_r = delta_integral(ts, weight, a, b);
  if (!(out.m_r > 0.0)) throw Error(ErrorKind::EmptyWindow, "Q_r carries no weight");
  const double mass = delta_integral(
      ts, [&](double s) { return h.value(Channel::X, 0, std::clamp(s, lo, hi)) * weight(s); }, a, b);
  out.w_r = mass / out.m_r;
  return out;
}

std::vector<std::pair<double, double>> wpaa0_profile(const ChannelRef& f, const WeightFunction& nu,
                                                     const TimeScale& ts, double t0,
                                                     const std::vector<double>& r_list) {
  std::vector<std::pair<double, double>> out;
  out.reserve(r_list.size());
  double prev = -1.0;
  for (double r : r_list) {
    if (!(r > prev)) throw Error(ErrorKind::ConfigError, "r_list must be increasing");
    prev = r;
    out.emplace_back(r, ergodic_mean(f, nu, ts, t0, r).w_r);
  }
  return out;
}

}  // namespace tshobam
