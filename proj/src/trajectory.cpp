#include "tshobam/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tshobam {

namespace {

std::size_t slot(Channel c) { return static_cast<std::size_t>(c); }

std::string fmt(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

}  // namespace

Trajectory Trajectory::on_grid(std::vector<GridPoint> grid, std::size_t n, std::size_t m) {
  Trajectory tr;
  const auto N = static_cast<Eigen::Index>(grid.size());
  tr.grid = std::move(grid);
  tr.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), N);
  tr.y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), N);
  tr.dx = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), N);
  tr.dy = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), N);
  return tr;
}

Eigen::MatrixXd& Trajectory::channel(Channel c) {
  switch (c) {
    case Channel::X: return x;
    case Channel::Y: return y;
    case Channel::DX: return dx;
    case Channel::DY: return dy;
  }
  return x;
}

const Eigen::MatrixXd& Trajectory::channel(Channel c) const {
  return const_cast<Trajectory*>(this)->channel(c);
}

std::size_t Trajectory::floor_index(double t) const {
  const double tol = TimeScale::tolerance(t);
  auto it = std::upper_bound(grid.begin(), grid.end(), t + tol,
                             [](double v, const GridPoint& g) { return v < g.t; });
  if (it == grid.begin()) {
    throw Error(ErrorKind::HistoryTooShort, "t = " + fmt(t) + " precedes the trajectory");
  }
  return static_cast<std::size_t>(std::distance(grid.begin(), it) - 1);
}

std::size_t Trajectory::index_of(double t) const {
  if (grid.empty() || t < grid.front().t - TimeScale::tolerance(t)) {
    throw Error(ErrorKind::NotInScale, "t = " + fmt(t) + " is not a trajectory node");
  }
  const std::size_t k = floor_index(t);
  if (std::abs(grid[k].t - t) > TimeScale::tolerance(t)) {
    throw Error(ErrorKind::NotInScale, "t = " + fmt(t) + " is not a trajectory node");
  }
  return k;
}

Eigen::VectorXd Trajectory::stacked(std::size_t k) const {
  const auto col = static_cast<Eigen::Index>(k);
  Eigen::VectorXd out(x.rows() + y.rows() + dx.rows() + dy.rows());
  out << x.col(col), y.col(col), dx.col(col), dy.col(col);
  return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (std::size_t i = 0; i < traj.n(); ++i) os << ",x" << i + 1;
  for (std::size_t j = 0; j < traj.m(); ++j) os << ",y" << j + 1;
  for (std::size_t i = 0; i < traj.n(); ++i) os << ",dx" << i + 1;
  for (std::size_t j = 0; j < traj.m(); ++j) os << ",dy" << j + 1;
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    put(traj.grid[k].t);
    const auto col = static_cast<Eigen::Index>(k);
    for (const auto* ch : {&traj.x, &traj.y, &traj.dx, &traj.dy}) {
      for (Eigen::Index r = 0; r < ch->rows(); ++r) {
        os << ',';
        put((*ch)(r, col));
      }
    }
    os << '\n';
  }
}

History::History(Trajectory traj, std::size_t filled, const ActivationSpec* activation,
                 bool clamp_before_start)
    : traj_(std::move(traj)), filled_(filled), activation_(activation), clamp_(clamp_before_start) {
  if (traj_.grid.empty()) throw Error(ErrorKind::EmptyWindow, "history has no grid points");
  for (Channel c : {Channel::X, Channel::Y, Channel::DX, Channel::DY}) {
    const auto& raw = traj_.channel(c);
    activated_[slot(c)] = Eigen::MatrixXd::Zero(raw.rows(), raw.cols());
  }
  for (std::size_t k = 0; k < filled_; ++k) refresh(k, true, true);
}

void History::refresh(std::size_t k, bool state, bool delta) {
  if (activation_ == nullptr) return;
  const auto col = static_cast<Eigen::Index>(k);
  for (Channel c : {Channel::X, Channel::Y, Channel::DX, Channel::DY}) {
    const bool is_delta = c == Channel::DX || c == Channel::DY;
    if (is_delta ? !delta : !state) continue;
    const auto& raw = traj_.channel(c);
    auto& out = activated_[slot(c)];
    for (Eigen::Index q = 0; q < raw.rows(); ++q) {
      out(q, col) = (*activation_)(static_cast<std::size_t>(q), raw(q, col));
    }
  }
}

void History::set_node(std::size_t k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& dx, const Eigen::VectorXd& dy) {
  const auto col = static_cast<Eigen::Index>(k);
  traj_.x.col(col) = x;
  traj_.y.col(col) = y;
  traj_.dx.col(col) = dx;
  traj_.dy.col(col) = dy;
  filled_ = std::max(filled_, k + 1);
  refresh(k, true, true);
}

void History::set_delta(std::size_t k, const Eigen::VectorXd& dx, const Eigen::VectorXd& dy) {
  const auto col = static_cast<Eigen::Index>(k);
  traj_.dx.col(col) = dx;
  traj_.dy.col(col) = dy;
  refresh(k, false, true);
}

void History::set_tail(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& dx, const Eigen::VectorXd& dy) {
  tail_ = Tail{t, {x, y, dx, dy}};
}

double History::last_time() const { return time(count() - 1); }

double History::node(Channel c, std::size_t q, std::size_t k, bool activated) const {
  if (k < filled_) {
    const auto col = static_cast<Eigen::Index>(k);
    const auto row = static_cast<Eigen::Index>(q);
    return activated ? activated_[slot(c)](row, col) : traj_.channel(c)(row, col);
  }
  const double v = tail_->raw[slot(c)](static_cast<Eigen::Index>(q));
  return activated ? (*activation_)(q, v) : v;
}

// Value at s strictly inside (time(k), time(k + 1)).
double History::between(Channel c, std::size_t q, std::size_t k, double s, bool activated) const {
  if (scattered(k)) return node(c, q, k, activated);
  const double t0 = time(k);
  const double t1 = time(k + 1);
  const double w = (s - t0) / (t1 - t0);
  const double v = (1.0 - w) * node(c, q, k, false) + w * node(c, q, k + 1, false);
  return activated ? (*activation_)(q, v) : v;
}

// Largest k < count() with time(k) <= s (within tolerance); s must be covered.
std::size_t History::locate(double s) const {
  const double tol = TimeScale::tolerance(s);
  if (tail_ && s >= tail_->t - tol) return filled_;
  const auto end = traj_.grid.begin() + static_cast<std::ptrdiff_t>(filled_);
  auto it = std::upper_bound(traj_.grid.begin(), end, s + tol,
                             [](double v, const GridPoint& g) { return v < g.t; });
  return static_cast<std::size_t>(std::distance(traj_.grid.begin(), it)) - 1;
}

double History::value(Channel c, std::size_t q, double s, bool activated) const {
  if (count() == 0) throw Error(ErrorKind::HistoryTooShort, "history is empty");
  const double tol = TimeScale::tolerance(s);
  if (s < first_time() - tol) {
    if (!clamp_) {
      throw Error(ErrorKind::HistoryTooShort,
                  "lookup at t = " + fmt(s) + " precedes history start " + fmt(first_time()));
    }
    return node(c, q, 0, activated);
  }
  if (s > last_time() + tol) {
    throw Error(ErrorKind::HistoryTooShort,
                "lookup at t = " + fmt(s) + " is past the filled history " + fmt(last_time()));
  }
  const std::size_t k = locate(s);
  if (std::abs(s - time(k)) <= tol || k + 1 >= count()) return node(c, q, k, activated);
  return between(c, q, k, s, activated);
}

double History::integral(Channel c, std::size_t q, double a, double b, bool activated) const {
  double acc = 0.0;
  if (!(b > a + TimeScale::tolerance(b))) return acc;
  if (b > last_time() + TimeScale::tolerance(b)) {
    throw Error(ErrorKind::HistoryTooShort, "integral up to t = " + fmt(b) + " is past the history");
  }
  if (a < first_time() - TimeScale::tolerance(a)) {
    if (!clamp_) {
      throw Error(ErrorKind::HistoryTooShort,
                  "integral from t = " + fmt(a) + " precedes history start " + fmt(first_time()));
    }
    acc += (first_time() - a) * node(c, q, 0, activated);
    a = first_time();
    if (!(b > a + TimeScale::tolerance(b))) return acc;
  }
  const std::size_t ka = locate(a);
  const std::size_t kb = locate(b);
  const bool a_on_node = std::abs(a - time(ka)) <= TimeScale::tolerance(a);
  const bool b_on_node = std::abs(b - time(kb)) <= TimeScale::tolerance(b);
  auto piece = [&](std::size_t k) {
    if (scattered(k)) return node(c, q, k, activated) * traj_.grid[k].graininess;
    return 0.5 * (node(c, q, k, activated) + node(c, q, k + 1, activated)) * (time(k + 1) - time(k));
  };
  if (ka == kb) {
    if (scattered(ka)) return acc + (a_on_node ? piece(ka) : 0.0);
    const double va = a_on_node ? node(c, q, ka, activated) : between(c, q, ka, a, activated);
    return acc + 0.5 * (va + between(c, q, kb, b, activated)) * (b - a);
  }
  std::size_t start = ka;
  if (!a_on_node) {
    if (!scattered(ka)) {
      acc += 0.5 * (between(c, q, ka, a, activated) + node(c, q, ka + 1, activated)) *
             (time(ka + 1) - a);
    }
    start = ka + 1;
  }
  for (std::size_t k = start; k < kb; ++k) acc += piece(k);
  if (!b_on_node) {
    if (scattered(kb)) {
      acc += piece(kb);
    } else {
      acc += 0.5 * (node(c, q, kb, activated) + between(c, q, kb, b, activated)) * (b - time(kb));
    }
  }
  return acc;
}

}  // namespace tshobam
