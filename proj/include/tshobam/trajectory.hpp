#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "tshobam/network.hpp"
#include "tshobam/timescale.hpp"

namespace tshobam {

enum class Channel { X, Y, DX, DY };

/// State and delta-derivative channels sampled on a grid of the time scale.
/// Column k of every channel belongs to grid[k].
struct Trajectory {
  std::vector<GridPoint> grid;
  Eigen::MatrixXd x;   // n x N
  Eigen::MatrixXd y;   // m x N
  Eigen::MatrixXd dx;  // n x N
  Eigen::MatrixXd dy;  // m x N

  /// Zero-filled channels on `grid`.
  static Trajectory on_grid(std::vector<GridPoint> grid, std::size_t n, std::size_t m);

  std::size_t size() const noexcept { return grid.size(); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t m() const noexcept { return static_cast<std::size_t>(y.rows()); }
  double lower_bound() const { return grid.front().t; }
  double upper_bound() const { return grid.back().t; }

  Eigen::MatrixXd& channel(Channel c);
  const Eigen::MatrixXd& channel(Channel c) const;

  /// Index of the grid point at t; throws NotInScale when t is not a node.
  std::size_t index_of(double t) const;
  /// Largest k with grid[k].t <= t (within tolerance); requires t >= grid.front().t.
  std::size_t floor_index(double t) const;

  /// Concatenated (x, y, dx, dy) at column k.
  Eigen::VectorXd stacked(std::size_t k) const;
};

/// One row per grid point: t, x1..xn, y1..ym, dx1..dxn, dy1..dym with 17
/// significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);

/// Read access to a trajectory that is still being filled, for delayed
/// lookups and window integrals.
///
/// Only the first `filled` grid points are valid. An optional tail node past
/// the last filled point stands in for a Runge-Kutta stage. Values between
/// points of a dense piece are linear interpolations; inside a gap the value
/// of the point before the gap is used. Activated lookups apply the network
/// activation f_q to channel q and are cached per grid point.
class History {
 public:
  History(Trajectory traj, std::size_t filled, const ActivationSpec* activation,
          bool clamp_before_start = false);

  const Trajectory& trajectory() const noexcept { return traj_; }
  Trajectory release() { return std::move(traj_); }
  std::size_t filled() const noexcept { return filled_; }

  void set_node(std::size_t k, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const Eigen::VectorXd& dx, const Eigen::VectorXd& dy);
  void set_delta(std::size_t k, const Eigen::VectorXd& dx, const Eigen::VectorXd& dy);
  void set_tail(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const Eigen::VectorXd& dx, const Eigen::VectorXd& dy);
  void clear_tail() { tail_.reset(); }

  /// Channel value at s; throws HistoryTooShort outside the covered range
  /// (before the start only when clamping is off).
  double value(Channel c, std::size_t q, double s, bool activated = false) const;
  /// Delta integral of the channel (or its activation) over [a, b].
  double integral(Channel c, std::size_t q, double a, double b, bool activated = false) const;

  double first_time() const { return traj_.grid.front().t; }
  double last_time() const;

 private:
  struct Tail {
    double t;
    std::array<Eigen::VectorXd, 4> raw;
  };

  std::size_t count() const noexcept { return filled_ + (tail_ ? 1 : 0); }
  double time(std::size_t k) const { return k < filled_ ? traj_.grid[k].t : tail_->t; }
  bool scattered(std::size_t k) const { return k < filled_ && traj_.grid[k].is_right_scattered; }
  double node(Channel c, std::size_t q, std::size_t k, bool activated) const;
  double between(Channel c, std::size_t q, std::size_t k, double s, bool activated) const;
  std::size_t locate(double s) const;
  void refresh(std::size_t k, bool state, bool delta);

  Trajectory traj_;
  std::size_t filled_;
  const ActivationSpec* activation_;
  bool clamp_;
  std::array<Eigen::MatrixXd, 4> activated_;
  std::optional<Tail> tail_;
};

}  // namespace tshobam
