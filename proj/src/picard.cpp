#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tshobam/analysis.hpp"
#include "tshobam/model.hpp"

namespace tshobam {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

double channel_gap(const Trajectory& a, const Trajectory& b) {
  return std::max({(a.x - b.x).cwiseAbs().maxCoeff(), (a.y - b.y).cwiseAbs().maxCoeff(),
                   (a.dx - b.dx).cwiseAbs().maxCoeff(), (a.dy - b.dy).cwiseAbs().maxCoeff()});
}

// One application of the fixed-point map. The state solves
// X^delta = -a X + F from X = 0 at the grid start: exactly across jumps,
// by the exponential trapezoid rule on dense steps.
Trajectory apply_map(const TimeScale& ts, const NetworkSpec& net,
                     const std::vector<CoefficientSnapshot>& snaps, const Trajectory& psi) {
  const History h(psi, psi.size(), &net.activation, true);
  const std::size_t N = psi.size();
  std::vector<LayerVectors> fg;
  fg.reserve(N);
  for (std::size_t k = 0; k < N; ++k) fg.push_back(operator_FG(ts, net, h, snaps[k]));

  Trajectory out = Trajectory::on_grid(psi.grid, net.n, net.m);
  auto march = [&](Eigen::MatrixXd& state, Eigen::MatrixXd& delta, auto rate, auto forcing) {
    for (std::size_t k = 0; k < N; ++k) {
      const auto col = static_cast<Index>(k);
      const VectorXd& f = forcing(k);
      delta.col(col) = f - rate(k).cwiseProduct(state.col(col));
      if (k + 1 == N) break;
      const GridPoint& g = psi.grid[k];
      if (g.is_right_scattered) {
        state.col(col + 1) = state.col(col) + g.graininess * delta.col(col);
      } else {
        const double step = psi.grid[k + 1].t - g.t;
        const VectorXd decay = (-0.5 * step * (rate(k) + rate(k + 1))).array().exp().matrix();
        state.col(col + 1) = decay.cwiseProduct(state.col(col)) +
                             0.5 * step * (decay.cwiseProduct(f) + forcing(k + 1));
      }
    }
  };
  march(out.x, out.dx, [&](std::size_t k) -> const VectorXd& { return snaps[k].alpha; },
        [&](std::size_t k) -> const VectorXd& { return fg[k].x; });
  march(out.y, out.dy, [&](std::size_t k) -> const VectorXd& { return snaps[k].c; },
        [&](std::size_t k) -> const VectorXd& { return fg[k].y; });
  return out;
}

}  // namespace

PicardResult picard_solve(const TimeScale& ts, const NetworkSpec& net, const HypothesisReport& report,
                          const PicardOptions& opts) {
  if (!(report.kappa < 1.0)) {
    std::ostringstream os;
    os << "contraction modulus " << report.kappa << " is not below 1";
    throw Error(ErrorKind::NoContraction, os.str());
  }
  const CoefficientBounds& b = report.bounds;
  double floor = std::numeric_limits<double>::infinity();
  if (b.alpha_inf.size() > 0) floor = std::min(floor, b.alpha_inf.minCoeff());
  if (b.c_inf.size() > 0) floor = std::min(floor, b.c_inf.minCoeff());
  if (!(floor > 0.0)) throw Error(ErrorKind::NoContraction, "leakage rates have zero infimum");
  if (!(opts.t_hi > opts.t_lo)) throw Error(ErrorKind::EmptyWindow, "empty solve window");

  PicardResult res;
  res.kappa = report.kappa;
  res.cutoff = std::log(1.0 / opts.tail_tol) / floor;
  const double start = opts.t_lo - res.cutoff - b.theta();
  const auto grid = enumerate_grid(ts, start, opts.t_hi);

  std::vector<CoefficientSnapshot> snaps;
  snaps.reserve(grid.size());
  for (const auto& g : grid) snaps.push_back(CoefficientSnapshot::at(net, g.t));

  Trajectory psi = Trajectory::on_grid(grid, net.n, net.m);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Trajectory next = apply_map(ts, net, snaps, psi);
    const double gap = channel_gap(next, psi);
    res.differences.push_back(gap);
    psi = std::move(next);
    if (gap < opts.tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    std::ostringstream os;
    os << "no convergence to " << opts.tol << " within " << opts.max_iter << " iterations";
    throw Error(ErrorKind::MaxIterExceeded, os.str());
  }
  res.solution = std::move(psi);
  return res;
}

}  // namespace tshobam
