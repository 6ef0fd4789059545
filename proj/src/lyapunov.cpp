#include <array>
#include <cmath>

#include "tshobam/analysis.hpp"
#include "tshobam/model.hpp"

namespace tshobam {

namespace {

using Eigen::Index;

Trajectory difference(const Trajectory& a, const Trajectory& b, bool absolute) {
  if (a.size() != b.size() || a.n() != b.n() || a.m() != b.m()) {
    throw Error(ErrorKind::GridMismatch, "trajectories have different shapes");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.grid[k].t - b.grid[k].t) > TimeScale::tolerance(a.grid[k].t)) {
      throw Error(ErrorKind::GridMismatch, "trajectories sit on different grids");
    }
  }
  Trajectory out = Trajectory::on_grid(a.grid, a.n(), a.m());
  for (Channel c : {Channel::X, Channel::Y, Channel::DX, Channel::DY}) {
    out.channel(c) = a.channel(c) - b.channel(c);
    if (absolute) out.channel(c) = out.channel(c).cwiseAbs();
  }
  return out;
}

}  // namespace

struct LyapunovFunctional::Impl {
  const NetworkSpec& net;
  const TimeScale& ts;
  const CoefficientBounds& bounds;
  bool symmetrize;
  Eigen::VectorXd L;
  History signed_diff;
  History abs_diff;
  // Running delta integral of each |difference| channel from the first node.
  std::array<Eigen::MatrixXd, 4> cumulative;

  Impl(const Trajectory& a, const Trajectory& b, const NetworkSpec& n, const TimeScale& s,
       const CoefficientBounds& cb, bool sym)
      : net(n),
        ts(s),
        bounds(cb),
        symmetrize(sym),
        L(ActivationConstants::of(n.activation).L),
        signed_diff(difference(a, b, false), a.size(), nullptr),
        abs_diff(difference(a, b, true), a.size(), nullptr) {
    const auto& grid = abs_diff.trajectory().grid;
    for (Channel c : {Channel::X, Channel::Y, Channel::DX, Channel::DY}) {
      const auto rows = abs_diff.trajectory().channel(c).rows();
      auto& cum = cumulative[static_cast<std::size_t>(c)];
      cum = Eigen::MatrixXd::Zero(rows, static_cast<Index>(grid.size()));
      for (Index q = 0; q < rows; ++q) {
        for (std::size_t k = 1; k < grid.size(); ++k) {
          cum(q, static_cast<Index>(k)) =
              cum(q, static_cast<Index>(k - 1)) +
              abs_diff.integral(c, static_cast<std::size_t>(q), grid[k - 1].t, grid[k].t);
        }
      }
    }
  }

  // Delta integral of |difference| from the first node up to u.
  double running(Channel c, std::size_t q, double u) const {
    const std::size_t k = abs_diff.trajectory().floor_index(u);
    const double base = cumulative[static_cast<std::size_t>(c)](static_cast<Index>(q),
                                                                  static_cast<Index>(k));
    return base + abs_diff.integral(c, q, abs_diff.trajectory().grid[k].t, u);
  }

  // Leakage-corrected difference |dz(t) - rate * int_{t - lag}^t dz|.
  double leak(Channel c, std::size_t q, double t, double rate, double lag) const {
    const double v = signed_diff.value(c, q, t);
    const double w = lag > 0.0 ? signed_diff.integral(c, q, t - lag, t) : 0.0;
    return std::abs(v - rate * w);
  }

  // The single, double and iterated window terms for one coupling pair.
  void windows(LyapunovTerms& out, double t, Channel state,
               Channel delta, std::size_t src, double weight_now, double weight_bar,
               double weight_tilde, double tau, double sigma, double xi) const {
    if (weight_now != 0.0 && tau > 0.0) {
      out.V2 += weight_now * abs_diff.integral(state, src, t - tau, t);
    }
    if (weight_bar != 0.0 && sigma > 0.0) {
      const double top = running(state, src, t);
      out.V3 += weight_bar * delta_integral(
                                 ts, [&](double u) { return top - running(state, src, t - u); },
                                 t - sigma, t);
    }
    if (weight_tilde != 0.0 && xi > 0.0) {
      const double zero = running(delta, src, 0.0);
      out.V4 += weight_tilde *
                delta_integral(ts, [&](double u) { return zero - running(delta, src, u); },
                               t - xi, t);
    }
  }

  LyapunovTerms at(double t) const {
    const CoefficientSnapshot s = CoefficientSnapshot::at(net, t);
    const CoefficientBounds& b = bounds;
    LyapunovTerms out;
    out.t = t;
    const auto n = static_cast<Index>(net.n);
    const auto m = static_cast<Index>(net.m);
    for (Index i = 0; i < n; ++i) {
      out.V1 += leak(Channel::X, static_cast<std::size_t>(i), t, s.alpha(i), s.eta(i));
    }
    for (Index j = 0; j < m; ++j) {
      out.V5 += leak(Channel::Y, static_cast<std::size_t>(j), t, s.c(j), s.varsigma(j));
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) {
        windows(out, t, Channel::X, Channel::DX, static_cast<std::size_t>(i),
                L(j) * (b.D(i, j) + b.D_tau(i, j)), L(j) * b.D_bar(i, j), L(j) * b.D_tilde(i, j),
                s.tau(i, j), s.sigma(i, j), s.xi(i, j));
        if (symmetrize) {
          windows(out, t, Channel::Y, Channel::DY, static_cast<std::size_t>(j),
                  L(i) * (b.E(i, j) + b.E_tau(i, j)), L(i) * b.E_bar(i, j),
                  L(i) * b.E_tilde(i, j), s.tau(i, j), s.sigma(i, j), s.xi(i, j));
        }
      }
    }
    out.V = out.V1 + out.V2 + out.V3 + out.V4 + out.V5;
    return out;
  }
};

LyapunovFunctional::LyapunovFunctional(const Trajectory& a, const Trajectory& b,
                                       const NetworkSpec& net, const TimeScale& ts,
                                       const CoefficientBounds& bounds, bool symmetrize)
    : impl_(std::make_unique<Impl>(a, b, net, ts, bounds, symmetrize)) {}

LyapunovFunctional::~LyapunovFunctional() = default;

LyapunovTerms LyapunovFunctional::at(double t) const { return impl_->at(t); }

LyapunovTerms lyapunov_eval(const Trajectory& a, const Trajectory& b, const NetworkSpec& net,
                            const TimeScale& ts, const CoefficientBounds& bounds, double t,
                            bool symmetrize) {
  return LyapunovFunctional(a, b, net, ts, bounds, symmetrize).at(t);
}

}  // namespace tshobam
