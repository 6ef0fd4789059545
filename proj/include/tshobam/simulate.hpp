#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tshobam/expr.hpp"
#include "tshobam/network.hpp"
#include "tshobam/timescale.hpp"
#include "tshobam/trajectory.hpp"

namespace tshobam {

/// Initial functions on [-theta, 0]. When `derive_delta` is set the delta
/// channels are built from the state functions: across a jump by a difference
/// quotient that makes x(sigma(t)) = x(t) + mu(t) x^delta(t) hold exactly, on
/// dense pieces by a central difference. Otherwise dx and dy are required.
struct InitialHistory {
  std::vector<Expr> x;
  std::vector<Expr> y;
  std::vector<Expr> dx;
  std::vector<Expr> dy;
  bool derive_delta = true;
};

/// Samples `init` on T between project_backward(-theta) and 0.
Trajectory initial_trajectory(const TimeScale& ts, const InitialHistory& init, double theta);

/// Constant history (x, y) with zero delta channels.
InitialHistory constant_history(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Smooth random history a + b sin(w s + phase) per component, drawn from a
/// seeded 64-bit Mersenne twister. |a| <= amplitude, 0 <= b <= amplitude / 2.
InitialHistory random_history(std::size_t n, std::size_t m, std::uint64_t seed, double amplitude);

/// `base` plus amplitude * sin(w s) per component with random w, so the two
/// histories agree at s = 0.
InitialHistory perturbed_history(const InitialHistory& base, std::uint64_t seed, double amplitude);

/// Marches the network from the end of `init` to `horizon`: an exact jump step
/// x(sigma(t)) = x(t) + mu(t) rhs(t) across right-scattered points and classical
/// RK4 on dense pieces. Delta channels hold the right-hand side at each point.
Trajectory simulate(const TimeScale& ts, const NetworkSpec& net, const Trajectory& init,
                    double horizon);

struct StepanovParams {
  double p = 1.0;
  double l = 1.0;
};

enum class WeightKind { BoundedAdmissible, General };

struct WeightFunction {
  Expr expr = Expr::constant(1.0);
  WeightKind kind = WeightKind::General;
};

/// One scalar channel of a trajectory.
struct ChannelRef {
  const Trajectory* traj = nullptr;
  Channel channel = Channel::X;
  std::size_t index = 0;
};

/// Trajectory with the single x-channel holding samples of f on [a, b].
Trajectory sample_function(const TimeScale& ts, const Expr& f, double a, double b);

/// sup over grid translates t in [a, b - l] of (1/l int_t^{t+l} |f|^p)^(1/p).
double stepanov_norm(const ChannelRef& f, const StepanovParams& params, const TimeScale& ts,
                     double a, double b);

struct ErgodicMean {
  double m_r = 0.0;
  double w_r = 0.0;
};

ErgodicMean ergodic_mean(const ChannelRef& f, const WeightFunction& nu, const TimeScale& ts,
                         double t0, double r);

std::vector<std::pair<double, double>> wpaa0_profile(const ChannelRef& f, const WeightFunction& nu,
                                                     const TimeScale& ts, double t0,
                                                     const std::vector<double>& r_list);

}  // namespace tshobam
