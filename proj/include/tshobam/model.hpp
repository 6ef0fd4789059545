#pragma once

#include <Eigen/Dense>

#include "tshobam/network.hpp"
#include "tshobam/timescale.hpp"
#include "tshobam/trajectory.hpp"

namespace tshobam {

/// A value per x-neuron and per y-neuron.
struct LayerVectors {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

/// The point of the time scale used for a lookup at t - delay.
double delayed_time(const TimeScale& ts, const DelaySpec& delays, double t, double delay);

/// Right-hand side of the network at t: the delta derivatives of x and y.
/// The history must cover [t - theta, t].
LayerVectors rhs(const TimeScale& ts, const NetworkSpec& net, const History& hist, double t);
LayerVectors rhs(const TimeScale& ts, const NetworkSpec& net, const History& hist,
                 const CoefficientSnapshot& coeffs);

/// The operators F_i and G_j of the fixed-point formulation, sourced from the
/// candidate function stored in `psi` (state and delta channels).
LayerVectors operator_FG(const TimeScale& ts, const NetworkSpec& net, const History& psi, double t);
LayerVectors operator_FG(const TimeScale& ts, const NetworkSpec& net, const History& psi,
                         const CoefficientSnapshot& coeffs);

}  // namespace tshobam
