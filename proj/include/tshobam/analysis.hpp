#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tshobam/network.hpp"
#include "tshobam/timescale.hpp"
#include "tshobam/trajectory.hpp"

namespace tshobam {

/// Scanned sup (and for alpha, c also inf) of |coefficient| over a window.
struct CoefficientBounds {
  double window_lo = 0.0;
  double window_hi = 0.0;
  double density = 0.0;

  Eigen::VectorXd alpha_sup, alpha_inf, c_sup, c_inf;
  Eigen::MatrixXd D, D_tau, D_bar, D_tilde;
  Eigen::MatrixXd E, E_tau, E_bar, E_tilde;
  std::vector<Eigen::MatrixXd> T, T_bar;
  Eigen::VectorXd eta, varsigma, chi;
  Eigen::MatrixXd tau, sigma, xi;
  Eigen::VectorXd I, J;

  /// Smallest raw (unclamped) delay value seen; negative means some delay
  /// dips below zero and is clamped by the model.
  double min_raw_delay = 0.0;

  /// max of every delay sup.
  double theta() const;
};

CoefficientBounds scan_bounds(const NetworkSpec& net, const TimeScale& ts, double lo, double hi,
                              double density);

/// Per-index activation constants: Lipschitz L_q and g_q(r) = L_q r + |f_q(0)|.
struct ActivationConstants {
  Eigen::VectorXd L;
  Eigen::VectorXd f0;

  static ActivationConstants of(const ActivationSpec& act);
  Eigen::VectorXd g(double r) const { return L * r + f0; }
};

struct H3Constants {
  Eigen::VectorXd M, M_bar;  // per x-neuron
  Eigen::VectorXd N, N_bar;  // per y-neuron
};

H3Constants h3_constants(const CoefficientBounds& b, const ActivationSpec& act, double r);

struct HypothesisFlag {
  bool pass = false;
  std::vector<std::string> notes;
};

struct HypothesisReport {
  CoefficientBounds bounds;
  double r = 0.0;
  H3Constants constants;
  double lhs_r = 0.0;
  double lhs_1 = 0.0;
  double kappa = 0.0;
  HypothesisFlag h1, h2, h3, h4;
  /// inf over the scan of 1 - d/dt of each distributed / derivative-distributed delay.
  Eigen::MatrixXd h4_sigma_margin, h4_xi_margin;
};

/// The H3 part only: both maxima, the flag and kappa (the second maximum).
HypothesisReport check_h3(const CoefficientBounds& b, const ActivationSpec& act, double r);

/// All four hypotheses, numerically, on the scan window of `b`.
HypothesisReport check_hypotheses(const NetworkSpec& net, const TimeScale& ts,
                                  const CoefficientBounds& b);

struct PicardOptions {
  double t_lo = 0.0;
  double t_hi = 40.0;
  double tol = 1e-8;
  int max_iter = 60;
  double tail_tol = 1e-10;
};

struct PicardResult {
  /// The fixed point on [t_lo - cutoff - theta, t_hi].
  Trajectory solution;
  double cutoff = 0.0;
  double kappa = 0.0;
  /// Sup-norm distance between iterates k and k + 1, starting at k = 0.
  std::vector<double> differences;
  bool converged = false;
};

/// Iterates the fixed-point map from psi = 0 until successive iterates differ
/// by less than tol in sup norm over state and delta channels.
/// Throws NoContraction when kappa >= 1 and MaxIterExceeded when tol is not reached.
PicardResult picard_solve(const TimeScale& ts, const NetworkSpec& net, const HypothesisReport& report,
                          const PicardOptions& opts);

struct GHValues {
  Eigen::VectorXd G, H;         // per x-neuron
  Eigen::VectorXd G_bar, H_bar;  // per y-neuron
};

/// `beta` overrides the parameter of H and H_bar; by default it equals
/// alpha_i^- (resp. c_j^-).
GHValues gh_functions(const CoefficientBounds& b, const ActivationSpec& act, double r,
                      double sup_graininess, double w, std::optional<double> beta = std::nullopt);

struct StabilityCertificate {
  double gamma = 0.0;
  double a = 0.0;
  double K = 0.0;  // +inf when some K* or P* vanishes
  double safety_fraction = 0.9;
  double sup_graininess = 0.0;
  Eigen::VectorXd root_G, root_H, root_G_bar, root_H_bar;
  Eigen::VectorXd K_star, P_star;
  Eigen::VectorXd beta_x, beta_y;  // convergence margins
  std::vector<std::string> warnings;
};

StabilityCertificate decay_certificate(const CoefficientBounds& b, const ActivationSpec& act, double r,
                                       const TimeScale& ts, double safety_fraction = 0.9,
                                       std::optional<double> beta = std::nullopt);

struct ConvergenceMargins {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

ConvergenceMargins convergence_condition(const CoefficientBounds& b, const ActivationSpec& act,
                                         double r);

struct EnvelopeReport {
  double t0 = 0.0;
  double initial_distance = 0.0;  // sup over t <= t0 of the channel differences
  std::vector<double> t, d, bound;
  double fraction_satisfied = 0.0;
  double fitted_rate = 0.0;
};

/// d(t) = max |Z_a - Z_b| over states and delta channels against
/// K e_{-gamma (circle minus)}(t, t0) ||psi_a - psi_b||_0 for grid points t >= t0.
EnvelopeReport envelope_check(const Trajectory& a, const Trajectory& b,
                              const StabilityCertificate& cert, const TimeScale& ts, double t0);

struct LyapunovTerms {
  double t = 0.0;
  double V = 0.0;
  double V1 = 0.0, V2 = 0.0, V3 = 0.0, V4 = 0.0, V5 = 0.0;
};

/// The Lyapunov-Krasovskii functional along two solutions. The V3 and V4
/// double integrals run over s in [t - sigma(t), t] with inner limits
/// [t - s, t], as the functional is defined. `symmetrize` adds the mirror
/// y-layer terms to V2 to V4.
class LyapunovFunctional {
 public:
  LyapunovFunctional(const Trajectory& a, const Trajectory& b, const NetworkSpec& net,
                     const TimeScale& ts, const CoefficientBounds& bounds, bool symmetrize = false);
  ~LyapunovFunctional();
  LyapunovFunctional(const LyapunovFunctional&) = delete;
  LyapunovFunctional& operator=(const LyapunovFunctional&) = delete;

  LyapunovTerms at(double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LyapunovTerms lyapunov_eval(const Trajectory& a, const Trajectory& b, const NetworkSpec& net,
                            const TimeScale& ts, const CoefficientBounds& bounds, double t,
                            bool symmetrize = false);

/// (V(sigma(t)) - V(t)) / mu(t), with mu = resolution on dense points.
template <class F>
double dini_derivative(F&& V, const TimeScale& ts, double t) {
  const double mu = graininess(ts, t);
  const double step = mu > 0.0 ? mu : ts.resolution();
  return (V(t + step) - V(t)) / step;
}

}  // namespace tshobam
