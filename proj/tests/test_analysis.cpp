#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tshobam/analysis.hpp"
#include "tshobam/config.hpp"
#include "tshobam/simulate.hpp"

using namespace tshobam;
using Eigen::Index;
using Eigen::VectorXd;

namespace {

struct Loaded {
  ExperimentConfig cfg;
  CoefficientBounds bounds;
};

Loaded load(const std::string& name, double hi = -1.0) {
  Loaded l;
  l.cfg = load_config(std::string(TSHOBAM_FIXTURES) + "/" + name);
  const AnalysisConfig& a = l.cfg.analysis;
  l.bounds = scan_bounds(l.cfg.network, l.cfg.timescale, a.window_lo, hi > 0.0 ? hi : a.window_hi,
                         a.density.value_or(l.cfg.timescale.resolution()));
  l.cfg.network.delays.theta = l.bounds.theta();
  return l;
}

// Example network, scanned on a shorter window to keep the suite quick.
const Loaded& example() {
  static const Loaded l = load("hobam_3x2.json", 200.0);
  return l;
}

NetworkSpec zero_network(double rate) {
  NetworkSpec net = NetworkSpec::zeros(2, 2);
  for (auto& a : net.alpha) a = Expr::constant(rate);
  for (auto& c : net.c) c = Expr::constant(rate);
  return net;
}

CoefficientBounds bounds_of(const NetworkSpec& net, const TimeScale& ts) {
  return scan_bounds(net, ts, 0.0, 20.0, 0.1);
}

double max_abs(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(Bounds, ExampleAmplitudes) {
  const CoefficientBounds& b = example().bounds;
  EXPECT_NEAR(b.D.maxCoeff(), 0.05, 1e-4);
  EXPECT_NEAR(b.D.minCoeff(), 0.05, 1e-4);
  EXPECT_LE(b.D.maxCoeff(), 0.05);
  EXPECT_NEAR(b.alpha_sup.maxCoeff(), 0.75, 2e-3);
  EXPECT_NEAR(b.alpha_inf.minCoeff(), 0.71, 2e-3);
  EXPECT_GE(b.alpha_inf.minCoeff(), 0.71 - 1e-12);
  EXPECT_LE(b.alpha_sup.maxCoeff(), 0.75 + 1e-12);
  EXPECT_GT(b.theta(), 1.0);
  EXPECT_LT(b.min_raw_delay, 0.0);
}

TEST(Bounds, ZeroNetwork) {
  const CoefficientBounds b = bounds_of(NetworkSpec::zeros(2, 3), TimeScale::continuum(0.1));
  for (const Eigen::MatrixXd* m : {&b.D, &b.D_tau, &b.D_bar, &b.D_tilde, &b.E, &b.E_tau, &b.E_bar,
                                   &b.E_tilde, &b.tau, &b.sigma, &b.xi}) {
    EXPECT_EQ(m->cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(max_abs(b.alpha_sup), 0.0);
  EXPECT_EQ(max_abs(b.I), 0.0);
  EXPECT_EQ(b.theta(), 0.0);
}

TEST(H3, ZeroNetworkPassesWithZeroConstants) {
  const NetworkSpec net = zero_network(0.71);
  const CoefficientBounds b = bounds_of(net, TimeScale::continuum(0.1));
  const HypothesisReport rep = check_h3(b, net.activation, 1.0);
  EXPECT_TRUE(rep.h3.pass);
  EXPECT_EQ(rep.kappa, 0.0);
  EXPECT_EQ(max_abs(rep.constants.M), 0.0);
  EXPECT_EQ(max_abs(rep.constants.M_bar), 0.0);
  EXPECT_EQ(max_abs(rep.constants.N), 0.0);
  EXPECT_EQ(max_abs(rep.constants.N_bar), 0.0);
}

TEST(H3, ExampleHolds) {
  const Loaded& l = example();
  const HypothesisReport rep = check_h3(l.bounds, l.cfg.network.activation, l.cfg.network.r);
  EXPECT_TRUE(rep.h3.pass);
  EXPECT_LE(rep.lhs_r, 0.43);
  EXPECT_LT(rep.kappa, 1.0);
  EXPECT_EQ(rep.kappa, rep.lhs_1);
}

TEST(H3, ScalingThresholdIsSharp) {
  // Every constant is linear in exactly one of the leakage delays, couplings
  // or inputs, so scaling all of them by s scales both maxima by s.
  const Loaded& l = example();
  const ActivationSpec& act = l.cfg.network.activation;
  const double r = l.cfg.network.r;
  const HypothesisReport base = check_h3(l.bounds, act, r);
  const double s_crit = std::min(r / base.lhs_r, 1.0 / base.lhs_1);
  auto scaled = [&](double s) {
    CoefficientBounds b = l.bounds;
    for (Eigen::MatrixXd* m : {&b.D, &b.D_tau, &b.D_bar, &b.D_tilde, &b.E, &b.E_tau, &b.E_bar,
                               &b.E_tilde}) {
      *m *= s;
    }
    for (auto* family : {&b.T, &b.T_bar})
      for (auto& slice : *family) slice *= s;
    for (Eigen::VectorXd* v : {&b.eta, &b.varsigma, &b.I, &b.J}) *v *= s;
    return check_h3(b, act, r);
  };
  const HypothesisReport up = scaled(2.0);
  EXPECT_NEAR(up.lhs_r, 2.0 * base.lhs_r, 1e-12);
  EXPECT_NEAR(up.lhs_1, 2.0 * base.lhs_1, 1e-12);
  EXPECT_TRUE(scaled(0.99 * s_crit).h3.pass);
  EXPECT_FALSE(scaled(1.01 * s_crit).h3.pass);
}

TEST(H3, ConstantsAreMonotoneInEveryBound) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  const Loaded& l = example();
  const CoefficientBounds& base = l.bounds;
  const ActivationSpec& act = l.cfg.network.activation;
  const H3Constants k0 = h3_constants(base, act, 0.43);
  auto no_decrease = [&](const H3Constants& k) {
    return (k.M - k0.M).minCoeff() >= 0.0 && (k.M_bar - k0.M_bar).minCoeff() >= 0.0 &&
           (k.N - k0.N).minCoeff() >= 0.0 && (k.N_bar - k0.N_bar).minCoeff() >= 0.0;
  };
  for (int c = 0; c < 200; ++c) {
    CoefficientBounds b = base;
    std::vector<double*> slots;
    for (Eigen::MatrixXd* m : {&b.D, &b.D_tau, &b.D_bar, &b.D_tilde, &b.E, &b.E_tau, &b.E_bar,
                               &b.E_tilde, &b.sigma, &b.xi}) {
      for (Index q = 0; q < m->size(); ++q) slots.push_back(m->data() + q);
    }
    for (auto* family : {&b.T, &b.T_bar})
      for (auto& s : *family)
        for (Index q = 0; q < s.size(); ++q) slots.push_back(s.data() + q);
    for (Eigen::VectorXd* v : {&b.alpha_sup, &b.c_sup, &b.eta, &b.varsigma, &b.I, &b.J}) {
      for (Index q = 0; q < v->size(); ++q) slots.push_back(v->data() + q);
    }
    *slots[gen() % slots.size()] += u(gen);
    EXPECT_TRUE(no_decrease(h3_constants(b, act, 0.43))) << "case " << c;
  }
}

TEST(H3, ActivationTooNarrowIsAConfigError) {
  NetworkSpec net = zero_network(0.7);
  net.activation.f.pop_back();
  net.activation.lipschitz.pop_back();
  const CoefficientBounds b = bounds_of(zero_network(0.7), TimeScale::continuum(0.1));
  try {
    h3_constants(b, net.activation, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(Hypotheses, ExampleReport) {
  const Loaded& l = example();
  const HypothesisReport rep = check_hypotheses(l.cfg.network, l.cfg.timescale, l.bounds);
  EXPECT_TRUE(rep.h1.pass);
  EXPECT_TRUE(rep.h2.pass);
  EXPECT_TRUE(rep.h3.pass);
  // The distributed windows of the example swing faster than unit slope.
  EXPECT_FALSE(rep.h4.pass);
  EXPECT_LT(rep.h4_sigma_margin.minCoeff(), 0.0);
}

TEST(Hypotheses, LipschitzViolationIsFlagged) {
  NetworkSpec net = zero_network(0.7);
  net.activation.f[0] = parse("2*x");
  const auto ts = TimeScale::continuum(0.1);
  const HypothesisReport rep = check_hypotheses(net, ts, bounds_of(net, ts));
  EXPECT_FALSE(rep.h2.pass);
}

TEST(Hypotheses, NonRegressiveLeakageFailsOnGrid) {
  NetworkSpec net = zero_network(1.5);
  const auto grid = TimeScale::uniform_grid(1.0);
  const HypothesisReport rep = check_hypotheses(net, grid, bounds_of(net, grid));
  EXPECT_FALSE(rep.h1.pass);
}

TEST(Picard, ConstantInputFixedPoint) {
  const Loaded l = load("constant_input.json");
  const HypothesisReport rep = check_h3(l.bounds, l.cfg.network.activation, l.cfg.network.r);
  PicardOptions opts;
  opts.t_hi = 5.0;
  // Continuum: the trapezoid rule shifts the fixed point by (h alpha)^2 / 12 relative.
  const double h = l.cfg.timescale.resolution();
  const PicardResult res = picard_solve(l.cfg.timescale, l.cfg.network, rep, opts);
  ASSERT_TRUE(res.converged);
  // A grid sums exactly, so the fixed point is I / alpha to rounding.
  const PicardResult grid = picard_solve(TimeScale::uniform_grid(0.5), l.cfg.network, rep, opts);
  ASSERT_TRUE(grid.converged);
  const double x_star = 0.4 / 0.8, y_star = 0.2 / 0.5;
  for (const PicardResult* r : {&res, &grid}) {
    const bool dense = r == &res;
    const double tol_x = dense ? 2.0 * x_star * std::pow(h * 0.8, 2) / 12.0 : 1e-8;
    const double tol_y = dense ? 2.0 * y_star * std::pow(h * 0.5, 2) / 12.0 : 1e-8;
    for (std::size_t k = 0; k < r->solution.size(); ++k) {
      if (r->solution.grid[k].t < 0.0) continue;
      EXPECT_NEAR(r->solution.x(0, static_cast<Index>(k)), x_star, tol_x);
      EXPECT_NEAR(r->solution.y(0, static_cast<Index>(k)), y_star, tol_y);
    }
  }
}

TEST(Picard, ExampleContractsOnBothScales) {
  for (const char* name : {"hobam_3x2_grid.json", "hobam_3x2.json"}) {
    const Loaded l = load(name, 200.0);
    const HypothesisReport rep = check_h3(l.bounds, l.cfg.network.activation, l.cfg.network.r);
    PicardOptions opts;
    opts.t_hi = 20.0;
    const PicardResult res = picard_solve(l.cfg.timescale, l.cfg.network, rep, opts);
    EXPECT_LE(res.differences.size(), 15u) << name;
    for (std::size_t k = 3; k < res.differences.size(); ++k) {
      EXPECT_LE(res.differences[k], (rep.kappa + 0.05) * res.differences[k - 1]) << name << " " << k;
    }
  }
}

TEST(Picard, ZeroNetworkStopsAtOnce) {
  const NetworkSpec net = zero_network(0.7);
  const auto ts = TimeScale::continuum(0.05);
  const HypothesisReport rep = check_h3(bounds_of(net, ts), net.activation, 1.0);
  PicardOptions opts;
  opts.t_hi = 3.0;
  const PicardResult res = picard_solve(ts, net, rep, opts);
  ASSERT_EQ(res.differences.size(), 1u);
  EXPECT_EQ(res.differences[0], 0.0);
  EXPECT_EQ(res.solution.x.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Picard, NoContraction) {
  const Loaded l = load("no_contraction.json");
  const HypothesisReport rep = check_h3(l.bounds, l.cfg.network.activation, l.cfg.network.r);
  EXPECT_GE(rep.kappa, 1.0);
  try {
    picard_solve(l.cfg.timescale, l.cfg.network, rep, PicardOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoContraction);
  }
}

TEST(Picard, IterationCapIsReported) {
  const Loaded& l = example();
  const HypothesisReport rep = check_h3(l.bounds, l.cfg.network.activation, l.cfg.network.r);
  PicardOptions opts;
  opts.t_hi = 2.0;
  opts.max_iter = 2;
  try {
    picard_solve(TimeScale::continuum(0.05), l.cfg.network, rep, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MaxIterExceeded);
  }
}

TEST(Picard, GeometricDecayOnRandomPassingNetworks) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto ts = TimeScale::uniform_grid(0.5);
  int tried = 0;
  while (tried < 3) {
    NetworkSpec net = NetworkSpec::zeros(2, 2);
    for (auto& a : net.alpha) a = parse(std::to_string(0.8 + 0.1 * u(gen)) + " + 0.05*sin(t)");
    for (auto& c : net.c) c = parse(std::to_string(0.7 + 0.1 * u(gen)) + " + 0.05*cos(t)");
    for (ExprMatrix* m : {&net.D, &net.D_tau, &net.E, &net.E_tau}) {
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
          (*m)(i, j) = parse(std::to_string(0.08 * u(gen)) + "*sin(" + std::to_string(1.0 + u(gen)) + "*t)");
    }
    for (auto& e : net.I) e = parse(std::to_string(0.05 * u(gen)) + "*cos(t)");
    for (auto& e : net.J) e = parse(std::to_string(0.05 * u(gen)) + "*sin(t)");
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        net.delays.discrete(i, j) = Expr::constant(0.5 + 0.5 * std::abs(u(gen)));
    for (auto& e : net.delays.leakage_x) e = Expr::constant(0.1 * std::abs(u(gen)));
    const CoefficientBounds b = scan_bounds(net, ts, 0.0, 50.0, 0.5);
    net.delays.theta = b.theta();
    const HypothesisReport rep = check_h3(b, net.activation, 1.0);
    if (!rep.h3.pass) continue;
    ++tried;
    PicardOptions opts;
    opts.t_hi = 10.0;
    const PicardResult res = picard_solve(ts, net, rep, opts);
    for (std::size_t k = 3; k < res.differences.size(); ++k) {
      if (res.differences[k - 1] < 1e-13) break;
      EXPECT_LE(res.differences[k], (rep.kappa + 0.05) * res.differences[k - 1]);
    }
  }
}

TEST(GH, ZeroNetworkCertificate) {
  const NetworkSpec net = zero_network(0.71);
  const auto ts = TimeScale::continuum(0.1);
  const CoefficientBounds b = bounds_of(net, ts);
  const GHValues v = gh_functions(b, net.activation, 1.0, 0.0, 0.3);
  EXPECT_NEAR(v.G(0), 0.71 - 0.3, 1e-12);
  const StabilityCertificate cert = decay_certificate(b, net.activation, 1.0, ts);
  EXPECT_NEAR(cert.a, 0.71, 1e-9);
  EXPECT_NEAR(cert.gamma, 0.9 * 0.71, 1e-9);
  EXPECT_TRUE(std::isinf(cert.K));
  EXPECT_FALSE(cert.warnings.empty());
  EXPECT_NEAR(cert.beta_x.minCoeff(), 0.71, 1e-12);
  EXPECT_NEAR(cert.beta_y.minCoeff(), 0.71, 1e-12);
}

TEST(GH, EventuallyNegative) {
  const Loaded& l = example();
  const GHValues v = gh_functions(l.bounds, l.cfg.network.activation, l.cfg.network.r, 0.0, 50.0);
  EXPECT_LT(v.G.maxCoeff(), 0.0);
  EXPECT_LT(v.H.maxCoeff(), 0.0);
  EXPECT_LT(v.G_bar.maxCoeff(), 0.0);
  EXPECT_LT(v.H_bar.maxCoeff(), 0.0);
}

TEST(GH, ExampleCertificate) {
  const Loaded& l = example();
  const StabilityCertificate cert =
      decay_certificate(l.bounds, l.cfg.network.activation, l.cfg.network.r, l.cfg.timescale);
  EXPECT_GT(cert.gamma, 0.0);
  EXPECT_LT(cert.gamma, cert.a);
  EXPECT_LT(cert.gamma, l.bounds.c_inf.minCoeff());
  EXPECT_GT(cert.K, 1.0);
  EXPECT_GT(cert.beta_x.minCoeff(), 0.0);
  EXPECT_GT(cert.beta_y.minCoeff(), 0.0);
  // Roots are the sign changes of each function.
  const GHValues at_root = gh_functions(l.bounds, l.cfg.network.activation, l.cfg.network.r, 0.0,
                                        cert.root_G(0));
  EXPECT_NEAR(at_root.G(0), 0.0, 1e-8);
}

TEST(GH, UnstableNetworkIsRejected) {
  const Loaded l = load("unstable.json");
  try {
    decay_certificate(l.bounds, l.cfg.network.activation, l.cfg.network.r, l.cfg.timescale);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotStable);
  }
}

TEST(GH, SafetyFractionRange) {
  const NetworkSpec net = zero_network(0.71);
  const auto ts = TimeScale::continuum(0.1);
  EXPECT_THROW(decay_certificate(bounds_of(net, ts), net.activation, 1.0, ts, 1.0), Error);
}

TEST(Convergence, AmplifiedCouplingsGoNegative) {
  const Loaded l = load("amplified.json", 50.0);
  const ConvergenceMargins m = convergence_condition(l.bounds, l.cfg.network.activation, l.cfg.network.r);
  EXPECT_LT(m.x.minCoeff(), 0.0);
  EXPECT_LT(m.y.minCoeff(), 0.0);
}

namespace {

struct Pair {
  Trajectory a, b;
};

Pair two_runs(const TimeScale& ts, const NetworkSpec& net, const InitialHistory& ha,
              const InitialHistory& hb, double horizon) {
  return {simulate(ts, net, initial_trajectory(ts, ha, net.delays.theta), horizon),
          simulate(ts, net, initial_trajectory(ts, hb, net.delays.theta), horizon)};
}

}  // namespace

TEST(Envelope, IdenticalHistoriesGiveZeroDistance) {
  const Loaded l = load("hobam_3x2_grid.json");
  const NetworkSpec& net = l.cfg.network;
  const auto h = random_history(3, 2, 4, 0.5);
  const Pair p = two_runs(l.cfg.timescale, net, h, h, 20.0);
  const StabilityCertificate cert = decay_certificate(l.bounds, net.activation, net.r, l.cfg.timescale);
  const EnvelopeReport env = envelope_check(p.a, p.b, cert, l.cfg.timescale, 0.0);
  EXPECT_EQ(env.fraction_satisfied, 1.0);
  for (double d : env.d) EXPECT_EQ(d, 0.0);
}

TEST(Envelope, ScalarRateRecovered) {
  NetworkSpec net = NetworkSpec::zeros(1, 1);
  net.alpha[0] = Expr::constant(0.6);
  net.c[0] = Expr::constant(0.6);
  const auto ts = TimeScale::continuum(1e-2);
  const Pair p = two_runs(ts, net, constant_history(VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 1.0)),
                          constant_history(VectorXd::Constant(1, -1.0), VectorXd::Zero(1)), 20.0);
  const StabilityCertificate cert = decay_certificate(bounds_of(net, ts), net.activation, 1.0, ts);
  const EnvelopeReport env = envelope_check(p.a, p.b, cert, ts, 0.0);
  EXPECT_NEAR(env.fitted_rate, 0.6, 0.05 * 0.6);
  EXPECT_EQ(env.fraction_satisfied, 1.0);
}

TEST(Envelope, ExampleOnGridHoldsEverywhere) {
  const Loaded l = load("hobam_3x2_grid.json");
  const NetworkSpec& net = l.cfg.network;
  const StabilityCertificate cert = decay_certificate(l.bounds, net.activation, net.r, l.cfg.timescale);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Pair p = two_runs(l.cfg.timescale, net, random_history(3, 2, seed, 0.5),
                            random_history(3, 2, seed + 100, 0.5), 50.0);
    const EnvelopeReport env = envelope_check(p.a, p.b, cert, l.cfg.timescale, 0.0);
    EXPECT_EQ(env.fraction_satisfied, 1.0) << seed;
  }
}

TEST(Lyapunov, IdenticalTrajectoriesGiveZero) {
  const Loaded l = load("hobam_3x2_grid.json");
  const auto h = random_history(3, 2, 8, 0.5);
  const Pair p = two_runs(l.cfg.timescale, l.cfg.network, h, h, 10.0);
  const LyapunovTerms v = lyapunov_eval(p.a, p.b, l.cfg.network, l.cfg.timescale, l.bounds, 5.0, true);
  EXPECT_EQ(v.V, 0.0);
}

TEST(Lyapunov, ReducesToStateDistanceWithoutDelays) {
  NetworkSpec net = zero_network(0.5);
  const auto ts = TimeScale::continuum(0.1);
  const Pair p = two_runs(ts, net, constant_history(VectorXd::Constant(2, 1.0), VectorXd::Constant(2, 2.0)),
                          constant_history(VectorXd::Constant(2, 0.5), VectorXd::Constant(2, -1.0)), 3.0);
  const LyapunovTerms v = lyapunov_eval(p.a, p.b, net, ts, bounds_of(net, ts), 2.0);
  const auto k = static_cast<Index>(p.a.index_of(2.0));
  const double want = (p.a.x.col(k) - p.b.x.col(k)).cwiseAbs().sum() +
                      (p.a.y.col(k) - p.b.y.col(k)).cwiseAbs().sum();
  EXPECT_NEAR(v.V, want, 1e-12);
  EXPECT_EQ(v.V2 + v.V3 + v.V4, 0.0);
}

TEST(Lyapunov, SingleWindowTermOnGrid) {
  NetworkSpec net = NetworkSpec::zeros(1, 1);
  net.alpha[0] = Expr::constant(0.5);
  net.c[0] = Expr::constant(0.5);
  net.D(0, 0) = Expr::constant(0.2);
  net.delays.discrete(0, 0) = Expr::constant(2.0);
  net.delays.theta = 2.0;
  const auto grid = TimeScale::uniform_grid(1.0);
  const Pair p = two_runs(grid, net, constant_history(VectorXd::Constant(1, 1.0), VectorXd::Zero(1)),
                          constant_history(VectorXd::Zero(1), VectorXd::Zero(1)), 6.0);
  const CoefficientBounds b = scan_bounds(net, grid, 0.0, 10.0, 1.0);
  const LyapunovTerms v = lyapunov_eval(p.a, p.b, net, grid, b, 4.0);
  // L (D + D_tau) times |x_a - x_b| summed over s = 2, 3.
  auto gap = [&](double s) {
    return std::abs(p.a.x(0, static_cast<Index>(p.a.index_of(s))) -
                    p.b.x(0, static_cast<Index>(p.b.index_of(s))));
  };
  const double want = 1.0 * 0.2 * (gap(2.0) + gap(3.0));
  EXPECT_NEAR(v.V2, want, 1e-15);
}

TEST(Lyapunov, NonIncreasingWhenWindowsAreConstant) {
  // Example network with fixed distributed windows, so every delay has slope below one.
  Loaded l = load("hobam_3x2.json", 100.0);
  NetworkSpec& net = l.cfg.network;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      net.delays.distributed(i, j) = Expr::constant(0.5);
      net.delays.derivative_distributed(i, j) = Expr::constant(0.5);
    }
  }
  const auto ts = TimeScale::continuum(1e-2);
  const CoefficientBounds b = scan_bounds(net, ts, 0.0, 100.0, 1e-2);
  net.delays.theta = b.theta();
  const Pair p = two_runs(ts, net, random_history(3, 2, 11, 0.5), random_history(3, 2, 12, 0.5), 30.0);
  const LyapunovFunctional V(p.a, p.b, net, ts, b);
  std::vector<double> vs;
  for (const auto& g : p.a.grid)
    if (g.t >= 0.0) vs.push_back(V.at(g.t).V);
  const double tol = 1e-6 * vs.front();
  std::size_t ok = 0;
  for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
    if (vs[k + 1] - vs[k] <= tol) ++ok;
    EXPECT_LE(vs[k + 1], vs.front() + tol);
  }
  EXPECT_GE(static_cast<double>(ok) / static_cast<double>(vs.size() - 1), 0.99);
}

TEST(Lyapunov, MismatchedGridsAreRejected) {
  const NetworkSpec net = zero_network(0.5);
  const auto ts = TimeScale::continuum(0.1);
  const auto h = constant_history(VectorXd::Ones(2), VectorXd::Ones(2));
  const Trajectory a = simulate(ts, net, initial_trajectory(ts, h, 0.0), 2.0);
  const Trajectory b = simulate(ts, net, initial_trajectory(ts, h, 0.0), 3.0);
  try {
    lyapunov_eval(a, b, net, ts, bounds_of(net, ts), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}

TEST(Dini, Examples) {
  EXPECT_EQ(dini_derivative([](double) { return 3.0; }, TimeScale::continuum(1e-3), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(dini_derivative([](double t) { return t; }, TimeScale::uniform_grid(1.0), 4.0), 1.0);
  EXPECT_NEAR(dini_derivative([](double t) { return std::exp(-t); }, TimeScale::continuum(1e-3), 0.0),
              -1.0, 1e-3);
}
