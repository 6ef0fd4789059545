#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tshobam/analysis.hpp"

namespace tshobam {

namespace {

using Eigen::Index;

constexpr double kInf = std::numeric_limits<double>::infinity();

// value / floor with 0 / 0 = 0 and x / 0 = inf.
double ratio(double value, double floor) {
  if (floor > 0.0) return value / floor;
  return value == 0.0 ? 0.0 : kInf;
}

double layer_max(const Eigen::VectorXd& K, const Eigen::VectorXd& sup, const Eigen::VectorXd& inf) {
  double out = 0.0;
  for (Index q = 0; q < K.size(); ++q) {
    out = std::max(out, ratio(K(q), inf(q)));
    out = std::max(out, (1.0 + ratio(sup(q), inf(q))) * K(q));
  }
  return out;
}

void require_width(const ActivationSpec& act, Index n, Index m) {
  if (static_cast<Index>(act.size()) < std::max(n, m)) {
    throw Error(ErrorKind::ConfigError, "activation family smaller than max(n, m)");
  }
}

std::string label(const char* family, Index i, Index j) {
  std::ostringstream os;
  os << family << '[' << i + 1 << "][" << j + 1 << ']';
  return os.str();
}

}  // namespace

H3Constants h3_constants(const CoefficientBounds& b, const ActivationSpec& act, double r) {
  const Index n = b.alpha_sup.size();
  const Index m = b.c_sup.size();
  require_width(act, n, m);
  const ActivationConstants ac = ActivationConstants::of(act);
  const Eigen::VectorXd g = ac.g(r);

  H3Constants out;
  out.M.resize(n);
  out.M_bar.resize(n);
  for (Index i = 0; i < n; ++i) {
    double M = b.alpha_sup(i) * b.eta(i) * r;
    double M_bar = b.alpha_sup(i) * b.eta(i);
    for (Index j = 0; j < m; ++j) {
      const double w = b.D(i, j) + b.D_tau(i, j) + b.D_bar(i, j) * b.sigma(i, j) +
                       b.D_tilde(i, j) * b.xi(i, j);
      M += w * g(j);
      M_bar += w * ac.L(j);
    }
    const Eigen::MatrixXd& T = b.T[static_cast<std::size_t>(i)];
    for (Index j = 0; j < m; ++j) {
      for (Index k = 0; k < m; ++k) {
        M += T(j, k) * g(k) * g(j);
        M_bar += (T(j, k) + T(k, j)) * g(k);
      }
    }
    out.M(i) = M + b.I(i);
    out.M_bar(i) = M_bar;
  }

  out.N.resize(m);
  out.N_bar.resize(m);
  for (Index j = 0; j < m; ++j) {
    double N = b.c_sup(j) * b.varsigma(j) * r;
    double N_bar = b.c_sup(j) * b.varsigma(j);
    for (Index i = 0; i < n; ++i) {
      const double w = b.E(i, j) + b.E_tau(i, j) + b.E_bar(i, j) * b.sigma(i, j) +
                       b.E_tilde(i, j) * b.xi(i, j);
      N += w * g(i);
      N_bar += w * ac.L(i);
    }
    const Eigen::MatrixXd& T = b.T_bar[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < n; ++k) {
        N += T(i, k) * g(k) * g(i);
        N_bar += (T(i, k) + T(k, i)) * g(k);
      }
    }
    out.N(j) = N + b.J(j);
    out.N_bar(j) = N_bar;
  }
  return out;
}

HypothesisReport check_h3(const CoefficientBounds& b, const ActivationSpec& act, double r) {
  HypothesisReport rep;
  rep.bounds = b;
  rep.r = r;
  rep.constants = h3_constants(b, act, r);
  const H3Constants& k = rep.constants;
  rep.lhs_r = std::max(layer_max(k.M, b.alpha_sup, b.alpha_inf), layer_max(k.N, b.c_sup, b.c_inf));
  rep.lhs_1 = std::max(layer_max(k.M_bar, b.alpha_sup, b.alpha_inf),
                       layer_max(k.N_bar, b.c_sup, b.c_inf));
  rep.kappa = rep.lhs_1;
  rep.h3.pass = rep.lhs_r <= r && rep.lhs_1 <= 1.0;
  if (rep.lhs_r > r) rep.h3.notes.push_back("first maximum exceeds r");
  if (rep.lhs_1 > 1.0) rep.h3.notes.push_back("second maximum exceeds 1");
  return rep;
}

HypothesisReport check_hypotheses(const NetworkSpec& net, const TimeScale& ts,
                                  const CoefficientBounds& b) {
  HypothesisReport rep = check_h3(b, net.activation, net.r);
  const TimeScale scan = ts.with_resolution(b.density);
  const auto n = static_cast<Index>(net.n);
  const auto m = static_cast<Index>(net.m);

  // H1: -alpha and -c positively regressive, strictly positive lower bounds.
  rep.h1.pass = true;
  auto leak = [&](const std::vector<Expr>& v, const Eigen::VectorXd& inf, const char* name) {
    for (std::size_t q = 0; q < v.size(); ++q) {
      const Expr& e = v[q];
      const auto cls = is_regressive(scan, [&e](double t) { return -e(t); }, b.window_lo,
                                     b.window_hi);
      if (cls != Regressivity::PositivelyRegressive) {
        rep.h1.pass = false;
        rep.h1.notes.push_back(std::string("-") + name + "[" + std::to_string(q + 1) +
                               "] is not positively regressive");
      }
      if (!(inf(static_cast<Index>(q)) > 0.0)) {
        rep.h1.pass = false;
        rep.h1.notes.push_back(std::string(name) + "[" + std::to_string(q + 1) +
                               "] has zero infimum");
      }
    }
  };
  leak(net.alpha, b.alpha_inf, "alpha");
  leak(net.c, b.c_inf, "c");
  const bool finite = std::isfinite(rep.lhs_r) && std::isfinite(b.theta()) &&
                      b.I.allFinite() && b.J.allFinite();
  if (!finite) {
    rep.h1.pass = false;
    rep.h1.notes.push_back("unbounded coefficient on the scan window");
  }
  if (b.min_raw_delay < 0.0) {
    rep.h1.notes.push_back("some delay is negative on the scan window and is clamped at 0");
  }

  // H2: positive Lipschitz constants that dominate sampled slopes.
  rep.h2.pass = true;
  for (std::size_t q = 0; q < net.activation.size(); ++q) {
    const double L = net.activation.lipschitz[q];
    const std::string tag = "f[" + std::to_string(q + 1) + "]";
    if (!(L > 0.0)) {
      rep.h2.pass = false;
      rep.h2.notes.push_back(tag + " Lipschitz constant is not positive");
      continue;
    }
    double slope = 0.0;
    double prev = net.activation(q, -10.0);
    for (int s = 1; s <= 2000; ++s) {
      const double v = -10.0 + 0.01 * s;
      const double cur = net.activation(q, v);
      slope = std::max(slope, std::abs(cur - prev) / 0.01);
      prev = cur;
    }
    if (slope > L * (1.0 + 1e-9)) {
      rep.h2.pass = false;
      std::ostringstream os;
      os << tag << " sampled slope " << slope << " exceeds L = " << L;
      rep.h2.notes.push_back(os.str());
    }
  }

  // H4: 1 - d/dt of the distributed delays stays away from 0.
  const auto grid = enumerate_grid(scan, b.window_lo, b.window_hi);
  auto margin = [&grid](const Expr& e) {
    if (e.is_constant() || grid.size() < 2) return 1.0;
    double out = std::numeric_limits<double>::infinity();
    double prev = e(grid[0].t);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double cur = e(grid[k].t);
      out = std::min(out, 1.0 - (cur - prev) / (grid[k].t - grid[k - 1].t));
      prev = cur;
    }
    return out;
  };
  rep.h4.pass = true;
  rep.h4_sigma_margin.resize(n, m);
  rep.h4_xi_margin.resize(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      rep.h4_sigma_margin(i, j) = margin(net.delays.distributed(ui, uj));
      rep.h4_xi_margin(i, j) = margin(net.delays.derivative_distributed(ui, uj));
      if (!(rep.h4_sigma_margin(i, j) > 0.0)) {
        rep.h4.pass = false;
        rep.h4.notes.push_back(label("sigma", i, j) + ": inf of 1 - derivative is not positive");
      }
      if (!(rep.h4_xi_margin(i, j) > 0.0)) {
        rep.h4.pass = false;
        rep.h4.notes.push_back(label("xi", i, j) + ": inf of 1 - derivative is not positive");
      }
    }
  }
  rep.h4.notes.push_back("graininess ratio condition not checked");
  return rep;
}

ConvergenceMargins convergence_condition(const CoefficientBounds& b, const ActivationSpec& act,
                                         double r) {
  const Index n = b.alpha_sup.size();
  const Index m = b.c_sup.size();
  require_width(act, n, m);
  const ActivationConstants ac = ActivationConstants::of(act);
  const Eigen::VectorXd g = ac.g(r);
  const Eigen::VectorXd& L = ac.L;

  ConvergenceMargins out;
  out.x.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd& T = b.T[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (Index j = 0; j < m; ++j) {
      double inner = b.D(i, j) + b.D_tau(i, j) + b.D_bar(i, j) * b.sigma(i, j) +
                     b.D_tilde(i, j) * b.xi(i, j);
      double tl = 0.0;
      for (Index k = 0; k < m; ++k) {
        inner += T(j, k) * g(k);
        tl += T(j, k) * L(k);
      }
      sum += L(j) * inner + g(j) * tl;
    }
    out.x(i) = b.alpha_inf(i) - sum;
  }
  out.y.resize(m);
  for (Index j = 0; j < m; ++j) {
    const Eigen::MatrixXd& T = b.T_bar[static_cast<std::size_t>(j)];
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      double inner = b.E(i, j) + b.E_tau(i, j) + b.E_bar(i, j) * b.sigma(i, j) +
                     b.E_tilde(i, j) * b.xi(i, j);
      double tl = 0.0;
      for (Index k = 0; k < n; ++k) {
        inner += T(i, k) * g(k);
        tl += T(i, k) * L(k);
      }
      sum += L(i) * inner + g(i) * tl;
    }
    out.y(j) = b.c_inf(j) - sum;
  }
  return out;
}

}  // namespace tshobam
