#include <algorithm>
#include <cmath>
#include <limits>

#include "tshobam/analysis.hpp"

namespace tshobam {

namespace {

using Eigen::Index;

struct Scanner {
  const std::vector<GridPoint>& grid;
  double min_raw = std::numeric_limits<double>::infinity();

  ScanBounds abs_bounds(const Expr& e) {
    if (e.is_constant()) {
      const double v = std::abs(e(0.0));
      return {v, v};
    }
    ScanBounds out{std::numeric_limits<double>::infinity(), 0.0};
    for (const auto& g : grid) {
      const double v = std::abs(e(g.t));
      out.inf = std::min(out.inf, v);
      out.sup = std::max(out.sup, v);
    }
    return out;
  }

  double delay_sup(const Expr& e) {
    if (e.is_constant()) {
      const double v = e(0.0);
      min_raw = std::min(min_raw, v);
      return std::abs(v);
    }
    double sup = 0.0;
    for (const auto& g : grid) {
      const double v = e(g.t);
      min_raw = std::min(min_raw, v);
      sup = std::max(sup, std::abs(v));
    }
    return sup;
  }

  Eigen::VectorXd sups(const std::vector<Expr>& v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    for (std::size_t q = 0; q < v.size(); ++q) out(static_cast<Index>(q)) = abs_bounds(v[q]).sup;
    return out;
  }

  Eigen::MatrixXd sups(const ExprMatrix& a) {
    Eigen::MatrixXd out(static_cast<Index>(a.rows()), static_cast<Index>(a.cols()));
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        out(static_cast<Index>(r), static_cast<Index>(c)) = abs_bounds(a(r, c)).sup;
      }
    }
    return out;
  }

  Eigen::VectorXd delay_sups(const std::vector<Expr>& v) {
    Eigen::VectorXd out(static_cast<Index>(v.size()));
    for (std::size_t q = 0; q < v.size(); ++q) out(static_cast<Index>(q)) = delay_sup(v[q]);
    return out;
  }

  Eigen::MatrixXd delay_sups(const ExprMatrix& a) {
    Eigen::MatrixXd out(static_cast<Index>(a.rows()), static_cast<Index>(a.cols()));
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        out(static_cast<Index>(r), static_cast<Index>(c)) = delay_sup(a(r, c));
      }
    }
    return out;
  }
};

double max_or_zero(const Eigen::MatrixXd& a) { return a.size() == 0 ? 0.0 : a.maxCoeff(); }

}  // namespace

double CoefficientBounds::theta() const {
  return std::max({max_or_zero(eta), max_or_zero(varsigma), max_or_zero(chi), max_or_zero(tau),
                   max_or_zero(sigma), max_or_zero(xi)});
}

CoefficientBounds scan_bounds(const NetworkSpec& net, const TimeScale& ts, double lo, double hi,
                              double density) {
  const auto grid = enumerate_grid(ts.with_resolution(density), lo, hi);
  Scanner s{grid};
  CoefficientBounds b;
  b.window_lo = lo;
  b.window_hi = hi;
  b.density = ts.kind() == ScaleKind::UniformGrid ? ts.step() : density;

  const auto n = static_cast<Index>(net.n);
  const auto m = static_cast<Index>(net.m);
  b.alpha_sup.resize(n);
  b.alpha_inf.resize(n);
  for (Index i = 0; i < n; ++i) {
    const ScanBounds sb = s.abs_bounds(net.alpha[static_cast<std::size_t>(i)]);
    b.alpha_sup(i) = sb.sup;
    b.alpha_inf(i) = sb.inf;
  }
  b.c_sup.resize(m);
  b.c_inf.resize(m);
  for (Index j = 0; j < m; ++j) {
    const ScanBounds sb = s.abs_bounds(net.c[static_cast<std::size_t>(j)]);
    b.c_sup(j) = sb.sup;
    b.c_inf(j) = sb.inf;
  }
  b.D = s.sups(net.D);
  b.D_tau = s.sups(net.D_tau);
  b.D_bar = s.sups(net.D_bar);
  b.D_tilde = s.sups(net.D_tilde);
  b.E = s.sups(net.E);
  b.E_tau = s.sups(net.E_tau);
  b.E_bar = s.sups(net.E_bar);
  b.E_tilde = s.sups(net.E_tilde);
  for (const auto& slice : net.T) b.T.push_back(s.sups(slice));
  for (const auto& slice : net.T_bar) b.T_bar.push_back(s.sups(slice));
  b.I = s.sups(net.I);
  b.J = s.sups(net.J);
  b.eta = s.delay_sups(net.delays.leakage_x);
  b.varsigma = s.delay_sups(net.delays.leakage_y);
  b.chi = s.delay_sups(net.delays.second_order);
  b.tau = s.delay_sups(net.delays.discrete);
  b.sigma = s.delay_sups(net.delays.distributed);
  b.xi = s.delay_sups(net.delays.derivative_distributed);
  b.min_raw_delay = std::isfinite(s.min_raw) ? s.min_raw : 0.0;
  return b;
}

ActivationConstants ActivationConstants::of(const ActivationSpec& act) {
  ActivationConstants out;
  const auto w = static_cast<Index>(act.size());
  out.L.resize(w);
  out.f0.resize(w);
  for (Index q = 0; q < w; ++q) {
    out.L(q) = act.lipschitz[static_cast<std::size_t>(q)];
    out.f0(q) = act.value_at_zero(static_cast<std::size_t>(q));
  }
  return out;
}

}  // namespace tshobam
