#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tshobam/analysis.hpp"

namespace tshobam {

namespace {

using Eigen::Index;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTol = 1e-10;

// The bracketed sums shared by G and H (x side) at rate w; K*_i at w = 0.
Eigen::VectorXd x_mass(const CoefficientBounds& b, const ActivationConstants& ac,
                       const Eigen::VectorXd& g, double w) {
  const Index n = b.alpha_sup.size();
  const Index m = b.c_sup.size();
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    double s = b.alpha_sup(i) * b.eta(i) * std::exp(w * b.eta(i));
    for (Index j = 0; j < m; ++j) {
      s += b.D(i, j) * ac.L(j);
      s += b.D_tau(i, j) * ac.L(j) * std::exp(w * b.tau(i, j));
      s += b.D_bar(i, j) * ac.L(j) * b.sigma(i, j) * std::exp(w * b.sigma(i, j));
      s += b.D_tilde(i, j) * ac.L(j) * b.xi(i, j) * std::exp(w * b.xi(i, j));
    }
    const Eigen::MatrixXd& T = b.T[static_cast<std::size_t>(i)];
    for (Index j = 0; j < m; ++j) {
      for (Index k = 0; k < m; ++k) s += T(j, k) * g(k) * g(j);
    }
    out(i) = s;
  }
  return out;
}

Eigen::VectorXd y_mass(const CoefficientBounds& b, const ActivationConstants& ac,
                       const Eigen::VectorXd& g, double w) {
  const Index n = b.alpha_sup.size();
  const Index m = b.c_sup.size();
  Eigen::VectorXd out(m);
  for (Index j = 0; j < m; ++j) {
    double s = b.c_sup(j) * b.varsigma(j) * std::exp(w * b.varsigma(j));
    for (Index i = 0; i < n; ++i) {
      s += b.E(i, j) * ac.L(i);
      s += b.E_tau(i, j) * ac.L(i) * std::exp(w * b.tau(i, j));
      s += b.E_bar(i, j) * ac.L(i) * b.sigma(i, j) * std::exp(w * b.sigma(i, j));
      s += b.E_tilde(i, j) * ac.L(i) * b.xi(i, j) * std::exp(w * b.xi(i, j));
    }
    const Eigen::MatrixXd& T = b.T_bar[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < n; ++k) s += T(i, k) * g(k) * g(i);
    }
    out(j) = s;
  }
  return out;
}

template <class F>
double smallest_root(F&& f, double upper, const std::string& name) {
  const double f0 = f(0.0);
  if (!(f0 > 0.0)) {
    std::ostringstream os;
    os << name << "(0) = " << f0 << " is not positive";
    throw Error(ErrorKind::NotStable, os.str());
  }
  if (f(upper) > 0.0) {
    std::ostringstream os;
    os << name << " stays positive on [0, " << upper << "]";
    throw Error(ErrorKind::BracketFailure, os.str());
  }
  double lo = 0.0;
  double hi = upper;
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string indexed(const char* name, Index q) {
  return std::string(name) + "[" + std::to_string(q + 1) + "]";
}

}  // namespace

GHValues gh_functions(const CoefficientBounds& b, const ActivationSpec& act, double r,
                      double sup_graininess, double w, std::optional<double> beta) {
  const ActivationConstants ac = ActivationConstants::of(act);
  const Eigen::VectorXd g = ac.g(r);
  const Eigen::VectorXd kx = x_mass(b, ac, g, w);
  const Eigen::VectorXd ky = y_mass(b, ac, g, w);
  const double jump = std::exp(w * sup_graininess);

  GHValues out;
  const Index n = kx.size();
  const Index m = ky.size();
  out.G.resize(n);
  out.H.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double lo = b.alpha_inf(i);
    const double bt = beta.value_or(lo);
    out.G(i) = lo - w - jump * kx(i);
    out.H(i) = lo - w - b.alpha_sup(i) * std::exp(w * sup_graininess + lo - bt) * kx(i);
  }
  out.G_bar.resize(m);
  out.H_bar.resize(m);
  for (Index j = 0; j < m; ++j) {
    const double lo = b.c_inf(j);
    const double bt = beta.value_or(lo);
    out.G_bar(j) = lo - w - jump * ky(j);
    out.H_bar(j) = lo - w - b.c_sup(j) * std::exp(w * sup_graininess + lo - bt) * ky(j);
  }
  return out;
}

StabilityCertificate decay_certificate(const CoefficientBounds& b, const ActivationSpec& act, double r,
                                       const TimeScale& ts, double safety_fraction,
                                       std::optional<double> beta) {
  if (!(safety_fraction > 0.0 && safety_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigError, "safety_fraction must lie in (0, 1)");
  }
  StabilityCertificate cert;
  cert.safety_fraction = safety_fraction;
  cert.sup_graininess = ts.sup_graininess();
  const double mu = cert.sup_graininess;
  const Index n = b.alpha_sup.size();
  const Index m = b.c_sup.size();

  auto at = [&](double w) { return gh_functions(b, act, r, mu, w, beta); };

  cert.root_G.resize(n);
  cert.root_H.resize(n);
  double floor = kInf;
  for (Index i = 0; i < n; ++i) {
    const double upper = b.alpha_inf(i);
    cert.root_G(i) = smallest_root([&](double w) { return at(w).G(i); }, upper, indexed("G", i));
    cert.root_H(i) = smallest_root([&](double w) { return at(w).H(i); }, upper, indexed("H", i));
    floor = std::min(floor, upper);
  }
  cert.root_G_bar.resize(m);
  cert.root_H_bar.resize(m);
  for (Index j = 0; j < m; ++j) {
    const double upper = b.c_inf(j);
    cert.root_G_bar(j) =
        smallest_root([&](double w) { return at(w).G_bar(j); }, upper, indexed("G_bar", j));
    cert.root_H_bar(j) =
        smallest_root([&](double w) { return at(w).H_bar(j); }, upper, indexed("H_bar", j));
    floor = std::min(floor, upper);
  }

  cert.a = std::min({cert.root_G.minCoeff(), cert.root_H.minCoeff(), cert.root_G_bar.minCoeff(),
                     cert.root_H_bar.minCoeff()});
  cert.gamma = safety_fraction * std::min(cert.a, floor);

  const GHValues check = at(cert.gamma);
  if (!((check.G.array() > 0.0).all() && (check.H.array() > 0.0).all() &&
        (check.G_bar.array() > 0.0).all() && (check.H_bar.array() > 0.0).all())) {
    cert.warnings.push_back("some G or H function is not positive at gamma");
  }

  const ActivationConstants ac = ActivationConstants::of(act);
  const Eigen::VectorXd g = ac.g(r);
  cert.K_star = x_mass(b, ac, g, 0.0);
  cert.P_star = y_mass(b, ac, g, 0.0);
  cert.K = 0.0;
  for (Index i = 0; i < n; ++i) {
    cert.K = std::max(cert.K, cert.K_star(i) > 0.0 ? b.alpha_inf(i) / cert.K_star(i) : kInf);
  }
  for (Index j = 0; j < m; ++j) {
    cert.K = std::max(cert.K, cert.P_star(j) > 0.0 ? b.c_inf(j) / cert.P_star(j) : kInf);
  }
  if (!(cert.K > 1.0)) cert.warnings.push_back("K <= 1");
  if (std::isinf(cert.K)) cert.warnings.push_back("K is unbounded: some coupling mass vanishes");

  const ConvergenceMargins beta_margins = convergence_condition(b, act, r);
  cert.beta_x = beta_margins.x;
  cert.beta_y = beta_margins.y;
  if ((cert.beta_x.array() <= 0.0).any() || (cert.beta_y.array() <= 0.0).any()) {
    cert.warnings.push_back("some convergence margin is not positive");
  }
  return cert;
}

EnvelopeReport envelope_check(const Trajectory& a, const Trajectory& b,
                              const StabilityCertificate& cert, const TimeScale& ts, double t0) {
  (void)ts;
  if (a.size() != b.size() || a.n() != b.n() || a.m() != b.m()) {
    throw Error(ErrorKind::GridMismatch, "trajectories have different shapes");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.grid[k].t - b.grid[k].t) > TimeScale::tolerance(a.grid[k].t)) {
      throw Error(ErrorKind::GridMismatch, "trajectories sit on different grids");
    }
  }

  EnvelopeReport rep;
  rep.t0 = t0;
  const double tol = TimeScale::tolerance(t0);
  std::size_t start = a.size();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = (a.stacked(k) - b.stacked(k)).cwiseAbs().maxCoeff();
    if (a.grid[k].t <= t0 + tol) rep.initial_distance = std::max(rep.initial_distance, d);
    if (start == a.size() && a.grid[k].t >= t0 - tol) start = k;
  }
  if (start == a.size()) throw Error(ErrorKind::EmptyWindow, "no grid point at or after t0");

  double decay = 1.0;
  std::size_t ok = 0;
  for (std::size_t k = start; k < a.size(); ++k) {
    if (k > start) {
      const GridPoint& prev = a.grid[k - 1];
      decay *= prev.is_right_scattered ? 1.0 / (1.0 + prev.graininess * cert.gamma)
                                       : std::exp(-cert.gamma * (a.grid[k].t - prev.t));
    }
    const double d = (a.stacked(k) - b.stacked(k)).cwiseAbs().maxCoeff();
    const double bound = rep.initial_distance == 0.0 ? 0.0 : cert.K * decay * rep.initial_distance;
    rep.t.push_back(a.grid[k].t);
    rep.d.push_back(d);
    rep.bound.push_back(bound);
    if (d <= bound * (1.0 + 1e-9)) ++ok;
  }
  rep.fraction_satisfied = static_cast<double>(ok) / static_cast<double>(rep.t.size());

  const double dmax = *std::max_element(rep.d.begin(), rep.d.end());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, cnt = 0.0;
  for (std::size_t q = 0; q < rep.t.size(); ++q) {
    if (!(rep.d[q] > 1e-12 * dmax)) continue;
    const double y = std::log(rep.d[q]);
    st += rep.t[q];
    sy += y;
    stt += rep.t[q] * rep.t[q];
    sty += rep.t[q] * y;
    cnt += 1.0;
  }
  const double den = cnt * stt - st * st;
  if (cnt >= 2.0 && den > 0.0) rep.fitted_rate = -(cnt * sty - st * sy) / den;
  return rep;
}

}  // namespace tshobam
