#include "tshobam/model.hpp"

namespace tshobam {

namespace {

using Eigen::Index;

auto idx(Index q) { return static_cast<std::size_t>(q); }

// Every term of both equations except leakage.
LayerVectors coupling(const TimeScale& ts, const NetworkSpec& net, const History& h,
                      const CoefficientSnapshot& s) {
  const double t = s.t;
  const auto n = static_cast<Index>(net.n);
  const auto m = static_cast<Index>(net.m);

  Eigen::VectorXd fy_now(m), fy_chi(m), fx_now(n), fx_chi(n);
  for (Index j = 0; j < m; ++j) {
    fy_now(j) = h.value(Channel::Y, idx(j), t, true);
    fy_chi(j) = h.value(Channel::Y, idx(j), delayed_time(ts, net.delays, t, s.chi(j)), true);
  }
  for (Index i = 0; i < n; ++i) {
    fx_now(i) = h.value(Channel::X, idx(i), t, true);
    fx_chi(i) = h.value(Channel::X, idx(i), delayed_time(ts, net.delays, t, s.chi(i)), true);
  }

  LayerVectors out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(m)};
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < m; ++j) {
      acc += s.D(i, j) * fy_now(j);
      const double lag = delayed_time(ts, net.delays, t, s.tau(i, j));
      acc += s.D_tau(i, j) * h.value(Channel::Y, idx(j), lag, true);
      if (s.D_bar(i, j) != 0.0) {
        acc += s.D_bar(i, j) * h.integral(Channel::Y, idx(j), t - s.sigma(i, j), t, true);
      }
      if (s.D_tilde(i, j) != 0.0) {
        acc += s.D_tilde(i, j) * h.integral(Channel::DY, idx(j), t - s.xi(i, j), t, true);
      }
    }
    acc += fy_chi.dot(s.T[idx(i)] * fy_chi);
    out.x(i) = acc + s.I(i);
  }
  for (Index j = 0; j < m; ++j) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      acc += s.E(i, j) * fx_now(i);
      const double lag = delayed_time(ts, net.delays, t, s.tau(i, j));
      acc += s.E_tau(i, j) * h.value(Channel::X, idx(i), lag, true);
      if (s.E_bar(i, j) != 0.0) {
        acc += s.E_bar(i, j) * h.integral(Channel::X, idx(i), t - s.sigma(i, j), t, true);
      }
      if (s.E_tilde(i, j) != 0.0) {
        acc += s.E_tilde(i, j) * h.integral(Channel::DX, idx(i), t - s.xi(i, j), t, true);
      }
    }
    acc += fx_chi.dot(s.T_bar[idx(j)] * fx_chi);
    out.y(j) = acc + s.J(j);
  }
  return out;
}

}  // namespace

double delayed_time(const TimeScale& ts, const DelaySpec& delays, double t, double delay) {
  if (delay <= 0.0) return t;
  const double s = t - delay;
  const double p = delays.projection == DelayProjection::Forward ? project_forward(ts, s)
                                                                 : project_backward(ts, s);
  return p > t ? t : p;
}

LayerVectors rhs(const TimeScale& ts, const NetworkSpec& net, const History& hist, double t) {
  return rhs(ts, net, hist, CoefficientSnapshot::at(net, t));
}

LayerVectors rhs(const TimeScale& ts, const NetworkSpec& net, const History& hist,
                 const CoefficientSnapshot& s) {
  LayerVectors out = coupling(ts, net, hist, s);
  const double t = s.t;
  for (Index i = 0; i < out.x.size(); ++i) {
    const double lag = delayed_time(ts, net.delays, t, s.eta(i));
    out.x(i) -= s.alpha(i) * hist.value(Channel::X, idx(i), lag);
  }
  for (Index j = 0; j < out.y.size(); ++j) {
    const double lag = delayed_time(ts, net.delays, t, s.varsigma(j));
    out.y(j) -= s.c(j) * hist.value(Channel::Y, idx(j), lag);
  }
  return out;
}

LayerVectors operator_FG(const TimeScale& ts, const NetworkSpec& net, const History& psi, double t) {
  return operator_FG(ts, net, psi, CoefficientSnapshot::at(net, t));
}

LayerVectors operator_FG(const TimeScale& ts, const NetworkSpec& net, const History& psi,
                         const CoefficientSnapshot& s) {
  LayerVectors out = coupling(ts, net, psi, s);
  const double t = s.t;
  for (Index i = 0; i < out.x.size(); ++i) {
    if (s.alpha(i) != 0.0 && s.eta(i) > 0.0) {
      out.x(i) += s.alpha(i) * psi.integral(Channel::DX, idx(i), t - s.eta(i), t);
    }
  }
  for (Index j = 0; j < out.y.size(); ++j) {
    if (s.c(j) != 0.0 && s.varsigma(j) > 0.0) {
      out.y(j) += s.c(j) * psi.integral(Channel::DY, idx(j), t - s.varsigma(j), t);
    }
  }
  return out;
}

}  // namespace tshobam
