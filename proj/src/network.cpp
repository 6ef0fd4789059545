#include "tshobam/network.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace tshobam {

namespace {

void expect(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ConfigError, what);
}

void expect_size(const std::vector<Expr>& v, std::size_t size, const char* name) {
  expect(v.size() == size, std::string(name) + " must have " + std::to_string(size) + " entries");
}

void expect_shape(const ExprMatrix& a, std::size_t rows, std::size_t cols, const std::string& name) {
  expect(a.rows() == rows && a.cols() == cols,
         name + " must be " + std::to_string(rows) + " x " + std::to_string(cols));
}

Eigen::VectorXd clamped(const std::vector<Expr>& v, double t) {
  return eval(v, t).cwiseMax(0.0);
}

}  // namespace

Eigen::MatrixXd ExprMatrix::eval(double t) const {
  Eigen::MatrixXd out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c)(t);
  }
  return out;
}

Eigen::VectorXd eval(const std::vector<Expr>& v, double t) {
  Eigen::VectorXd out(v.size());
  for (std::size_t q = 0; q < v.size(); ++q) out(q) = v[q](t);
  return out;
}

double ActivationSpec::value_at_zero(std::size_t q) const { return std::abs(f[q](0.0)); }

void NetworkSpec::validate() const {
  expect(n > 0 && m > 0, "n and m must be positive");
  expect_size(alpha, n, "alpha");
  expect_size(c, m, "c");
  expect_size(I, n, "I");
  expect_size(J, m, "J");
  const std::pair<const ExprMatrix*, const char*> pairs[] = {
      {&D, "D"}, {&D_tau, "D_tau"}, {&D_bar, "D_bar"}, {&D_tilde, "D_tilde"},
      {&E, "E"}, {&E_tau, "E_tau"}, {&E_bar, "E_bar"}, {&E_tilde, "E_tilde"},
  };
  for (const auto& [a, name] : pairs) expect_shape(*a, n, m, name);
  expect(T.size() == n, "T must have n slices");
  for (const auto& slice : T) expect_shape(slice, m, m, "T slice");
  expect(T_bar.size() == m, "T_bar must have m slices");
  for (const auto& slice : T_bar) expect_shape(slice, n, n, "T_bar slice");
  expect_size(activation.f, width(), "activation.f");
  expect(activation.lipschitz.size() == width(), "activation.lipschitz must have max(n, m) entries");
  for (double L : activation.lipschitz) expect(L >= 0.0, "Lipschitz constants must be non-negative");
  expect_size(delays.leakage_x, n, "eta");
  expect_size(delays.leakage_y, m, "varsigma");
  expect_shape(delays.discrete, n, m, "tau");
  expect_shape(delays.distributed, n, m, "sigma");
  expect_shape(delays.derivative_distributed, n, m, "xi");
  expect_size(delays.second_order, width(), "chi");
  expect(delays.theta >= 0.0, "theta must be non-negative");
  expect(r > 0.0, "r must be positive");
}

NetworkSpec NetworkSpec::zeros(std::size_t n, std::size_t m) {
  NetworkSpec net;
  net.n = n;
  net.m = m;
  net.alpha.assign(n, Expr());
  net.c.assign(m, Expr());
  net.I.assign(n, Expr());
  net.J.assign(m, Expr());
  for (ExprMatrix* a : {&net.D, &net.D_tau, &net.D_bar, &net.D_tilde, &net.E, &net.E_tau,
                        &net.E_bar, &net.E_tilde}) {
    *a = ExprMatrix(n, m);
  }
  net.T.assign(n, ExprMatrix(m, m));
  net.T_bar.assign(m, ExprMatrix(n, n));
  const std::size_t w = net.width();
  net.activation.f.assign(w, parse("x"));
  net.activation.lipschitz.assign(w, 1.0);
  net.delays.leakage_x.assign(n, Expr());
  net.delays.leakage_y.assign(m, Expr());
  net.delays.discrete = ExprMatrix(n, m);
  net.delays.distributed = ExprMatrix(n, m);
  net.delays.derivative_distributed = ExprMatrix(n, m);
  net.delays.second_order.assign(w, Expr());
  return net;
}

CoefficientSnapshot CoefficientSnapshot::at(const NetworkSpec& net, double t) {
  CoefficientSnapshot s;
  s.t = t;
  s.alpha = eval(net.alpha, t);
  s.c = eval(net.c, t);
  s.I = eval(net.I, t);
  s.J = eval(net.J, t);
  s.D = net.D.eval(t);
  s.D_tau = net.D_tau.eval(t);
  s.D_bar = net.D_bar.eval(t);
  s.D_tilde = net.D_tilde.eval(t);
  s.E = net.E.eval(t);
  s.E_tau = net.E_tau.eval(t);
  s.E_bar = net.E_bar.eval(t);
  s.E_tilde = net.E_tilde.eval(t);
  s.T.reserve(net.T.size());
  for (const auto& slice : net.T) s.T.push_back(slice.eval(t));
  s.T_bar.reserve(net.T_bar.size());
  for (const auto& slice : net.T_bar) s.T_bar.push_back(slice.eval(t));
  s.eta = clamped(net.delays.leakage_x, t);
  s.varsigma = clamped(net.delays.leakage_y, t);
  s.chi = clamped(net.delays.second_order, t);
  s.tau = net.delays.discrete.eval(t).cwiseMax(0.0);
  s.sigma = net.delays.distributed.eval(t).cwiseMax(0.0);
  s.xi = net.delays.derivative_distributed.eval(t).cwiseMax(0.0);
  return s;
}

}  // namespace tshobam
