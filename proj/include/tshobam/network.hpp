#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "tshobam/expr.hpp"

namespace tshobam {

/// Row-major grid of expressions.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Expr& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Expr& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Eigen::MatrixXd eval(double t) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Expr> data_;
};

Eigen::VectorXd eval(const std::vector<Expr>& v, double t);

/// Activation family f_q with Lipschitz constants. One family serves both
/// layers: the x-equation applies f_j to y_j, the y-equation applies f_i to x_i,
/// so it has max(n, m) members.
struct ActivationSpec {
  std::vector<Expr> f;
  std::vector<double> lipschitz;

  std::size_t size() const noexcept { return f.size(); }
  double operator()(std::size_t q, double v) const { return f[q](v); }
  /// |f_q(0)|
  double value_at_zero(std::size_t q) const;
};

enum class DelayProjection { Forward, Backward };

/// Delay functions. Discrete, distributed and derivative-distributed delays are
/// n x m and shared by both layers; second_order has max(n, m) members.
struct DelaySpec {
  std::vector<Expr> leakage_x;
  std::vector<Expr> leakage_y;
  ExprMatrix discrete;
  ExprMatrix distributed;
  ExprMatrix derivative_distributed;
  std::vector<Expr> second_order;
  /// Upper bound of every delay; also the length of the initial history.
  double theta = 0.0;
  /// How a delayed instant t - d that misses the time scale is mapped back onto it.
  DelayProjection projection = DelayProjection::Forward;
};

struct NetworkSpec {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Expr> alpha;
  std::vector<Expr> c;
  ExprMatrix D, D_tau, D_bar, D_tilde;
  ExprMatrix E, E_tau, E_bar, E_tilde;
  /// T[i](j, k): n tensors slices, each m x m, coupling y_k and y_j into x_i.
  std::vector<ExprMatrix> T;
  /// T_bar[j](i, k): m slices, each n x n, coupling x_k and x_i into y_j.
  std::vector<ExprMatrix> T_bar;
  std::vector<Expr> I;
  std::vector<Expr> J;
  ActivationSpec activation;
  DelaySpec delays;
  /// Candidate radius for the boundedness hypothesis.
  double r = 1.0;

  std::size_t width() const noexcept { return n > m ? n : m; }
  /// Throws ConfigError when a family has the wrong shape.
  void validate() const;
  /// All families sized for (n, m) and set to the constant 0; activation is
  /// the identity with Lipschitz constant 1.
  static NetworkSpec zeros(std::size_t n, std::size_t m);
};

/// Every coefficient and delay of a network evaluated at one instant.
/// Delays are clamped at 0.
struct CoefficientSnapshot {
  double t = 0.0;
  Eigen::VectorXd alpha, c, I, J;
  Eigen::MatrixXd D, D_tau, D_bar, D_tilde;
  Eigen::MatrixXd E, E_tau, E_bar, E_tilde;
  std::vector<Eigen::MatrixXd> T, T_bar;
  Eigen::VectorXd eta, varsigma, chi;
  Eigen::MatrixXd tau, sigma, xi;

  static CoefficientSnapshot at(const NetworkSpec& net, double t);
};

}  // namespace tshobam
