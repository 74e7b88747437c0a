#include "hsthread/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsthread/error.hpp"

namespace hsthread {

namespace {

// ∫_{-1}^{1} T_k dy
double integral_of_tk(int k) { return (k % 2 == 1) ? 0.0 : 2.0 / (1.0 - double(k) * k); }

}  // namespace

Chebyshev::Chebyshev(int order) : n_(order) {
  if (order < 2) throw DomainError("Chebyshev: order must be at least 2");
  const int N = n_;
  const double pi = std::numbers::pi;
  nodes_.resize(N + 1);
  for (int j = 0; j <= N; ++j) nodes_[j] = std::cos(pi * j / N);
  // Symmetrize so that paired nodes are exact negatives of each other.
  for (int j = 0; j <= N / 2; ++j) {
    const double v = 0.5 * (nodes_[j] - nodes_[N - j]);
    nodes_[j] = v;
    nodes_[N - j] = -v;
  }
  if (N % 2 == 0) nodes_[N / 2] = 0.0;

  d1_ = Eigen::MatrixXd::Zero(N + 1, N + 1);
  auto c = [N](int j) { return (j == 0 || j == N ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0); };
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      d1_(i, j) = c(i) / c(j) / (nodes_[i] - nodes_[j]);
    }
  }
  // Negative-sum trick: rows annihilate constants exactly.
  for (int i = 0; i <= N; ++i) d1_(i, i) = -d1_.row(i).sum();
  d2_ = d1_ * d1_;

  to_coeffs_.resize(N + 1, N + 1);
  for (int k = 0; k <= N; ++k) {
    const double gk = (k == 0 || k == N) ? 2.0 : 1.0;
    for (int j = 0; j <= N; ++j) {
      const double gj = (j == 0 || j == N) ? 0.5 : 1.0;
      to_coeffs_(k, j) = 2.0 / N / gk * gj * std::cos(pi * j * k / N);
    }
  }

  Eigen::MatrixXd g(N + 1, N + 1);
  for (int m = 0; m <= N; ++m)
    for (int k = 0; k <= N; ++k)
      g(m, k) = 0.5 * (integral_of_tk(m + k) + integral_of_tk(std::abs(m - k)));
  gram_ = to_coeffs_.transpose() * g * to_coeffs_;

  Eigen::VectorXd moments(N + 1);
  for (int k = 0; k <= N; ++k) moments(k) = integral_of_tk(k);
  weights_ = to_coeffs_.transpose() * moments;
}

Eigen::MatrixXd Chebyshev::integration_matrix(double a) const {
  const int N = n_;
  // Coefficients of the antiderivative (degree N+1) for each nodal unit vector.
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(N + 2, N + 1);
  for (int col = 0; col <= N; ++col) {
    Eigen::VectorXd cc = Eigen::VectorXd::Zero(N + 3);
    cc.head(N + 1) = to_coeffs_.col(col);
    for (int k = 1; k <= N + 1; ++k) {
      const double prev = (k == 1) ? 2.0 * cc(0) : cc(k - 1);
      b(k, col) = (prev - cc(k + 1)) / (2.0 * k);
    }
  }
  // Evaluate Σ b_k (T_k(y_j) − T_k(a)).
  const double ta = std::acos(std::clamp(a, -1.0, 1.0));
  Eigen::MatrixXd t(N + 1, N + 2);
  for (int j = 0; j <= N; ++j) {
    const double tj = std::acos(std::clamp(nodes_[j], -1.0, 1.0));
    for (int k = 0; k <= N + 1; ++k) t(j, k) = std::cos(k * tj) - std::cos(k * ta);
  }
  return t * b;
}

double Chebyshev::evaluate(const Eigen::VectorXd& values, double y) const {
  const Eigen::VectorXd c = to_coeffs_ * values;
  const double theta = std::acos(std::clamp(y, -1.0, 1.0));
  double v = 0.0;
  for (int k = 0; k <= n_; ++k) v += c(k) * std::cos(k * theta);
  return v;
}

}  // namespace hsthread
