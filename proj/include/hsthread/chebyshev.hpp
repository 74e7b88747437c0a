#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hsthread {

/// Chebyshev–Gauss–Lobatto collocation on I = [−1, 1].
///
/// Nodes are y_j = cos(πj/N), j = 0..N, so y_0 = 1 (the upper boundary Γ₊)
/// and y_N = −1. All matrices act on nodal values and are exact for
/// polynomials of degree ≤ N.
class Chebyshev {
 public:
  explicit Chebyshev(int order);

  int order() const { return n_; }
  int size() const { return n_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  const Eigen::MatrixXd& diff() const { return d1_; }
  const Eigen::MatrixXd& diff2() const { return d2_; }
  /// Nodal values -> coefficients c_k of Σ c_k T_k.
  const Eigen::MatrixXd& to_coeffs() const { return to_coeffs_; }
  /// u^T G v = ∫_I u v dy for the polynomial interpolants of u and v.
  const Eigen::MatrixXd& l2_gram() const { return gram_; }
  /// Clenshaw–Curtis weights.
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Matrix Q with (Qv)_j = ∫_a^{y_j} v(s) ds, computed exactly on the
  /// degree-(N+1) antiderivative of the interpolant.
  Eigen::MatrixXd integration_matrix(double a) const;

  /// Interpolant of nodal values evaluated at an arbitrary y ∈ [−1, 1].
  double evaluate(const Eigen::VectorXd& values, double y) const;

 private:
  int n_;
  std::vector<double> nodes_;
  Eigen::MatrixXd d1_, d2_, to_coeffs_, gram_;
  Eigen::VectorXd weights_;
};

}  // namespace hsthread
