#pragma once

#include <functional>
#include <vector>

#include "hsthread/chebyshev.hpp"
#include "hsthread/spectral.hpp"

namespace hsthread {

/// Shared, immutable collocation object for a given y-order.
const Chebyshev& chebyshev(int order);

/// Function on the reference strip Ω = S × (−1, 1),
/// w(x, y) = Σ_p w_p(y) e^{ipx}, stored as w_p(y_j) on the Chebyshev–Lobatto
/// nodes for p = 0..P (negative modes by Hermitian symmetry). Node j = 0 is the
/// upper boundary Γ₊ (y = 1), node j = N the lower boundary Γ₋.
class StripField {
 public:
  StripField() = default;
  StripField(int modes, int ny);

  static StripField constant_in_y(const PeriodicField& f, int ny);
  /// w(x, y) = f(x) g(y).
  static StripField separable(const PeriodicField& f, const std::function<double(double)>& g,
                              int ny);
  static StripField from_slices(const std::vector<PeriodicField>& slices);
  /// Nodal values laid out as values[j * nx + i] at x_i = 2πi/nx, y = y_j.
  static StripField from_nodal(const std::vector<double>& values, int nx, int modes, int ny);

  int modes() const { return modes_; }
  int ny() const { return ny_; }
  const Chebyshev& cheb() const { return chebyshev(ny_); }

  cplx at(int j, int p) const;
  void set(int j, int p, cplx value);
  /// The x-function at node j.
  PeriodicField slice(int j) const;
  void set_slice(int j, const PeriodicField& f);
  PeriodicField upper_trace() const { return slice(0); }
  PeriodicField lower_trace() const { return slice(ny_); }
  /// w_p(y_j) for j = 0..N, p ≥ 0.
  Eigen::VectorXcd mode(int p) const;
  void set_mode(int p, const Eigen::VectorXcd& values);

  std::vector<double> to_nodal(int nx) const;

  bool even_in_y() const { return even_in_y_; }
  /// Flags the field as even after checking w_p(y) = w_p(−y) to `tol`.
  void mark_even(double tol = 1e-10);
  bool is_even(double tol) const;

  StripField& operator+=(const StripField& other);
  StripField& operator-=(const StripField& other);
  StripField& operator*=(double s);
  friend StripField operator+(StripField a, const StripField& b) { return a += b; }
  friend StripField operator-(StripField a, const StripField& b) { return a -= b; }
  friend StripField operator*(double s, StripField a) { return a *= s; }

 private:
  int modes_ = 0;
  int ny_ = 0;
  bool even_in_y_ = false;
  std::vector<cplx> data_;  // data_[j * (modes_ + 1) + p]
};

/// ∂₁^m w (spectral in x).
StripField d_x(const StripField& w, int m = 1);
/// ∂₂ w (collocation in y).
StripField d_y(const StripField& w);

/// Largest s for which strip norms are computed at y-order N (N/2).
int max_norm_order(int ny);

/// ‖w‖_s^Ω = (Σ_p (‖w_p‖_s^I)² + |p|^{2s} (‖w_p‖_0^I)²)^{1/2}, with
/// ‖v‖_s^I = (Σ_{j≤s} ‖v^{(j)}‖²_{L²(I)})^{1/2}. For s = 0 this is the plain
/// (Fourier-normalized) L² norm (Σ_p ‖w_p‖²_{L²(I)})^{1/2}.
double strip_norm(const StripField& w, int s);

/// ‖w‖_{s,ε}^Ω = ‖w‖_{s−1}^Ω + ‖∂₂w‖_{s−1}^Ω + ε‖w‖_s^Ω.
double scaled_norm(const StripField& w, int s, double eps);

/// ‖∇_ε w‖_0^Ω with ∇_ε = (ε∂₁, ∂₂).
double grad_eps_norm(const StripField& w, double eps);

/// Boundary norm on ∂Ω = Γ₊ ∪ Γ₋ of (possibly fractional) order s.
double boundary_norm(const StripField& w, double s);

/// E₊f with w_p(y) = y² e^{ε|p|(y²−1)} f̂(p): even in y, trace f on Γ₊.
StripField extend_plus(const PeriodicField& f, double eps, int ny);

enum class PoincareVariant { kZeroBoundary, kZeroMeanTrace };

/// ‖w‖₀/‖∇_ε w‖₀ (zero boundary values) or ε‖w‖₀/‖∇_ε w‖₀ (zero mean on Γ₊).
/// The zero field has ratio 0. Throws DomainError if the side condition fails.
double poincare_check(const StripField& w, double eps, PoincareVariant variant);

/// (‖w‖_t^{∂Ω} + √ε ‖w‖_{t+1/2}^{∂Ω}) / ‖w‖_{t+1,ε}^Ω.
double trace_check(const StripField& w, double eps, int t);

}  // namespace hsthread
