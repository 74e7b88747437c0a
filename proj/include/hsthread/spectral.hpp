#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace hsthread {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Real 2π-periodic function f(x) = Σ_{|p|≤P} f̂(p) e^{ipx}.
///
/// Only the coefficients p = 0..P are stored; negative modes are implied by
/// Hermitian symmetry f̂(−p) = conj(f̂(p)), so the represented function is
/// real by construction. The zero mode is kept real.
class PeriodicField {
 public:
  PeriodicField() = default;
  explicit PeriodicField(int modes);
  PeriodicField(int modes, std::vector<cplx> nonnegative_coeffs);

  static PeriodicField constant(int modes, double value);
  /// mean + Σ_k cos_amps[k] cos((k+1)x) + sin_amps[k] sin((k+1)x).
  static PeriodicField trigonometric(int modes, double mean, std::span<const double> cos_amps,
                                     std::span<const double> sin_amps = {});
  /// Samples on an equispaced grid x_j = 2πj/n and truncates to `modes`.
  static PeriodicField from_grid(std::span<const double> values, int modes);
  /// Samples `fn` on the padded grid of the given truncation and analyzes.
  static PeriodicField from_function(int modes, const std::function<double(double)>& fn);

  int modes() const { return modes_; }

  /// Coefficient f̂(p) for any |p| ≤ P; zero beyond the truncation.
  cplx operator[](int p) const;
  /// Sets f̂(p) and, implicitly, f̂(−p). For p = 0 the imaginary part is dropped.
  void set(int p, cplx value);
  std::span<const cplx> coeffs() const { return coeffs_; }

  /// Values on x_j = 2πj/n. Requires n ≥ 2P+1 for an exact synthesis.
  std::vector<double> to_grid(int n) const;
  double operator()(double x) const;

  /// Zero-padded or truncated copy with a new truncation order.
  PeriodicField resized(int modes) const;
  /// x ↦ f(x + a).
  PeriodicField shifted(double a) const;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double s);

  friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
  friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
  friend PeriodicField operator*(PeriodicField a, double s) { return a *= s; }
  friend PeriodicField operator*(double s, PeriodicField a) { return a *= s; }
  friend PeriodicField operator-(PeriodicField a) { return a *= -1.0; }

 private:
  int modes_ = 0;
  std::vector<cplx> coeffs_;  // p = 0..modes_
};

/// Number of points of the anti-aliasing grid for truncation P: 3(P+1).
int padded_size(int modes);
/// Number of points of the exact collocation grid: 2P+1.
inline int collocation_size(int modes) { return 2 * modes + 1; }

/// Forward real DFT on an equispaced grid; returns f̂(0..P) with the
/// convention f = Σ f̂(p) e^{ipx}. Requires values.size() ≥ 2P+1.
std::vector<cplx> analyze(std::span<const double> values, int modes);
/// Inverse of `analyze` onto n points.
std::vector<double> synthesize(std::span<const cplx> coeffs, int n);

/// Coefficient p of the result is (ip)^m f̂(p).
PeriodicField deriv(const PeriodicField& f, int m);

/// (Σ_{|p|≤P} (1+p²)^s |f̂(p)|²)^{1/2}.
double sobolev_norm(const PeriodicField& f, double s);

/// Pointwise product evaluated on the padded grid, truncated back to P.
PeriodicField product(const PeriodicField& f, const PeriodicField& g);

/// ∫_S f dx = 2π f̂(0).
double mean(const PeriodicField& f);

/// L² inner product ∫_S f g dx.
double l2_inner(const PeriodicField& f, const PeriodicField& g);

/// Evaluates fn(f(x_j)) on the padded grid and re-analyzes to P modes.
PeriodicField compose(const PeriodicField& f, const std::function<double(double)>& fn);

/// Evaluates fn(f(x_j), g(x_j)) on the padded grid and re-analyzes.
PeriodicField combine(const PeriodicField& f, const PeriodicField& g,
                      const std::function<double(double, double)>& fn);

/// min_x f on the padded grid.
double grid_min(const PeriodicField& f);
double grid_max(const PeriodicField& f);

/// ‖f restricted to |p| > cutoff‖₀ / ‖f‖₀ (0 for the zero field).
double tail_fraction(const PeriodicField& f, int cutoff);

/// Largest coefficient-wise distance max_p |f̂(p) − ĝ(p)|.
double max_coeff_diff(const PeriodicField& f, const PeriodicField& g);

}  // namespace hsthread
