#pragma once

#include <Eigen/Dense>
#include <optional>

#include "hsthread/geometry.hpp"
#include "hsthread/spectral.hpp"
#include "hsthread/strip.hpp"

namespace hsthread {

/// How Dirichlet data are extended into Ω before the collocation solve.
enum class Lifting {
  /// Mode p is extended by cosh(ε h̄ p y)/cosh(ε h̄ p), h̄ the mean height:
  /// the exact harmonic extension on the flat strip of height h̄.
  kFlatHarmonic,
  /// Constant-in-y extension f(x).
  kConstant,
};

struct EllipticOptions {
  int ny = 16;
  Lifting lifting = Lifting::kFlatHarmonic;
  /// Upper end of the admissible ε range.
  double eps_max = 0.4;
  /// Systems with a reciprocal condition estimate below this are rejected.
  double min_rcond = 1e-14;
  Admissibility admissibility{};
};

/// −D_iD_i w = f₀ + ε∂₁f₁ + ∂₂f₂ in Ω, w = f on Γ±.
struct EllipticProblem {
  double eps = 0.1;
  GeometryCoeffs geom;
  PeriodicField boundary;
  std::optional<StripField> f0, f1, f2;
};

/// Collocated Dirichlet problem for D_iD_i = ε²(∂₁ + a₁∂₂)² + (a₂∂₂)² on the
/// strip, Fourier nodes in x (2P+1 points) times Chebyshev–Lobatto nodes in y.
///
/// The operator is assembled and LU-factorized once; every solve is a pair of
/// triangular solves. The unknown is the correction z = w − L to the lifting L
/// of the boundary data, so z vanishes on ∂Ω and ∂₂w on Γ₊ is formed as
/// ∂₂L + ∂₂z without subtracting O(1) quantities.
class DirichletSolver {
 public:
  DirichletSolver(double eps, const PeriodicField& h, const EllipticOptions& opts = {});
  DirichletSolver(double eps, GeometryCoeffs geom, const EllipticOptions& opts = {});

  int modes() const { return modes_; }
  double eps() const { return eps_; }
  const GeometryCoeffs& geometry() const { return geom_; }
  /// Reciprocal condition estimate of the collocation matrix.
  double rcond() const { return rcond_; }

  StripField solve(const PeriodicField& f, const StripField* f0 = nullptr,
                   const StripField* f1 = nullptr, const StripField* f2 = nullptr) const;

  /// F(ε,h){f} = (1/h)(ε⁻² + h'²)(∂₂w)|_{Γ₊} − h'f'.
  PeriodicField dn_map(const PeriodicField& f) const;
  /// F(ε,h){f} = ε⁻² (a_{i,ε}/a₂) D_i w |_{Γ₊}, with D₁w taken from the solved field.
  PeriodicField dn_map_conormal(const PeriodicField& f) const;

  /// Max-norm collocation residual of the interior equation, relative to the
  /// largest term in it.
  double residual(const StripField& w, const PeriodicField& f) const;

 private:
  struct Solved {
    StripField w;
    PeriodicField upper_dy;  // ∂₂w on Γ₊
  };
  Solved solve_parts(const PeriodicField& f, const StripField* f0, const StripField* f1,
                     const StripField* f2) const;
  void assemble();

  double eps_;
  int modes_, ny_, nx_;
  GeometryCoeffs geom_;
  PeriodicField h_;
  EllipticOptions opts_;
  double lift_height_;
  // Nodal operator coefficients on the collocation grid, index j * nx + i.
  std::vector<double> c11_, c12_, c22_, c2_;
  Eigen::MatrixXd dx_, dxx_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double rcond_ = 0.0;
};

StripField solve_dirichlet(const EllipticProblem& prob, const EllipticOptions& opts = {});

PeriodicField dn_map(double eps, const PeriodicField& h, const PeriodicField& f,
                     const EllipticOptions& opts = {});

/// 𝓕(ε, h) = F(ε, h){κ(ε, h)}.
PeriodicField evolution_rhs(double eps, const PeriodicField& h, const EllipticOptions& opts = {});

/// ⟨F(ε,h){φ}, φ⟩_{L²(S)} for mean-zero φ.
double coercivity_pairing(double eps, const PeriodicField& h, const PeriodicField& phi,
                          const EllipticOptions& opts = {});
double coercivity_pairing(const DirichletSolver& solver, const PeriodicField& phi);

/// ‖φ‖²_{1/2,ε} = (‖φ‖₀ + √ε ‖φ‖_{1/2})².
double half_eps_norm_sq(const PeriodicField& phi, double eps);

/// Fourier differentiation matrices on the odd grid x_i = 2πi/n.
Eigen::MatrixXd fourier_diff_matrix(int n);

}  // namespace hsthread
