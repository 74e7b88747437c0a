#pragma once

#include "hsthread/spectral.hpp"
#include "hsthread/strip.hpp"

namespace hsthread {

/// Parameters of the admissible set {‖h‖_s < M, min h > α}.
struct Admissibility {
  double alpha = 0.1;
  double bound = 100.0;
  double order = 4.0;
};

/// Throws DomainError when h leaves the admissible set.
void require_admissible(const PeriodicField& h, const Admissibility& adm = {});
bool is_admissible(const PeriodicField& h, const Admissibility& adm = {});

/// The evolving interface: (t, h, ε).
struct ThreadState {
  double t = 0.0;
  PeriodicField h;
  double eps = 0.0;
};

/// Coefficients of the pulled-back operators, D₁ = ε(∂₁ + a₁∂₂), D₂ = a₂∂₂.
struct GeometryCoeffs {
  StripField a1;
  StripField a2;
  StripField h_tilde;
};

/// h̃(x, y) = h(x): even, trace h on Γ₊, ∂₂h̃ = 0.
StripField extend_h(const PeriodicField& h, int ny, const Admissibility& adm = {});

/// a₁ = −∂₁(y h̃)/∂₂(y h̃) = −y h'/h and a₂ = 1/∂₂(y h̃) = 1/h.
GeometryCoeffs coeffs(const PeriodicField& h, int ny, const Admissibility& adm = {});

/// κ(ε, h) = h''/(1 + ε²h'²)^{3/2}, evaluated on the padded grid.
PeriodicField curvature(double eps, const PeriodicField& h);

/// ε^p Taylor coefficient of κ(ε, h) at ε = 0:
/// binom(−3/2, p/2) h''(h')^p for even p, zero for odd p.
PeriodicField curvature_coeff(const PeriodicField& h, int p);

}  // namespace hsthread
