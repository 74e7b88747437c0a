#pragma once

#include <vector>

#include "hsthread/evolution.hpp"
#include "hsthread/geometry.hpp"
#include "hsthread/spectral.hpp"
#include "hsthread/strip.hpp"

namespace hsthread {

/// S₀(h)u = a₂²∂₂₂u + a₂a₂,₂∂₂u.
StripField apply_s0(const GeometryCoeffs& geom, const StripField& u);
/// S₂(h)u = ∂₁₁u + 2a₁∂₁₂u + a₁²∂₂₂u + (a₁,₁ + a₁a₁,₂)∂₂u.
StripField apply_s2(const GeometryCoeffs& geom, const StripField& u);

/// Solves S₀(h)u = G in Ω, u = g on Γ±, by the double quadrature
/// u = g − ∫_y^1 (1/a₂) ∫_0^τ (G/a₂) ds dτ on every x-node of the padded grid.
/// G must be even in y. The y-resolution is that of G.
StripField s0_solve(const GeometryCoeffs& geom, const StripField& G, const PeriodicField& g);
StripField s0_solve(const PeriodicField& h, const StripField& G, const PeriodicField& g,
                    const Admissibility& adm = {});

/// w^[0..pmax](h){f}: w^[0] = f, S₀w^[p+2] = −S₂w^[p] with zero boundary
/// values. Odd entries are zero.
std::vector<StripField> w_chain(const GeometryCoeffs& geom, const PeriodicField& f, int pmax);
StripField w_coefficient(const PeriodicField& h, const PeriodicField& f, int p, int ny = 16,
                         const Admissibility& adm = {});

/// 𝓑^[0](h)w = h⁻¹ ∂₂w|_{Γ₊}.
PeriodicField boundary_b0(const PeriodicField& h, const StripField& w);
/// 𝓑^[2](h)w = −h'∂₁w|_{Γ₊} + h⁻¹h'² ∂₂w|_{Γ₊}.
PeriodicField boundary_b2(const PeriodicField& h, const StripField& w);

/// The coefficients of 𝓕_k(ε, h) = Σ_p ε^{p−2} T_p(h) for one interface h,
/// T_p = Σ_{j∈{0,2}, j+m+l=p} 𝓑^[j] w^[m]{κ^[l]}. Entries are indexed by p.
struct ExpansionTerms {
  int k = 0;
  std::vector<PeriodicField> kappa;                // κ^[l](h)
  std::vector<std::vector<StripField>> w;          // w[l][m] = w^[m](h){κ^[l]}
  std::vector<PeriodicField> terms;                // T_p(h), p = 0..k+2

  PeriodicField evaluate(double eps) const;
};

ExpansionTerms expansion_terms(const PeriodicField& h, int k, int ny = 16,
                               const Admissibility& adm = {});

PeriodicField f_k(double eps, const PeriodicField& h, int k, int ny = 16,
                  const Admissibility& adm = {});

/// A = ∂_h𝓕_k(0, h₀): η ↦ −(η h₀''' + h₀ η''')'.
class LinearizedA {
 public:
  explicit LinearizedA(PeriodicField h0);
  PeriodicField operator()(const PeriodicField& eta) const;
  const PeriodicField& base() const { return h0_; }

 private:
  PeriodicField h0_, h0_ddd_;
};

struct RpOptions {
  std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  /// Accept when the extrapolation residual is below tol·max(1, ‖R_p‖₀).
  double tol = 1e-6;
  int ny = 16;
  Admissibility admissibility{};
};

struct RpResult {
  PeriodicField value;
  double residual = 0.0;
};

/// ε^p Taylor coefficient at ε = 0 of ε ↦ 𝓕_k(ε, Σ_{q<p} ε^q h_q), from
/// `lower` = (h_0, …, h_{p−1}) at one instant.
RpResult extract_Rp(int k, int p, const std::vector<PeriodicField>& lower,
                    const RpOptions& opts = {});

/// The correction terms h_0..h_k along a thin-film trajectory.
struct ExpansionBundle {
  int k = 0;
  /// corrections[p] = h_p on the time grid of the thin-film trajectory.
  std::vector<Trajectory> corrections;
  /// Largest R_p extrapolation residual met for each p.
  std::vector<double> rp_residual;
};

/// Integrates ∂_t h_p = A(t)h_p + R_p(t), h_p(0) = 0, with the same stabilized
/// step as the thin-film run, A and R_p taken at the start of each step.
Trajectory solve_correction(const Trajectory& h0, const std::vector<PeriodicField>& rp);

ExpansionBundle build_expansion(int k, const Trajectory& h0, const RpOptions& opts = {});

/// h_{ε,k} = h₀ + εh₁ + … + ε^k h_k on the common time grid.
Trajectory build_h_eps_k(double eps, const ExpansionBundle& bundle);

}  // namespace hsthread
