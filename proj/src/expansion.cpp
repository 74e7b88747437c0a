#include "hsthread/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsthread/error.hpp"

namespace hsthread {

namespace {

// Pointwise combination of strip fields on the padded x-grid.
template <typename Fn>
StripField pointwise(const std::vector<const StripField*>& in, Fn fn) {
  const int modes = in.front()->modes(), ny = in.front()->ny();
  const int n = padded_size(modes);
  std::vector<std::vector<double>> v;
  v.reserve(in.size());
  for (const auto* w : in) v.push_back(w->to_nodal(n));
  std::vector<double> out(v.front().size());
  std::vector<double> args(in.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t a = 0; a < in.size(); ++a) args[a] = v[a][k];
    out[k] = fn(args);
  }
  return StripField::from_nodal(out, n, modes, ny);
}

template <typename Fn>
PeriodicField pointwise(const std::vector<PeriodicField>& in, Fn fn) {
  const int modes = in.front().modes();
  const int n = padded_size(modes);
  std::vector<std::vector<double>> v;
  for (const auto& f : in) v.push_back(f.to_grid(n));
  std::vector<double> out(n), args(in.size());
  for (int k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < in.size(); ++a) args[a] = v[a][k];
    out[k] = fn(args);
  }
  return PeriodicField::from_grid(out, modes);
}

Trajectory zero_trajectory(const Trajectory& like) {
  Trajectory t;
  t.dt = like.dt;
  t.stabilizer = like.stabilizer;
  t.times = like.times;
  t.states.assign(like.times.size(), PeriodicField(like.states.front().modes()));
  return t;
}

}  // namespace

StripField apply_s0(const GeometryCoeffs& geom, const StripField& u) {
  const StripField u2 = d_y(u), u22 = d_y(u2), a2y = d_y(geom.a2);
  return pointwise({&geom.a2, &a2y, &u2, &u22}, [](const std::vector<double>& a) {
    return a[0] * a[0] * a[3] + a[0] * a[1] * a[2];
  });
}

StripField apply_s2(const GeometryCoeffs& geom, const StripField& u) {
  const StripField u11 = d_x(u, 2), u2 = d_y(u), u12 = d_x(u2, 1), u22 = d_y(u2);
  const StripField a1x = d_x(geom.a1, 1), a1y = d_y(geom.a1);
  return pointwise({&geom.a1, &a1x, &a1y, &u11, &u12, &u22, &u2},
                   [](const std::vector<double>& a) {
                     const double a1 = a[0];
                     return a[3] + 2.0 * a1 * a[4] + a1 * a1 * a[5] + (a[1] + a1 * a[2]) * a[6];
                   });
}

StripField s0_solve(const GeometryCoeffs& geom, const StripField& G, const PeriodicField& g) {
  const int modes = G.modes(), ny = G.ny();
  if (geom.a2.ny() != ny || geom.a2.modes() != modes || g.modes() != modes)
    throw DomainError("s0_solve: shape mismatch");
  const auto& cheb = chebyshev(ny);
  const Eigen::MatrixXd from_zero = cheb.integration_matrix(0.0);
  const Eigen::MatrixXd from_top = cheb.integration_matrix(1.0);  // ∫_1^y = −∫_y^1
  const int n = padded_size(modes);
  const auto gv = G.to_nodal(n);
  const auto av = geom.a2.to_nodal(n);
  const auto bv = g.to_grid(n);
  std::vector<double> out(gv.size());
  Eigen::VectorXd col(ny + 1), a(ny + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= ny; ++j) {
      a(j) = av[std::size_t(j) * n + i];
      col(j) = gv[std::size_t(j) * n + i] / a(j);
    }
    const Eigen::VectorXd inner = (from_zero * col).cwiseQuotient(a);
    const Eigen::VectorXd u = from_top * inner;
    for (int j = 0; j <= ny; ++j) out[std::size_t(j) * n + i] = bv[i] + u(j);
  }
  return StripField::from_nodal(out, n, modes, ny);
}

StripField s0_solve(const PeriodicField& h, const StripField& G, const PeriodicField& g,
                    const Admissibility& adm) {
  return s0_solve(coeffs(h, G.ny(), adm), G, g);
}

std::vector<StripField> w_chain(const GeometryCoeffs& geom, const PeriodicField& f, int pmax) {
  const int ny = geom.a1.ny();
  std::vector<StripField> chain(std::max(pmax, 0) + 1, StripField(f.modes(), ny));
  chain[0] = StripField::constant_in_y(f, ny);
  const PeriodicField zero(f.modes());
  for (int m = 2; m <= pmax; m += 2)
    chain[m] = s0_solve(geom, -1.0 * apply_s2(geom, chain[m - 2]), zero);
  return chain;
}

StripField w_coefficient(const PeriodicField& h, const PeriodicField& f, int p, int ny,
                         const Admissibility& adm) {
  if (p < 0) throw DomainError("w_coefficient: order must be nonnegative");
  if (p % 2 == 1) return StripField(f.modes(), ny);
  return w_chain(coeffs(h, ny, adm), f, p)[p];
}

PeriodicField boundary_b0(const PeriodicField& h, const StripField& w) {
  return pointwise({h, d_y(w).upper_trace()},
                   [](const std::vector<double>& a) { return a[1] / a[0]; });
}

PeriodicField boundary_b2(const PeriodicField& h, const StripField& w) {
  return pointwise({h, deriv(h, 1), deriv(w.upper_trace(), 1), d_y(w).upper_trace()},
                   [](const std::vector<double>& a) {
                     return -a[1] * a[2] + a[1] * a[1] * a[3] / a[0];
                   });
}

PeriodicField ExpansionTerms::evaluate(double eps) const {
  PeriodicField out(terms.front().modes());
  double scale = 1.0;
  for (std::size_t p = 2; p < terms.size(); p += 2) {
    out += scale * terms[p];
    scale *= eps * eps;
  }
  return out;
}

ExpansionTerms expansion_terms(const PeriodicField& h, int k, int ny, const Admissibility& adm) {
  if (k < 0) throw DomainError("expansion_terms: order must be nonnegative");
  const int pmax = (k + 2) - (k + 2) % 2;
  const GeometryCoeffs geom = coeffs(h, ny, adm);
  ExpansionTerms out;
  out.k = k;
  out.kappa.assign(pmax + 1, PeriodicField(h.modes()));
  out.w.resize(pmax + 1);
  out.terms.assign(pmax + 1, PeriodicField(h.modes()));
  for (int l = 0; l <= pmax; l += 2) {
    out.kappa[l] = curvature_coeff(h, l);
    out.w[l] = w_chain(geom, out.kappa[l], pmax - l);
  }
  for (int p = 2; p <= pmax; p += 2) {
    for (int j = 0; j <= 2; j += 2) {
      for (int l = 0; l <= p - j; l += 2) {
        const int m = p - j - l;
        if (j == 0 && m == 0) continue;  // 𝓑^[0] of a y-constant field vanishes
        const StripField& w = out.w[l][m];
        out.terms[p] += j == 0 ? boundary_b0(h, w) : boundary_b2(h, w);
      }
    }
  }
  return out;
}

PeriodicField f_k(double eps, const PeriodicField& h, int k, int ny, const Admissibility& adm) {
  return expansion_terms(h, k, ny, adm).evaluate(eps);
}

LinearizedA::LinearizedA(PeriodicField h0) : h0_(std::move(h0)), h0_ddd_(deriv(h0_, 3)) {}

PeriodicField LinearizedA::operator()(const PeriodicField& eta) const {
  return -deriv(product(eta, h0_ddd_) + product(h0_, deriv(eta, 3)), 1);
}

RpResult extract_Rp(int k, int p, const std::vector<PeriodicField>& lower, const RpOptions& opts) {
  if (p < 0) throw DomainError("extract_Rp: order must be nonnegative");
  if (static_cast<int>(lower.size()) < std::max(p, 1))
    throw DomainError("extract_Rp: lower-order corrections missing");
  const int modes = lower.front().modes();
  if (p % 2 == 1) return {PeriodicField(modes), 0.0};

  auto g = [&](double eps) {
    PeriodicField H = lower[0];
    double scale = 1.0;
    for (int q = 1; q < p; ++q) {
      scale *= eps;
      H += scale * lower[q];
    }
    return expansion_terms(H, k, opts.ny, opts.admissibility).evaluate(eps);
  };
  const PeriodicField g0 = g(0.0);
  if (p == 0) return {g0, 0.0};

  // g is even in ε: interpolate in u = ε² through ε = 0, δ, …, (p/2)δ and take
  // the coefficient of u^{p/2}. The error is O(δ²); extrapolate δ² → 0.
  const int d = p / 2;
  std::vector<PeriodicField> estimates;
  std::vector<double> x;
  for (double delta : opts.steps) {
    std::vector<PeriodicField> samples{g0};
    std::vector<double> u{0.0};
    for (int m = 1; m <= d; ++m) {
      samples.push_back(g(m * delta));
      u.push_back(std::pow(m * delta, 2));
    }
    PeriodicField top(modes);
    for (int m = 0; m <= d; ++m) {
      double denom = 1.0;
      for (int q = 0; q <= d; ++q)
        if (q != m) denom *= u[m] - u[q];
      top += (1.0 / denom) * samples[m];
    }
    estimates.push_back(top);
    x.push_back(delta * delta);
  }
  // Neville table evaluated at x = 0.
  std::vector<PeriodicField> table = estimates;
  PeriodicField previous = table.back();
  for (std::size_t level = 1; level < table.size(); ++level) {
    previous = table.back();
    for (std::size_t i = table.size() - 1; i >= level; --i) {
      const double xa = x[i - level], xb = x[i];
      table[i] = (1.0 / (xa - xb)) * (xa * table[i] - xb * table[i - 1]);
    }
  }
  RpResult out{table.back(), 0.0};
  for (int q = 0; q <= modes; ++q)
    out.residual = std::max(out.residual, std::abs(table.back()[q] - previous[q]));
  if (out.residual > opts.tol * std::max(1.0, sobolev_norm(out.value, 0.0))) {
    std::ostringstream msg;
    msg << "extract_Rp: extrapolation for p = " << p << " did not converge (residual "
        << out.residual << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

Trajectory solve_correction(const Trajectory& h0, const std::vector<PeriodicField>& rp) {
  if (h0.states.empty() || rp.size() != h0.states.size())
    throw DomainError("solve_correction: forcing must be sampled on the trajectory grid");
  Trajectory out = zero_trajectory(h0);
  for (std::size_t n = 0; n + 1 < h0.times.size(); ++n) {
    const double dt = h0.times[n + 1] - h0.times[n];
    const LinearizedA a(h0.states[n]);
    const PeriodicField& h = out.states[n];
    out.states[n + 1] = imex_step(h, a(h) + rp[n], dt, h0.stabilizer);
    const PeriodicField& next = out.states[n + 1];
    if (!std::isfinite(sobolev_norm(next, 0.0)))
      throw NumericalError("solve_correction: correction became non-finite");
    out.mass_drift = std::max(out.mass_drift, std::abs(mean(next)));
  }
  return out;
}

ExpansionBundle build_expansion(int k, const Trajectory& h0, const RpOptions& opts) {
  if (k < 0) throw DomainError("build_expansion: order must be nonnegative");
  if (h0.failed) throw NumericalError("build_expansion: leading-order trajectory failed: " +
                                      h0.failure);
  ExpansionBundle bundle;
  bundle.k = k;
  bundle.corrections.push_back(h0);
  bundle.rp_residual.push_back(0.0);
  for (int p = 1; p <= k; ++p) {
    if (p % 2 == 1) {
      bundle.corrections.push_back(zero_trajectory(h0));
      bundle.rp_residual.push_back(0.0);
      continue;
    }
    std::vector<PeriodicField> rp;
    double worst = 0.0;
    for (std::size_t n = 0; n < h0.times.size(); ++n) {
      std::vector<PeriodicField> lower;
      for (int q = 0; q < p; ++q) lower.push_back(bundle.corrections[q].states[n]);
      RpResult r = extract_Rp(k, p, lower, opts);
      worst = std::max(worst, r.residual);
      rp.push_back(std::move(r.value));
    }
    bundle.corrections.push_back(solve_correction(h0, rp));
    bundle.rp_residual.push_back(worst);
  }
  return bundle;
}

Trajectory build_h_eps_k(double eps, const ExpansionBundle& bundle) {
  const Trajectory& h0 = bundle.corrections.front();
  Trajectory out = h0;
  out.eps = eps;
  out.min_height.clear();
  out.energy.clear();
  out.mass_drift = 0.0;
  const double mass0 = mean(h0.states.front());
  for (std::size_t n = 0; n < h0.states.size(); ++n) {
    PeriodicField h = h0.states[n];
    double scale = 1.0;
    for (std::size_t p = 1; p < bundle.corrections.size(); ++p) {
      scale *= eps;
      h += scale * bundle.corrections[p].states[n];
    }
    out.min_height.push_back(grid_min(h));
    out.energy.push_back(thinfilm_energy(h));
    out.mass_drift = std::max(out.mass_drift, std::abs(mean(h) - mass0));
    out.states[n] = std::move(h);
  }
  return out;
}

}  // namespace hsthread
