#include "hsthread/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsthread/error.hpp"

namespace hsthread {

namespace {

struct LiftProfile {
  double g, dg, d2g;
};

// cosh(κy)/cosh(κ) and derivatives, written with decaying exponentials only.
LiftProfile flat_profile(double kappa, double y) {
  if (kappa == 0.0) return {1.0, 0.0, 0.0};
  const double ay = std::abs(y);
  const double decay = std::exp(kappa * (ay - 1.0));
  const double denom = 1.0 + std::exp(-2.0 * kappa);
  const double inner = std::exp(-2.0 * kappa * ay);
  const double r = decay * (1.0 + inner) / denom;
  const double s = std::copysign(1.0, y) * decay * (1.0 - inner) / denom;
  return {r, kappa * s, kappa * kappa * r};
}

void check_eps(double eps, const EllipticOptions& opts) {
  if (!(eps > 0.0 && eps <= opts.eps_max)) {
    std::ostringstream msg;
    msg << "eps = " << eps << " outside admissible range (0, " << opts.eps_max << "]";
    throw DomainError(msg.str());
  }
}

std::vector<double> nodal(const StripField& w, int nx) { return w.to_nodal(nx); }

}  // namespace

Eigen::MatrixXd fourier_diff_matrix(int n) {
  if (n % 2 == 0) throw DomainError("fourier_diff_matrix: grid size must be odd");
  const double h = kTwoPi / n;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      const int m = i - k;
      const double sign = (((m % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
      d(i, k) = 0.5 * sign / std::sin(m * h / 2.0);
    }
  }
  return d;
}

DirichletSolver::DirichletSolver(double eps, const PeriodicField& h, const EllipticOptions& opts)
    : DirichletSolver(eps, coeffs(h, opts.ny, opts.admissibility), opts) {}

DirichletSolver::DirichletSolver(double eps, GeometryCoeffs geom, const EllipticOptions& opts)
    : eps_(eps),
      modes_(geom.a1.modes()),
      ny_(geom.a1.ny()),
      nx_(collocation_size(geom.a1.modes())),
      geom_(std::move(geom)),
      opts_(opts) {
  check_eps(eps, opts_);
  h_ = geom_.h_tilde.upper_trace();
  lift_height_ = h_[0].real();
  assemble();
}

void DirichletSolver::assemble() {
  const int nx = nx_, ny = ny_;
  const int nint = ny - 1;
  const double e2 = eps_ * eps_;

  const auto a1 = nodal(geom_.a1, nx);
  const auto a1_x = nodal(d_x(geom_.a1), nx);
  const auto a1_y = nodal(d_y(geom_.a1), nx);
  const auto a2 = nodal(geom_.a2, nx);
  const auto a2_y = nodal(d_y(geom_.a2), nx);
  for (double v : a2)
    if (!(v > 0.0)) throw DomainError("DirichletSolver: a2 must be positive on the grid");

  const std::size_t npts = std::size_t(nx) * (ny + 1);
  c11_.assign(npts, e2);
  c12_.resize(npts);
  c22_.resize(npts);
  c2_.resize(npts);
  for (std::size_t k = 0; k < npts; ++k) {
    c12_[k] = 2.0 * e2 * a1[k];
    c22_[k] = e2 * a1[k] * a1[k] + a2[k] * a2[k];
    c2_[k] = e2 * a1_x[k] + e2 * a1[k] * a1_y[k] + a2[k] * a2_y[k];
  }

  dx_ = fourier_diff_matrix(nx);
  dxx_ = dx_ * dx_;
  const auto& dy = chebyshev(ny).diff();
  const auto& dyy = chebyshev(ny).diff2();

  const int n = nx * nint;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  auto unknown = [nint](int i, int j) { return i * nint + (j - 1); };
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) {
      const std::size_t node = std::size_t(j) * nx + i;
      const int row = unknown(i, j);
      for (int k = 0; k < nx; ++k) {
        const double mixed = c12_[node] * dx_(i, k);
        m(row, unknown(k, j)) += c11_[node] * dxx_(i, k);
        if (mixed != 0.0)
          for (int l = 1; l < ny; ++l) m(row, unknown(k, l)) += mixed * dy(j, l);
      }
      for (int l = 1; l < ny; ++l)
        m(row, unknown(i, l)) += c22_[node] * dyy(j, l) + c2_[node] * dy(j, l);
    }
  }
  lu_.compute(m);
  rcond_ = lu_.rcond();
  if (!(rcond_ >= opts_.min_rcond)) {
    std::ostringstream msg;
    msg << "DirichletSolver: collocation matrix ill-conditioned (rcond estimate " << rcond_ << ")";
    throw NumericalError(msg.str());
  }
}

DirichletSolver::Solved DirichletSolver::solve_parts(const PeriodicField& f, const StripField* f0,
                                                     const StripField* f1,
                                                     const StripField* f2) const {
  if (f.modes() != modes_) throw DomainError("DirichletSolver: boundary data truncation mismatch");
  const int nx = nx_, ny = ny_, nint = ny - 1;
  const auto& y = chebyshev(ny).nodes();
  const auto& dy = chebyshev(ny).diff();

  // Lifting of the boundary data and its exact y-derivatives.
  StripField lift(modes_, ny), lift_y(modes_, ny), lift_yy(modes_, ny);
  for (int p = 0; p <= modes_; ++p) {
    const double kappa =
        opts_.lifting == Lifting::kFlatHarmonic ? eps_ * lift_height_ * p : 0.0;
    for (int j = 0; j <= ny; ++j) {
      const auto prof = flat_profile(kappa, y[j]);
      lift.set(j, p, prof.g * f[p]);
      lift_y.set(j, p, prof.dg * f[p]);
      lift_yy.set(j, p, prof.d2g * f[p]);
    }
  }
  lift.mark_even(0.0);

  const auto l11 = nodal(d_x(lift, 2), nx);
  const auto l12 = nodal(d_x(lift_y, 1), nx);
  const auto l22 = nodal(lift_yy, nx);
  const auto l2 = nodal(lift_y, nx);

  std::vector<double> rhs(std::size_t(nx) * (ny + 1), 0.0);
  if (f0) {
    const auto v = nodal(*f0, nx);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += v[k];
  }
  if (f1) {
    const auto v = nodal(d_x(*f1, 1), nx);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += eps_ * v[k];
  }
  if (f2) {
    const auto v = nodal(d_y(*f2), nx);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += v[k];
  }

  Eigen::VectorXd b(nx * nint);
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) {
      const std::size_t node = std::size_t(j) * nx + i;
      const double lifted = c11_[node] * l11[node] + c12_[node] * l12[node] +
                            c22_[node] * l22[node] + c2_[node] * l2[node];
      b(i * nint + (j - 1)) = -rhs[node] - lifted;
    }
  }
  const Eigen::VectorXd z = lu_.solve(b);

  std::vector<double> z_nodal(std::size_t(nx) * (ny + 1), 0.0);
  std::vector<double> z_dy_upper(nx, 0.0);
  for (int i = 0; i < nx; ++i) {
    for (int j = 1; j < ny; ++j) {
      const double v = z(i * nint + (j - 1));
      z_nodal[std::size_t(j) * nx + i] = v;
      z_dy_upper[i] += dy(0, j) * v;
    }
  }
  StripField w = lift + StripField::from_nodal(z_nodal, nx, modes_, ny);
  PeriodicField upper_dy = lift_y.upper_trace() + PeriodicField::from_grid(z_dy_upper, modes_);
  return {std::move(w), std::move(upper_dy)};
}

StripField DirichletSolver::solve(const PeriodicField& f, const StripField* f0,
                                  const StripField* f1, const StripField* f2) const {
  return solve_parts(f, f0, f1, f2).w;
}

PeriodicField DirichletSolver::dn_map(const PeriodicField& f) const {
  const auto parts = solve_parts(f, nullptr, nullptr, nullptr);
  const int n = padded_size(modes_);
  const auto h = h_.to_grid(n);
  const auto dh = deriv(h_, 1).to_grid(n);
  const auto t = parts.upper_dy.to_grid(n);
  const auto df = deriv(f, 1).to_grid(n);
  const double inv_e2 = 1.0 / (eps_ * eps_);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = (inv_e2 + dh[k] * dh[k]) * t[k] / h[k] - dh[k] * df[k];
  return PeriodicField::from_grid(out, modes_);
}

PeriodicField DirichletSolver::dn_map_conormal(const PeriodicField& f) const {
  const auto parts = solve_parts(f, nullptr, nullptr, nullptr);
  const int n = padded_size(modes_);
  const auto a1 = geom_.a1.upper_trace().to_grid(n);
  const auto a2 = geom_.a2.upper_trace().to_grid(n);
  const auto w1 = deriv(parts.w.upper_trace(), 1).to_grid(n);
  const auto w2 = parts.upper_dy.to_grid(n);
  const double e = eps_, inv_e2 = 1.0 / (eps_ * eps_);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) {
    const double d1w = e * (w1[k] + a1[k] * w2[k]);
    const double d2w = a2[k] * w2[k];
    out[k] = inv_e2 * ((e * a1[k] / a2[k]) * d1w + d2w);
  }
  return PeriodicField::from_grid(out, modes_);
}

double DirichletSolver::residual(const StripField& w, const PeriodicField& f) const {
  const int nx = nx_;
  const auto w11 = nodal(d_x(w, 2), nx);
  const auto wy = d_y(w);
  const auto w12 = nodal(d_x(wy, 1), nx);
  const auto w22 = nodal(d_y(wy), nx);
  const auto w2 = nodal(wy, nx);
  double worst = 0.0, scale = 0.0;
  for (int j = 1; j < ny_; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t node = std::size_t(j) * nx + i;
      const double t[4] = {c11_[node] * w11[node], c12_[node] * w12[node], c22_[node] * w22[node],
                           c2_[node] * w2[node]};
      worst = std::max(worst, std::abs(t[0] + t[1] + t[2] + t[3]));
      for (double v : t) scale = std::max(scale, std::abs(v));
    }
  }
  const double boundary = std::max(max_coeff_diff(w.upper_trace(), f),
                                   max_coeff_diff(w.lower_trace(), f));
  return std::max(scale > 0.0 ? worst / scale : worst, boundary);
}

StripField solve_dirichlet(const EllipticProblem& prob, const EllipticOptions& opts) {
  EllipticOptions local = opts;
  local.ny = prob.geom.a1.ny();
  DirichletSolver solver(prob.eps, prob.geom, local);
  return solver.solve(prob.boundary, prob.f0 ? &*prob.f0 : nullptr, prob.f1 ? &*prob.f1 : nullptr,
                      prob.f2 ? &*prob.f2 : nullptr);
}

PeriodicField dn_map(double eps, const PeriodicField& h, const PeriodicField& f,
                     const EllipticOptions& opts) {
  return DirichletSolver(eps, h, opts).dn_map(f);
}

PeriodicField evolution_rhs(double eps, const PeriodicField& h, const EllipticOptions& opts) {
  return DirichletSolver(eps, h, opts).dn_map(curvature(eps, h));
}

double coercivity_pairing(const DirichletSolver& solver, const PeriodicField& phi) {
  const double scale = std::max(1.0, sobolev_norm(phi, 0.0));
  if (std::abs(phi[0].real()) > 1e-12 * scale)
    throw DomainError("coercivity_pairing: phi must have zero mean");
  return l2_inner(solver.dn_map(phi), phi);
}

double coercivity_pairing(double eps, const PeriodicField& h, const PeriodicField& phi,
                          const EllipticOptions& opts) {
  return coercivity_pairing(DirichletSolver(eps, h, opts), phi);
}

double half_eps_norm_sq(const PeriodicField& phi, double eps) {
  const double n = sobolev_norm(phi, 0.0) + std::sqrt(eps) * sobolev_norm(phi, 0.5);
  return n * n;
}

}  // namespace hsthread
