#include "hsthread/geometry.hpp"

#include <cmath>
#include <sstream>

#include "hsthread/error.hpp"

namespace hsthread {

bool is_admissible(const PeriodicField& h, const Admissibility& adm) {
  return grid_min(h) > adm.alpha && sobolev_norm(h, adm.order) < adm.bound;
}

void require_admissible(const PeriodicField& h, const Admissibility& adm) {
  const double lo = grid_min(h);
  if (!(lo > adm.alpha)) {
    std::ostringstream msg;
    msg << "positivity violated: min h = " << lo << " <= alpha = " << adm.alpha;
    throw DomainError(msg.str());
  }
  const double norm = sobolev_norm(h, adm.order);
  if (!(norm < adm.bound)) {
    std::ostringstream msg;
    msg << "norm bound violated: ||h||_" << adm.order << " = " << norm << " >= M = " << adm.bound;
    throw DomainError(msg.str());
  }
}

StripField extend_h(const PeriodicField& h, int ny, const Admissibility& adm) {
  require_admissible(h, adm);
  return StripField::constant_in_y(h, ny);
}

GeometryCoeffs coeffs(const PeriodicField& h, int ny, const Admissibility& adm) {
  StripField h_tilde = extend_h(h, ny, adm);
  const PeriodicField slope = combine(deriv(h, 1), h, [](double dh, double v) { return dh / v; });
  const PeriodicField inv_h = compose(h, [](double v) { return 1.0 / v; });
  StripField a1 = StripField::separable(slope, [](double y) { return -y; }, ny);
  StripField a2 = StripField::constant_in_y(inv_h, ny);
  return {std::move(a1), std::move(a2), std::move(h_tilde)};
}

PeriodicField curvature(double eps, const PeriodicField& h) {
  const double e2 = eps * eps;
  return combine(deriv(h, 1), deriv(h, 2), [e2](double d1, double d2) {
    return d2 / std::pow(1.0 + e2 * d1 * d1, 1.5);
  });
}

PeriodicField curvature_coeff(const PeriodicField& h, int p) {
  if (p < 0) throw DomainError("curvature_coeff: order must be nonnegative");
  if (p % 2 == 1) return PeriodicField(h.modes());
  const int n = p / 2;
  // binom(−3/2, n) = Π_{i<n} (−3/2 − i)/(i + 1)
  double binom = 1.0;
  for (int i = 0; i < n; ++i) binom *= (-1.5 - i) / (i + 1.0);
  return combine(deriv(h, 1), deriv(h, 2), [binom, p](double d1, double d2) {
    return binom * d2 * std::pow(d1, p);
  });
}

}  // namespace hsthread
