#include <catch_amalgamated.hpp>

#include <cmath>

#include "hsthread/error.hpp"
#include "hsthread/geometry.hpp"

using namespace hsthread;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr int P = 16;
constexpr int NY = 8;

PeriodicField bump() { return PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.1}); }

}  // namespace

TEST_CASE("extend_h examples") {
  const StripField one = extend_h(PeriodicField::constant(P, 1.0), NY);
  for (int j = 0; j <= NY; ++j) CHECK(one.at(j, 0) == cplx(1.0, 0.0));
  const StripField ht = extend_h(bump(), NY);
  for (int j = 0; j <= NY; ++j) CHECK(max_coeff_diff(ht.slice(j), bump()) == 0.0);
  const StripField dy = d_y(ht);
  for (int j = 0; j <= NY; ++j) CHECK(sobolev_norm(dy.slice(j), 0.0) < 1e-13);
  CHECK(ht.even_in_y());
}

TEST_CASE("admissibility is enforced") {
  const PeriodicField thin = PeriodicField::trigonometric(P, 0.5, std::vector<double>{0.45});
  CHECK_THROWS_AS(extend_h(thin, NY), DomainError);
  CHECK_THROWS_WITH(coeffs(thin, NY), Catch::Matchers::ContainsSubstring("positivity"));
  const PeriodicField rough = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0, 0, 0, 0, 0.3});
  CHECK_THROWS_WITH(require_admissible(rough), Catch::Matchers::ContainsSubstring("norm bound"));
  CHECK(is_admissible(bump()));
  CHECK_FALSE(is_admissible(thin));
}

TEST_CASE("coeffs examples") {
  const GeometryCoeffs flat = coeffs(PeriodicField::constant(P, 2.0), NY);
  for (int j = 0; j <= NY; ++j) {
    CHECK(sobolev_norm(flat.a1.slice(j), 0.0) < 1e-15);
    CHECK_THAT(flat.a2.at(j, 0).real(), WithinRel(0.5, 1e-14));
  }
  const GeometryCoeffs g = coeffs(bump(), NY);
  const int mid = NY / 2;  // y = 0
  CHECK(sobolev_norm(g.a1.slice(mid), 0.0) < 1e-15);
  CHECK_THAT(g.a1.slice(0)(0.0), WithinAbs(0.0, 1e-14));
  CHECK_THAT(g.a2.slice(0)(0.0), WithinRel(1.0 / 1.1, 1e-13));
  // Generic point: a₁ = −y h'/h.
  const double x = 1.1, y = chebyshev(NY).nodes()[1];
  const double h = 1 + 0.1 * std::cos(x), dh = -0.1 * std::sin(x);
  CHECK_THAT(g.a1.slice(1)(x), WithinAbs(-y * dh / h, 1e-13));
  for (double v : g.a2.to_nodal(2 * P + 1)) CHECK(v > 0.0);
}

TEST_CASE("curvature examples") {
  CHECK(sobolev_norm(curvature(0.3, PeriodicField::constant(P, 3.0)), 0.0) < 1e-15);
  CHECK(max_coeff_diff(curvature(0.0, bump()), deriv(bump(), 2)) < 1e-15);
  const double eps = 0.1;
  const PeriodicField h1 = deriv(bump(), 1), h2 = deriv(bump(), 2);
  const PeriodicField taylor =
      combine(h1, h2, [eps](double d1, double d2) {
        const double e2 = eps * eps * d1 * d1;
        return d2 * (1 - 1.5 * e2 + 15.0 / 8 * e2 * e2);
      });
  // Next Taylor term is −(35/16)ε⁶h''h'⁶ ≈ 2e−13 here.
  CHECK(sobolev_norm(curvature(eps, bump()) - taylor, 0.0) < 1e-12);
}

TEST_CASE("curvature coefficients") {
  const PeriodicField h = bump();
  CHECK(max_coeff_diff(curvature_coeff(h, 0), deriv(h, 2)) < 1e-15);
  CHECK(sobolev_norm(curvature_coeff(h, 3), 0.0) == 0.0);
  const PeriodicField k2 = curvature_coeff(h, 2);
  const PeriodicField expect = combine(deriv(h, 1), deriv(h, 2),
                                       [](double d1, double d2) { return -1.5 * d2 * d1 * d1; });
  CHECK(max_coeff_diff(k2, expect) < 1e-15);
  CHECK(max_coeff_diff(curvature_coeff(h, 4),
                       combine(deriv(h, 1), deriv(h, 2), [](double d1, double d2) {
                         return 15.0 / 8 * d2 * std::pow(d1, 4);
                       })) < 1e-15);

  // Finite-difference oracle in ε, with the error falling at 4th order in δ
  // after one Richardson step.
  auto fd = [&](double d) {
    return (1.0 / (d * d)) * (curvature(d, h) - curvature(0.0, h));
  };
  auto richardson = [&](double d) { return (1.0 / 3.0) * (4.0 * fd(d / 2) - fd(d)); };
  const double e1 = sobolev_norm(richardson(0.2) - k2, 0.0);
  const double e2 = sobolev_norm(richardson(0.1) - k2, 0.0);
  CHECK(e1 < 1e-5);
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("translation equivariance of geometry") {
  const PeriodicField h = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.1, 0.05},
                                                       std::vector<double>{0.02});
  const double a = 0.37;
  CHECK(max_coeff_diff(curvature(0.2, h.shifted(a)), curvature(0.2, h).shifted(a)) < 1e-10);
  const GeometryCoeffs g = coeffs(h, NY), gs = coeffs(h.shifted(a), NY);
  for (int j = 0; j <= NY; ++j) {
    CHECK(max_coeff_diff(gs.a1.slice(j), g.a1.slice(j).shifted(a)) < 1e-10);
    CHECK(max_coeff_diff(gs.a2.slice(j), g.a2.slice(j).shifted(a)) < 1e-10);
  }
  CHECK(std::abs(mean(curvature(0.0, h))) < 1e-15);
}
