#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hsthread/error.hpp"
#include "hsthread/strip.hpp"

using namespace hsthread;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr int P = 8;
constexpr int NY = 16;

PeriodicField one() { return PeriodicField::constant(P, 1.0); }
PeriodicField cos1() { return PeriodicField::trigonometric(P, 0.0, std::vector<double>{1.0}); }

// Oracle: trapezoid in x (exact for band-limited
// integrands) times composite Simpson in y on a fine grid.
double l2_quadrature(const std::function<double(double, double)>& w) {
  const int nx = 64, ny = 4000;
  double total = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = kTwoPi * i / nx;
    double col = 0.0;
    for (int j = 0; j <= ny; ++j) {
      const double y = -1.0 + 2.0 * j / ny;
      const double wt = (j == 0 || j == ny) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      const double v = w(x, y);
      col += wt * v * v;
    }
    total += col * (2.0 / ny) / 3.0;
  }
  return total * kTwoPi / nx;
}

}  // namespace

TEST_CASE("strip_norm examples") {
  CHECK_THAT(strip_norm(StripField::constant_in_y(one(), NY), 0), WithinRel(std::sqrt(2.0), 1e-13));
  const StripField y = StripField::separable(one(), [](double t) { return t; }, NY);
  // ‖y‖²_{H¹(I)} = ‖y‖² + ‖1‖² = 2/3 + 2; the p = 0 mode carries no |p|^{2s} term.
  CHECK_THAT(strip_norm(y, 1), WithinRel(std::sqrt(8.0 / 3.0), 1e-13));
  CHECK_THAT(strip_norm(StripField::constant_in_y(cos1(), NY), 0), WithinRel(1.0, 1e-13));
}

TEST_CASE("strip_norm s = 0 against direct 2D quadrature") {
  auto w = [](double x, double y) { return (1 + 0.5 * y * y) * std::cos(x) + y * std::sin(2 * x); };
  StripField f(P, NY);
  const auto& nodes = chebyshev(NY).nodes();
  for (int j = 0; j <= NY; ++j) {
    const double y = nodes[j];
    f.set(j, 1, 0.5 * (1 + 0.5 * y * y));
    f.set(j, 2, cplx(0.0, -0.5 * y));
  }
  // ‖w‖₀ in the Fourier normalization is (1/2π)∫∫ w² dx dy.
  CHECK_THAT(strip_norm(f, 0), WithinRel(std::sqrt(l2_quadrature(w) / kTwoPi), 1e-9));
}

TEST_CASE("strip_norm s = 1 includes the |p|^2 weight") {
  // w = cos(2x) (1 − y²): mode ±2 with w_p = (1−y²)/2.
  const StripField w =
      StripField::separable(PeriodicField::trigonometric(P, 0.0, std::vector<double>{0.0, 1.0}),
                            [](double t) { return 1 - t * t; }, NY);
  const double l2 = 16.0 / 15.0, d1 = 8.0 / 3.0;  // ∫(1−y²)², ∫(2y)²
  const double expected = 2 * 0.25 * (l2 + d1 + 4 * l2);
  CHECK_THAT(strip_norm(w, 1), WithinRel(std::sqrt(expected), 1e-12));
  CHECK_THROWS_AS(strip_norm(w, max_norm_order(NY) + 1), DomainError);
}

TEST_CASE("scaled_norm examples") {
  const double eps = 0.3;
  const StripField c = StripField::constant_in_y(one(), NY);
  CHECK_THAT(scaled_norm(c, 1, eps), WithinRel(std::sqrt(2.0) * (1 + eps), 1e-12));
  const StripField y = StripField::separable(one(), [](double t) { return t; }, NY);
  CHECK_THAT(scaled_norm(y, 1, eps),
             WithinRel(std::sqrt(2.0 / 3) + std::sqrt(2.0) + eps * std::sqrt(8.0 / 3), 1e-12));
}

TEST_CASE("scaled_norm is equivalent to strip_norm at eps = 1") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    StripField w(P, NY);
    for (int j = 0; j <= NY; ++j)
      for (int p = 0; p <= 4; ++p) w.set(j, p, cplx(u(rng), p ? u(rng) : 0.0));
    const double r = scaled_norm(w, 2, 1.0) / strip_norm(w, 2);
    CHECK(r >= 1.0);
    CHECK(r <= 3.0);
  }
}

TEST_CASE("extend_plus examples and invariants") {
  const StripField e1 = extend_plus(one(), 0.2, NY);
  const auto& nodes = chebyshev(NY).nodes();
  for (int j = 0; j <= NY; ++j) CHECK_THAT(e1.at(j, 0).real(), WithinAbs(nodes[j] * nodes[j], 1e-15));
  const PeriodicField f =
      PeriodicField::trigonometric(P, 0.3, std::vector<double>{1.0, -0.5, 0.2, 0.1});
  const StripField e = extend_plus(f, 0.1, NY);
  CHECK(sobolev_norm(e.upper_trace() - f, 0.0) <= 1e-10);
  CHECK(e.even_in_y());
  CHECK(e.is_even(0.0));
  CHECK(max_coeff_diff(extend_plus(cos1(), 0.4, NY).upper_trace(), cos1()) < 1e-15);
  CHECK_THROWS_AS(extend_plus(f, 1.0, NY), DomainError);
}

TEST_CASE("poincare_check") {
  const StripField zb = StripField::separable(cos1(), [](double y) { return 1 - y * y; }, NY);
  const double r = poincare_check(zb, 0.1, PoincareVariant::kZeroBoundary);
  CHECK(std::isfinite(r));
  CHECK(r > 0.0);
  // ‖∇_ε w‖ → ‖∂₂ w‖ as ε → 0: ratio → ‖1−y²‖/‖2y‖ = √(16/15)/√(8/3).
  CHECK_THAT(poincare_check(zb, 1e-6, PoincareVariant::kZeroBoundary),
             WithinRel(std::sqrt((16.0 / 15) / (8.0 / 3)), 1e-9));
  CHECK(poincare_check(StripField(P, NY), 0.1, PoincareVariant::kZeroBoundary) == 0.0);
  CHECK_THROWS_AS(poincare_check(StripField::constant_in_y(cos1(), NY), 0.1,
                                 PoincareVariant::kZeroBoundary),
                  DomainError);

  // w = cos x: ε‖w‖/‖ε∂₁w‖ = 1 for every ε.
  const StripField zm = StripField::constant_in_y(cos1(), NY);
  for (double eps : {0.4, 0.2, 0.1, 0.05})
    CHECK_THAT(poincare_check(zm, eps, PoincareVariant::kZeroMeanTrace), WithinRel(1.0, 1e-12));
  CHECK_THROWS_AS(poincare_check(StripField::constant_in_y(one(), NY), 0.1,
                                 PoincareVariant::kZeroMeanTrace),
                  DomainError);
}

TEST_CASE("trace_check") {
  // w ≡ 1, t = 0: numerator √2 + √ε √2, denominator √2 + 0 + ε√2.
  for (double eps : {0.4, 0.1}) {
    const double r = trace_check(StripField::constant_in_y(one(), NY), eps, 0);
    CHECK_THAT(r, WithinRel((1 + std::sqrt(eps)) / (1 + eps), 1e-12));
    CHECK(r < 10.0);
  }
  const StripField zb = StripField::separable(cos1(), [](double y) { return 1 - y * y; }, NY);
  CHECK(trace_check(zb, 0.1, 0) == 0.0);
  const StripField y2 = StripField::separable(cos1(), [](double y) { return y * y; }, NY);
  std::vector<double> r;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) r.push_back(trace_check(y2, eps, 0));
  const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
  CHECK(hi / lo < 2.0);
}

TEST_CASE("d_x and d_y are exact on band-limited polynomials") {
  const StripField w = StripField::separable(cos1(), [](double y) { return y * y * y; }, NY);
  const StripField wy = d_y(w), wx = d_x(w);
  const auto& nodes = chebyshev(NY).nodes();
  for (int j = 0; j <= NY; ++j) {
    CHECK_THAT(wy.at(j, 1).real(), WithinAbs(1.5 * nodes[j] * nodes[j], 1e-12));
    CHECK_THAT(wx.at(j, 1).imag(), WithinAbs(0.5 * std::pow(nodes[j], 3), 1e-15));
  }
}

TEST_CASE("nodal round trip and evenness flag") {
  const StripField w = StripField::separable(cos1(), [](double y) { return 1 + y * y; }, NY);
  const auto nodal = w.to_nodal(2 * P + 1);
  const StripField back = StripField::from_nodal(nodal, 2 * P + 1, P, NY);
  for (int j = 0; j <= NY; ++j)
    for (int p = 0; p <= P; ++p) CHECK(std::abs(back.at(j, p) - w.at(j, p)) < 1e-14);
  StripField odd = StripField::separable(cos1(), [](double y) { return y; }, NY);
  CHECK_THROWS_AS(odd.mark_even(1e-10), DomainError);
  CHECK(StripField::constant_in_y(cos1(), NY).even_in_y());
}
