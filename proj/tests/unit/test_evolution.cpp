#include <catch_amalgamated.hpp>

#include <cmath>

#include "hsthread/error.hpp"
#include "hsthread/evolution.hpp"

using namespace hsthread;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr int P = 16;

PeriodicField bump(double a = 0.1) {
  return PeriodicField::trigonometric(P, 1.0, std::vector<double>{a});
}

}  // namespace

TEST_CASE("flat states are fixed points") {
  const PeriodicField c = PeriodicField::constant(P, 1.4);
  CHECK(max_coeff_diff(step_thinfilm(c, 1e-2, 1.4), c) == 0.0);
  const ThreadState s{0.0, c, 0.2};
  const ThreadState next = step_full(s, 1e-2, 1.4);
  CHECK(max_coeff_diff(next.h, c) < 1e-15);
  CHECK(next.t == 1e-2);

  EvolutionOptions opts;
  opts.dt = 1e-2;
  opts.t_final = 0.05;
  const Trajectory t = integrate(c, 0.1, opts);
  CHECK_FALSE(t.failed);
  for (const auto& h : t.states) CHECK(max_coeff_diff(h, c) < 1e-15);
}

TEST_CASE("linearized decay rates") {
  const double delta = 1e-6, dt = 1e-3;
  const PeriodicField h = bump(delta);
  const double cbar = grid_max(h);
  {
    const PeriodicField next = step_thinfilm(h, dt, cbar);
    const double rate = -std::log(next[1].real() / h[1].real()) / dt;
    CHECK_THAT(rate, WithinRel(1.0, 0.01));
  }
  for (double eps : {0.4, 0.1, 0.025}) {
    const ThreadState next = step_full({0.0, h, eps}, dt, cbar);
    const double rate = -std::log(next.h[1].real() / h[1].real()) / dt;
    CHECK_THAT(rate, WithinRel(std::tanh(eps) / eps, 0.01));
  }
}

TEST_CASE("mass conservation and energy decay") {
  EvolutionOptions opts;
  opts.dt = 5e-4;
  opts.t_final = 0.05;
  const PeriodicField h = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.2, 0.1},
                                                       std::vector<double>{0.05});
  const Trajectory tf = integrate(h, 0.0, opts);
  CHECK_FALSE(tf.failed);
  CHECK(tf.mass_drift <= 1e-12);
  for (std::size_t i = 1; i < tf.energy.size(); ++i)
    CHECK(tf.energy[i] <= tf.energy[i - 1] + 1e-8 * opts.dt);
  const Trajectory full = integrate(h, 0.1, opts);
  CHECK(full.mass_drift <= 1e-12);
}

TEST_CASE("decay toward the flat state") {
  EvolutionOptions opts;
  opts.dt = 5e-4;
  opts.t_final = 0.1;
  const PeriodicField h = bump();
  const Trajectory t = integrate(h, 0.1, opts);
  REQUIRE_FALSE(t.failed);
  CHECK(t.times.size() == 201);
  CHECK_THAT(t.times.back(), WithinAbs(0.1, 1e-15));
  const PeriodicField m = PeriodicField::constant(P, 1.0);
  CHECK(sobolev_norm(t.states.back() - m, 0.0) < sobolev_norm(h - m, 0.0));
  for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
}

TEST_CASE("temporal self-convergence is first order") {
  const PeriodicField h = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.2, 0.1});
  auto run = [&](double dt) {
    EvolutionOptions opts;
    opts.dt = dt;
    opts.t_final = 0.05;
    return integrate(h, 0.0, opts).states.back();
  };
  const PeriodicField a = run(2e-3), b = run(1e-3), c = run(5e-4);
  const double slope = std::log2(sobolev_norm(a - b, 0.0) / sobolev_norm(b - c, 0.0));
  CHECK(slope > 0.8);
  CHECK(slope < 1.2);
}

TEST_CASE("translation equivariance of one step") {
  const PeriodicField h = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.1, 0.05},
                                                       std::vector<double>{0.03});
  const double a = 1.3, dt = 1e-3;
  const ThreadState s = step_full({0.0, h, 0.1}, dt, 1.2);
  const ThreadState ss = step_full({0.0, h.shifted(a), 0.1}, dt, 1.2);
  CHECK(max_coeff_diff(ss.h, s.h.shifted(a)) < 1e-9);
  CHECK(max_coeff_diff(step_thinfilm(h.shifted(a), dt, 1.2), step_thinfilm(h, dt, 1.2).shifted(a)) <
        1e-12);
}

TEST_CASE("blowup alternative is reported") {
  // An anti-diffusive mean-preserving flow drives the minimum below α.
  const PeriodicField h = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.5});
  EvolutionOptions opts;
  opts.dt = 0.05;
  opts.t_final = 2.0;
  opts.max_halvings = 3;
  const Rhs grow = [](const PeriodicField& f) {
    return 20.0 * (f - PeriodicField::constant(f.modes(), f[0].real()));
  };
  const Trajectory t = integrate_rhs(h, grow, 0.0, opts);
  CHECK(t.failed);
  CHECK_THAT(t.failure, Catch::Matchers::ContainsSubstring("positivity"));
  CHECK(t.rejected >= 1);
  for (double m : t.min_height) CHECK(m > 0.1);
}

TEST_CASE("integrate validates its input") {
  EvolutionOptions opts;
  CHECK_THROWS_AS(integrate(PeriodicField::constant(P, 0.05), 0.0, opts), DomainError);
  CHECK_THROWS_AS(integrate(bump(), 0.5, opts), DomainError);
  opts.dt = -1.0;
  CHECK_THROWS_AS(integrate(bump(), 0.0, opts), DomainError);
  CHECK_THROWS_AS(imex_step(bump(), bump(), 0.0, 1.0), DomainError);
}

TEST_CASE("thin-film energy identity") {
  // d/dt ∫(h')²/2 = −∫ h (h''')² dx along the exact flow.
  const PeriodicField h = PeriodicField::trigonometric(P, 1.0, std::vector<double>{0.2},
                                                       std::vector<double>{0.0, 0.1});
  const PeriodicField r = thinfilm_rhs(h);
  const double rate = l2_inner(deriv(h, 1), deriv(r, 1));
  const PeriodicField h3 = deriv(h, 3);
  CHECK_THAT(rate, WithinRel(-l2_inner(h, product(h3, h3)), 1e-12));
  CHECK(rate < 0.0);
}
