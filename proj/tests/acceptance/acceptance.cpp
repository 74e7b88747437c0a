// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hsthread/elliptic.hpp"
#include "hsthread/error.hpp"
#include "hsthread/expansion.hpp"
#include "hsthread/harness.hpp"

using namespace hsthread;

namespace {

// Pinned tolerances.
constexpr double kDnRelTol = 1e-8;
constexpr double kIdentityTol = 1e-9;
constexpr double kConsistencyLo = 1.8, kConsistencyHi = 2.3;
constexpr double kRemainderMin = 3.0;
constexpr double kRateLo = 1.8, kRateHi = 2.3, kCorrectedMin = 2.8;
constexpr double kDecayRelTol = 0.01;
constexpr double kMassTol = 1e-12, kEnergyTolPerDt = 1e-8;
constexpr double kCoercivityFactor = 10.0, kRatioBand = 2.0;
constexpr double kTimeSlopeLo = 0.8, kTimeSlopeHi = 1.2;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %-32s %s  %s\n", id, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string detail;
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, " [%.1fs]", secs);
  report(id, name, pass, detail + buf);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

PeriodicField random_admissible(std::mt19937_64& rng, int modes) {
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  std::vector<double> c(4), s(4);
  for (int k = 0; k < 4; ++k) {
    c[k] = u(rng) / (k + 1);
    s[k] = u(rng) / (k + 1);
  }
  return PeriodicField::trigonometric(modes, 1.0, c, s);
}

}  // namespace

int main() {
  const RunConfig cfg;  // defaults: P = 32, N_y = 16, dt = 5e-4, T = 0.1
  const int P = cfg.modes;
  const PeriodicField h = cfg.initial_state();  // 1 + 0.1 cos x
  const std::vector<double> sweep = cfg.eps_list;

  run(1, "flat-strip DN oracle", [&](std::string& d) {
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0})
      for (double eps : {0.4, 0.1, 0.025}) {
        const DirichletSolver solver(eps, PeriodicField::constant(P, c));
        for (int p = 1; p <= 16; ++p) {
          PeriodicField f(P);
          f.set(p, 1.0);
          const double exact = p * std::tanh(eps * c * p) / eps;
          worst = std::max(worst, std::abs(solver.dn_map(f)[p].real() - exact) / exact);
        }
      }
    d = fmt("max rel err %.2e (tol %.0e)", worst, kDnRelTol);
    return worst <= kDnRelTol;
  });

  run(2, "leading-order identity", [&](std::string& d) {
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const PeriodicField g = random_admissible(rng, P);
      const PeriodicField k0 = deriv(g, 2);
      const PeriodicField assembled = boundary_b0(g, w_coefficient(g, k0, 2, cfg.ny)) +
                                      boundary_b2(g, w_coefficient(g, k0, 0, cfg.ny));
      worst = std::max(worst, max_coeff_diff(assembled, -deriv(product(g, deriv(g, 3)), 1)));
    }
    d = fmt("max coeff diff %.2e (tol %.0e)", worst, kIdentityTol);
    return worst <= kIdentityTol;
  });

  std::vector<std::pair<double, double>> r0, r2;
  run(3, "small-eps consistency", [&](std::string& d) {
    const PeriodicField tf = -deriv(product(h, deriv(h, 3)), 1);
    for (double eps : sweep) {
      const PeriodicField F = evolution_rhs(eps, h);
      r0.emplace_back(eps, sobolev_norm(F - tf, 0.0));
      r2.emplace_back(eps, sobolev_norm(F - f_k(eps, h, 2, cfg.ny), 0.0));
    }
    const double s = fit_slope(r0).slope;
    d = fmt("slope %.3f (band [%.1f, ", s, kConsistencyLo) + fmt("%.1f])", kConsistencyHi);
    return s >= kConsistencyLo && s <= kConsistencyHi;
  });

  run(4, "expansion remainder k=2", [&](std::string& d) {
    const double s = fit_slope(r2).slope;
    d = fmt("slope %.3f (min %.1f)", s, kRemainderMin);
    return s >= kRemainderMin;
  });

  ConvergenceReport conv;
  run(5, "trajectory convergence rate", [&](std::string& d) {
    conv = run_convergence(cfg);
    if (!conv.complete) {
      d = "incomplete run";
      return false;
    }
    bool ok = true;
    for (const auto& f : conv.fits) {
      if (f.s != 0 || !f.fit) continue;
      const double s = f.fit->slope;
      d += fmt("k=%.0f slope %.3f; ", f.k, s);
      if (f.k == 0) ok = ok && s >= kRateLo && s <= kRateHi;
      else ok = ok && s >= kCorrectedMin;
    }
    return ok;
  });

  run(6, "linearized decay rates", [&](std::string& d) {
    const double delta = 1e-6, dt = 1e-3;
    const PeriodicField p = PeriodicField::trigonometric(P, 1.0, std::vector<double>{delta});
    const double cbar = grid_max(p);
    double worst = std::abs(-std::log(step_thinfilm(p, dt, cbar)[1].real() / p[1].real()) / dt - 1.0);
    for (double eps : {0.4, 0.2, 0.1, 0.05, 0.025}) {
      const ThreadState next = step_full({0.0, p, eps}, dt, cbar);
      const double rate = -std::log(next.h[1].real() / p[1].real()) / dt;
      const double exact = std::tanh(eps) / eps;
      worst = std::max(worst, std::abs(rate - exact) / exact);
    }
    d = fmt("max rel rate err %.2e (tol %.0e)", worst, kDecayRelTol);
    return worst <= kDecayRelTol;
  });

  run(7, "mass and energy", [&](std::string& d) {
    if (conv.full.empty()) conv = run_convergence(cfg);
    double drift = conv.thin_film.mass_drift;
    for (const auto& t : conv.full) drift = std::max(drift, t.mass_drift);
    const auto& e = conv.thin_film.energy;
    double rise = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < e.size(); ++i) rise = std::max(rise, e[i] - e[i - 1]);
    const double etol = kEnergyTolPerDt * conv.thin_film.dt;
    d = fmt("mass drift %.2e, max energy rise %.2e", drift, rise);
    return drift <= kMassTol && rise <= etol;
  });

  InequalityReport ineq;
  run(8, "coercivity", [&](std::string& d) {
    ineq = run_inequality_suite(cfg);
    const auto& e = ineq.entry("coercivity");
    d = std::to_string(ineq.coercivity_samples) + fmt(" samples, min pairing %.3e", ineq.coercivity_min_pairing) +
        fmt(", normalized min/median %.3f", e.min / e.median);
    return ineq.coercivity_samples == 5 * 100 * 4 && ineq.coercivity_min_pairing > 0.0 &&
           e.min >= e.median / kCoercivityFactor;
  });

  run(9, "inequality ratios", [&](std::string& d) {
    if (ineq.entries.empty()) ineq = run_inequality_suite(cfg);
    bool ok = true;
    for (const auto& e : ineq.entries) {
      if (!e.asserted || e.name == "coercivity") continue;
      d += e.name + fmt(" spread %.3f; ", e.spread);
      ok = ok && std::isfinite(e.spread) && e.spread <= kRatioBand;
    }
    return ok;
  });

  run(10, "temporal self-convergence", [&](std::string& d) {
    auto final_state = [&](double dt) {
      EvolutionOptions opts = cfg.evolution_options();
      opts.dt = dt;
      opts.t_final = 0.05;
      const Trajectory t = integrate(PeriodicField::trigonometric(16, 1.0, std::vector<double>{0.2, 0.1}),
                                     0.1, opts);
      if (t.failed) throw NumericalError(t.failure);
      return t.states.back();
    };
    const PeriodicField a = final_state(2e-3), b = final_state(1e-3), c = final_state(5e-4);
    const double slope = std::log2(sobolev_norm(a - b, 0.0) / sobolev_norm(b - c, 0.0));
    d = fmt("slope %.3f (band [%.1f, ", slope, kTimeSlopeLo) + fmt("%.1f])", kTimeSlopeHi);
    return slope >= kTimeSlopeLo && slope <= kTimeSlopeHi;
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
