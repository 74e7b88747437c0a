#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hsthread/elliptic.hpp"
#include "hsthread/geometry.hpp"
#include "hsthread/spectral.hpp"

namespace hsthread {

struct EvolutionOptions {
  double dt = 5e-4;
  double t_final = 0.1;
  /// Stabilization constant c̄; a nonpositive value means max_x h(0).
  double stabilizer = 0.0;
  int max_halvings = 8;
  /// A step is rejected when the fraction of the state above 2P/3 exceeds
  /// max(tail_floor, tail_factor · previous fraction).
  double tail_floor = 1e-6;
  double tail_factor = 10.0;
  EllipticOptions elliptic{};
};

/// Sampled solution on t_0 = 0 < t_1 < … ≤ T.
struct Trajectory {
  double eps = 0.0;  // 0 for the thin-film equation
  double dt = 0.0;
  double stabilizer = 0.0;
  std::vector<double> times;
  std::vector<PeriodicField> states;
  std::vector<double> min_height;
  std::vector<double> energy;  // ∫(h')²/2 dx
  int rejected = 0;
  double mass_drift = 0.0;  // max_t |∫h(t) − ∫h(0)|
  bool failed = false;
  std::string failure;
};

using Rhs = std::function<PeriodicField(const PeriodicField&)>;

/// −(h h''')'.
PeriodicField thinfilm_rhs(const PeriodicField& h);

/// One stabilized semi-implicit step
/// (1 + dt c̄ ∂⁴)h⁺ = h + dt(r + c̄ ∂⁴h), leaving the mean mode untouched.
PeriodicField imex_step(const PeriodicField& h, const PeriodicField& r, double dt, double cbar);

ThreadState step_full(const ThreadState& state, double dt, double cbar,
                      const EllipticOptions& opts = {});
PeriodicField step_thinfilm(const PeriodicField& h, double dt, double cbar);

/// ∫(h')²/2 dx.
double thinfilm_energy(const PeriodicField& h);

/// Integrates ∂_t h = 𝓕(ε, h) (eps > 0) or the thin-film equation (eps == 0).
Trajectory integrate(const PeriodicField& initial, double eps, const EvolutionOptions& opts = {});

/// Generic driver used by `integrate`.
Trajectory integrate_rhs(const PeriodicField& initial, const Rhs& rhs, double eps,
                         const EvolutionOptions& opts);

}  // namespace hsthread
