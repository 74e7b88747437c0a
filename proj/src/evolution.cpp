#include "hsthread/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "hsthread/error.hpp"

namespace hsthread {

namespace {

struct StepRejected {
  std::string reason;
};

class Stepper {
 public:
  Stepper(const Rhs& rhs, double cbar, const EvolutionOptions& opts)
      : rhs_(rhs), cbar_(cbar), opts_(opts) {}

  PeriodicField advance(const PeriodicField& h, double dt, int depth) {
    std::string reason;
    if (auto next = attempt(h, dt, reason)) return *next;
    ++rejected;
    if (depth >= opts_.max_halvings) throw StepRejected{reason};
    const PeriodicField half = advance(h, 0.5 * dt, depth + 1);
    return advance(half, 0.5 * dt, depth + 1);
  }

  int rejected = 0;

 private:
  std::optional<PeriodicField> attempt(const PeriodicField& h, double dt, std::string& reason) {
    PeriodicField next;
    try {
      next = imex_step(h, rhs_(h), dt, cbar_);
    } catch (const std::exception& e) {
      reason = e.what();
      return std::nullopt;
    }
    const auto& adm = opts_.elliptic.admissibility;
    std::ostringstream msg;
    const double lo = grid_min(next);
    if (!(lo > adm.alpha)) {
      msg << "positivity lost: min h = " << lo << " <= alpha = " << adm.alpha;
      reason = msg.str();
      return std::nullopt;
    }
    const double norm = sobolev_norm(next, adm.order);
    if (!(norm < adm.bound)) {
      msg << "norm blowup: ||h||_" << adm.order << " = " << norm << " >= M = " << adm.bound;
      reason = msg.str();
      return std::nullopt;
    }
    const int cutoff = 2 * h.modes() / 3;
    const double tail = tail_fraction(next, cutoff);
    if (tail > std::max(opts_.tail_floor, opts_.tail_factor * tail_fraction(h, cutoff))) {
      msg << "spectral tail growth: fraction above mode " << cutoff << " = " << tail;
      reason = msg.str();
      return std::nullopt;
    }
    return next;
  }

  const Rhs& rhs_;
  double cbar_;
  const EvolutionOptions& opts_;
};

}  // namespace

PeriodicField thinfilm_rhs(const PeriodicField& h) {
  return -deriv(product(h, deriv(h, 3)), 1);
}

PeriodicField imex_step(const PeriodicField& h, const PeriodicField& r, double dt, double cbar) {
  if (!(dt > 0.0)) throw DomainError("imex_step: dt must be positive");
  PeriodicField out(h.modes());
  out.set(0, h[0]);
  for (int p = 1; p <= h.modes(); ++p) {
    const double s = cbar * std::pow(double(p), 4);
    out.set(p, (h[p] + dt * (r[p] + s * h[p])) / (1.0 + dt * s));
  }
  return out;
}

ThreadState step_full(const ThreadState& state, double dt, double cbar,
                      const EllipticOptions& opts) {
  return {state.t + dt, imex_step(state.h, evolution_rhs(state.eps, state.h, opts), dt, cbar),
          state.eps};
}

PeriodicField step_thinfilm(const PeriodicField& h, double dt, double cbar) {
  return imex_step(h, thinfilm_rhs(h), dt, cbar);
}

double thinfilm_energy(const PeriodicField& h) {
  const PeriodicField d = deriv(h, 1);
  return 0.5 * l2_inner(d, d);
}

Trajectory integrate_rhs(const PeriodicField& initial, const Rhs& rhs, double eps,
                         const EvolutionOptions& opts) {
  if (!(opts.dt > 0.0)) throw DomainError("integrate: dt must be positive");
  if (!(opts.t_final >= 0.0)) throw DomainError("integrate: final time must be nonnegative");
  require_admissible(initial, opts.elliptic.admissibility);

  Trajectory traj;
  traj.eps = eps;
  traj.dt = opts.dt;
  traj.stabilizer = opts.stabilizer > 0.0 ? opts.stabilizer : grid_max(initial);
  const double mass0 = mean(initial);
  auto record = [&](double t, const PeriodicField& h) {
    traj.times.push_back(t);
    traj.states.push_back(h);
    traj.min_height.push_back(grid_min(h));
    traj.energy.push_back(thinfilm_energy(h));
    traj.mass_drift = std::max(traj.mass_drift, std::abs(mean(h) - mass0));
  };
  record(0.0, initial);

  const long steps = static_cast<long>(std::ceil(opts.t_final / opts.dt - 1e-9));
  Stepper stepper(rhs, traj.stabilizer, opts);
  PeriodicField h = initial;
  for (long n = 1; n <= steps; ++n) {
    const double t_prev = traj.times.back();
    const double t_next = std::min(n * opts.dt, opts.t_final);
    try {
      h = stepper.advance(h, t_next - t_prev, 0);
    } catch (const StepRejected& r) {
      traj.failed = true;
      std::ostringstream msg;
      msg << "step failed at t = " << t_prev << ": " << r.reason;
      traj.failure = msg.str();
      break;
    }
    record(t_next, h);
  }
  traj.rejected = stepper.rejected;
  return traj;
}

Trajectory integrate(const PeriodicField& initial, double eps, const EvolutionOptions& opts) {
  if (eps < 0.0) throw DomainError("integrate: eps must be nonnegative");
  if (eps == 0.0) return integrate_rhs(initial, thinfilm_rhs, 0.0, opts);
  const EllipticOptions ell = opts.elliptic;
  if (!(eps <= ell.eps_max)) throw DomainError("integrate: eps outside admissible range");
  return integrate_rhs(
      initial, [eps, ell](const PeriodicField& h) { return evolution_rhs(eps, h, ell); }, eps,
      opts);
}

}  // namespace hsthread
