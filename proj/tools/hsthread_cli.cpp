// Command-line front end: converge | inequalities | evolve | expand.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hsthread/error.hpp"
#include "hsthread/harness.hpp"

namespace fs = std::filesystem;
using namespace hsthread;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::vector<double>> eps_list;
  std::optional<int> order_k, modes, ny;
  std::optional<double> t_final, dt;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--eps-list", o.eps_list, "strictly decreasing eps values in (0, 0.4]")
      ->delimiter(',');
  cmd->add_option("--order-k", o.order_k, "expansion order k (even)");
  cmd->add_option("--t-final", o.t_final, "final time T");
  cmd->add_option("--modes", o.modes, "Fourier truncation P");
  cmd->add_option("--ny", o.ny, "Chebyshev order in y");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "seed for randomized suites");
  cmd->add_option("--threads", o.threads, "worker threads (0: hardware)");
}

RunConfig resolve(const Overrides& o, bool eps_is_inequality_sweep) {
  RunConfig cfg;
  if (!o.config.empty()) cfg = load_config(o.config, cfg);
  if (o.eps_list) (eps_is_inequality_sweep ? cfg.inequality_eps : cfg.eps_list) = *o.eps_list;
  if (o.order_k) cfg.order_k = *o.order_k;
  if (o.t_final) cfg.t_final = *o.t_final;
  if (o.modes) cfg.modes = *o.modes;
  if (o.ny) cfg.ny = *o.ny;
  if (o.dt) cfg.dt = *o.dt;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

int cmd_converge(const RunConfig& cfg, bool strict) {
  const ConvergenceReport report = run_convergence(cfg);
  write_text(out_path(cfg, "report.json"), convergence_to_json(report).dump(2) + "\n");
  write_text(out_path(cfg, "errors.csv"), errors_csv(report));
  for (const auto& t : report.full)
    if (!t.states.empty())
      write_text(out_path(cfg, trajectory_filename(t.eps)),
                 trajectory_to_json(t, cfg.sample_every).dump() + "\n");
  for (const auto& f : report.fits) {
    if (f.exact_zero)
      std::printf("k=%d s=%d exact-zero case (all errors <= %.0e)\n", f.k, f.s, kExactZero);
    else if (f.fit) {
      char hi[32] = "inf";
      if (std::isfinite(f.band_hi)) std::snprintf(hi, sizeof hi, "%.2f", f.band_hi);
      std::printf("k=%d s=%d slope=%.4f residual=%.2e band=[%.2f, %s] %s\n", f.k, f.s,
                  f.fit->slope, f.fit->residual, f.band_lo, hi, f.pass ? "ok" : "outside band");
    }
    else
      std::printf("k=%d s=%d no slope (insufficient data)\n", f.k, f.s);
  }
  for (const auto& msg : report.failures) std::fprintf(stderr, "failure: %s\n", msg.c_str());
  if (!report.complete) return 2;
  if (strict && !report.pass()) return 3;
  return 0;
}

int cmd_inequalities(const RunConfig& cfg, bool strict) {
  const InequalityReport report = run_inequality_suite(cfg);
  write_text(out_path(cfg, "report.json"), inequalities_to_json(report).dump(2) + "\n");
  for (const auto& e : report.entries)
    std::printf("%-38s min=%.4e median=%.4e max=%.4e spread=%.3f %s\n", e.name.c_str(), e.min,
                e.median, e.max, e.spread,
                e.asserted ? (e.pass ? "ok" : "outside band") : "(diagnostic)");
  if (strict && !report.pass()) return 3;
  return 0;
}

int cmd_evolve(const RunConfig& cfg, bool thin_film) {
  const EvolutionOptions opts = cfg.evolution_options();
  const PeriodicField h0 = cfg.initial_state();
  std::vector<double> eps = cfg.eps_list;
  if (thin_film) eps.insert(eps.begin(), 0.0);
  nlohmann::json runs = nlohmann::json::array();
  bool failed = false;
  for (double e : eps) {
    const Trajectory t = integrate(h0, e, opts);
    write_text(out_path(cfg, trajectory_filename(e)),
               trajectory_to_json(t, cfg.sample_every).dump() + "\n");
    bool energy_monotone = true;
    for (std::size_t i = 1; i < t.energy.size(); ++i)
      energy_monotone = energy_monotone && t.energy[i] <= t.energy[i - 1] + 1e-8 * cfg.dt;
    runs.push_back({{"eps", e}, {"steps", t.states.size() - 1}, {"final_time", t.times.back()},
                    {"rejected_steps", t.rejected}, {"mass_drift", t.mass_drift},
                    {"min_height", *std::min_element(t.min_height.begin(), t.min_height.end())},
                    {"energy_nonincreasing", energy_monotone}, {"failed", t.failed},
                    {"failure", t.failure}, {"modes", cfg.modes}, {"ny", cfg.ny},
                    {"dt", cfg.dt}});
    std::printf("eps=%g steps=%zu rejected=%d mass_drift=%.2e %s\n", e, t.states.size() - 1,
                t.rejected, t.mass_drift, t.failed ? t.failure.c_str() : "ok");
    failed = failed || t.failed;
  }
  write_text(out_path(cfg, "report.json"),
             nlohmann::json{{"command", "evolve"}, {"config", config_to_json(cfg)}, {"runs", runs}}
                     .dump(2) +
                 "\n");
  return failed ? 2 : 0;
}

int cmd_expand(const RunConfig& cfg) {
  const PeriodicField h0 = cfg.initial_state();
  const ExpansionTerms terms = expansion_terms(h0, cfg.order_k, cfg.ny, cfg.admissibility());
  auto coeffs = [](const PeriodicField& f) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (const auto& c : f.coeffs()) {
      re.push_back(c.real());
      im.push_back(c.imag());
    }
    return nlohmann::json{{"re", re}, {"im", im}};
  };
  nlohmann::json fk = nlohmann::json::array();
  for (std::size_t p = 2; p < terms.terms.size(); p += 2)
    fk.push_back({{"p", p}, {"eps_power", p - 2}, {"coeffs", coeffs(terms.terms[p])}});

  const Trajectory thin = integrate(h0, 0.0, cfg.evolution_options());
  if (thin.failed) {
    std::fprintf(stderr, "thin-film run failed: %s\n", thin.failure.c_str());
    return 2;
  }
  RpOptions rp;
  rp.ny = cfg.ny;
  rp.admissibility = cfg.admissibility();
  const ExpansionBundle bundle = build_expansion(cfg.order_k, thin, rp);
  nlohmann::json corr = nlohmann::json::array();
  for (std::size_t p = 0; p < bundle.corrections.size(); ++p) {
    const Trajectory& t = bundle.corrections[p];
    double sup = 0.0;
    for (const auto& s : t.states) sup = std::max(sup, sobolev_norm(s, 0.0));
    const std::string file = "correction_" + std::to_string(p) + ".json";
    write_text(out_path(cfg, file), trajectory_to_json(t, cfg.sample_every).dump() + "\n");
    corr.push_back({{"p", p}, {"sup_l2", sup}, {"rp_residual", bundle.rp_residual[p]},
                    {"file", file}, {"final", coeffs(t.states.back())}});
    std::printf("h_%zu: sup_t ||h_p||_0 = %.6e\n", p, sup);
  }
  write_text(out_path(cfg, "report.json"),
             nlohmann::json{{"command", "expand"},
                            {"config", config_to_json(cfg)},
                            {"f_k_terms_at_t0", fk},
                            {"corrections", corr}}
                     .dump(2) +
                 "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slender Hele-Shaw thread: thin-film limit verification harness"};
  app.require_subcommand(1);
  Overrides conv, ineq, evol, expd;
  bool strict = false, ineq_strict = false, thin_film = false;
  auto* c = app.add_subcommand("converge", "convergence rates of h_eps toward h_{eps,k}");
  add_common(c, conv);
  c->add_flag("--strict", strict, "exit 3 when a fitted slope is outside its band");
  auto* i = app.add_subcommand("inequalities", "Poincare/trace/extension/coercivity ratios");
  i->add_flag("--strict", ineq_strict, "exit 3 when a ratio family leaves its band");
  add_common(i, ineq);
  auto* e = app.add_subcommand("evolve", "integrate single trajectories");
  add_common(e, evol);
  e->add_flag("--thin-film", thin_film, "also integrate the thin-film equation");
  auto* x = app.add_subcommand("expand", "dump F_k coefficients and corrections");
  add_common(x, expd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c->parsed()) return cmd_converge(resolve(conv, false), strict);
    if (i->parsed()) return cmd_inequalities(resolve(ineq, true), ineq_strict);
    if (e->parsed()) return cmd_evolve(resolve(evol, false), thin_film);
    if (x->parsed()) return cmd_expand(resolve(expd, false));
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 1;
  } catch (const NumericalError& err) {
    std::fprintf(stderr, "numerical failure: %s\n", err.what());
    return 2;
  } catch (const DomainError& err) {
    std::fprintf(stderr, "numerical failure: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 1;
}
