#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsthread/evolution.hpp"
#include "hsthread/expansion.hpp"
#include "json.hpp"

namespace hsthread {

/// h(0) = mean + Σ_k cos_amps[k] cos((k+1)x).
struct InitialData {
  double mean = 1.0;
  std::vector<double> cos_amps{0.1};
};

struct RunConfig {
  InitialData initial{};
  int modes = 32;
  int ny = 16;
  double dt = 5e-4;
  double t_final = 0.1;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  /// ε-sweep of the inequality suite.
  std::vector<double> inequality_eps{0.4, 0.2, 0.1, 0.05};
  int order_k = 2;
  std::vector<int> norm_orders{0, 1};
  double alpha = 0.1;
  double bound = 100.0;
  double norm_order = 4.0;
  std::string out_dir = "out";
  std::uint64_t seed = 20240601;
  /// Error sampling stride in steps (the final instant is always included).
  int sample_every = 20;
  /// Worker threads for ε runs; 0 uses the hardware concurrency.
  int threads = 0;

  /// Throws ConfigError.
  void validate() const;
  Admissibility admissibility() const { return {alpha, bound, norm_order}; }
  EvolutionOptions evolution_options() const;
  PeriodicField initial_state() const;
};

/// Parses a JSON config on top of the defaults. Keys may be written with '_'
/// or '-'; unknown keys are rejected. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
nlohmann::json config_to_json(const RunConfig& cfg);

struct SlopeFit {
  double slope = 0.0;
  /// RMS deviation of log(error) from the fitted line.
  double residual = 0.0;
};

/// Least-squares line through (log ε, log error). Needs ≥ 3 pairs with
/// positive ε and error.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pairs);

struct ConvergenceRow {
  double eps = 0.0;
  int k = 0;
  int s = 0;
  double sup_error = 0.0;
};

struct ConvergenceFit {
  int k = 0;
  int s = 0;
  std::optional<SlopeFit> fit;
  /// Every error is at roundoff level, so no slope is defined.
  bool exact_zero = false;
  double band_lo = 0.0;
  double band_hi = 0.0;  // +inf when open
  bool pass = false;
};

struct ConvergenceReport {
  RunConfig config;
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceFit> fits;
  std::vector<Trajectory> full;  // one per ε, in eps_list order
  Trajectory thin_film;
  std::vector<double> rp_residual;
  bool complete = true;
  std::vector<std::string> failures;

  bool pass() const;
};

/// Errors below this are treated as exact zeros.
inline constexpr double kExactZero = 1e-10;

/// Expected-order band: [1.8, 2.3] for k = 0, [k + 0.8, ∞) otherwise.
std::pair<double, double> expected_band(int k);

ConvergenceReport run_convergence(const RunConfig& cfg);

/// sup over the sampled instants of ‖a(t) − b(t)‖_s.
double sup_error(const Trajectory& a, const Trajectory& b, double s, int sample_every);

struct InequalityEntry {
  std::string name;
  std::vector<double> eps;
  std::vector<double> ratios;
  /// Test-field index of each sample; empty when samples are not grouped.
  std::vector<int> field;
  double min = 0.0, median = 0.0, max = 0.0;
  /// Largest factor by which a ratio departs from its field's median over ε.
  double spread = 0.0;
  /// Diagnostic entries are reported but not part of the pass decision.
  bool asserted = true;
  bool pass = false;
};

struct InequalityReport {
  std::vector<InequalityEntry> entries;
  /// Median unweighted zero-mean-trace Poincaré ratio per ε.
  std::vector<double> unweighted_by_eps;
  bool degeneration_visible = false;
  int coercivity_samples = 0;
  double coercivity_min_pairing = 0.0;

  const InequalityEntry& entry(const std::string& name) const;
  bool pass() const;
};

/// Every ratio lies within `factor` of the median over ε of its own test
/// field, in both directions. Ungrouped entries use the pooled median.
bool within_factor(const InequalityEntry& e, double factor);

InequalityReport run_inequality_suite(const RunConfig& cfg);

nlohmann::json trajectory_to_json(const Trajectory& traj, int sample_every);
nlohmann::json convergence_to_json(const ConvergenceReport& report);
nlohmann::json inequalities_to_json(const InequalityReport& report);
std::string errors_csv(const ConvergenceReport& report);
/// "trajectory_<eps>.json".
std::string trajectory_filename(double eps);
void write_text(const std::string& path, const std::string& text);

}  // namespace hsthread
