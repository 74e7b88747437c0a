#include "hsthread/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "hsthread/error.hpp"

namespace hsthread {

using nlohmann::json;

namespace {

void check_eps_sweep(const std::vector<double>& eps, const char* name) {
  if (eps.empty()) throw ConfigError(std::string(name) + ": list is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] <= 0.4))
      throw ConfigError(std::string(name) + ": every eps must lie in (0, 0.4]");
    if (i > 0 && !(eps[i] < eps[i - 1]))
      throw ConfigError(std::string(name) + ": list must be strictly decreasing");
  }
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void summarize(InequalityEntry& e) {
  if (e.ratios.empty()) return;
  e.min = *std::min_element(e.ratios.begin(), e.ratios.end());
  e.max = *std::max_element(e.ratios.begin(), e.ratios.end());
  e.median = median_of(e.ratios);
}

PeriodicField random_trig(std::mt19937_64& rng, int modes, int kmax, double mean) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(kmax), s(kmax);
  for (int k = 0; k < kmax; ++k) {
    c[k] = u(rng);
    s[k] = u(rng);
  }
  return PeriodicField::trigonometric(modes, mean, c, s);
}

int worker_count(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void RunConfig::validate() const {
  if (modes < 4 || modes > 512) throw ConfigError("modes must lie in [4, 512]");
  if (ny < 4 || ny > 128) throw ConfigError("ny must lie in [4, 128]");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (dt > t_final) throw ConfigError("dt must not exceed t_final");
  check_eps_sweep(eps_list, "eps_list");
  check_eps_sweep(inequality_eps, "inequality_eps");
  if (order_k < 0 || order_k % 2 != 0) throw ConfigError("order_k must be even and nonnegative");
  if (order_k + 2 > ny) throw ConfigError("order_k + 2 must not exceed ny");
  for (int s : norm_orders)
    if (s < 0) throw ConfigError("norm_orders must be nonnegative");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(bound > 0.0)) throw ConfigError("bound must be positive");
  if (!(norm_order >= 0.0)) throw ConfigError("norm_order must be nonnegative");
  if (sample_every < 1) throw ConfigError("sample_every must be at least 1");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (static_cast<int>(initial.cos_amps.size()) > modes)
    throw ConfigError("initial.cos_amps has more entries than modes");
  if (!is_admissible(initial_state(), admissibility()))
    throw ConfigError("initial data is not admissible (min h <= alpha or norm >= bound)");
}

EvolutionOptions RunConfig::evolution_options() const {
  EvolutionOptions o;
  o.dt = dt;
  o.t_final = t_final;
  o.elliptic.ny = ny;
  o.elliptic.admissibility = admissibility();
  return o;
}

PeriodicField RunConfig::initial_state() const {
  return PeriodicField::trigonometric(modes, initial.mean, initial.cos_amps);
}

RunConfig config_from_json(const json& doc, RunConfig cfg) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [raw_key, value] : doc.items()) {
      std::string key = raw_key;
      std::replace(key.begin(), key.end(), '-', '_');
      if (key == "initial") {
        if (!value.is_object()) throw ConfigError("initial must be an object");
        for (const auto& [k2, v2] : value.items()) {
          std::string key2 = k2;
          std::replace(key2.begin(), key2.end(), '-', '_');
          if (key2 == "mean") cfg.initial.mean = v2.get<double>();
          else if (key2 == "cos_amps") cfg.initial.cos_amps = v2.get<std::vector<double>>();
          else throw ConfigError("unknown key initial." + k2);
        }
      } else if (key == "modes") cfg.modes = value.get<int>();
      else if (key == "ny") cfg.ny = value.get<int>();
      else if (key == "dt") cfg.dt = value.get<double>();
      else if (key == "t_final") cfg.t_final = value.get<double>();
      else if (key == "eps_list") cfg.eps_list = value.get<std::vector<double>>();
      else if (key == "inequality_eps") cfg.inequality_eps = value.get<std::vector<double>>();
      else if (key == "order_k") cfg.order_k = value.get<int>();
      else if (key == "norm_orders") cfg.norm_orders = value.get<std::vector<int>>();
      else if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "bound") cfg.bound = value.get<double>();
      else if (key == "norm_order") cfg.norm_order = value.get<double>();
      else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "sample_every") cfg.sample_every = value.get<int>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else throw ConfigError("unknown config key " + raw_key);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path + ": " + e.what());
  }
  return config_from_json(doc, std::move(base));
}

json config_to_json(const RunConfig& cfg) {
  return {
      {"initial", {{"mean", cfg.initial.mean}, {"cos_amps", cfg.initial.cos_amps}}},
      {"modes", cfg.modes},
      {"ny", cfg.ny},
      {"dt", cfg.dt},
      {"t_final", cfg.t_final},
      {"eps_list", cfg.eps_list},
      {"inequality_eps", cfg.inequality_eps},
      {"order_k", cfg.order_k},
      {"norm_orders", cfg.norm_orders},
      {"alpha", cfg.alpha},
      {"bound", cfg.bound},
      {"norm_order", cfg.norm_order},
      {"out_dir", cfg.out_dir},
      {"seed", cfg.seed},
      {"sample_every", cfg.sample_every},
      {"threads", cfg.threads},
  };
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw DomainError("fit_slope: need at least 3 (eps, error) pairs");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [e, err] : pairs) {
    if (!(e > 0.0) || !(err > 0.0)) throw DomainError("fit_slope: values must be positive");
    const double x = std::log(e), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw DomainError("fit_slope: eps values must be distinct");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [e, err] : pairs) {
    const double r = std::log(err) - (intercept + fit.slope * std::log(e));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::pair<double, double> expected_band(int k) {
  if (k == 0) return {1.8, 2.3};
  return {k + 0.8, std::numeric_limits<double>::infinity()};
}

double sup_error(const Trajectory& a, const Trajectory& b, double s, int sample_every) {
  const std::size_t n = std::min(a.states.size(), b.states.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % sample_every != 0 && i + 1 != n) continue;
    worst = std::max(worst, sobolev_norm(a.states[i] - b.states[i], s));
  }
  return worst;
}

bool ConvergenceReport::pass() const {
  if (!complete || fits.empty()) return false;
  return std::all_of(fits.begin(), fits.end(), [](const ConvergenceFit& f) { return f.pass; });
}

ConvergenceReport run_convergence(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.eps_list.size() < 3) throw ConfigError("converge needs at least 3 eps values");
  ConvergenceReport report;
  report.config = cfg;
  const EvolutionOptions opts = cfg.evolution_options();
  const PeriodicField h_init = cfg.initial_state();

  report.thin_film = integrate(h_init, 0.0, opts);
  if (report.thin_film.failed) {
    report.complete = false;
    report.failures.push_back("thin-film run: " + report.thin_film.failure);
    return report;
  }
  ExpansionBundle bundle;
  try {
    RpOptions rp;
    rp.ny = cfg.ny;
    rp.admissibility = cfg.admissibility();
    bundle = build_expansion(cfg.order_k, report.thin_film, rp);
  } catch (const std::exception& e) {
    report.complete = false;
    report.failures.push_back(std::string("expansion: ") + e.what());
    return report;
  }
  report.rp_residual = bundle.rp_residual;

  // Full runs, batched over a fixed number of workers.
  const std::size_t ne = cfg.eps_list.size();
  report.full.resize(ne);
  const std::size_t workers = static_cast<std::size_t>(worker_count(cfg));
  for (std::size_t start = 0; start < ne; start += workers) {
    std::vector<std::future<Trajectory>> jobs;
    for (std::size_t i = start; i < std::min(ne, start + workers); ++i)
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return integrate(h_init, cfg.eps_list[i], opts);
      }));
    for (std::size_t i = start; i < std::min(ne, start + workers); ++i)
      report.full[i] = jobs[i - start].get();
  }

  std::vector<int> orders{0};
  if (cfg.order_k > 0) orders.push_back(cfg.order_k);
  for (std::size_t i = 0; i < ne; ++i) {
    const Trajectory& full = report.full[i];
    if (full.failed) {
      report.complete = false;
      report.failures.push_back("eps = " + number(cfg.eps_list[i]) + ": " + full.failure);
      continue;
    }
    for (int k : orders) {
      const Trajectory approx =
          k == 0 ? report.thin_film : build_h_eps_k(cfg.eps_list[i], bundle);
      for (int s : cfg.norm_orders)
        report.rows.push_back({cfg.eps_list[i], k, s, sup_error(full, approx, s, cfg.sample_every)});
    }
  }

  for (int k : orders) {
    for (int s : cfg.norm_orders) {
      ConvergenceFit fit;
      fit.k = k;
      fit.s = s;
      std::tie(fit.band_lo, fit.band_hi) = expected_band(k);
      std::vector<std::pair<double, double>> pairs;
      bool all_zero = true;
      for (const auto& r : report.rows) {
        if (r.k != k || r.s != s) continue;
        pairs.emplace_back(r.eps, r.sup_error);
        all_zero = all_zero && r.sup_error <= kExactZero;
      }
      if (!pairs.empty() && all_zero) {
        fit.exact_zero = true;
        fit.pass = true;
      } else if (pairs.size() >= 3 &&
                 std::all_of(pairs.begin(), pairs.end(), [](auto& p) { return p.second > 0.0; })) {
        fit.fit = fit_slope(pairs);
        fit.pass = fit.fit->slope >= fit.band_lo && fit.fit->slope <= fit.band_hi;
      }
      report.fits.push_back(fit);
    }
  }
  return report;
}

const InequalityEntry& InequalityReport::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw DomainError("InequalityReport: no entry named " + name);
}

bool InequalityReport::pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const InequalityEntry& e) { return !e.asserted || e.pass; });
}

static double field_spread(const InequalityEntry& e) {
  if (e.field.empty()) return std::max(e.max / e.median, e.median / e.min);
  double worst = 1.0;
  const int nf = *std::max_element(e.field.begin(), e.field.end()) + 1;
  for (int f = 0; f < nf; ++f) {
    std::vector<double> own;
    for (std::size_t i = 0; i < e.ratios.size(); ++i)
      if (e.field[i] == f) own.push_back(e.ratios[i]);
    if (own.empty()) continue;
    const double m = median_of(own);
    for (double r : own) worst = std::max({worst, r / m, m / r});
  }
  return worst;
}

bool within_factor(const InequalityEntry& e, double factor) {
  if (e.ratios.empty()) return false;
  for (double r : e.ratios)
    if (!std::isfinite(r) || !(r > 0.0)) return false;
  return field_spread(e) <= factor;
}

InequalityReport run_inequality_suite(const RunConfig& cfg) {
  cfg.validate();
  constexpr int kFields = 10;
  constexpr int kPhi = 100;
  constexpr int kHeights = 5;
  constexpr double kBandFactor = 2.0;
  constexpr double kCoercivityFactor = 10.0;

  const int P = cfg.modes, ny = cfg.ny;
  std::mt19937_64 rng(cfg.seed);
  InequalityReport report;
  const auto& sweep = cfg.inequality_eps;

  auto named = [](std::string name, bool asserted = true) {
    InequalityEntry e;
    e.name = std::move(name);
    e.asserted = asserted;
    return e;
  };
  auto add = [&](InequalityEntry e) {
    summarize(e);
    e.spread = field_spread(e);
    e.pass = !e.asserted || within_factor(e, kBandFactor);
    report.entries.push_back(std::move(e));
  };

  {
    InequalityEntry e = named("poincare_zero_boundary");
    for (int f = 0; f < kFields; ++f) {
      const StripField w =
          StripField::separable(random_trig(rng, P, 3, 0.0), [](double y) { return 1.0 - y * y; },
                                ny);
      for (double eps : sweep) {
        e.eps.push_back(eps);
        e.field.push_back(f);
        e.ratios.push_back(poincare_check(w, eps, PoincareVariant::kZeroBoundary));
      }
    }
    add(std::move(e));
  }
  {
    InequalityEntry weighted = named("poincare_zero_mean_trace");
    InequalityEntry raw = named("poincare_zero_mean_trace_unweighted", false);
    for (int f = 0; f < kFields; ++f) {
      const StripField w = StripField::constant_in_y(random_trig(rng, P, 2, 0.0), ny);
      for (double eps : sweep) {
        const double r = poincare_check(w, eps, PoincareVariant::kZeroMeanTrace);
        weighted.eps.push_back(eps);
        weighted.field.push_back(f);
        weighted.ratios.push_back(r);
        raw.eps.push_back(eps);
        raw.field.push_back(f);
        raw.ratios.push_back(r / eps);
      }
    }
    for (double eps : sweep) {
      std::vector<double> at;
      for (std::size_t i = 0; i < raw.eps.size(); ++i)
        if (raw.eps[i] == eps) at.push_back(raw.ratios[i]);
      report.unweighted_by_eps.push_back(median_of(at));
    }
    add(std::move(weighted));
    add(std::move(raw));
    report.degeneration_visible = report.unweighted_by_eps.size() >= 2;
    for (std::size_t i = 1; i < report.unweighted_by_eps.size(); ++i)
      report.degeneration_visible = report.degeneration_visible &&
                                    report.unweighted_by_eps[i] > report.unweighted_by_eps[i - 1];
  }
  for (int t : {0, 1}) {
    InequalityEntry e = named("trace_t" + std::to_string(t));
    for (int f = 0; f < kFields; ++f) {
      std::uniform_real_distribution<double> m(-1.0, 1.0);
      const StripField w = StripField::separable(random_trig(rng, P, 3, m(rng)),
                                                 [](double y) { return y * y; }, ny);
      for (double eps : sweep) {
        e.eps.push_back(eps);
        e.field.push_back(f);
        e.ratios.push_back(trace_check(w, eps, t));
      }
    }
    add(std::move(e));
  }
  for (int t : {1, 2}) {
    InequalityEntry e = named("extension_t" + std::to_string(t));
    for (int f = 0; f < kFields; ++f) {
      std::uniform_real_distribution<double> m(-1.0, 1.0);
      const PeriodicField g = random_trig(rng, P, 3, m(rng));
      for (double eps : sweep) {
        const double rhs = sobolev_norm(g, t) + std::sqrt(eps) * sobolev_norm(g, t + 0.5);
        e.eps.push_back(eps);
        e.field.push_back(f);
        e.ratios.push_back(scaled_norm(extend_plus(g, eps, ny), t + 1, eps) / rhs);
      }
    }
    add(std::move(e));
  }
  {
    InequalityEntry e = named("coercivity");
    std::uniform_real_distribution<double> amp(-0.1, 0.1);
    std::vector<PeriodicField> heights;
    for (int i = 0; i < kHeights; ++i) {
      std::vector<double> c(3), s(3);
      for (int k = 0; k < 3; ++k) {
        c[k] = amp(rng);
        s[k] = amp(rng);
      }
      heights.push_back(PeriodicField::trigonometric(P, 1.0, c, s));
    }
    std::vector<PeriodicField> phis;
    for (int i = 0; i < kPhi; ++i) phis.push_back(random_trig(rng, P, 8, 0.0));
    EllipticOptions ell;
    ell.ny = ny;
    ell.admissibility = cfg.admissibility();
    double min_pairing = std::numeric_limits<double>::infinity();
    for (const auto& h : heights) {
      for (double eps : sweep) {
        const DirichletSolver solver(eps, h, ell);
        for (const auto& phi : phis) {
          const double pairing = coercivity_pairing(solver, phi);
          min_pairing = std::min(min_pairing, pairing);
          e.eps.push_back(eps);
          e.ratios.push_back(pairing / half_eps_norm_sq(phi, eps));
        }
      }
    }
    report.coercivity_samples = static_cast<int>(e.ratios.size());
    report.coercivity_min_pairing = min_pairing;
    summarize(e);
    e.pass = min_pairing > 0.0 && e.min >= e.median / kCoercivityFactor;
    report.entries.push_back(std::move(e));
  }
  return report;
}

json trajectory_to_json(const Trajectory& traj, int sample_every) {
  json samples = json::array();
  const std::size_t n = traj.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % std::max(sample_every, 1) != 0 && i + 1 != n) continue;
    std::vector<double> re, im;
    for (const auto& c : traj.states[i].coeffs()) {
      re.push_back(c.real());
      im.push_back(c.imag());
    }
    json s = {{"t", traj.times[i]}, {"re", re}, {"im", im}};
    if (i < traj.min_height.size()) s["min_height"] = traj.min_height[i];
    if (i < traj.energy.size()) s["energy"] = traj.energy[i];
    samples.push_back(std::move(s));
  }
  return {
      {"eps", traj.eps},
      {"dt", traj.dt},
      {"stabilizer", traj.stabilizer},
      {"modes", traj.states.empty() ? 0 : traj.states.front().modes()},
      {"rejected_steps", traj.rejected},
      {"mass_drift", traj.mass_drift},
      {"failed", traj.failed},
      {"failure", traj.failure},
      {"samples", std::move(samples)},
  };
}

json convergence_to_json(const ConvergenceReport& report) {
  const RunConfig& cfg = report.config;
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"eps", r.eps}, {"k", r.k}, {"s", r.s}, {"sup_error", r.sup_error},
                    {"modes", cfg.modes}, {"ny", cfg.ny}, {"dt", cfg.dt}});
  json fits = json::array();
  for (const auto& f : report.fits) {
    json j = {{"k", f.k}, {"s", f.s}, {"exact_zero", f.exact_zero}, {"band_lo", f.band_lo},
              {"pass", f.pass}};
    j["band_hi"] = std::isfinite(f.band_hi) ? json(f.band_hi) : json(nullptr);
    if (f.fit) {
      j["slope"] = f.fit->slope;
      j["residual"] = f.fit->residual;
    } else {
      j["slope"] = nullptr;
    }
    fits.push_back(std::move(j));
  }
  json runs = json::array();
  for (const auto& t : report.full)
    runs.push_back({{"eps", t.eps}, {"rejected_steps", t.rejected}, {"mass_drift", t.mass_drift},
                    {"failed", t.failed}, {"failure", t.failure},
                    {"steps", t.states.empty() ? 0 : t.states.size() - 1}});
  return {
      {"command", "converge"},
      {"config", config_to_json(cfg)},
      {"rows", std::move(rows)},
      {"fits", std::move(fits)},
      {"runs", std::move(runs)},
      {"thin_film", {{"rejected_steps", report.thin_film.rejected},
                     {"mass_drift", report.thin_film.mass_drift},
                     {"failed", report.thin_film.failed}}},
      {"rp_residual", report.rp_residual},
      {"complete", report.complete},
      {"failures", report.failures},
      {"pass", report.pass()},
  };
}

json inequalities_to_json(const InequalityReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"name", e.name}, {"samples", e.ratios.size()}, {"min", e.min},
                       {"median", e.median}, {"max", e.max},
                       {"max_over_median", e.median > 0 ? e.max / e.median : 0.0},
                       {"field_spread", e.spread},
                       {"median_over_min", e.min > 0 ? e.median / e.min : 0.0},
                       {"asserted", e.asserted}, {"pass", e.pass}});
  return {
      {"command", "inequalities"},
      {"entries", std::move(entries)},
      {"unweighted_zero_mean_trace_median_by_eps", report.unweighted_by_eps},
      {"degeneration_visible", report.degeneration_visible},
      {"coercivity_samples", report.coercivity_samples},
      {"coercivity_min_pairing", report.coercivity_min_pairing},
      {"pass", report.pass()},
  };
}

std::string errors_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "eps,s,sup_error,k,modes,ny,dt\r\n";
  for (const auto& r : report.rows)
    out << number(r.eps) << ',' << r.s << ',' << number(r.sup_error) << ',' << r.k << ','
        << report.config.modes << ',' << report.config.ny << ',' << number(report.config.dt)
        << "\r\n";
  return out.str();
}

std::string trajectory_filename(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "trajectory_%g.json", eps);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace hsthread
