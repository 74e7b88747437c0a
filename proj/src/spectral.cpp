#include "hsthread/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "hsthread/error.hpp"

namespace hsthread {

namespace {

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per size under a lock and reused; FFTW_ESTIMATE keeps
// the chosen algorithm (and therefore every result) deterministic.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, bool forward) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* real = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    auto* spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = forward ? fftw_plan_dft_r2c_1d(n, real, spec, flags)
                             : fftw_plan_dft_c2r_1d(n, spec, real, flags);
    fftw_free(real);
    fftw_free(spec);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

int padded_size(int modes) { return 3 * (modes + 1); }

std::vector<cplx> analyze(std::span<const double> values, int modes) {
  const int n = static_cast<int>(values.size());
  if (n < 2 * modes + 1) throw DomainError("analyze: grid too coarse for requested modes");
  std::vector<double> in(values.begin(), values.end());
  std::vector<cplx> out(n / 2 + 1);
  fftw_execute_dft_r2c(plan_cache().get(n, true), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  std::vector<cplx> coeffs(modes + 1);
  const double scale = 1.0 / n;
  for (int p = 0; p <= modes; ++p) coeffs[p] = out[p] * scale;
  coeffs[0].imag(0.0);
  return coeffs;
}

std::vector<double> synthesize(std::span<const cplx> coeffs, int n) {
  const int modes = static_cast<int>(coeffs.size()) - 1;
  if (n < 2 * modes + 1) throw DomainError("synthesize: grid too coarse for field");
  std::vector<cplx> in(n / 2 + 1, cplx{0.0, 0.0});
  std::copy(coeffs.begin(), coeffs.end(), in.begin());
  in[0].imag(0.0);
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plan_cache().get(n, false), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  return out;
}

PeriodicField::PeriodicField(int modes) : modes_(modes), coeffs_(modes + 1, cplx{0.0, 0.0}) {
  if (modes < 1) throw DomainError("PeriodicField: truncation order must be positive");
}

PeriodicField::PeriodicField(int modes, std::vector<cplx> nonnegative_coeffs)
    : PeriodicField(modes) {
  if (static_cast<int>(nonnegative_coeffs.size()) != modes + 1)
    throw DomainError("PeriodicField: expected P+1 coefficients");
  for (const auto& c : nonnegative_coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw DomainError("PeriodicField: non-finite coefficient");
  coeffs_ = std::move(nonnegative_coeffs);
  coeffs_[0].imag(0.0);
}

PeriodicField PeriodicField::constant(int modes, double value) {
  PeriodicField f(modes);
  f.coeffs_[0] = value;
  return f;
}

PeriodicField PeriodicField::trigonometric(int modes, double mean, std::span<const double> cos_amps,
                                           std::span<const double> sin_amps) {
  PeriodicField f = constant(modes, mean);
  const auto n = std::max(cos_amps.size(), sin_amps.size());
  if (static_cast<int>(n) > modes) throw DomainError("trigonometric: more harmonics than modes");
  for (std::size_t k = 0; k < n; ++k) {
    const double a = k < cos_amps.size() ? cos_amps[k] : 0.0;
    const double b = k < sin_amps.size() ? sin_amps[k] : 0.0;
    // a cos + b sin = ((a − ib)/2) e^{ipx} + c.c.
    f.coeffs_[k + 1] = cplx{0.5 * a, -0.5 * b};
  }
  return f;
}

PeriodicField PeriodicField::from_grid(std::span<const double> values, int modes) {
  return PeriodicField(modes, analyze(values, modes));
}

PeriodicField PeriodicField::from_function(int modes, const std::function<double(double)>& fn) {
  const int n = padded_size(modes);
  std::vector<double> values(n);
  for (int j = 0; j < n; ++j) values[j] = fn(kTwoPi * j / n);
  return from_grid(values, modes);
}

cplx PeriodicField::operator[](int p) const {
  const int a = std::abs(p);
  if (a > modes_) return {0.0, 0.0};
  return p >= 0 ? coeffs_[a] : std::conj(coeffs_[a]);
}

void PeriodicField::set(int p, cplx value) {
  const int a = std::abs(p);
  if (a > modes_) throw DomainError("PeriodicField::set: mode beyond truncation");
  coeffs_[a] = p >= 0 ? value : std::conj(value);
  coeffs_[0].imag(0.0);
}

std::vector<double> PeriodicField::to_grid(int n) const { return synthesize(coeffs_, n); }

double PeriodicField::operator()(double x) const {
  double v = coeffs_[0].real();
  for (int p = 1; p <= modes_; ++p) v += 2.0 * (coeffs_[p] * std::polar(1.0, p * x)).real();
  return v;
}

PeriodicField PeriodicField::resized(int modes) const {
  PeriodicField f(modes);
  for (int p = 0; p <= std::min(modes, modes_); ++p) f.coeffs_[p] = coeffs_[p];
  return f;
}

PeriodicField PeriodicField::shifted(double a) const {
  PeriodicField f = *this;
  for (int p = 1; p <= modes_; ++p) f.coeffs_[p] *= std::polar(1.0, p * a);
  return f;
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  if (other.modes_ != modes_) throw DomainError("PeriodicField: truncation mismatch");
  for (int p = 0; p <= modes_; ++p) coeffs_[p] += other.coeffs_[p];
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  if (other.modes_ != modes_) throw DomainError("PeriodicField: truncation mismatch");
  for (int p = 0; p <= modes_; ++p) coeffs_[p] -= other.coeffs_[p];
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

PeriodicField deriv(const PeriodicField& f, int m) {
  if (m < 0) throw DomainError("deriv: order must be nonnegative");
  PeriodicField out(f.modes());
  if (m == 0) return f;
  static constexpr cplx kIPow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  for (int p = 1; p <= f.modes(); ++p)
    out.set(p, kIPow[m % 4] * std::pow(double(p), m) * f[p]);
  return out;
}

double sobolev_norm(const PeriodicField& f, double s) {
  double sum = std::norm(f[0]);
  for (int p = 1; p <= f.modes(); ++p) sum += 2.0 * std::pow(1.0 + double(p) * p, s) * std::norm(f[p]);
  return std::sqrt(sum);
}

PeriodicField combine(const PeriodicField& f, const PeriodicField& g,
                      const std::function<double(double, double)>& fn) {
  if (f.modes() != g.modes()) throw DomainError("combine: truncation mismatch");
  const int n = padded_size(f.modes());
  auto a = f.to_grid(n);
  const auto b = g.to_grid(n);
  for (int j = 0; j < n; ++j) a[j] = fn(a[j], b[j]);
  return PeriodicField::from_grid(a, f.modes());
}

PeriodicField compose(const PeriodicField& f, const std::function<double(double)>& fn) {
  const int n = padded_size(f.modes());
  auto a = f.to_grid(n);
  for (auto& v : a) v = fn(v);
  return PeriodicField::from_grid(a, f.modes());
}

PeriodicField product(const PeriodicField& f, const PeriodicField& g) {
  return combine(f, g, [](double a, double b) { return a * b; });
}

double mean(const PeriodicField& f) { return kTwoPi * f[0].real(); }

double l2_inner(const PeriodicField& f, const PeriodicField& g) {
  const int P = std::min(f.modes(), g.modes());
  double sum = (f[0] * std::conj(g[0])).real();
  for (int p = 1; p <= P; ++p) sum += 2.0 * (f[p] * std::conj(g[p])).real();
  return kTwoPi * sum;
}

double grid_min(const PeriodicField& f) {
  const auto v = f.to_grid(padded_size(f.modes()));
  return *std::min_element(v.begin(), v.end());
}

double grid_max(const PeriodicField& f) {
  const auto v = f.to_grid(padded_size(f.modes()));
  return *std::max_element(v.begin(), v.end());
}

double tail_fraction(const PeriodicField& f, int cutoff) {
  double total = std::norm(f[0]);
  double tail = 0.0;
  for (int p = 1; p <= f.modes(); ++p) {
    total += 2.0 * std::norm(f[p]);
    if (p > cutoff) tail += 2.0 * std::norm(f[p]);
  }
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

double max_coeff_diff(const PeriodicField& f, const PeriodicField& g) {
  const int P = std::max(f.modes(), g.modes());
  double d = 0.0;
  for (int p = 0; p <= P; ++p) d = std::max(d, std::abs(f[p] - g[p]));
  return d;
}

}  // namespace hsthread
