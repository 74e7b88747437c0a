#include "hsthread/strip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "hsthread/error.hpp"

namespace hsthread {

const Chebyshev& chebyshev(int order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const Chebyshev>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const Chebyshev>(order);
  return *slot;
}

StripField::StripField(int modes, int ny)
    : modes_(modes), ny_(ny), data_(static_cast<std::size_t>(ny + 1) * (modes + 1)) {
  if (modes < 1) throw DomainError("StripField: truncation order must be positive");
  chebyshev(ny);  // validates ny
}

StripField StripField::constant_in_y(const PeriodicField& f, int ny) {
  StripField w(f.modes(), ny);
  for (int j = 0; j <= ny; ++j) w.set_slice(j, f);
  w.even_in_y_ = true;
  return w;
}

StripField StripField::separable(const PeriodicField& f, const std::function<double(double)>& g,
                                 int ny) {
  StripField w(f.modes(), ny);
  const auto& y = chebyshev(ny).nodes();
  for (int j = 0; j <= ny; ++j) w.set_slice(j, f * g(y[j]));
  return w;
}

StripField StripField::from_slices(const std::vector<PeriodicField>& slices) {
  if (slices.size() < 3) throw DomainError("StripField::from_slices: need at least 3 nodes");
  StripField w(slices.front().modes(), static_cast<int>(slices.size()) - 1);
  for (int j = 0; j <= w.ny_; ++j) w.set_slice(j, slices[j]);
  return w;
}

StripField StripField::from_nodal(const std::vector<double>& values, int nx, int modes, int ny) {
  if (static_cast<int>(values.size()) != nx * (ny + 1))
    throw DomainError("StripField::from_nodal: size mismatch");
  StripField w(modes, ny);
  for (int j = 0; j <= ny; ++j) {
    const auto c = analyze(std::span<const double>(values.data() + std::size_t(j) * nx, nx), modes);
    for (int p = 0; p <= modes; ++p) w.set(j, p, c[p]);
  }
  return w;
}

cplx StripField::at(int j, int p) const {
  const int a = std::abs(p);
  if (a > modes_) return {0.0, 0.0};
  const cplx v = data_[std::size_t(j) * (modes_ + 1) + a];
  return p >= 0 ? v : std::conj(v);
}

void StripField::set(int j, int p, cplx value) {
  const int a = std::abs(p);
  if (a > modes_ || j < 0 || j > ny_) throw DomainError("StripField::set: index out of range");
  cplx& slot = data_[std::size_t(j) * (modes_ + 1) + a];
  slot = p >= 0 ? value : std::conj(value);
  if (a == 0) slot.imag(0.0);
}

PeriodicField StripField::slice(int j) const {
  std::vector<cplx> c(data_.begin() + std::size_t(j) * (modes_ + 1),
                      data_.begin() + std::size_t(j + 1) * (modes_ + 1));
  return PeriodicField(modes_, std::move(c));
}

void StripField::set_slice(int j, const PeriodicField& f) {
  for (int p = 0; p <= modes_; ++p) set(j, p, f[p]);
}

Eigen::VectorXcd StripField::mode(int p) const {
  Eigen::VectorXcd v(ny_ + 1);
  for (int j = 0; j <= ny_; ++j) v(j) = at(j, p);
  return v;
}

void StripField::set_mode(int p, const Eigen::VectorXcd& values) {
  for (int j = 0; j <= ny_; ++j) set(j, p, values(j));
}

std::vector<double> StripField::to_nodal(int nx) const {
  std::vector<double> out(std::size_t(nx) * (ny_ + 1));
  for (int j = 0; j <= ny_; ++j) {
    const auto row = synthesize(
        std::span<const cplx>(data_.data() + std::size_t(j) * (modes_ + 1), modes_ + 1), nx);
    std::copy(row.begin(), row.end(), out.begin() + std::size_t(j) * nx);
  }
  return out;
}

bool StripField::is_even(double tol) const {
  for (int j = 0; j <= ny_ / 2; ++j)
    for (int p = 0; p <= modes_; ++p)
      if (std::abs(at(j, p) - at(ny_ - j, p)) > tol) return false;
  return true;
}

void StripField::mark_even(double tol) {
  if (!is_even(tol)) throw DomainError("StripField::mark_even: field is not even in y");
  even_in_y_ = true;
}

StripField& StripField::operator+=(const StripField& other) {
  if (other.modes_ != modes_ || other.ny_ != ny_) throw DomainError("StripField: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  even_in_y_ = even_in_y_ && other.even_in_y_;
  return *this;
}

StripField& StripField::operator-=(const StripField& other) {
  if (other.modes_ != modes_ || other.ny_ != ny_) throw DomainError("StripField: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  even_in_y_ = even_in_y_ && other.even_in_y_;
  return *this;
}

StripField& StripField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

StripField d_x(const StripField& w, int m) {
  StripField out(w.modes(), w.ny());
  for (int j = 0; j <= w.ny(); ++j) out.set_slice(j, deriv(w.slice(j), m));
  if (w.even_in_y() && out.is_even(1e-8)) out.mark_even(1e-8);
  return out;
}

StripField d_y(const StripField& w) {
  StripField out(w.modes(), w.ny());
  const auto& d = w.cheb().diff();
  for (int p = 0; p <= w.modes(); ++p) out.set_mode(p, d * w.mode(p));
  return out;
}

int max_norm_order(int ny) { return ny / 2; }

namespace {

double mode_l2_sq(const Chebyshev& cheb, const Eigen::VectorXcd& v) {
  return (v.adjoint() * cheb.l2_gram() * v)(0, 0).real();
}

}  // namespace

double strip_norm(const StripField& w, int s) {
  if (s < 0 || s > max_norm_order(w.ny()))
    throw DomainError("strip_norm: order not resolvable at this y-resolution");
  const auto& cheb = w.cheb();
  double total = 0.0;
  for (int p = 0; p <= w.modes(); ++p) {
    const double mult = p == 0 ? 1.0 : 2.0;
    Eigen::VectorXcd v = w.mode(p);
    const double l2 = mode_l2_sq(cheb, v);
    double acc = l2;
    for (int k = 1; k <= s; ++k) {
      v = cheb.diff() * v;
      acc += mode_l2_sq(cheb, v);
    }
    if (s > 0) acc += std::pow(double(p), 2 * s) * l2;
    total += mult * acc;
  }
  return std::sqrt(std::max(total, 0.0));
}

double scaled_norm(const StripField& w, int s, double eps) {
  if (s < 1) throw DomainError("scaled_norm: order must be positive");
  return strip_norm(w, s - 1) + strip_norm(d_y(w), s - 1) + eps * strip_norm(w, s);
}

double grad_eps_norm(const StripField& w, double eps) {
  const double a = eps * strip_norm(d_x(w), 0);
  const double b = strip_norm(d_y(w), 0);
  return std::hypot(a, b);
}

double boundary_norm(const StripField& w, double s) {
  return std::hypot(sobolev_norm(w.upper_trace(), s), sobolev_norm(w.lower_trace(), s));
}

StripField extend_plus(const PeriodicField& f, double eps, int ny) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("extend_plus: eps must lie in (0,1)");
  StripField w(f.modes(), ny);
  const auto& y = chebyshev(ny).nodes();
  for (int j = 0; j <= ny; ++j) {
    const double yy = y[j] * y[j];
    for (int p = 0; p <= f.modes(); ++p) w.set(j, p, yy * std::exp(eps * p * (yy - 1.0)) * f[p]);
  }
  w.mark_even(0.0);
  return w;
}

double poincare_check(const StripField& w, double eps, PoincareVariant variant) {
  constexpr double kSideTol = 1e-8;
  const double norm0 = strip_norm(w, 0);
  const double scale = std::max(1.0, norm0);
  if (variant == PoincareVariant::kZeroBoundary) {
    if (boundary_norm(w, 0.0) > kSideTol * scale)
      throw DomainError("poincare_check: field does not vanish on the boundary");
  } else {
    if (std::abs(w.at(0, 0)) > kSideTol * scale)
      throw DomainError("poincare_check: trace on the upper boundary has nonzero mean");
  }
  if (norm0 == 0.0) return 0.0;
  const double grad = grad_eps_norm(w, eps);
  const double weight = variant == PoincareVariant::kZeroBoundary ? 1.0 : eps;
  return grad > 0.0 ? weight * norm0 / grad : std::numeric_limits<double>::infinity();
}

double trace_check(const StripField& w, double eps, int t) {
  if (t < 0) throw DomainError("trace_check: order must be nonnegative");
  const double num = boundary_norm(w, t) + std::sqrt(eps) * boundary_norm(w, t + 0.5);
  if (num == 0.0) return 0.0;
  return num / scaled_norm(w, t + 1, eps);
}

}  // namespace hsthread
