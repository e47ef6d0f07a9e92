#pragma once

// Levy spectral measures in ray form: a finite set of unit directions, each
// carrying radial atoms and radial density segments.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "idcalc/quadrature.hpp"
#include "idcalc/types.hpp"

namespace idcalc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Behaviour of the tail integral of log(r) against a density on (1, inf).
enum class TailClass { finite, infinite };

/// Nonnegative radial density on a support interval (lo, hi), hi possibly +inf.
class RadialDensity {
 public:
  virtual ~RadialDensity() = default;

  virtual double lo() const = 0;
  virtual double hi() const = 0;
  /// Density value; zero outside the support.
  virtual double operator()(double r) const = 0;
  virtual std::string kind() const = 0;

  /// Analytic classification of the log-moment tail, when the density can
  /// provide one.
  virtual std::optional<TailClass> log_tail() const { return std::nullopt; }

  /// Analytic verdict on integrability of min(1, r^2) g(r), when available.
  virtual std::optional<bool> levy_integrable() const { return std::nullopt; }

  /// Interior points where the density is not smooth (quadrature splits there).
  virtual std::vector<double> kinks() const { return {}; }

  /// Mass of (r1, r2] intersected with the support.
  virtual double mass(double r1, double r2) const;

  /// e^v g(e^v), the density of log r. Overrides avoid forming e^v.
  virtual double log_density(double v) const {
    const double r = std::exp(v);
    return std::isfinite(r) ? r * (*this)(r) : 0.0;
  }
};

using DensityPtr = std::shared_ptr<const RadialDensity>;

namespace detail {

inline quad::Tolerance measure_tolerance() { return {1e-11, 1e-15, 4000}; }

/// Breakpoints covering (lo, hi) with extra splits at the given points.
inline std::vector<double> panel_breaks(double lo, double hi, std::vector<double> extra) {
  std::vector<double> out{lo};
  std::sort(extra.begin(), extra.end());
  for (double x : extra)
    if (x > lo && x < hi && x != out.back()) out.push_back(x);
  out.push_back(hi);
  return out;
}

}  // namespace detail

inline double RadialDensity::mass(double r1, double r2) const {
  const double a = std::max(r1, lo());
  const double b = std::min(r2, hi());
  if (!(b > a)) return 0.0;
  auto kk = kinks();
  kk.push_back(1.0);
  if (std::isinf(b)) kk.push_back(std::max(a, 1.0) + 1.0);
  const auto breaks = detail::panel_breaks(a, b, kk);
  auto g = [this](double r) { return (*this)(r); };
  return quad::value_or_throw(quad::integrate_panels(g, breaks, detail::measure_tolerance()),
                              "radial mass");
}

/// coef * r^power * exp(-rate * r) on (lo, hi).
class PowerExpDensity final : public RadialDensity {
 public:
  PowerExpDensity(double coef, double power, double rate, double lo, double hi)
      : coef_(coef), power_(power), rate_(rate), lo_(lo), hi_(hi) {}

  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double operator()(double r) const override {
    if (!(r > lo_ && r < hi_)) return 0.0;
    return coef_ * std::pow(r, power_) * std::exp(-rate_ * r);
  }
  std::string kind() const override { return rate_ == 0.0 ? "power" : "power_exp"; }
  double log_density(double v) const override {
    if (!(v > std::log(lo_) && v < std::log(hi_))) return 0.0;
    const double decay = rate_ == 0.0 ? 0.0 : rate_ * std::exp(v);
    return coef_ * std::exp((power_ + 1.0) * v - decay);
  }

  std::optional<TailClass> log_tail() const override {
    if (hi_ <= 1.0 || std::isfinite(hi_) || rate_ > 0.0) return TailClass::finite;
    return power_ < -1.0 ? TailClass::finite : TailClass::infinite;
  }

  std::optional<bool> levy_integrable() const override {
    if (!(coef_ >= 0.0) || !std::isfinite(coef_) || rate_ < 0.0) return false;
    // r^{power+2} near zero, r^power at infinity.
    const bool near_zero_ok = lo_ > 0.0 || power_ > -3.0;
    const bool tail_ok = std::isfinite(hi_) || rate_ > 0.0 || power_ < -1.0;
    return near_zero_ok && tail_ok;
  }

  double coef() const { return coef_; }
  double power() const { return power_; }
  double rate() const { return rate_; }

 private:
  double coef_, power_, rate_, lo_, hi_;
};

/// coef / (r * (log r)^q) on (lo, hi) with lo > 1.
class LogPowerDensity final : public RadialDensity {
 public:
  LogPowerDensity(double coef, double q, double lo, double hi)
      : coef_(coef), q_(q), lo_(lo), hi_(hi) {
    if (!(lo > 1.0)) throw ValidationError("log_power density needs lo > 1");
  }

  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double operator()(double r) const override {
    if (!(r > lo_ && r < hi_)) return 0.0;
    return coef_ / (r * std::pow(std::log(r), q_));
  }
  std::string kind() const override { return "log_power"; }
  double log_density(double v) const override {
    if (!(v > std::log(lo_) && v < std::log(hi_))) return 0.0;
    return coef_ * std::pow(v, -q_);
  }

  // log r * g(r) dr = coef * v^{1-q} dv with v = log r.
  std::optional<TailClass> log_tail() const override {
    if (std::isfinite(hi_)) return TailClass::finite;
    return q_ > 2.0 ? TailClass::finite : TailClass::infinite;
  }
  std::optional<bool> levy_integrable() const override {
    return coef_ >= 0.0 && (std::isfinite(hi_) || q_ > 1.0);
  }

 private:
  double coef_, q_, lo_, hi_;
};

/// Arbitrary evaluator; no analytic knowledge.
class FunctionDensity final : public RadialDensity {
 public:
  FunctionDensity(std::function<double(double)> g, double lo, double hi,
                  std::optional<TailClass> tail = std::nullopt, std::string label = "custom")
      : g_(std::move(g)), lo_(lo), hi_(hi), tail_(tail), label_(std::move(label)) {}

  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  double operator()(double r) const override {
    if (!(r > lo_ && r < hi_)) return 0.0;
    return g_(r);
  }
  std::string kind() const override { return label_; }
  std::optional<TailClass> log_tail() const override { return tail_; }

 private:
  std::function<double(double)> g_;
  double lo_, hi_;
  std::optional<TailClass> tail_;
  std::string label_;
};

/// c * source.
class ScaledDensity final : public RadialDensity {
 public:
  ScaledDensity(DensityPtr source, double c) : source_(std::move(source)), c_(c) {}

  double lo() const override { return source_->lo(); }
  double hi() const override { return source_->hi(); }
  double operator()(double r) const override { return c_ * (*source_)(r); }
  std::string kind() const override { return source_->kind(); }
  std::optional<TailClass> log_tail() const override { return source_->log_tail(); }
  std::optional<bool> levy_integrable() const override { return source_->levy_integrable(); }
  std::vector<double> kinks() const override { return source_->kinks(); }
  double mass(double r1, double r2) const override { return c_ * source_->mass(r1, r2); }
  double log_density(double v) const override { return c_ * source_->log_density(v); }

 private:
  DensityPtr source_;
  double c_;
};

/// Radial image of a density under the smearing A -> int_0^1 M(t^{-1/beta} A) dt:
///   g_beta(r) = beta r^{beta-1} int_{max(r, lo)}^{hi} g(s) s^{-beta} ds,  0 < r < hi.
/// Its log-moment tail follows the source: by Fubini,
///   int_{r>1} log r g_beta(r) dr = int_{s>1} (log s - (1 - s^{-beta}) / beta) g(s) ds,
/// and the kernel lies between log s - 1/beta and log s.
class SmearedDensity final : public RadialDensity {
 public:
  SmearedDensity(DensityPtr source, double beta) : source_(std::move(source)), beta_(beta) {}

  double lo() const override { return 0.0; }
  double hi() const override { return source_->hi(); }

  double operator()(double r) const override {
    if (!(r > 0.0 && r < hi())) return 0.0;
    const double a = std::max(r, source_->lo());
    auto f = [this](double s) { return (*source_)(s) * std::pow(s, -beta_); };
    auto kk = source_->kinks();
    kk.push_back(1.0);
    if (std::isinf(hi())) kk.push_back(std::max(a, 1.0) * 2.0);
    const auto breaks = detail::panel_breaks(a, hi(), kk);
    // Far out on an unbounded ray the tail integral approaches underflow.
    const double tail = quad::value_or_throw(
        quad::integrate_panels(f, breaks, {1e-12, 1e-200, 4000}), "smeared density");
    return beta_ * std::pow(r, beta_ - 1.0) * tail;
  }

  std::string kind() const override { return "smeared"; }
  std::optional<TailClass> log_tail() const override { return source_->log_tail(); }

  // beta int_{max(v, log lo)}^{log hi} e^{-beta (w - v)} h(w) dw, h the source log density.
  double log_density(double v) const override {
    const double top = std::log(hi());
    if (!(v < top)) return 0.0;
    const double start = std::max(v, std::log(std::max(source_->lo(), 1e-300)));
    auto f = [&](double w) { return std::exp(-beta_ * (w - v)) * source_->log_density(w); };
    const quad::Tolerance tol{1e-12, 1e-200, 4000};
    const auto res = std::isinf(top) ? quad::integrate_to_infinity(f, start, tol) : quad::integrate(f, start, top, tol);
    return beta_ * quad::value_or_throw(res, "smeared log density");
  }

  std::vector<double> kinks() const override {
    auto kk = source_->kinks();
    if (source_->lo() > 0.0) kk.push_back(source_->lo());
    return kk;
  }

  // M_beta((r1, r2]) = int g(s) [ (min(r2, s)/s)^beta - (r1/s)^beta ]_+ ds.
  double mass(double r1, double r2) const override {
    r1 = std::max(r1, 0.0);
    if (!(r2 > r1)) return 0.0;
    const double a = std::max(r1, source_->lo());
    const double b = source_->hi();
    if (!(b > a)) return 0.0;
    auto f = [&](double s) {
      const double upper = std::pow(std::min(r2, s) / s, beta_);
      const double lower = std::pow(r1 / s, beta_);
      return (*source_)(s) * std::max(upper - lower, 0.0);
    };
    auto kk = source_->kinks();
    kk.push_back(r2);
    kk.push_back(1.0);
    if (std::isinf(b)) kk.push_back(std::max({a, r2, 1.0}) * 2.0);
    const auto breaks = detail::panel_breaks(a, b, kk);
    return quad::value_or_throw(quad::integrate_panels(f, breaks, detail::measure_tolerance()),
                                "smeared mass");
  }

  double beta() const { return beta_; }
  const DensityPtr& source() const { return source_; }

 private:
  DensityPtr source_;
  double beta_;
};

struct Atom {
  double r = 0.0;
  double w = 0.0;
};

/// Radial part of M along one unit direction.
struct RadialComponent {
  Vec direction;
  std::vector<Atom> atoms;
  std::vector<DensityPtr> densities;

  /// Mass on radii in (r1, r2].
  double mass(double r1, double r2) const {
    double m = 0.0;
    for (const auto& a : atoms)
      if (a.r > r1 && a.r <= r2) m += a.w;
    for (const auto& d : densities) m += d->mass(r1, r2);
    return m;
  }
};

class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  explicit SpectralMeasure(std::vector<RadialComponent> rays) : rays_(std::move(rays)) {}

  const std::vector<RadialComponent>& rays() const { return rays_; }
  bool empty() const {
    return std::all_of(rays_.begin(), rays_.end(),
                       [](const auto& c) { return c.atoms.empty() && c.densities.empty(); });
  }

  /// Ray-list concatenation (M + M').
  SpectralMeasure operator+(const SpectralMeasure& other) const {
    auto rays = rays_;
    rays.insert(rays.end(), other.rays_.begin(), other.rays_.end());
    return SpectralMeasure(std::move(rays));
  }

  SpectralMeasure scaled(double c) const {
    auto rays = rays_;
    for (auto& ray : rays) {
      for (auto& a : ray.atoms) a.w *= c;
      for (auto& d : ray.densities) d = std::make_shared<ScaledDensity>(d, c);
    }
    return SpectralMeasure(std::move(rays));
  }

  /// A -> int_0^1 M(t^{-1/beta} A) dt. Atoms map to closed-form power
  /// densities w beta r^{beta-1} / r0^beta on (0, r0].
  SpectralMeasure smeared(double beta) const {
    std::vector<RadialComponent> rays;
    rays.reserve(rays_.size());
    for (const auto& ray : rays_) {
      RadialComponent out{ray.direction, {}, {}};
      for (const auto& a : ray.atoms)
        out.densities.push_back(std::make_shared<PowerExpDensity>(
            a.w * beta * std::pow(a.r, -beta), beta - 1.0, 0.0, 0.0, a.r));
      for (const auto& d : ray.densities)
        out.densities.push_back(std::make_shared<SmearedDensity>(d, beta));
      rays.push_back(std::move(out));
    }
    return SpectralMeasure(std::move(rays));
  }

  /// Total mass of {||x|| > eps}.
  double mass_outside(double eps) const {
    double m = 0.0;
    for (const auto& ray : rays_) m += ray.mass(eps, kInf);
    return m;
  }

 private:
  std::vector<RadialComponent> rays_;
};

/// Outcome of the min(1, r^2) integrability check.
struct SpectralCheck {
  bool ok = true;
  std::string violation;
};

namespace detail {

inline std::string describe(const RadialDensity& d) {
  std::ostringstream os;
  os << d.kind() << " density on (" << d.lo() << ", " << d.hi() << ")";
  return os.str();
}

/// Numerical check that int min(1, r^2) g(r) dr converges.
inline bool numerically_levy_integrable(const RadialDensity& d) {
  const quad::Tolerance tol{1e-8, 1e-300, 400};
  const double lo = d.lo();
  const double hi = d.hi();
  if (lo < 1.0) {
    auto inner = [&](double r) { return r * r * d(r); };
    auto r = quad::integrate(inner, lo, std::min(hi, 1.0), tol);
    if (!r.converged || !std::isfinite(r.value)) return false;
  }
  if (hi > 1.0) {
    auto g = [&](double r) { return d(r); };
    const double a = std::max(lo, 1.0);
    auto r = std::isinf(hi) ? quad::integrate_to_infinity(g, a, tol) : quad::integrate(g, a, hi, tol);
    if (!r.converged || !std::isfinite(r.value)) return false;
  }
  return true;
}

}  // namespace detail

/// Checks the Levy-measure condition int min(1, ||x||^2) M(dx) < inf, ray by ray.
inline SpectralCheck validate_spectral(const SpectralMeasure& m, int dim = -1) {
  auto fail = [](std::string msg) { return SpectralCheck{false, std::move(msg)}; };
  for (std::size_t k = 0; k < m.rays().size(); ++k) {
    const auto& ray = m.rays()[k];
    const std::string where = "ray " + std::to_string(k) + ": ";
    if (dim > 0 && ray.direction.size() != dim) return fail(where + "direction dimension mismatch");
    if (!ray.direction.allFinite() || std::abs(ray.direction.norm() - 1.0) > 1e-12)
      return fail(where + "direction is not a unit vector");
    for (const auto& a : ray.atoms)
      if (!(a.r > 0.0) || !(a.w > 0.0) || !std::isfinite(a.r) || !std::isfinite(a.w))
        return fail(where + "atom needs finite r > 0 and w > 0");
    for (const auto& d : ray.densities) {
      if (!(d->lo() >= 0.0) || !(d->hi() > d->lo()))
        return fail(where + "bad support for " + detail::describe(*d));
      const auto verdict = d->levy_integrable();
      const bool ok = verdict ? *verdict : detail::numerically_levy_integrable(*d);
      if (!ok)
        return fail(where + "min(1, r^2)-integral diverges for " + detail::describe(*d));
    }
  }
  return {};
}

/// Result of the log-moment check int_{||x||>1} log||x|| M(dx).
struct LogMoment {
  enum class Status { finite, infinite, inconclusive_divergent };
  Status status = Status::finite;
  double value = 0.0;

  bool is_finite() const { return status == Status::finite; }
};

inline const char* to_string(LogMoment::Status s) {
  switch (s) {
    case LogMoment::Status::finite: return "finite";
    case LogMoment::Status::infinite: return "infinite";
    case LogMoment::Status::inconclusive_divergent: return "inconclusive-divergent";
  }
  return "?";
}

namespace detail {

/// Numerical tail integral of log(r) g(r) over (a, hi), a >= 1. For an
/// unbounded support the integral is accumulated over the blocks
/// log r in [2^k, 2^{k+1}]; blocks that stop shrinking mark the tail as
/// inconclusive-divergent. A tail already known to be finite is integrated
/// to infinity directly.
inline LogMoment numeric_log_tail(const RadialDensity& d, double a, bool known_finite = false) {
  const double hi = d.hi();
  const quad::Tolerance tol{1e-10, 1e-300, 2000};
  auto in_log = [&](double v) { return v * d.log_density(v); };
  const double va = std::log(a);
  if (std::isfinite(hi)) {
    auto res = quad::integrate(in_log, va, std::log(hi), tol);
    if (!res.converged || !std::isfinite(res.value))
      return {LogMoment::Status::inconclusive_divergent, res.value};
    return {LogMoment::Status::finite, res.value};
  }
  if (known_finite) {
    auto res = quad::integrate_to_infinity(in_log, va, tol);
    if (res.converged && std::isfinite(res.value)) return {LogMoment::Status::finite, res.value};
  }

  constexpr int kBlocks = 8;  // log r up to 2^8
  double total = 0.0;
  double prev_block = 0.0;
  double last_block = 0.0;
  double start = va;
  for (int k = 0; k <= kBlocks; ++k) {
    const double end = std::max(std::ldexp(1.0, k), start);
    if (!(end > start)) continue;
    auto res = quad::integrate(in_log, start, end, tol);
    if (!res.converged || !std::isfinite(res.value))
      return {LogMoment::Status::inconclusive_divergent, total};
    total += res.value;
    prev_block = last_block;
    last_block = res.value;
    start = end;
  }
  const bool still_growing = last_block > 1e-9 * std::max(1.0, std::abs(total)) &&
                             last_block > 0.25 * prev_block;
  if (still_growing) return {LogMoment::Status::inconclusive_divergent, total};
  return {LogMoment::Status::finite, total};
}

}  // namespace detail

/// int_{||x||>1} log||x|| M(dx). Densities that supply an analytic tail
/// classification use it; all others are integrated numerically.
inline LogMoment log_moment(const SpectralMeasure& m) {
  LogMoment out;
  bool inconclusive = false;
  for (const auto& ray : m.rays()) {
    for (const auto& a : ray.atoms)
      if (a.r > 1.0) out.value += a.w * std::log(a.r);
    for (const auto& d : ray.densities) {
      if (!(d->hi() > 1.0)) continue;
      const auto tail = d->log_tail();
      if (tail && *tail == TailClass::infinite) return {LogMoment::Status::infinite, kInf};
      const bool known_finite = tail && *tail == TailClass::finite;
      const auto part = detail::numeric_log_tail(*d, std::max(d->lo(), 1.0), known_finite);
      if (part.status != LogMoment::Status::finite) inconclusive = true;
      out.value += part.value;
    }
  }
  if (inconclusive) out.status = LogMoment::Status::inconclusive_divergent;
  return out;
}

}  // namespace idcalc
