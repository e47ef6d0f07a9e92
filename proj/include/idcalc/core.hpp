#pragma once

// Levy-Khintchine triplets, characteristic exponents and the convolution
// algebra of infinitely divisible laws.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idcalc/quadrature.hpp"
#include "idcalc/spectral.hpp"
#include "idcalc/types.hpp"

namespace idcalc {

/// Shift a, Gaussian covariance S and spectral measure M of an ID law.
/// The compensator set is the closed unit ball {||x|| <= 1}.
struct LevyTriplet {
  Vec shift;
  Mat cov;
  SpectralMeasure spectral;

  int dim() const { return static_cast<int>(shift.size()); }

  static LevyTriplet zero(int dim) {
    return {Vec::Zero(dim), Mat::Zero(dim, dim), SpectralMeasure{}};
  }
};

/// Symmetric and positive semi-definite up to an eigenvalue floor of -1e-12 trace.
inline void validate_cov(const Mat& s) {
  if (s.rows() != s.cols()) throw ValidationError("covariance must be square");
  if (!s.allFinite()) throw ValidationError("covariance has non-finite entries");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("covariance is not symmetric");
  if (s.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Mat> eig(s, Eigen::EigenvaluesOnly);
  const double floor = -1e-12 * std::max(s.trace(), 0.0);
  if (eig.eigenvalues().minCoeff() < floor)
    throw ValidationError("covariance is not positive semi-definite");
}

inline void validate_triplet(const LevyTriplet& t) {
  const int d = t.dim();
  if (d < 1 || d > kMaxDim)
    throw ValidationError("dimension must be between 1 and " + std::to_string(kMaxDim));
  if (!t.shift.allFinite()) throw ValidationError("shift has non-finite entries");
  if (t.cov.rows() != d || t.cov.cols() != d)
    throw ValidationError("covariance dimension does not match shift");
  validate_cov(t.cov);
  const auto check = validate_spectral(t.spectral, d);
  if (!check.ok) throw ValidationError("invalid spectral measure: " + check.violation);
}

/// e^{iz} - 1 - i z [compensate], accurate for small |z|.
inline Complex levy_kernel(double z, bool compensate) {
  const double h = std::sin(0.5 * z);
  const double re = -2.0 * h * h;
  double im;
  if (!compensate) {
    im = std::sin(z);
  } else if (std::abs(z) < 1e-3) {
    const double z2 = z * z;
    im = z * z2 * (-1.0 / 6.0 + z2 / 120.0);
  } else {
    im = std::sin(z) - z;
  }
  return {re, im};
}

namespace detail {

inline quad::Tolerance exponent_tolerance() { return {1e-10, 1e-14, 4000}; }

/// int (e^{i r p} - 1 - i r p 1{r <= 1}) g(r) dr for one density segment.
inline Complex density_exponent(const RadialDensity& d, double p) {
  if (p == 0.0) return {};
  auto f = [&](double r) { return levy_kernel(r * p, r <= 1.0) * d(r); };
  auto kk = d.kinks();
  kk.push_back(1.0);
  if (std::isinf(d.hi())) kk.push_back(std::max(d.lo(), 1.0) + 1.0);
  const auto breaks = panel_breaks(d.lo(), d.hi(), kk);
  return quad::value_or_throw(quad::integrate_panels(f, breaks, exponent_tolerance()),
                              "characteristic exponent quadrature");
}

}  // namespace detail

/// Jump part of the exponent: sum over rays of the compensated kernel
/// integrated against atoms and densities.
inline Complex spectral_exponent(const SpectralMeasure& m, const Vec& y) {
  Complex out{};
  for (const auto& ray : m.rays()) {
    const double p = y.dot(ray.direction);
    if (p == 0.0) continue;
    for (const auto& a : ray.atoms) out += a.w * levy_kernel(a.r * p, a.r <= 1.0);
    for (const auto& d : ray.densities) out += detail::density_exponent(*d, p);
  }
  return out;
}

/// Levy-Khintchine exponent i<y,a> - <y,Sy>/2 + int [e^{i<y,x>} - 1 - i<y,x> 1_B(x)] M(dx).
inline Complex char_exponent(const LevyTriplet& t, const Vec& y) {
  if (y.size() != t.dim()) throw ValidationError("exponent argument has wrong dimension");
  const Complex gauss{-0.5 * y.dot(t.cov * y), y.dot(t.shift)};
  return gauss + spectral_exponent(t.spectral, y);
}

using Exponent = std::function<Complex(const Vec&)>;

/// An infinitely divisible law: always an exponent evaluator, optionally the
/// triplet it came from. Immutable once built.
class IdMeasure {
 public:
  /// Validates the triplet and evaluates the exponent from it.
  static IdMeasure from_triplet(LevyTriplet t) {
    validate_triplet(t);
    return from_trusted_triplet(std::move(t));
  }

  /// Skips validation; for triplets produced by the library's own transforms.
  static IdMeasure from_trusted_triplet(LevyTriplet t) {
    auto shared = std::make_shared<const LevyTriplet>(std::move(t));
    const int d = shared->dim();
    return IdMeasure(d, shared, [shared](const Vec& y) { return char_exponent(*shared, y); });
  }

  /// Triplet plus an independently known closed-form exponent for it.
  static IdMeasure with_closed_form(LevyTriplet t, Exponent phi) {
    validate_triplet(t);
    const int d = t.dim();
    return IdMeasure(d, std::make_shared<const LevyTriplet>(std::move(t)), std::move(phi));
  }

  /// Triplet and exponent produced together by a library transform; not re-validated.
  static IdMeasure from_trusted(LevyTriplet t, Exponent phi) {
    const int d = t.dim();
    return IdMeasure(d, std::make_shared<const LevyTriplet>(std::move(t)), std::move(phi));
  }

  static IdMeasure from_exponent(int dim, Exponent phi,
                                 std::optional<bool> log_moment_known = std::nullopt) {
    if (dim < 1 || dim > kMaxDim) throw ValidationError("unsupported dimension");
    IdMeasure m(dim, nullptr, std::move(phi));
    m.log_moment_known_ = log_moment_known;
    return m;
  }

  static IdMeasure dirac(int dim) { return from_trusted_triplet(LevyTriplet::zero(dim)); }

  int dim() const { return dim_; }
  bool has_triplet() const { return triplet_ != nullptr; }
  const LevyTriplet& triplet() const {
    if (!triplet_) throw DomainError("measure carries no triplet");
    return *triplet_;
  }

  /// Phi(y); Phi(0) is exactly zero.
  Complex operator()(const Vec& y) const {
    if (y.isZero(0.0)) return {};
    return phi_(y);
  }
  Complex exponent(const Vec& y) const { return (*this)(y); }
  const Exponent& evaluator() const { return phi_; }

  /// ID_log membership: explicit flag if set, otherwise derived from the triplet.
  std::optional<bool> log_moment_known() const {
    if (log_moment_known_) return log_moment_known_;
    if (triplet_) return log_moment(triplet_->spectral).is_finite();
    return std::nullopt;
  }

  /// The flag set by the caller, ignoring anything derivable from the triplet.
  std::optional<bool> explicit_log_moment_flag() const { return log_moment_known_; }

  IdMeasure with_log_moment_flag(std::optional<bool> flag) const {
    IdMeasure m = *this;
    m.log_moment_known_ = flag;
    return m;
  }

 private:
  IdMeasure(int dim, std::shared_ptr<const LevyTriplet> t, Exponent phi)
      : dim_(dim), triplet_(std::move(t)), phi_(std::move(phi)) {}

  int dim_;
  std::shared_ptr<const LevyTriplet> triplet_;
  Exponent phi_;
  std::optional<bool> log_moment_known_;
};

/// mu * nu: exponents add; triplets add componentwise when both are known.
inline IdMeasure convolve(const IdMeasure& mu, const IdMeasure& nu) {
  if (mu.dim() != nu.dim()) throw ValidationError("convolution of measures with different dimensions");
  Exponent phi = [f = mu.evaluator(), g = nu.evaluator()](const Vec& y) { return f(y) + g(y); };
  if (mu.has_triplet() && nu.has_triplet()) {
    const auto& a = mu.triplet();
    const auto& b = nu.triplet();
    LevyTriplet sum{a.shift + b.shift, a.cov + b.cov, a.spectral + b.spectral};
    return IdMeasure::from_trusted(std::move(sum), std::move(phi));
  }
  std::optional<bool> flag;
  const auto fm = mu.log_moment_known();
  const auto fn = nu.log_moment_known();
  if (fm && fn) flag = *fm && *fn;
  return IdMeasure::from_exponent(mu.dim(), std::move(phi), flag);
}

/// mu^{*c}: exponent c Phi, triplet (c a, c S, c M).
inline IdMeasure conv_power(const IdMeasure& mu, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("convolution power needs c > 0");
  Exponent phi = [f = mu.evaluator(), c](const Vec& y) { return c * f(y); };
  if (mu.has_triplet()) {
    const auto& t = mu.triplet();
    LevyTriplet scaled{c * t.shift, c * t.cov, t.spectral.scaled(c)};
    return IdMeasure::from_trusted(std::move(scaled), std::move(phi))
        .with_log_moment_flag(mu.explicit_log_moment_flag());
  }
  return IdMeasure::from_exponent(mu.dim(), std::move(phi), mu.log_moment_known());
}

// Named families. Each pairs its triplet with the textbook closed-form exponent
// so that the two can be cross-checked.
namespace family {

inline IdMeasure gaussian(double var) {
  if (!(var >= 0.0)) throw ValidationError("gaussian variance must be >= 0");
  LevyTriplet t = LevyTriplet::zero(1);
  t.cov(0, 0) = var;
  return IdMeasure::with_closed_form(std::move(t),
                                     [var](const Vec& y) { return Complex{-0.5 * var * y(0) * y(0), 0.0}; });
}

inline IdMeasure gaussian(const Mat& cov) {
  LevyTriplet t = LevyTriplet::zero(static_cast<int>(cov.rows()));
  t.cov = cov;
  return IdMeasure::from_triplet(std::move(t));
}

inline IdMeasure shift(const Vec& a) {
  LevyTriplet t = LevyTriplet::zero(static_cast<int>(a.size()));
  t.shift = a;
  return IdMeasure::with_closed_form(std::move(t), [a](const Vec& y) { return Complex{0.0, y.dot(a)}; });
}

inline IdMeasure shift(double a) { return shift(scalar_vec(a)); }

/// jump * N with N ~ Poisson(rate): one atom at |jump| along sign(jump).
inline IdMeasure poisson(double rate, double jump) {
  if (!(rate > 0.0) || !(jump != 0.0) || !std::isfinite(jump))
    throw ValidationError("poisson needs rate > 0 and a nonzero jump");
  LevyTriplet t = LevyTriplet::zero(1);
  const double r = std::abs(jump);
  t.spectral = SpectralMeasure({{scalar_vec(jump > 0 ? 1.0 : -1.0), {{r, rate}}, {}}});
  if (r <= 1.0) t.shift(0) = rate * jump;
  return IdMeasure::with_closed_form(std::move(t), [rate, jump](const Vec& y) {
    return rate * levy_kernel(jump * y(0), false);
  });
}

/// Compound-Poisson atom of weight w at radius r along a unit direction (no closed form).
inline IdMeasure atom(const Vec& direction, double r, double w) {
  LevyTriplet t = LevyTriplet::zero(static_cast<int>(direction.size()));
  t.spectral = SpectralMeasure({{direction, {{r, w}}, {}}});
  return IdMeasure::from_triplet(std::move(t));
}

/// Gamma(shape, rate): spectral density shape e^{-rate r} / r on (0, inf).
inline IdMeasure gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw ValidationError("gamma needs shape > 0 and rate > 0");
  LevyTriplet t = LevyTriplet::zero(1);
  t.spectral = SpectralMeasure(
      {{scalar_vec(1.0), {}, {std::make_shared<PowerExpDensity>(shape, -1.0, rate, 0.0, kInf)}}});
  // int_0^1 r * shape e^{-rate r} / r dr
  t.shift(0) = shape * -std::expm1(-rate) / rate;
  return IdMeasure::with_closed_form(std::move(t), [shape, rate](const Vec& y) {
    return -shape * std::log(Complex{1.0, -y(0) / rate});
  });
}

}  // namespace family

}  // namespace idcalc
