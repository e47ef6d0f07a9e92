#pragma once

// Random-integral mappings as transforms of characteristic exponents:
//   J^beta(nu) = L( int_0^1 t^{1/beta} dY_nu(t) ),
//   I(nu)      = L( int_0^inf e^{-s} dY_nu(s) ),
// together with the inverse of J^beta, the composition I o J^beta through
// the clock sigma_beta, and the (1 - sqrt t)^{1/beta} kernel.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "idcalc/core.hpp"
#include "idcalc/quadrature.hpp"
#include "idcalc/types.hpp"

namespace idcalc {

/// Strictly positive, finite index of the J^beta family.
class Beta {
 public:
  explicit Beta(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("beta must be positive and finite");
  }
  double value() const { return value_; }
  operator double() const { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_;
};

/// sigma_beta(s) = s + e^{-beta s}/beta - 1/beta.
inline double sigma_clock(Beta beta, double s) {
  if (!(s >= 0.0)) throw DomainError("sigma clock needs s >= 0");
  return s + std::expm1(-beta.value() * s) / beta.value();
}

/// sigma_beta'(s) = 1 - e^{-beta s}.
inline double sigma_clock_derivative(Beta beta, double s) {
  if (!(s >= 0.0)) throw DomainError("sigma clock needs s >= 0");
  return -std::expm1(-beta.value() * s);
}

struct MapOptions {
  quad::Tolerance tol{1e-10, 1e-14, 4000};
  /// Apply I even when the ID_log check fails or cannot be decided.
  bool override_log_moment = false;
};

namespace detail {

/// Weighted radial average int_0^1 Phi(u y) w(u) du in the smoother of the
/// two parametrizations chosen by the caller.
template <class W>
Complex radial_average(const IdMeasure& mu, const Vec& y, W&& weight, const quad::Tolerance& tol,
                       const char* what) {
  auto f = [&](double u) -> Complex {
    const double w = weight(u);
    if (w == 0.0) return {};
    const Vec uy = u * y;
    return w * mu(uy);
  };
  return quad::value_or_throw(quad::integrate(f, 0.0, 1.0, tol), what);
}

/// int_0^1 h(u) du where h(u) = weight(u) Phi(u y) may blow up like u^{-1} up
/// to an integrable power near 0: adaptive quadrature on (delta, 1] over
/// decade panels, plus a power-law extrapolated remainder on (0, delta].
template <class W>
Complex near_zero_average(const IdMeasure& mu, const Vec& y, W&& weight,
                          const quad::Tolerance& tol, const char* what) {
  constexpr double kDelta = 1e-6;
  auto h = [&](double u) -> Complex {
    const Vec uy = u * y;
    return weight(u) * mu(uy);
  };
  std::vector<double> breaks;
  for (double b = kDelta; b < 1.0; b *= 10.0) breaks.push_back(b);
  breaks.push_back(1.0);
  const Complex body = quad::value_or_throw(quad::integrate_panels(h, breaks, tol), what);

  // Each of Re h, Im h is fitted to c u^q from h(delta), h(delta/2);
  // int_0^delta c u^q du = delta h(delta) / (q + 1).
  const Complex h1 = h(kDelta);
  const Complex h2 = h(0.5 * kDelta);
  auto remainder = [&](double a, double b) {
    if (a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)) return kDelta * a;
    const double q = std::log2(a / b);
    if (!(q > -1.0)) throw DomainError(std::string(what) + ": integrand not integrable at 0");
    return kDelta * a / (q + 1.0);
  };
  return body + Complex{remainder(h1.real(), h2.real()), remainder(h1.imag(), h2.imag())};
}

inline Vec jbeta_shift(const LevyTriplet& t, double beta) {
  // a + int_{||x||>1} x ||x||^{-1-beta} M(dx), per ray as xi * int_{r>1} r^{-beta} M(dr).
  Vec acc = t.shift;
  for (const auto& ray : t.spectral.rays()) {
    double radial = 0.0;
    for (const auto& a : ray.atoms)
      if (a.r > 1.0) radial += a.w * std::pow(a.r, -beta);
    for (const auto& d : ray.densities) {
      if (!(d->hi() > 1.0)) continue;
      auto f = [&](double r) { return (*d)(r)*std::pow(r, -beta); };
      auto kk = d->kinks();
      if (std::isinf(d->hi())) kk.push_back(std::max(d->lo(), 1.0) + 1.0);
      const auto breaks = panel_breaks(std::max(d->lo(), 1.0), d->hi(), kk);
      radial += quad::value_or_throw(quad::integrate_panels(f, breaks, {1e-12, 1e-300, 4000}),
                                     "J^beta shift");
    }
    acc += radial * ray.direction;
  }
  return beta / (beta + 1.0) * acc;
}

}  // namespace detail

/// Closed-form triplet of J^beta(nu):
///   a' = beta/(beta+1) (a + int_{||x||>1} x ||x||^{-1-beta} M(dx)),
///   S' = beta/(beta+2) S,
///   M'(A) = int_0^1 M(t^{-1/beta} A) dt.
inline LevyTriplet j_beta_triplet(const LevyTriplet& t, Beta beta) {
  const double b = beta.value();
  return {detail::jbeta_shift(t, b), b / (b + 2.0) * t.cov, t.spectral.smeared(b)};
}

/// Exponent-level J^beta: Phi_out(y) = int_0^1 Phi(t^{1/beta} y) dt. For
/// beta >= 1 it is evaluated as int_0^1 beta u^{beta-1} Phi(u y) du, for
/// beta < 1 in the t variable; both keep the integrand smooth at 0 for the
/// usual seeds. A triplet input also yields the closed-form triplet.
inline IdMeasure j_beta(const IdMeasure& mu, Beta beta, const MapOptions& opt = {}) {
  const double b = beta.value();
  Exponent phi = [mu, b, tol = opt.tol](const Vec& y) -> Complex {
    if (b >= 1.0) {
      return detail::radial_average(
          mu, y, [b](double u) { return b * std::pow(u, b - 1.0); }, tol, "J^beta quadrature");
    }
    auto f = [&](double t) -> Complex {
      const Vec ty = std::pow(t, 1.0 / b) * y;
      return mu(ty);
    };
    return quad::value_or_throw(quad::integrate(f, 0.0, 1.0, tol), "J^beta quadrature");
  };
  if (mu.has_triplet()) {
    return IdMeasure::from_trusted(j_beta_triplet(mu.triplet(), beta), std::move(phi))
        .with_log_moment_flag(mu.explicit_log_moment_flag());
  }
  return IdMeasure::from_exponent(mu.dim(), std::move(phi), mu.explicit_log_moment_flag());
}

/// Recovers nu from mu = J^beta(nu):
///   Phi_nu(y) = d/ds [ s Phi_mu(s^{1/beta} y) ] at s = 1,
/// by central differences with steps h and h/2 (h = 1e-5) and one Richardson step.
inline IdMeasure j_beta_inverse(const IdMeasure& mu, Beta beta) {
  const double b = beta.value();
  Exponent phi = [mu, b](const Vec& y) -> Complex {
    auto g = [&](double s) -> Complex {
      const Vec sy = std::pow(s, 1.0 / b) * y;
      return s * mu(sy);
    };
    auto central = [&](double h) { return (g(1.0 + h) - g(1.0 - h)) / (2.0 * h); };
    constexpr double kStep = 1e-5;
    const Complex coarse = central(kStep);
    const Complex fine = central(0.5 * kStep);
    return (4.0 * fine - coarse) / 3.0;
  };
  return IdMeasure::from_exponent(mu.dim(), std::move(phi), mu.explicit_log_moment_flag());
}

namespace detail {

inline void require_log_moment(const IdMeasure& mu, const MapOptions& opt, const char* what) {
  if (opt.override_log_moment) return;
  const auto flag = mu.log_moment_known();
  if (!flag) throw DomainError(std::string(what) + ": ID_log membership unknown (override to force)");
  if (!*flag) throw DomainError(std::string(what) + ": measure has no finite log-moment");
}

}  // namespace detail

/// I(nu): Phi_out(y) = int_0^inf Phi(e^{-s} y) ds = int_0^1 Phi(u y) / u du.
inline IdMeasure i_map(const IdMeasure& mu, const MapOptions& opt = {}) {
  detail::require_log_moment(mu, opt, "I mapping");
  Exponent phi = [mu, tol = opt.tol](const Vec& y) -> Complex {
    return detail::near_zero_average(
        mu, y, [](double u) { return 1.0 / u; }, tol, "I quadrature");
  };
  return IdMeasure::from_exponent(mu.dim(), std::move(phi));
}

/// I(J^beta(nu)) as one quadrature: int_0^1 Phi(u y) (u^{-1} - u^{beta-1}) du.
inline IdMeasure i_of_j_beta(const IdMeasure& mu, Beta beta, const MapOptions& opt = {}) {
  detail::require_log_moment(mu, opt, "I o J^beta");
  const double b = beta.value();
  Exponent phi = [mu, b, tol = opt.tol](const Vec& y) -> Complex {
    // (1 - u^beta) / u without cancellation near u = 1.
    auto weight = [b](double u) { return -std::expm1(b * std::log(u)) / u; };
    return detail::near_zero_average(mu, y, weight, tol, "I o J^beta quadrature");
  };
  return IdMeasure::from_exponent(mu.dim(), std::move(phi));
}

/// L( int_0^1 (1 - sqrt t)^{1/beta} dY_nu(t) ): Phi_out(y) = int_0^1 Phi((1 - sqrt t)^{1/beta} y) dt.
/// With v = 1 - sqrt t this is int_0^1 2 (1 - v) Phi(v^{1/beta} y) dv, and for
/// beta >= 1 additionally v = w^beta: int_0^1 2 beta w^{beta-1} (1 - w^beta) Phi(w y) dw.
inline IdMeasure corollary1a_kernel(const IdMeasure& mu, Beta beta, const MapOptions& opt = {}) {
  const double b = beta.value();
  Exponent phi = [mu, b, tol = opt.tol](const Vec& y) -> Complex {
    if (b >= 1.0) {
      auto weight = [b](double w) {
        const double wb = std::pow(w, b);
        return 2.0 * b * (wb / w) * (1.0 - wb);
      };
      return detail::radial_average(mu, y, weight, tol, "(1 - sqrt t) kernel quadrature");
    }
    auto f = [&](double v) -> Complex {
      const Vec vy = std::pow(v, 1.0 / b) * y;
      return 2.0 * (1.0 - v) * mu(vy);
    };
    return quad::value_or_throw(quad::integrate(f, 0.0, 1.0, tol), "(1 - sqrt t) kernel quadrature");
  };
  return IdMeasure::from_exponent(mu.dim(), std::move(phi), mu.explicit_log_moment_flag());
}

}  // namespace idcalc
