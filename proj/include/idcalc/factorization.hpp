#pragma once

// Factorization identities for the classes U_beta = J^beta(ID): the factor
// rho = J^{2 beta}(nu^{*1/2}) with J^beta(rho) * rho = J^beta(nu), the
// identity J^{2 beta}(J^beta(rho) * rho) = J^beta(rho^{*2}), its spectral
// measure form, and the auxiliary J^beta algebra checks.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "idcalc/core.hpp"
#include "idcalc/grid.hpp"
#include "idcalc/mappings.hpp"
#include "idcalc/report.hpp"

namespace idcalc {

inline constexpr double kExponentTolerance = 1e-8;
inline constexpr double kRoundTripTolerance = 1e-7;
inline constexpr double kMeasureTolerance = 1e-6;

namespace detail {

inline void label_beta(VerificationReport& rep, double beta) {
  rep.beta = beta;
  if (beta == 1.0) rep.label = "s-selfdecomposable";
}

}  // namespace detail

/// rho = J^{2 beta}(nu^{*1/2}), the unique rho with J^beta(rho) * rho = J^beta(nu).
inline IdMeasure factor_rho(const IdMeasure& nu, Beta beta) {
  return j_beta(conv_power(nu, 0.5), Beta(2.0 * beta.value()));
}

/// max_y |Phi_{J^beta(rho)} + Phi_rho - Phi_{J^beta(nu)}| with rho = factor_rho(nu, beta).
inline VerificationReport verify_prop1(const IdMeasure& nu, Beta beta,
                                       const std::vector<Vec>& grid) {
  const auto rho = factor_rho(nu, beta);
  const auto lhs = convolve(j_beta(rho, beta), rho);
  const auto rhs = j_beta(nu, beta);
  auto rep = compare_exponents("prop1", lhs, rhs, grid, kExponentTolerance);
  detail::label_beta(rep, beta);
  return rep;
}

inline VerificationReport verify_prop1(const IdMeasure& nu, Beta beta) {
  return verify_prop1(nu, beta, identity_grid(nu.dim()));
}

/// Largest grid change of J^beta(rho') * rho' - J^beta(nu) when rho' = rho * delta_eps.
inline double prop1_perturbation_gap(const IdMeasure& nu, Beta beta, const Vec& eps) {
  const auto rho = convolve(factor_rho(nu, beta), family::shift(eps));
  const auto lhs = convolve(j_beta(rho, beta), rho);
  const auto rhs = j_beta(nu, beta);
  return compare_exponents("prop1-perturbed", lhs, rhs, identity_grid(nu.dim()), 0.0).grid_max_abs;
}

/// J^{2 beta}(J^beta(rho) * rho) against J^beta(rho^{*2}).
inline VerificationReport verify_lemma1e(const IdMeasure& rho, Beta beta,
                                         const std::vector<Vec>& grid) {
  const auto lhs = j_beta(convolve(j_beta(rho, beta), rho), Beta(2.0 * beta.value()));
  const auto rhs = j_beta(conv_power(rho, 2.0), beta);
  auto rep = compare_exponents("lemma1e", lhs, rhs, grid, kExponentTolerance);
  detail::label_beta(rep, beta);
  return rep;
}

inline VerificationReport verify_lemma1e(const IdMeasure& rho, Beta beta) {
  return verify_lemma1e(rho, beta, identity_grid(rho.dim()));
}

/// J^{b1}(J^{b2}(nu)) against J^{b2}(J^{b1}(nu)) for b2 in {0.5, 1, 2}.
inline VerificationReport verify_lemma1c(const IdMeasure& nu, Beta beta) {
  const auto grid = identity_grid(nu.dim());
  VerificationReport rep;
  rep.identity = "lemma1c";
  rep.tolerance = kExponentTolerance;
  rep.pass = true;
  detail::label_beta(rep, beta);
  for (double other : {0.5, 1.0, 2.0}) {
    const Beta b2(other);
    const auto lhs = j_beta(j_beta(nu, b2), beta);
    const auto rhs = j_beta(j_beta(nu, beta), b2);
    auto part = compare_exponents("lemma1c", lhs, rhs, grid, kExponentTolerance);
    rep.add_check({"commute with beta=" + std::to_string(other), part.grid_max_abs,
                   kExponentTolerance, part.pass});
    rep.grid_max_abs = std::max(rep.grid_max_abs, part.grid_max_abs);
    if (rep.points.empty()) rep.points = std::move(part.points);
  }
  return rep;
}

/// J^beta(nu1 * nu2) = J^beta(nu1) * J^beta(nu2) and (J^beta nu)^{*c} = J^beta(nu^{*c}),
/// using nu2 = nu^{*1/2} and c in {1/2, 2}.
inline VerificationReport verify_lemma1d(const IdMeasure& nu, Beta beta) {
  const auto grid = identity_grid(nu.dim());
  VerificationReport rep;
  rep.identity = "lemma1d";
  rep.tolerance = kExponentTolerance;
  rep.pass = true;
  detail::label_beta(rep, beta);

  const auto nu2 = conv_power(nu, 0.5);
  auto hom = compare_exponents("lemma1d", j_beta(convolve(nu, nu2), beta),
                               convolve(j_beta(nu, beta), j_beta(nu2, beta)), grid,
                               kExponentTolerance);
  rep.add_check({"homomorphism", hom.grid_max_abs, kExponentTolerance, hom.pass});
  rep.grid_max_abs = hom.grid_max_abs;
  rep.points = std::move(hom.points);
  for (double c : {0.5, 2.0}) {
    auto pw = compare_exponents("lemma1d", conv_power(j_beta(nu, beta), c),
                                j_beta(conv_power(nu, c), beta), grid, kExponentTolerance);
    rep.add_check({"power c=" + std::to_string(c), pw.grid_max_abs, kExponentTolerance, pw.pass});
    rep.grid_max_abs = std::max(rep.grid_max_abs, pw.grid_max_abs);
  }
  return rep;
}

/// Direct (1 - sqrt t)^{1/beta} kernel against J^{2 beta}(J^beta(nu)).
inline VerificationReport verify_corollary1a(const IdMeasure& nu, Beta beta) {
  const auto lhs = corollary1a_kernel(nu, beta);
  const auto rhs = j_beta(j_beta(nu, beta), Beta(2.0 * beta.value()));
  auto rep = compare_exponents("cor1a", lhs, rhs, identity_grid(nu.dim()), kExponentTolerance);
  detail::label_beta(rep, beta);
  return rep;
}

/// For rho = J^{2 beta}(nu): mu = J^beta(rho) * rho is recovered as
/// J^beta(nu') with nu' = (J^beta)^{-1}(mu).
inline VerificationReport verify_corollary1b(const IdMeasure& nu, Beta beta) {
  const auto rho = j_beta(nu, Beta(2.0 * beta.value()));
  const auto mu = convolve(j_beta(rho, beta), rho);
  const auto recovered = j_beta_inverse(mu, beta);
  auto rep = compare_exponents("cor1b", j_beta(recovered, beta), mu, identity_grid(nu.dim()),
                               kRoundTripTolerance);
  detail::label_beta(rep, beta);
  return rep;
}

/// (J^beta)^{-1}(J^beta(mu)) against mu.
inline VerificationReport verify_round_trip(const IdMeasure& mu, Beta beta) {
  auto rep = compare_exponents("lemma1b", j_beta_inverse(j_beta(mu, beta), beta), mu,
                               identity_grid(mu.dim()), kRoundTripTolerance);
  detail::label_beta(rep, beta);
  return rep;
}

/// Dyadic radial test sets (2^{-k}, 2^{-k+1}], k = -3..6.
inline std::vector<std::array<double, 2>> dyadic_mesh() {
  std::vector<std::array<double, 2>> out;
  for (int k = -3; k <= 6; ++k) out.push_back({std::ldexp(1.0, -k), std::ldexp(1.0, -k + 1)});
  return out;
}

/// Spectral form of the factorization: with M(A) = int_0^1 G(t^{-1/(2 beta)} A) dt / 2,
///   int_0^1 M(t^{-1/beta} A) dt + M(A) = int_0^1 G(t^{-1/beta} A) dt
/// on every ray and every dyadic radial set A.
inline VerificationReport verify_corollary5(const SpectralMeasure& g, Beta beta) {
  const double b = beta.value();
  const auto m = g.smeared(2.0 * b).scaled(0.5);
  const auto lhs_smeared = m.smeared(b);
  const auto rhs = g.smeared(b);

  VerificationReport rep;
  rep.identity = "cor5";
  rep.tolerance = kMeasureTolerance;
  detail::label_beta(rep, beta);
  for (std::size_t k = 0; k < g.rays().size(); ++k) {
    for (const auto& [r1, r2] : dyadic_mesh()) {
      const double left = lhs_smeared.rays()[k].mass(r1, r2) + m.rays()[k].mass(r1, r2);
      const double right = rhs.rays()[k].mass(r1, r2);
      ReportPoint p{{static_cast<double>(k), r1, r2}, left, right, std::abs(left - right), {}};
      rep.grid_max_abs = std::max(rep.grid_max_abs, std::isfinite(p.abs_diff) ? p.abs_diff : kInf);
      rep.points.push_back(std::move(p));
    }
  }
  rep.pass = rep.grid_max_abs < kMeasureTolerance;
  return rep;
}

}  // namespace idcalc
