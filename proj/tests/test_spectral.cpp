#include <cmath>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "idcalc/spectral.hpp"

using namespace idcalc;

namespace {

SpectralMeasure one_ray(std::vector<Atom> atoms, std::vector<DensityPtr> densities = {}) {
  return SpectralMeasure({RadialComponent{scalar_vec(1.0), std::move(atoms), std::move(densities)}});
}

DensityPtr power(double coef, double p, double lo, double hi) {
  return std::make_shared<PowerExpDensity>(coef, p, 0.0, lo, hi);
}

// Brute-force mass of (r1, r2] under A -> int_0^1 M(t^{-1/beta} A) dt for an
// atom (r0, w): midpoint rule over t of w 1{t^{1/beta} r0 in (r1, r2]}.
double smeared_atom_mass_bruteforce(double r0, double w, double beta, double r1, double r2) {
  const int n = 2000000;
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    const double x = std::pow(t, 1.0 / beta) * r0;
    hits += (x > r1 && x <= r2);
  }
  return w * static_cast<double>(hits) / n;
}

}  // namespace

TEST(ValidateSpectral, AtomOutsideBallIsFine) {
  EXPECT_TRUE(validate_spectral(one_ray({{2.0, 1.0}})).ok);
}

TEST(ValidateSpectral, InverseCubeNearZeroViolates) {
  const auto check = validate_spectral(one_ray({}, {power(1.0, -3.0, 0.0, 1.0)}));
  EXPECT_FALSE(check.ok);
  EXPECT_NE(check.violation.find("min(1, r^2)"), std::string::npos);
}

TEST(ValidateSpectral, InverseSquareNearZeroIsFine) {
  EXPECT_TRUE(validate_spectral(one_ray({}, {power(1.0, -2.0, 0.0, 1.0)})).ok);
}

TEST(ValidateSpectral, NumericalPathAgreesWithAnalyticVerdict) {
  auto bad = std::make_shared<FunctionDensity>([](double r) { return std::pow(r, -3.0); }, 0.0, 1.0);
  auto good = std::make_shared<FunctionDensity>([](double r) { return std::pow(r, -2.0); }, 0.0, 1.0);
  EXPECT_FALSE(validate_spectral(one_ray({}, {bad})).ok);
  EXPECT_TRUE(validate_spectral(one_ray({}, {good})).ok);
}

TEST(ValidateSpectral, HeavyTailViolates) {
  EXPECT_FALSE(validate_spectral(one_ray({}, {power(1.0, -1.0, 1.0, kInf)})).ok);
  EXPECT_TRUE(validate_spectral(one_ray({}, {power(1.0, -1.5, 1.0, kInf)})).ok);
}

TEST(ValidateSpectral, RejectsBadGeometry) {
  SpectralMeasure m({RadialComponent{make_vec({1.0, 1.0}), {{1.0, 1.0}}, {}}});
  EXPECT_FALSE(validate_spectral(m, 2).ok);
  EXPECT_FALSE(validate_spectral(one_ray({{1.0, -1.0}})).ok);
  EXPECT_FALSE(validate_spectral(one_ray({{1.0, 1.0}}), 2).ok);
}

TEST(LogMoment, AtomAtE) {
  const auto lm = log_moment(one_ray({{std::numbers::e, 2.0}}));
  ASSERT_TRUE(lm.is_finite());
  EXPECT_NEAR(lm.value, 2.0, 1e-15);
}

TEST(LogMoment, EmptyIsZero) {
  const auto lm = log_moment(SpectralMeasure{});
  ASSERT_TRUE(lm.is_finite());
  EXPECT_EQ(lm.value, 0.0);
}

TEST(LogMoment, InverseLogSquareTailIsInfinite) {
  const auto g = std::make_shared<LogPowerDensity>(1.0, 2.0, std::numbers::e, kInf);
  EXPECT_EQ(log_moment(one_ray({}, {g})).status, LogMoment::Status::infinite);
}

TEST(LogMoment, SmearedDivergentTailIsNotFinite) {
  const auto g = std::make_shared<LogPowerDensity>(1.0, 2.0, std::numbers::e, kInf);
  const auto lm = log_moment(one_ray({}, {g}).smeared(1.0));
  EXPECT_NE(lm.status, LogMoment::Status::finite);
}

TEST(LogMoment, SmearedAtomMatchesClosedForm) {
  // int_1^{r0} log r * w beta r^{beta-1} / r0^beta dr = w (log r0 - 1/beta + r0^{-beta}/beta)
  for (double beta : {0.5, 1.0, 2.0}) {
    const double r0 = 3.0, w = 1.5;
    const double want = w * (std::log(r0) - 1.0 / beta + std::pow(r0, -beta) / beta);
    const auto lm = log_moment(one_ray({{r0, w}}).smeared(beta));
    ASSERT_TRUE(lm.is_finite());
    EXPECT_NEAR(lm.value, want, 1e-9) << "beta=" << beta;
  }
}

TEST(LogMoment, ConvergentLogTailStaysFinite) {
  const auto g = std::make_shared<LogPowerDensity>(1.0, 3.0, std::numbers::e, kInf);
  const auto lm = log_moment(one_ray({}, {g}));
  ASSERT_TRUE(lm.is_finite());
  EXPECT_NEAR(lm.value, 1.0, 1e-12);  // int_1^inf v^{-2} dv
}

TEST(Smearing, AtomMassMatchesBruteForce) {
  const double r0 = 1.0, w = 2.0;
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto m = one_ray({{r0, w}}).smeared(beta);
    for (auto [r1, r2] : {std::pair{0.25, 0.5}, std::pair{0.1, 0.9}, std::pair{0.5, 4.0}}) {
      EXPECT_NEAR(m.rays()[0].mass(r1, r2), smeared_atom_mass_bruteforce(r0, w, beta, r1, r2), 1e-5)
          << "beta=" << beta << " A=(" << r1 << "," << r2 << "]";
    }
  }
}

TEST(Smearing, UniformDensityBetaOne) {
  // g = 1 on (0, 1): g_1(r) = -log r, mass of (r1, r2] = [r - r log r]_{r1}^{r2}.
  const auto m = one_ray({}, {power(1.0, 0.0, 0.0, 1.0)}).smeared(1.0);
  const auto& d = *m.rays()[0].densities[0];
  for (double r : {0.01, 0.3, 0.9}) EXPECT_NEAR(d(r), -std::log(r), 1e-11);
  auto prim = [](double r) { return r - r * std::log(r); };
  EXPECT_NEAR(m.rays()[0].mass(0.25, 0.5), prim(0.5) - prim(0.25), 1e-11);
}

TEST(Smearing, DensityMassConsistentWithPointwise) {
  const auto src = std::make_shared<PowerExpDensity>(1.0, -1.0, 1.0, 0.0, kInf);
  const SmearedDensity s(src, 0.7);
  const double closed = s.mass(0.5, 3.0);
  const double pointwise =
      quad::value_or_throw(quad::integrate([&](double r) { return s(r); }, 0.5, 3.0, {1e-10, 1e-14, 4000}), "x");
  EXPECT_NEAR(closed, pointwise, 1e-9);
}

TEST(Smearing, LogDensityMatchesPointwise) {
  const auto src = std::make_shared<PowerExpDensity>(1.0, -1.0, 1.0, 0.0, kInf);
  const SmearedDensity s(src, 0.7);
  for (double v : {-2.0, 0.0, 1.0, 2.5}) {
    const double r = std::exp(v);
    EXPECT_NEAR(s.log_density(v), r * s(r), 1e-11 * std::max(1.0, r * s(r))) << v;
  }
  const auto lp = std::make_shared<LogPowerDensity>(2.0, 3.0, std::numbers::e, kInf);
  EXPECT_NEAR(lp->log_density(2000.0), 2.0 * std::pow(2000.0, -3.0), 1e-20);
}

TEST(LogMoment, SmearedLogTailBetaOneClosedForm) {
  // int_1^inf (v - 1 + e^{-v}) v^{-3} dv = 1/2 + E_3(1).
  const double e3_1 = 0.10969196719776013;
  const auto g = std::make_shared<LogPowerDensity>(1.0, 3.0, std::numbers::e, kInf);
  const auto lm = log_moment(one_ray({}, {g}).smeared(1.0));
  ASSERT_TRUE(lm.is_finite());
  EXPECT_NEAR(lm.value, 0.5 + e3_1, 1e-9);
}

TEST(Smearing, PreservesTotalMassOutsideBallScaled) {
  // Total mass of the smeared atom equals the atom weight.
  const auto m = one_ray({{2.0, 1.0}}).smeared(1.5);
  EXPECT_NEAR(m.rays()[0].mass(0.0, kInf), 1.0, 1e-12);
}

TEST(SpectralMeasure, SumAndScale) {
  const auto a = one_ray({{2.0, 1.0}});
  const auto b = one_ray({}, {power(1.0, 0.0, 0.0, 1.0)});
  const auto s = (a + b).scaled(0.5);
  EXPECT_EQ(s.rays().size(), 2u);
  EXPECT_NEAR(s.mass_outside(0.5), 0.5 * (1.0 + 0.5), 1e-12);
}
