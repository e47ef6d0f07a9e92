#include <cmath>

#include <gtest/gtest.h>

#include "idcalc/levyarea.hpp"

using namespace idcalc;

TEST(LevyArea, NuExponentValues) {
  const AreaParams p(1.0);
  EXPECT_EQ(nu_exponent(p, 0.0), Complex(0.0, 0.0));
  EXPECT_NEAR(nu_exponent(p, 1.0).real(), -(1.0 / std::tanh(1.0) - 1.0), 1e-15);
  EXPECT_NEAR(nu_exponent(p, 1.0).real(), -0.313035, 5e-7);
  // Smooth through the series switch.
  for (double t : {0.0099, 0.01, 0.0101})
    EXPECT_NEAR(nu_exponent(p, t).real(), -(t / std::tanh(t) - 1.0), 1e-13);
  // -(|t|u - 1) asymptotically.
  EXPECT_NEAR(nu_exponent(AreaParams(2.0), 30.0).real(), -(60.0 - 1.0), 1e-12);
}

TEST(LevyArea, SinhFactorValues) {
  const AreaParams p(1.0);
  EXPECT_EQ(sinh_factor_exponent(p, 0.0), Complex(0.0, 0.0));
  EXPECT_NEAR(sinh_factor_exponent(p, 1.0).real(), std::log(1.0 / std::sinh(1.0)), 1e-15);
  EXPECT_NEAR(sinh_factor_exponent(p, 1.0).real(), -0.161439, 5e-7);
  EXPECT_NEAR(sinh_factor_exponent(p, 400.0).real(), std::log(800.0) - 400.0, 1e-9);
  for (double t : {0.0099, 0.0101})
    EXPECT_NEAR(sinh_factor_exponent(p, t).real(), std::log(t / std::sinh(t)), 1e-13);
}

TEST(LevyArea, ExponentsAreEvenAndReal) {
  const AreaParams p(0.7);
  for (double t : {0.1, 1.0, 3.0}) {
    EXPECT_EQ(area_exponent(p, t), area_exponent(p, -t));
    EXPECT_EQ(area_exponent(p, t).imag(), 0.0);
  }
}

TEST(LevyArea, VerificationPasses) {
  for (double u : {0.5, 1.0, 2.0}) {
    const auto rep = verify_levy_area(AreaParams(u));
    EXPECT_TRUE(rep.pass) << "u=" << u;
    EXPECT_LT(rep.grid_max_abs, 1e-8);
    ASSERT_EQ(rep.checks.size(), 4u);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.max_abs;
  }
}

TEST(LevyArea, CoshReadingIsNotACharacteristicFunction) {
  // With cosh in place of coth, tu cosh(tu) - 1 -> -1 at t = 0, so chi(0) = e.
  const double chi0 = 1.0 * std::exp(-(0.0 * std::cosh(0.0) - 1.0));
  EXPECT_NEAR(chi0, std::exp(1.0), 1e-15);
  EXPECT_EQ(std::exp(area_exponent(AreaParams(1.0), 0.0)).real(), 1.0);
}

TEST(LevyArea, RejectsBadU) {
  EXPECT_THROW(AreaParams(0.0), DomainError);
  EXPECT_THROW(AreaParams(-1.0), DomainError);
}
