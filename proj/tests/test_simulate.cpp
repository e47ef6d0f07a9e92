#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "idcalc/grid.hpp"
#include "idcalc/simulate.hpp"
#include "idcalc/verify.hpp"

using namespace idcalc;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<Vec>& xs) {
  Moments m;
  for (const auto& x : xs) m.mean += x(0);
  m.mean /= static_cast<double>(xs.size());
  for (const auto& x : xs) m.var += (x(0) - m.mean) * (x(0) - m.mean);
  m.var /= static_cast<double>(xs.size() - 1);
  return m;
}

// Sample variance of n normals with variance v has sd v sqrt(2 / (n - 1)).
double var_band(double v, std::size_t n) { return 3.0 * v * std::sqrt(2.0 / static_cast<double>(n - 1)); }

KernelIntegralSpec unit_kernel() { return {[](double) { return 1.0; }, std::nullopt, 1.0, false, "unit"}; }

class ThreadCap {
 public:
  explicit ThreadCap(const char* n) { setenv("IDCALC_THREADS", n, 1); }
  ~ThreadCap() { unsetenv("IDCALC_THREADS"); }
};

}  // namespace

TEST(Increments, GaussianVariance) {
  const auto inc = sample_levy_increments(family::gaussian(1.0).triplet(), {0.01, 1000.0, 1e-3, true}, 3);
  ASSERT_EQ(inc.size(), 100000u);
  const auto m = moments(inc);
  EXPECT_NEAR(m.var, 0.01, var_band(0.01, inc.size()));
  EXPECT_NEAR(m.mean, 0.0, 3.0 * std::sqrt(0.01 / inc.size()));
}

TEST(Increments, ShiftIsDeterministic) {
  for (double step : {0.3, 0.01}) {
    const auto inc = sample_levy_increments(family::shift(2.5).triplet(), {step, 0.9, 1e-3, true}, 1);
    for (std::size_t k = 0; k + 1 < inc.size(); ++k) EXPECT_NEAR(inc[k](0), 2.5 * step, 1e-15);
  }
}

TEST(Increments, PoissonJumpCount) {
  const auto t = family::poisson(1.0, 2.0).triplet();
  const auto xs = sample_integral(t, unit_kernel(), {0.1, 1.0, 1e-3, true}, 100000, 5);
  double mean_jumps = 0.0;
  for (const auto& x : xs) {
    const double n = x(0) / 2.0;
    ASSERT_NEAR(n, std::round(n), 1e-12);
    mean_jumps += n;
  }
  mean_jumps /= static_cast<double>(xs.size());
  EXPECT_NEAR(mean_jumps, 1.0, 3.0 * std::sqrt(1.0 / xs.size()));
}

TEST(Increments, SmallJumpGaussianCorrection) {
  // g(r) = r^{-2} on (0, 1), symmetric by two rays: Var Y(1) = 2 int r^2 g = 2.
  LevyTriplet t = LevyTriplet::zero(1);
  auto g = std::make_shared<PowerExpDensity>(1.0, -2.0, 0.0, 0.0, 1.0);
  t.spectral = SpectralMeasure({{scalar_vec(1.0), {}, {g}}, {scalar_vec(-1.0), {}, {g}}});
  const std::size_t n = 100000;
  const auto with = moments(sample_integral(t, unit_kernel(), {1.0, 1.0, 0.1, true}, n, 9));
  const auto without = moments(sample_integral(t, unit_kernel(), {1.0, 1.0, 0.1, false}, n, 9));
  EXPECT_NEAR(with.var, 2.0, 4.0 * 0.01 * 2.0);
  EXPECT_NEAR(without.var, 1.8, 4.0 * 0.01 * 1.8);
  EXPECT_NEAR(with.mean, 0.0, 0.02);
}

TEST(Increments, JumpRadiiFollowDensity) {
  // Gamma(1,1) jumps above eps: compare the mean radius with int r g / int g.
  const auto t = family::gamma(1.0, 1.0).triplet();
  const LevySimulator sim(t, {1e-3, 1.0, 0.05, true});
  Philox4x32 rng(11, 0);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += sim.jump(rng)(0);
  const double mass = t.spectral.mass_outside(0.05);
  const double want = std::exp(-0.05) / mass;  // int_eps^inf e^{-r} dr / mass
  EXPECT_NEAR(s / n, want, 4.0 * want / std::sqrt(static_cast<double>(n)) * 2.0);
  EXPECT_NEAR(sim.jump_rate(), mass, 1e-10);
}

TEST(SampleIntegral, GaussianJBetaVariance) {
  const std::size_t n = 100000;
  const auto xs = sample_integral(family::gaussian(1.0).triplet(), kernels::j_beta(Beta(1.0)), {}, n, 1);
  // Left-point sum of t^2 dt on the mesh: (1 - step)(1 - step/2)/3.
  EXPECT_NEAR(moments(xs).var, 1.0 / 3.0, var_band(1.0 / 3.0, n) + 1e-3);
}

TEST(SampleIntegral, GaussianSigmaClockVariance) {
  const std::size_t n = 100000;
  const auto xs = sample_integral(family::gaussian(1.0).triplet(), kernels::i_of_j_beta(Beta(1.0), 20.0), {}, n, 2);
  EXPECT_NEAR(moments(xs).var, 1.0 / 6.0, var_band(1.0 / 6.0, n) + 1e-3);
}

TEST(SampleIntegral, ShiftExponentialKernel) {
  const auto xs = sample_integral(family::shift(1.0).triplet(), kernels::i_map(20.0), {}, 1000, 3);
  const double step = 1e-3;
  const double left_sum = step * -std::expm1(-20.0) / -std::expm1(-step);
  for (const auto& x : xs) {
    EXPECT_NEAR(x(0), left_sum, 1e-9);
    EXPECT_NEAR(x(0), 1.0 - std::exp(-20.0), 1e-3);
  }
}

TEST(SampleIntegral, TruncationTooShortThrows) {
  EXPECT_THROW(sample_integral(family::gaussian(1.0).triplet(), kernels::i_map(5.0), {}, 10, 1), DomainError);
  PathConfig bad;
  bad.step = -1.0;
  EXPECT_THROW(sample_integral(family::gaussian(1.0).triplet(), kernels::i_map(20.0), bad, 10, 1), ValidationError);
}

TEST(SampleIntegral, DeterministicAcrossThreadCounts) {
  const auto t = family::gamma(1.0, 1.0).triplet();
  std::vector<Vec> one, many, again;
  {
    ThreadCap cap("1");
    one = sample_integral(t, kernels::j_beta(Beta(0.5)), {}, 2000, 77);
  }
  {
    ThreadCap cap("8");
    many = sample_integral(t, kernels::j_beta(Beta(0.5)), {}, 2000, 77);
    again = sample_integral(t, kernels::j_beta(Beta(0.5)), {}, 2000, 77);
  }
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    ASSERT_EQ(one[i](0), many[i](0));
    ASSERT_EQ(many[i](0), again[i](0));
  }
  const auto other = sample_integral(t, kernels::j_beta(Beta(0.5)), {}, 10, 78);
  EXPECT_NE(other[0](0), one[0](0));
}

TEST(SampleIntegral, StepwiseAndAggregatedAgreeInLaw) {
  const auto nu = family::poisson(1.0, 2.0);
  const Beta beta(0.5);
  const std::size_t n = 40000;
  const auto grid = identity_grid(1);
  const auto target = j_beta(nu, beta);
  PathConfig cfg;
  cfg.step = 1e-2;
  for (auto scheme : {IntegralScheme::stepwise, IntegralScheme::aggregated}) {
    const auto xs = sample_integral(nu.triplet(), kernels::j_beta(beta), cfg, n, 4, scheme);
    const auto test = cf_distance_test(ecf(xs, grid), target.evaluator());
    EXPECT_LT(test.max_z, 4.0);
  }
  const auto a = ecf(sample_integral(nu.triplet(), kernels::j_beta(beta), cfg, n, 4, IntegralScheme::stepwise), grid);
  const auto b = ecf(sample_integral(nu.triplet(), kernels::j_beta(beta), cfg, n, 5, IntegralScheme::aggregated), grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double band = 4.0 * std::hypot(a.std_error[j], b.std_error[j]) + 1e-12;
    EXPECT_LT(std::abs(a.values[j] - b.values[j]), band) << "y=" << grid[j](0);
  }
}

TEST(SampleIntegral, MeshRefinementWithinBand) {
  const auto nu = family::gamma(1.0, 1.0);
  const auto grid = identity_grid(1);
  PathConfig coarse, fine;
  coarse.step = 2e-3;
  fine.step = 1e-3;
  const std::size_t n = 100000;
  const auto a = ecf(sample_integral(nu.triplet(), kernels::i_map(20.0), coarse, n, 6), grid);
  const auto b = ecf(sample_integral(nu.triplet(), kernels::i_map(20.0), fine, n, 6), grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double band = 2.0 * std::hypot(a.std_error[j], b.std_error[j]);
    EXPECT_LT(std::abs(a.values[j] - b.values[j]), band) << "y=" << grid[j](0);
  }
}

TEST(Ecf, ConstantAndOrigin) {
  std::vector<Vec> zeros(50, scalar_vec(0.0));
  auto grid = identity_grid(1);
  grid.push_back(scalar_vec(0.0));
  const auto est = ecf(zeros, grid);
  for (const auto& v : est.values) EXPECT_EQ(v, Complex(1.0, 0.0));

  std::vector<Vec> spread = {scalar_vec(1.0), scalar_vec(-3.0), scalar_vec(7.0)};
  EXPECT_EQ(ecf(spread, grid).values.back(), Complex(1.0, 0.0));
  EXPECT_THROW(ecf({scalar_vec(1.0)}, grid), ValidationError);
}

TEST(Ecf, StandardNormal) {
  const auto xs = sample_integral(family::gaussian(1.0).triplet(), unit_kernel(), {1.0, 1.0, 1e-3, true}, 100000, 8);
  const auto est = ecf(xs, {scalar_vec(1.0)});
  EXPECT_NEAR(est.values[0].real(), std::exp(-0.5), 3.0 * est.std_error[0]);
  EXPECT_NEAR(est.values[0].imag(), 0.0, 3.0 * est.std_error[0]);
  EXPECT_LE(std::abs(est.values[0]), 1.0 + 3.0 * est.std_error[0]);
}

TEST(CfTest, ExactSamplerPassesWrongVarianceFails) {
  const auto xs = sample_integral(family::gaussian(1.0).triplet(), unit_kernel(), {1.0, 1.0, 1e-3, true}, 100000, 12);
  const auto est = ecf(xs, identity_grid(1));
  const auto right = cf_distance_test(est, family::gaussian(1.0).evaluator());
  EXPECT_TRUE(right.within_band);
  EXPECT_FALSE(right.inconclusive);
  const auto wrong = cf_distance_test(est, family::gaussian(2.0).evaluator());
  EXPECT_FALSE(wrong.pass);
  EXPECT_GT(wrong.max_z, 4.0);
}

TEST(CfTest, TinySampleIsInconclusive) {
  const auto xs = sample_integral(family::gaussian(1.0).triplet(), unit_kernel(), {1.0, 1.0, 1e-3, true}, 10, 1);
  const auto t = cf_distance_test(ecf(xs, identity_grid(1)), family::gaussian(1.0).evaluator());
  EXPECT_TRUE(t.inconclusive);
  EXPECT_FALSE(t.pass);
}

TEST(CfTest, FractionRule) {
  EcfEstimate est;
  est.n_samples = 100000;
  for (int j = 0; j < 10; ++j) {
    est.grid.push_back(scalar_vec(1.0 + j));
    est.values.push_back({0.0, 0.0});
    est.std_error.push_back(0.01);
  }
  // Model value 0.025 at the first point: z = 2.5 there, zero elsewhere -> 10% above 2.
  est.values[0] = {0.025, 0.0};
  const auto t = cf_distance_test(est, [](const Vec&) { return Complex(-800.0, 0.0); });
  EXPECT_NEAR(t.max_z, 2.5, 1e-9);
  EXPECT_TRUE(t.within_band);
  EXPECT_FALSE(t.pass);
}

// Three samplers against their quadrature exponents for every seed family and beta.
TEST(ThreeLayer, SamplersMatchQuadrature) {
  McOptions mc;
  for (const auto& fam : seed_family_names()) {
    const auto nu = seed_family(fam);
    for (double b : {0.5, 1.0, 2.0}) {
      const Beta beta(b);
      const auto jb = verify_sampler("jbeta", nu, kernels::j_beta(beta), j_beta(nu, beta), b, mc);
      const auto p2 = verify_prop2(nu, beta, mc);
      const auto c1 = verify_sampler("cor1a", nu, kernels::corollary1a(beta), j_beta(j_beta(nu, beta), Beta(2 * b)), b, mc);
      EXPECT_TRUE(jb.pass) << fam << " beta=" << b << " max z " << jb.checks[0].max_abs;
      EXPECT_TRUE(p2.pass) << fam << " beta=" << b << " max z " << p2.checks.back().max_abs;
      EXPECT_TRUE(c1.pass) << fam << " beta=" << b << " max z " << c1.checks[0].max_abs;
    }
  }
}
