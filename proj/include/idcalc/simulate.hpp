#pragma once

// Monte Carlo layer: Levy increments from a triplet (compound Poisson for
// jumps above a cutoff, optional Gaussian stand-in for the small jumps),
// left-point Riemann-Stieltjes sums for kernel integrals, empirical
// characteristic functions and a z-score test against an exponent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "idcalc/core.hpp"
#include "idcalc/mappings.hpp"
#include "idcalc/rng.hpp"
#include "idcalc/types.hpp"

namespace idcalc {

struct PathConfig {
  double step = 1e-3;
  double horizon = 1.0;
  double small_jump_cutoff = 1e-3;
  bool gaussian_correction = true;

  void validate() const {
    if (!(step > 0.0) || !(horizon > 0.0)) throw ValidationError("step and horizon must be positive");
    if (step > horizon) throw ValidationError("step must not exceed horizon");
    if (!(small_jump_cutoff > 0.0) || small_jump_cutoff > 1.0)
      throw ValidationError("small-jump cutoff must lie in (0, 1]");
  }
};

/// int f(s) dY(tau(s)) over s in (0, s_max].
struct KernelIntegralSpec {
  std::function<double(double)> kernel;
  std::optional<std::function<double(double)>> clock;
  double s_max = 1.0;
  bool infinite_horizon = false;
  std::string target;
};

namespace kernels {

/// int_0^1 t^{1/beta} dY(t), law J^beta(nu).
inline KernelIntegralSpec j_beta(Beta beta) {
  const double b = beta.value();
  return {[b](double t) { return std::pow(t, 1.0 / b); }, std::nullopt, 1.0, false, "jbeta"};
}

/// int_0^inf e^{-s} dY(s), law I(nu).
inline KernelIntegralSpec i_map(double s_max = 20.0) {
  return {[](double s) { return std::exp(-s); }, std::nullopt, s_max, true, "i"};
}

/// int_0^inf e^{-s} dY(sigma_beta(s)), law I(J^beta(nu)).
inline KernelIntegralSpec i_of_j_beta(Beta beta, double s_max = 20.0) {
  return {[](double s) { return std::exp(-s); }, [beta](double s) { return sigma_clock(beta, s); },
          s_max, true, "i_of_jbeta"};
}

/// int_0^1 (1 - sqrt t)^{1/beta} dY(t), law J^{2 beta}(J^beta(nu)).
inline KernelIntegralSpec corollary1a(Beta beta) {
  const double b = beta.value();
  return {[b](double t) { return std::pow(1.0 - std::sqrt(t), 1.0 / b); }, std::nullopt, 1.0, false,
          "cor1a"};
}

}  // namespace kernels

namespace detail {

/// Symmetric PSD square root via eigen-decomposition (robust to singular S).
inline Mat psd_sqrt(const Mat& s) {
  if (s.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Mat> eig(s);
  Vec ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

/// Log-spaced cells over which a radial density is sampled; the cell is
/// chosen by mass, the radius inside it by rejection from a uniform proposal.
struct DensityCell {
  const RadialDensity* density;
  double lo, hi, envelope;
};

}  // namespace detail

/// Compound-Poisson sampler for the jumps of M with radius above the cutoff,
/// plus the deterministic and Gaussian pieces of a Levy increment.
class LevySimulator {
 public:
  LevySimulator(const LevyTriplet& t, const PathConfig& cfg) : dim_(t.dim()), cfg_(cfg) {
    cfg.validate();
    const double eps = cfg.small_jump_cutoff;
    Vec compensator = Vec::Zero(dim_);
    Mat small_cov = Mat::Zero(dim_, dim_);

    for (const auto& ray : t.spectral.rays()) {
      double comp = 0.0;
      double second = 0.0;
      for (const auto& a : ray.atoms) {
        if (a.r > eps) {
          add_source(a.w, ray.direction, a.r, nullptr);
          if (a.r <= 1.0) comp += a.w * a.r;
        } else {
          second += a.w * a.r * a.r;
        }
      }
      for (const auto& d : ray.densities) {
        comp += moment(*d, std::max(d->lo(), eps), std::min(d->hi(), 1.0), 1);
        second += moment(*d, d->lo(), std::min(d->hi(), eps), 2);
        add_density(d, ray.direction, std::max(d->lo(), eps));
      }
      compensator += comp * ray.direction;
      small_cov += second * ray.direction * ray.direction.transpose();
    }

    drift_ = t.shift - compensator;
    Mat gauss = t.cov;
    if (cfg.gaussian_correction) gauss += small_cov;
    gauss_cov_ = gauss;
    gauss_sqrt_ = detail::psd_sqrt(gauss);
    for (std::size_t i = 1; i < cumulative_.size(); ++i) cumulative_[i] += cumulative_[i - 1];
    rate_ = cumulative_.empty() ? 0.0 : cumulative_.back();
  }

  int dim() const { return dim_; }
  /// M(||x|| > eps).
  double jump_rate() const { return rate_; }
  /// a - int_{eps < ||x|| <= 1} x M(dx).
  const Vec& drift() const { return drift_; }
  /// S, plus int_{||x|| <= eps} x x^T M(dx) when the Gaussian correction is on.
  const Mat& gaussian_cov() const { return gauss_cov_; }

  template <class Rng>
  Vec gaussian(Rng& rng, double variance_scale) const {
    std::normal_distribution<double> normal;
    Vec z(dim_);
    for (int k = 0; k < dim_; ++k) z(k) = normal(rng);
    return std::sqrt(variance_scale) * (gauss_sqrt_ * z);
  }

  /// One jump drawn from the normalized restriction of M to {||x|| > eps}.
  template <class Rng>
  Vec jump(Rng& rng) const {
    const double u = rng.uniform() * rate_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    if (k >= sources_.size()) k = sources_.size() - 1;
    const auto& src = sources_[k];
    if (src.cell.density == nullptr) return src.radius * src.direction;
    const auto& cell = src.cell;
    for (;;) {
      const double r = cell.lo + (cell.hi - cell.lo) * rng.uniform();
      if (rng.uniform() * cell.envelope <= (*cell.density)(r)) return r * src.direction;
    }
  }

  /// Y(t + dt) - Y(t).
  template <class Rng>
  Vec increment(double dt, Rng& rng) const {
    Vec out = dt * drift_ + gaussian(rng, dt);
    if (rate_ > 0.0) {
      std::poisson_distribution<long> count(rate_ * dt);
      for (long j = count(rng); j > 0; --j) out += jump(rng);
    }
    return out;
  }

 private:
  struct Source {
    Vec direction;
    double radius = 0.0;
    detail::DensityCell cell{nullptr, 0.0, 0.0, 0.0};
  };

  static double moment(const RadialDensity& d, double a, double b, int power) {
    if (!(b > a)) return 0.0;
    auto f = [&](double r) { return std::pow(r, power) * d(r); };
    const auto breaks = detail::panel_breaks(a, b, d.kinks());
    return quad::value_or_throw(quad::integrate_panels(f, breaks, {1e-11, 1e-300, 4000}),
                                "jump moment");
  }

  void add_source(double mass, const Vec& dir, double radius, const detail::DensityCell* cell) {
    if (!(mass > 0.0)) return;
    Source s;
    s.direction = dir;
    s.radius = radius;
    if (cell) s.cell = *cell;
    sources_.push_back(std::move(s));
    cumulative_.push_back(mass);
  }

  void add_density(const DensityPtr& d, const Vec& dir, double a) {
    double b = d->hi();
    if (!(b > a)) return;
    if (std::isinf(b)) {
      // Truncate where the remaining mass is negligible relative to the body.
      b = std::max(a, 1.0) * 2.0;
      const double body = std::max(d->mass(a, b), 1e-300);
      while (d->mass(b, kInf) > 1e-14 * body) b *= 2.0;
    }
    keep_.push_back(d);
    constexpr int kCellsPerDecade = 64;
    const double decades = std::log10(b / a);
    const int n = std::max(16, static_cast<int>(std::ceil(decades * kCellsPerDecade)));
    const double ratio = std::pow(b / a, 1.0 / n);
    double lo = a;
    for (int i = 0; i < n; ++i) {
      const double hi = (i == n - 1) ? b : lo * ratio;
      double peak = 0.0;
      constexpr int kProbes = 17;
      for (int j = 0; j <= kProbes; ++j) {
        const double r = lo + (hi - lo) * (j + 0.5) / (kProbes + 1);
        peak = std::max(peak, (*d)(r));
      }
      peak = std::max({peak, (*d)(lo * (1 + 1e-12)), (*d)(hi * (1 - 1e-12))});
      const detail::DensityCell cell{d.get(), lo, hi, 1.25 * peak};
      add_source(d->mass(lo, hi), dir, 0.0, &cell);
      lo = hi;
    }
  }

  int dim_;
  PathConfig cfg_;
  Vec drift_;
  Mat gauss_cov_;
  Mat gauss_sqrt_;
  double rate_ = 0.0;
  std::vector<Source> sources_;
  std::vector<double> cumulative_;
  std::vector<DensityPtr> keep_;
};

/// Increments of one path on the mesh {0, step, ..., horizon}.
inline std::vector<Vec> sample_levy_increments(const LevyTriplet& t, const PathConfig& cfg,
                                               std::uint64_t seed, std::uint64_t stream = 0) {
  const LevySimulator sim(t, cfg);
  Philox4x32 rng(seed, stream);
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(cfg.horizon / cfg.step - 1e-9)));
  std::vector<Vec> out;
  out.reserve(steps);
  double time = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double next = std::min(cfg.horizon, (k + 1) * cfg.step);
    out.push_back(sim.increment(next - time, rng));
    time = next;
  }
  return out;
}

/// How sample_integral realizes the Riemann-Stieltjes sum.
enum class IntegralScheme {
  /// Sum of per-step increments drawn one mesh interval at a time.
  stepwise,
  /// Same sum, with its Gaussian and drift parts collapsed into one draw and the
  /// jumps placed by their (time-changed) arrival times: equal in law to stepwise.
  aggregated,
};

/// Number of worker threads: IDCALC_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("IDCALC_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// n i.i.d. realizations of sum_k f(s_k) [Y(tau(s_{k+1})) - Y(tau(s_k))] on
/// the mesh s_k = k step. Path i uses the Philox stream (seed, i).
inline std::vector<Vec> sample_integral(const LevyTriplet& t, const KernelIntegralSpec& spec,
                                        const PathConfig& cfg, std::size_t n, std::uint64_t seed,
                                        IntegralScheme scheme = IntegralScheme::aggregated) {
  cfg.validate();
  if (!(spec.s_max > 0.0)) throw ValidationError("kernel range must be positive");
  if (spec.infinite_horizon && !(std::exp(-spec.s_max) < 1e-4))
    throw DomainError("truncation s_max too small: kernel tail bound e^{-s_max} must be < 1e-4");
  const LevySimulator sim(t, cfg);

  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(spec.s_max / cfg.step - 1e-9)));
  std::vector<double> f(steps);
  std::vector<double> tau(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double s = std::min(spec.s_max, static_cast<double>(k) * cfg.step);
    tau[k] = spec.clock ? (*spec.clock)(s) : s;
    if (k < steps) f[k] = spec.kernel(s);
  }
  for (std::size_t k = 0; k < steps; ++k)
    if (tau[k + 1] < tau[k]) throw ValidationError("clock must be nondecreasing");

  double drift_weight = 0.0;  // sum f_k dtau_k
  double var_weight = 0.0;    // sum f_k^2 dtau_k
  for (std::size_t k = 0; k < steps; ++k) {
    const double dt = tau[k + 1] - tau[k];
    drift_weight += f[k] * dt;
    var_weight += f[k] * f[k] * dt;
  }
  const double total_time = tau[steps];

  auto one_path = [&](std::size_t i) -> Vec {
    Philox4x32 rng(seed, i);
    if (scheme == IntegralScheme::stepwise) {
      Vec acc = Vec::Zero(sim.dim());
      for (std::size_t k = 0; k < steps; ++k) acc += f[k] * sim.increment(tau[k + 1] - tau[k], rng);
      return acc;
    }
    Vec acc = drift_weight * sim.drift() + sim.gaussian(rng, var_weight);
    if (sim.jump_rate() > 0.0) {
      std::poisson_distribution<long> count(sim.jump_rate() * total_time);
      for (long j = count(rng); j > 0; --j) {
        const double when = rng.uniform() * total_time;
        auto it = std::upper_bound(tau.begin(), tau.end(), when);
        std::size_t k = static_cast<std::size_t>(it - tau.begin());
        k = std::clamp<std::size_t>(k, 1, steps) - 1;
        acc += f[k] * sim.jump(rng);
      }
    }
    return acc;
  };

  std::vector<Vec> out(n);
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = one_path(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = one_path(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

struct EcfEstimate {
  std::vector<Vec> grid;
  std::vector<Complex> values;
  std::size_t n_samples = 0;
  std::vector<double> std_error;
};

/// values[j] = mean_k exp(i <y_j, X_k>), with the standard error of the mean
/// from the complex sample variance.
inline EcfEstimate ecf(const std::vector<Vec>& samples, const std::vector<Vec>& grid) {
  if (samples.size() < 2) throw ValidationError("ecf needs at least two samples");
  EcfEstimate est;
  est.grid = grid;
  est.n_samples = samples.size();
  const double n = static_cast<double>(samples.size());
  for (const auto& y : grid) {
    Complex sum{};
    for (const auto& x : samples) {
      const double phase = y.dot(x);
      sum += Complex{std::cos(phase), std::sin(phase)};
    }
    const Complex mean = sum / n;
    double spread = 0.0;
    for (const auto& x : samples) {
      const double phase = y.dot(x);
      spread += std::norm(Complex{std::cos(phase), std::sin(phase)} - mean);
    }
    est.values.push_back(y.isZero(0.0) ? Complex{1.0, 0.0} : mean);
    est.std_error.push_back(std::sqrt(spread / (n - 1.0) / n));
  }
  return est;
}

struct CfTest {
  bool pass = false;
  bool within_band = false;  // max z < 4 alone
  bool inconclusive = false;
  double max_z = 0.0;
  double frac_above_2 = 0.0;
  std::vector<double> z;
  std::vector<double> abs_diff;
};

/// Below this many samples the z-scores are not trusted.
inline constexpr std::size_t kMinEcfSamples = 100;

/// z_j = |ecf_j - exp(Phi(y_j))| / se_j with se_j floored at 0.5 / sqrt(n)
/// (the Monte Carlo resolution of an n-sample ecf); pass iff max z < 4 and
/// fewer than 10% of points have z > 2.
inline CfTest cf_distance_test(const EcfEstimate& est, const Exponent& phi) {
  CfTest out;
  if (est.n_samples < kMinEcfSamples) {
    out.inconclusive = true;
    return out;
  }
  const double floor = 0.5 / std::sqrt(static_cast<double>(est.n_samples));
  std::size_t above = 0;
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    const Complex model = est.grid[j].isZero(0.0) ? Complex{1.0, 0.0} : std::exp(phi(est.grid[j]));
    const double diff = std::abs(est.values[j] - model);
    const double z = diff / std::max(est.std_error[j], floor);
    out.abs_diff.push_back(diff);
    out.z.push_back(z);
    out.max_z = std::max(out.max_z, std::isfinite(z) ? z : std::numeric_limits<double>::infinity());
    if (z > 2.0) ++above;
  }
  out.frac_above_2 = est.grid.empty() ? 0.0 : static_cast<double>(above) / est.grid.size();
  out.within_band = out.max_z < 4.0;
  out.pass = out.within_band && out.frac_above_2 < 0.1;
  return out;
}

}  // namespace idcalc
