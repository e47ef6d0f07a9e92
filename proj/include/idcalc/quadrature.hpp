#pragma once

// Globally adaptive Gauss-Kronrod (10/21) integration for real- and
// complex-valued integrands, with helpers for half-infinite ranges and
// pre-split panels.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include "idcalc/types.hpp"

namespace idcalc::quad {

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-14;
  int max_intervals = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

// Kronrod abscissae (positive half, descending) and weights; Gauss weights for
// the embedded 10-point rule sit at the odd Kronrod positions.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478316, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[10];
  T gauss{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[static_cast<std::size_t>(j)];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[static_cast<std::size_t>(j / 2)];
  }
  const T k = kronrod * half;
  const T g = gauss * half;
  return {a, b, k, magnitude(k - g)};
}

}  // namespace detail

namespace detail {

/// Global adaptive driver over an initial partition. The last panel may be
/// [p, inf), handled in the variable t of x = p + L t / (1 - t), L = max(1, |p|).
template <class T, class F>
Result<T> adaptive(F& f, std::span<const double> breaks, const Tolerance& tol) {
  Result<T> out;
  struct Mapped {
    F& f;
    double p, scale;
    T operator()(double t) const {
      const double one_minus = 1.0 - t;
      const double x = p + scale * t / one_minus;
      if (!std::isfinite(x)) return T{};
      return f(x) * (scale / (one_minus * one_minus));
    }
  };
  std::optional<Mapped> tail;

  struct Entry {
    Panel<T> panel;
    bool mapped;
    bool operator<(const Entry& o) const { return panel.error < o.panel.error; }
  };
  std::priority_queue<Entry> heap;
  T total{};
  double total_err = 0.0;
  auto eval = [&](double a, double b, bool mapped) {
    return mapped ? gk21<T>(*tail, a, b) : gk21<T>(f, a, b);
  };
  auto push = [&](Panel<T> p, bool mapped) {
    total += p.value;
    total_err += p.error;
    heap.push({p, mapped});
    out.evaluations += 21;
  };

  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    if (!(hi > lo)) continue;
    if (std::isinf(hi)) {
      tail.emplace(Mapped{f, lo, std::max(1.0, std::abs(lo))});
      push(eval(0.0, 1.0, true), true);
    } else {
      push(eval(lo, hi, false), false);
    }
  }
  if (heap.empty()) return out;

  auto target = [&] { return std::max(tol.abs, tol.rel * magnitude(total)); };
  int intervals = static_cast<int>(heap.size());
  while (total_err > target() && intervals < tol.max_intervals) {
    const Entry worst = heap.top();
    const double mid = 0.5 * (worst.panel.a + worst.panel.b);
    // Interval can no longer be split in floating point.
    if (!(mid > worst.panel.a && mid < worst.panel.b)) break;
    heap.pop();
    total -= worst.panel.value;
    total_err -= worst.panel.error;
    push(eval(worst.panel.a, mid, worst.mapped), worst.mapped);
    push(eval(mid, worst.panel.b, worst.mapped), worst.mapped);
    ++intervals;
  }

  // Re-sum to shed the drift accumulated by incremental updates.
  total = T{};
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().panel.value;
    total_err += heap.top().panel.error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  out.converged = total_err <= std::max(tol.abs, tol.rel * magnitude(total));
  return out;
}

}  // namespace detail

/// Integrates f over the finite interval [a, b]. The integrand is never
/// evaluated at the endpoints, so integrable endpoint singularities are fine.
template <class F>
auto integrate(F&& f, double a, double b, const Tolerance& tol = {})
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  if (a > b) {
    auto r = integrate(f, b, a, tol);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> breaks{a, b};
  return detail::adaptive<T>(f, breaks, tol);
}

/// Integrates f over [a, inf) via x = a + L t / (1 - t) with L = max(1, |a|).
template <class F>
auto integrate_to_infinity(F&& f, double a, const Tolerance& tol = {})
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  const std::array<double, 2> breaks{a, std::numeric_limits<double>::infinity()};
  return detail::adaptive<T>(f, breaks, tol);
}

/// Integrates over the initial partition [p0,p1], [p1,p2], ... with one global
/// error budget. The last breakpoint may be +inf.
template <class F>
auto integrate_panels(F&& f, std::span<const double> breaks, const Tolerance& tol = {})
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  return detail::adaptive<T>(f, breaks, tol);
}

/// Throws QuadratureError unless the result converged.
template <class T>
T value_or_throw(const Result<T>& r, const char* what) {
  if (!r.converged) throw QuadratureError(what, r.error);
  return r.value;
}

}  // namespace idcalc::quad
