#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "idcalc/core.hpp"
#include "idcalc/types.hpp"

namespace idcalc {

/// One compared point: a frequency y for exponent identities, or a radial
/// test set (r1, r2] for measure identities.
struct ReportPoint {
  std::vector<double> at;
  Complex lhs;
  Complex rhs;
  double abs_diff = 0.0;
  std::optional<double> z;  // Monte Carlo z-score, when applicable
};

/// A named sub-result of a verification (e.g. the quadrature pair and the
/// Monte Carlo layer of a three-way check).
struct SubCheck {
  std::string name;
  double max_abs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool inconclusive = false;
};

struct VerificationReport {
  std::string identity;
  double beta = 0.0;
  std::string seed;
  std::string label;
  double tolerance = 0.0;
  double grid_max_abs = 0.0;
  bool pass = false;
  std::vector<ReportPoint> points;
  std::vector<SubCheck> checks;
  std::vector<std::string> notes;

  /// Folds a sub-check into the overall verdict.
  void add_check(SubCheck c) {
    pass = pass && c.pass && !c.inconclusive;
    checks.push_back(std::move(c));
  }
};

inline std::vector<double> coords(const Vec& y) { return {y.data(), y.data() + y.size()}; }

/// Max |lhs(y) - rhs(y)| over the grid; pass iff below tol.
inline VerificationReport compare_exponents(std::string identity, const IdMeasure& lhs,
                                            const IdMeasure& rhs, const std::vector<Vec>& grid,
                                            double tol) {
  VerificationReport rep;
  rep.identity = std::move(identity);
  rep.tolerance = tol;
  for (const auto& y : grid) {
    ReportPoint p{coords(y), lhs(y), rhs(y), 0.0, std::nullopt};
    p.abs_diff = std::abs(p.lhs - p.rhs);
    if (!std::isfinite(p.abs_diff)) p.abs_diff = std::numeric_limits<double>::infinity();
    rep.grid_max_abs = std::max(rep.grid_max_abs, p.abs_diff);
    rep.points.push_back(std::move(p));
  }
  rep.pass = rep.grid_max_abs < tol;
  return rep;
}

}  // namespace idcalc
