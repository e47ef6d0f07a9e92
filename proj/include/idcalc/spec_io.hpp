#pragma once

// JSON measure specs (explicit triplets or named families) and JSON/CSV
// serialization of reports and samples.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "idcalc/core.hpp"
#include "idcalc/report.hpp"
#include "idcalc/simulate.hpp"
#include "idcalc/types.hpp"

namespace idcalc {

using json = nlohmann::json;

namespace detail {

inline double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

/// Upper support bound: a number, or null / "inf" / absent for +inf.
inline double upper_bound(const json& j) {
  if (!j.contains("hi") || j.at("hi").is_null()) return kInf;
  const auto& v = j.at("hi");
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "Infinity")) return kInf;
  if (!v.is_number()) throw ValidationError("field 'hi' must be a number, null or \"inf\"");
  return v.get<double>();
}

inline Vec vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string(what) + " must be a nonempty array");
  if (j.size() > static_cast<std::size_t>(kMaxDim))
    throw ValidationError(std::string(what) + " exceeds the supported dimension");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(std::string(what) + " entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline DensityPtr density_from(const json& j) {
  const std::string kind = j.value("kind", "power");
  const double lo = number_or(j, "lo", 0.0);
  const double hi = upper_bound(j);
  const double coef = number_or(j, "coef", 1.0);
  if (kind == "power") return std::make_shared<PowerExpDensity>(coef, number(j, "exponent"), 0.0, lo, hi);
  if (kind == "power_exp")
    return std::make_shared<PowerExpDensity>(coef, number(j, "exponent"), number(j, "rate"), lo, hi);
  if (kind == "log_power") return std::make_shared<LogPowerDensity>(coef, number(j, "q"), lo, hi);
  throw ValidationError("unknown density kind '" + kind + "'");
}

inline IdMeasure family_from(const json& j) {
  const std::string name = j.at("family").get<std::string>();
  if (name == "gaussian") return family::gaussian(number(j, "var"));
  if (name == "poisson") return family::poisson(number(j, "rate"), number(j, "jump"));
  if (name == "gamma") return family::gamma(number(j, "shape"), number(j, "rate"));
  if (name == "shift") return family::shift(number(j, "value"));
  if (name == "dirac") return IdMeasure::dirac(1);
  throw ValidationError("unknown family '" + name + "'");
}

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Builds (and validates) a measure from a parsed spec.
inline IdMeasure measure_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("measure spec must be a JSON object");
  if (j.contains("family")) return detail::family_from(j);

  LevyTriplet t;
  if (j.contains("shift")) {
    t.shift = detail::vec_from(j.at("shift"), "shift");
  } else {
    const int dim = j.value("dim", 1);
    if (dim < 1 || dim > kMaxDim) throw ValidationError("unsupported dimension");
    t.shift = Vec::Zero(dim);
  }
  const int d = t.dim();
  if (j.contains("dim") && j.at("dim").get<int>() != d) throw ValidationError("'dim' does not match 'shift'");

  t.cov = Mat::Zero(d, d);
  if (j.contains("cov")) {
    const auto& c = j.at("cov");
    if (!c.is_array() || static_cast<int>(c.size()) != d) throw ValidationError("'cov' must be a dim x dim array");
    for (int r = 0; r < d; ++r) {
      const Vec row = detail::vec_from(c[static_cast<std::size_t>(r)], "cov row");
      if (row.size() != d) throw ValidationError("'cov' must be a dim x dim array");
      t.cov.row(r) = row.transpose();
    }
  }

  std::vector<RadialComponent> rays;
  if (j.contains("spectral")) {
    const auto& s = j.at("spectral");
    for (const auto& rj : s.value("rays", json::array())) {
      RadialComponent ray;
      ray.direction = detail::vec_from(rj.at("direction"), "direction");
      for (const auto& aj : rj.value("atoms", json::array()))
        ray.atoms.push_back({detail::number(aj, "r"), detail::number(aj, "w")});
      for (const auto& dj : rj.value("densities", json::array()))
        ray.densities.push_back(detail::density_from(dj));
      rays.push_back(std::move(ray));
    }
  }
  t.spectral = SpectralMeasure(std::move(rays));
  return IdMeasure::from_triplet(std::move(t));
}

/// Parses text; malformed JSON is reported with line and column.
inline IdMeasure measure_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON at " + detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0) +
                          ": " + e.what());
  }
  try {
    return measure_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad measure spec: ") + e.what());
  }
}

inline IdMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open measure file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return measure_from_string(buf.str());
}

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const VerificationReport& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    json jp = {{"at", p.at}, {"lhs", to_json(p.lhs)}, {"rhs", to_json(p.rhs)}, {"abs_diff", p.abs_diff}};
    if (p.z) jp["z"] = *p.z;
    points.push_back(std::move(jp));
  }
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"max_abs", c.max_abs},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"inconclusive", c.inconclusive}});
  return {{"identity", r.identity}, {"beta", r.beta},       {"seed", r.seed},
          {"label", r.label},       {"tolerance", r.tolerance}, {"grid_max_abs", r.grid_max_abs},
          {"pass", r.pass},         {"points", points},     {"checks", checks},
          {"notes", r.notes}};
}

/// One sample per line, d comma-separated columns, full precision.
inline void write_samples_csv(std::ostream& os, const std::vector<Vec>& samples) {
  os << std::setprecision(17);
  for (const auto& x : samples) {
    for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? "," : "") << x(k);
    os << '\n';
  }
}

}  // namespace idcalc
