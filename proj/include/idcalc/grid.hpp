#pragma once

#include <array>
#include <vector>

#include "idcalc/types.hpp"

namespace idcalc {

inline constexpr std::array<double, 10> kGridAxis = {-5.0, -2.0, -1.0, -0.5, -0.1,
                                                     0.1,  0.5,  1.0,  2.0,  5.0};

/// Tensor grid {+-0.1, +-0.5, +-1, +-2, +-5}^d used by every identity check.
/// For d > 1 the tensor product is thinned to at most 64 points by a fixed stride.
inline std::vector<Vec> identity_grid(int dim, std::size_t cap = 64) {
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= kGridAxis.size();
  std::vector<std::size_t> picks;
  if (dim == 1 || total <= cap) {
    for (std::size_t i = 0; i < total; ++i) picks.push_back(i);
  } else {
    for (std::size_t i = 0; i < cap; ++i) picks.push_back(i * total / cap);
  }
  std::vector<Vec> out;
  out.reserve(picks.size());
  for (std::size_t idx : picks) {
    Vec y(dim);
    for (int k = 0; k < dim; ++k) {
      y(k) = kGridAxis[idx % kGridAxis.size()];
      idx /= kGridAxis.size();
    }
    out.push_back(y);
  }
  return out;
}

/// One-dimensional grid from explicit values.
inline std::vector<Vec> grid_from_values(const std::vector<double>& values) {
  std::vector<Vec> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(scalar_vec(v));
  return out;
}

}  // namespace idcalc
