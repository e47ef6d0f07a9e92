#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace idcalc {

/// Largest supported dimension. Vectors use inline storage up to this size.
inline constexpr int kMaxDim = 4;

using Complex = std::complex<double>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Malformed or inconsistent input (bad triplet, dimension mismatch, Levy-measure violation).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was applied outside its domain (e.g. I on a measure without a log-moment).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(format(what, achieved)), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  static std::string format(const std::string& what, double achieved) {
    std::ostringstream os;
    os << what << " (achieved error " << achieved << ")";
    return os.str();
  }

  double achieved_;
};

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vec scalar_vec(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

}  // namespace idcalc
