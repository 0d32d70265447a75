#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace divmin {

/// Dense real vector; points on the unit cube and dual variables alike.
using Vector = std::vector<double>;

/// Base class for input-domain violations (exit code 3 at the CLI).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Thrown when a target mean lies on the boundary of [0,1]^K.
class InteriorMeanRequired : public DomainError {
 public:
  using DomainError::DomainError;
};

inline void check_unit_cube(const Vector& x) {
  if (x.empty()) throw DomainError("point must have dimension >= 1");
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0))
      throw DomainError("coordinate " + std::to_string(v) + " outside [0,1]");
  }
}

inline void check_interior(const Vector& mu) {
  if (mu.empty()) throw DomainError("mean must have dimension >= 1");
  for (double v : mu) {
    if (!(v > 0.0 && v < 1.0))
      throw InteriorMeanRequired("mean coordinate " + std::to_string(v) +
                                 " not in the open interval (0,1)");
  }
}

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, v < 0 ? -v : v);
  return m;
}

inline double norm_1(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += v < 0 ? -v : v;
  return s;
}

inline double norm_2(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace divmin
