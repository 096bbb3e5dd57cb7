#pragma once

#include <algorithm>
#include <cmath>

#include "nnst/field.hpp"

namespace testing_util {

inline constexpr double kPi = 3.14159265358979323846;

inline double max_abs_diff(const nnst::GridField& a, const nnst::GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

inline double max_abs_diff(const nnst::SpectralField& a, const nnst::SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
  return m;
}

inline double max_abs(const nnst::GridField& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

inline double relative_l2(const nnst::VelocityField& a, const nnst::VelocityField& b) {
  return nnst::l2_norm(a - b) / nnst::l2_norm(b);
}

}  // namespace testing_util
