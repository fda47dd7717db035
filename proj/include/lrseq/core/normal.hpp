#pragma once

#include <cmath>
#include <numbers>

namespace lrseq {

/// Standard normal CDF. erfc-based so the lower tail keeps full relative
/// precision down to roughly -37; +/-inf map to 0 and 1.
inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace lrseq
