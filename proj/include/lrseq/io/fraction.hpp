#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "lrseq/core/errors.hpp"

namespace lrseq::io {

/// Parses "0.05", "20", "1e-3" or a ratio "p/q" such as "1/20". The ratio
/// form divides the two parsed numbers once, so "1/20" gives 1.0 / 20.0.
inline double parse_ratio(std::string_view text) {
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
      throw DomainError("not a number: '" + std::string(text) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return number(text);
  const double num = number(text.substr(0, slash));
  const double den = number(text.substr(slash + 1));
  if (den == 0.0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

}  // namespace lrseq::io
