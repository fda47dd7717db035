#pragma once

// Closed-form probabilities of misleading evidence (fixed pair of simple
// hypotheses) and of being led astray (post-hoc alternatives), for fixed and
// sequential designs.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "lrseq/core/errors.hpp"
#include "lrseq/core/normal.hpp"

namespace lrseq {

/// Discrete-time overshoot corrections.
inline constexpr double kRhoNormal = 0.583;
inline constexpr double kRhoBinomial = 0.32;

/// Standardized distance between the hypotheses (per observation, in
/// information units) together with the overshoot constant of the model.
struct EvidenceScale {
  double delta = 1.0;
  double rho = kRhoNormal;

  void validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be positive and finite");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("rho must be >= 0");
  }
};

/// Examination window [m0, m]; m may be +inf.
struct LookWindow {
  double m0 = 1.0;
  double m = std::numeric_limits<double>::infinity();

  bool unbounded() const noexcept { return std::isinf(m); }

  void validate() const {
    if (!(m0 >= 1.0) || !(m >= m0)) throw DomainError("look window requires 1 <= m0 <= m");
  }
};

namespace detail {
inline void require_k(double k) {
  if (!(k > 1.0)) throw DomainError("strength of evidence k must exceed 1");
}
}  // namespace detail

inline double universal_bound(double k) {
  detail::require_k(k);
  return 1.0 / k;
}

/// Fixed-n probability of misleading evidence, large-sample approximation.
inline double bump(const EvidenceScale& scale, double n, double k) {
  detail::require_k(k);
  scale.validate();
  if (!(n >= 1.0)) throw DomainError("n must be >= 1");
  const double root_n = std::sqrt(n);
  return normal_cdf(-std::log(k) / (scale.delta * root_n) - scale.delta * root_n / 2.0);
}

struct BumpMax {
  double probability;
  // Maximizing alternative, in standard errors from the null (+/-).
  double standardized_distance;
};

inline BumpMax bump_max(double k) {
  detail::require_k(k);
  const double z = std::sqrt(2.0 * std::log(k));
  return {normal_cdf(-z), z};
}

/// Probability of misleading evidence when the data are examined after each
/// observation in [m0, m]. The (m0 - 1) = 0 terms take their limits (the
/// lower-tail term vanishes, the bracketed one becomes 1).
inline double extended_bump(const EvidenceScale& scale, const LookWindow& window, double k) {
  detail::require_k(k);
  scale.validate();
  window.validate();
  const double c = std::log(k) / scale.delta + scale.rho;
  const double half_delta = scale.delta / 2.0;
  // Phi[sign * c * x^(-1/2) - (delta/2) x^(1/2)] with x in [0, inf].
  auto term = [&](double x, double sign) {
    if (x == 0.0) return sign > 0 ? 1.0 : 0.0;
    if (std::isinf(x)) return 0.0;
    const double r = std::sqrt(x);
    return normal_cdf(sign * c / r - half_delta * r);
  };
  const double before = window.m0 - 1.0;
  return term(window.m, -1.0) + term(before, -1.0) +
         std::exp(-scale.rho * scale.delta) / k * (term(before, +1.0) - term(window.m, +1.0));
}

/// Worst case over unlimited looks; never exceeds 1/k.
inline double tepee(const EvidenceScale& scale, double k) {
  detail::require_k(k);
  scale.validate();
  return std::exp(-scale.rho * scale.delta) / k;
}

/// Led astray with a single terminal look; two-sided doubles it.
inline double astray_fixed(double k, bool two_sided = false) {
  const double p = bump_max(k).probability;
  return two_sided ? 2.0 * p : p;
}

struct AstrayBound {
  double sequential;  // log-window bound, 0 when m == m0
  double fixed;       // terminal-look probability
  double reported;    // max of the two
};

/// Upper bound on the probability of being led astray with continual looks
/// in [m0, m]. Unbounded windows diverge.
inline AstrayBound astray_sequential_bound(const LookWindow& window, double k) {
  detail::require_k(k);
  window.validate();
  if (window.unbounded()) throw DomainError("bound diverges for an unbounded look window");
  const double log_k = std::log(k);
  const double seq = std::sqrt(log_k) / (2.0 * k * std::sqrt(std::numbers::pi)) * std::log(window.m / window.m0);
  const double fixed = astray_fixed(k);
  return {seq, fixed, std::max(seq, fixed)};
}

inline constexpr std::array<double, 4> kTable1Levels{8.0, 20.0, 32.0, 64.0};
inline constexpr std::array<double, 6> kTable1Ratios{0.01, 0.05, 0.1, 0.2, 0.5, 1.0};

using LedAstrayTable = std::array<std::array<double, kTable1Ratios.size()>, kTable1Levels.size()>;

/// Led-astray probabilities by strength of evidence (rows) and sample
/// constraint ratio m0/m (columns). The ratio-1 column is the fixed design.
inline LedAstrayTable reproduce_table1() {
  LedAstrayTable out{};
  for (std::size_t i = 0; i < kTable1Levels.size(); ++i) {
    const double k = kTable1Levels[i];
    for (std::size_t j = 0; j < kTable1Ratios.size(); ++j) {
      const double ratio = kTable1Ratios[j];
      out[i][j] = ratio == 1.0 ? astray_fixed(k)
                               : astray_sequential_bound({1.0, 1.0 / ratio}, k).sequential;
    }
  }
  return out;
}

}  // namespace lrseq
