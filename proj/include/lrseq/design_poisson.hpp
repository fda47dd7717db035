#pragma once

// Projections under the Poisson exposure model. Conditional on the total
// event count, treatment events are binomial with p = psi / (psi + g), so the
// sequential walk machinery applies to the binomial likelihood.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "lrseq/core/errors.hpp"
#include "lrseq/design_normal.hpp"
#include "lrseq/evidence.hpp"
#include "lrseq/misleading.hpp"

namespace lrseq {

enum class Hypothesis { null = 0, alternative = 1 };

inline const char* to_string(Hypothesis h) noexcept { return h == Hypothesis::null ? "null" : "alt"; }

/// psi / (psi + g): share of events expected in the treatment arm.
inline double p_from_psi(double psi, double g) {
  if (!(psi > 0.0) || !(g > 0.0) || !std::isfinite(psi) || !std::isfinite(g))
    throw DomainError("psi and g must be positive");
  return psi / (psi + g);
}

inline double psi_from_p(double p, double g) {
  if (!(p > 0.0 && p < 1.0) || !(g > 0.0)) throw DomainError("p must lie in (0,1) and g > 0");
  return g * p / (1.0 - p);
}

struct PoissonDesign {
  double psi1 = 1.0;
  double psi0 = 1.0;
  double g = 1.0;                   // exposure ratio t_c / t_t
  std::optional<double> lambda_c;   // control hazard, events per time unit
  EvidenceThresholds thresholds = EvidenceThresholds::symmetric(8.0);
  double rho = kRhoBinomial;

  double p0() const { return p_from_psi(psi0, g); }
  double p1() const { return p_from_psi(psi1, g); }
  double psi(Hypothesis h) const { return h == Hypothesis::null ? psi0 : psi1; }

  void validate() const {
    p0();
    p1();
    if (psi0 == psi1) throw DomainError("hazard ratios must differ");
    if (!(rho >= 0.0)) throw DomainError("rho must be >= 0");
    if (lambda_c && !(*lambda_c > 0.0)) throw DomainError("lambda_c must be positive");
  }

  friend bool operator==(const PoissonDesign&, const PoissonDesign&) = default;
};

struct EventSplit {
  std::size_t d_t = 0;
  std::size_t d_c = 0;
  std::size_t total() const noexcept { return d_t + d_c; }
};

/// Log of the conditional binomial likelihood ratio psi1 vs psi0.
inline double binomial_loglr(const EventSplit& split, const PoissonDesign& design) {
  design.validate();
  const double p1 = design.p1();
  const double p0 = design.p0();
  double out = 0.0;
  if (split.d_t > 0) out += static_cast<double>(split.d_t) * std::log(p1 / p0);
  if (split.d_c > 0) out += static_cast<double>(split.d_c) * std::log((1.0 - p1) / (1.0 - p0));
  return out;
}

/// A design whose hypotheses satisfy p1 > p0. `flipped` records whether the
/// hazard ratios (and the exposure ratio) were inverted, i.e. the parameter
/// became the control-to-treatment hazard ratio. H0/H1 keep their roles, so
/// alpha_l and power_l need no relabeling.
struct OrientedPoissonDesign {
  PoissonDesign design;
  PoissonDesign original;
  bool flipped = false;
};

inline OrientedPoissonDesign orient_hypotheses(const PoissonDesign& design) {
  design.validate();
  OrientedPoissonDesign out{design, design, false};
  if (design.p1() < design.p0()) {
    out.design.psi1 = 1.0 / design.psi1;
    out.design.psi0 = 1.0 / design.psi0;
    out.design.g = 1.0 / design.g;
    out.flipped = true;
  }
  return out;
}

inline OperatingCharacteristics poisson_operating_characteristics(const PoissonDesign& design) {
  design.validate();
  const double p0 = design.p0();
  const double p1 = design.p1();
  if (!(p1 > p0)) throw DomainError("design requires p1 > p0; apply orient_hypotheses first");
  const double delta = std::log(design.psi1 / design.psi0);
  const double shift = std::log((1.0 - p1) / (1.0 - p0)) / delta;
  return sequential_characteristics(delta, design.rho, design.thresholds.k0(), design.thresholds.k1(),
                                    p0 + shift, p1 + shift);
}

inline OperatingCharacteristics poisson_operating_characteristics(const OrientedPoissonDesign& design) {
  return poisson_operating_characteristics(design.design);
}

// ---------------------------------------------------------------------------
// Exposure-time projections
// ---------------------------------------------------------------------------

namespace detail {

inline double poisson_log_pmf(std::size_t j, double lambda) {
  const double x = static_cast<double>(j);
  if (lambda == 0.0) return j == 0 ? 0.0 : -INFINITY;
  return -lambda + x * std::log(lambda) - std::lgamma(x + 1.0);
}

}  // namespace detail

/// P(D >= d) for D ~ Poisson(lambda), summed upward from d until the terms
/// stop contributing to the running total at double precision.
inline double poisson_upper_tail(std::size_t d, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (d == 0) return 1.0;
  if (lambda == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = d;; ++j) {
    const double term = std::exp(detail::poisson_log_pmf(j, lambda));
    sum += term;
    if (static_cast<double>(j) > lambda && term <= 1e-17 * sum) break;
    if (sum == 0.0 && static_cast<double>(j) > lambda) break;
  }
  return std::min(sum, 1.0);
}

/// Same probability as 1 - P(D <= d - 1).
inline double poisson_upper_tail_complement(std::size_t d, double lambda) {
  if (d == 0) return 1.0;
  double lower = 0.0;
  for (std::size_t j = 0; j < d; ++j) lower += std::exp(detail::poisson_log_pmf(j, lambda));
  return std::max(0.0, 1.0 - lower);
}

struct ExposureProjection {
  double t_c = 0.0;
  double t_t = 0.0;
  double gamma = 0.0;  // assurance probability; 0 for the mean projection
  double target_events = 0.0;
  double expected_events = 0.0;  // Poisson mean at t_c

  friend bool operator==(const ExposureProjection&, const ExposureProjection&) = default;
};

namespace detail {
inline double required_lambda_c(const PoissonDesign& design) {
  if (!design.lambda_c) throw DomainError("lambda_c is required for exposure projections");
  return *design.lambda_c;
}
}  // namespace detail

/// Smallest control exposure t_c (to 1e-6 time units) with
/// P(D >= target_events) >= gamma, D ~ Poisson(lambda_c t_c (1 + psi_i/g)).
inline ExposureProjection exposure_time_numeric(std::size_t target_events, double gamma, const PoissonDesign& design,
                                                Hypothesis under) {
  design.validate();
  const double lambda_c = detail::required_lambda_c(design);
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  const double rate = lambda_c * (1.0 + design.psi(under) / design.g);
  auto feasible = [&](double t) { return poisson_upper_tail(target_events, rate * t) >= gamma; };

  double lo = 0.0;
  double hi = 1.0;
  if (target_events > 0) {
    while (!feasible(hi)) {
      lo = hi;
      hi *= 2.0;
    }
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
  } else {
    hi = 0.0;
  }

  ExposureProjection out;
  out.t_c = hi;
  out.t_t = hi / design.g;
  out.gamma = gamma;
  out.target_events = static_cast<double>(target_events);
  out.expected_events = rate * hi;
  return out;
}

/// Mean projection: t_c = E_i[D] / (lambda_c (1 + psi_i/g)).
inline ExposureProjection exposure_time_simple(double expected_events, const PoissonDesign& design, Hypothesis under) {
  design.validate();
  const double lambda_c = detail::required_lambda_c(design);
  if (!(expected_events > 0.0)) throw DomainError("expected events must be positive");
  ExposureProjection out;
  out.t_c = expected_events / (lambda_c * (1.0 + design.psi(under) / design.g));
  out.t_t = out.t_c / design.g;
  out.target_events = expected_events;
  out.expected_events = expected_events;
  return out;
}

}  // namespace lrseq
