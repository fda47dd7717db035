#pragma once

// Sample-size and operating-characteristic projections for a fully
// sequential likelihood design under the normal approximation to the log
// hazard ratio estimate.

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

#include "lrseq/core/errors.hpp"
#include "lrseq/evidence.hpp"
#include "lrseq/misleading.hpp"

namespace lrseq {

struct OperatingCharacteristics {
  double alpha_l = 0.0;        // P0(stop for H1)
  double power_l = 0.0;        // P1(stop for H1)
  double e_events_null = 0.0;  // E0[D]
  double e_events_alt = 0.0;   // E1[D]

  friend bool operator==(const OperatingCharacteristics&, const OperatingCharacteristics&) = default;
};

/// Wald/Siegmund approximations for a random walk in information time with
/// boundaries a = ln(k0)/delta and b = ln(k1)/delta, overshoot rho, and
/// per-observation drifts phi0 (< 0) and phi1 (> 0).
inline OperatingCharacteristics sequential_characteristics(double delta, double rho, double k0, double k1,
                                                           double phi0, double phi1) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const double a = std::log(k0) / delta;
  const double b = std::log(k1) / delta;
  const double lower = std::exp((a - rho) * delta);
  const double upper = std::exp((b + rho) * delta);

  OperatingCharacteristics oc;
  oc.alpha_l = (1.0 - lower) / (upper - lower);
  oc.power_l = (1.0 - 1.0 / lower) / (1.0 / upper - 1.0 / lower);
  oc.e_events_null = ((b + rho) * oc.alpha_l + (a - rho) * (1.0 - oc.alpha_l)) / phi0;
  oc.e_events_alt = ((b + rho) * oc.power_l + (a - rho) * (1.0 - oc.power_l)) / phi1;
  return oc;
}

inline double delta_from_hazard_ratio(double psi1, double psi0 = 1.0) {
  if (!(psi1 > 0.0) || !(psi0 > 0.0)) throw DomainError("hazard ratios must be positive");
  if (psi1 == psi0) throw DomainError("hazard ratios must differ");
  return std::abs(std::log(psi1) - std::log(psi0)) / 2.0;
}

struct FreedmanMoments {
  double mean;
  double variance;
};

/// Mean and variance of the log hazard ratio estimate from Freedman's
/// log-rank formulation.
inline FreedmanMoments freedman_moments(double psi, double d) {
  if (!(psi > 0.0)) throw DomainError("hazard ratio must be positive");
  if (!(d >= 1.0)) throw DomainError("event count must be >= 1");
  return {2.0 * (psi - 1.0) / (psi + 1.0), 16.0 * psi / (d * (psi + 1.0) * (psi + 1.0))};
}

/// Normal-approximation design. The per-event standard deviation of the log
/// hazard ratio is (1 + r)/sqrt(r) for treatment:control event allocation r,
/// which is 2 (variance 4/d) for balanced arms.
class NormalDesign {
 public:
  NormalDesign(Hypotheses hyps, EvidenceThresholds thresholds, double rho = kRhoNormal,
               double allocation_ratio = 1.0)
      : hyps_(hyps), thresholds_(thresholds), rho_(rho), allocation_(allocation_ratio) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("rho must be >= 0");
    if (!(allocation_ratio > 0.0) || !std::isfinite(allocation_ratio))
      throw DomainError("allocation ratio must be positive");
  }

  /// Design for the hazard ratio psi1 against psi0 (default the null 1).
  static NormalDesign from_hazard_ratios(double psi1, double psi0, EvidenceThresholds thresholds,
                                         double rho = kRhoNormal) {
    return {Hypotheses::from_hazard_ratios(psi0, psi1), thresholds, rho};
  }

  /// Design pinned to a given standardized distance, e.g. a rounded value
  /// quoted in a protocol. Hypotheses are theta0 = 0, theta1 = -2 delta.
  static NormalDesign from_delta(double delta, EvidenceThresholds thresholds, double rho = kRhoNormal) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be positive");
    NormalDesign d{Hypotheses{0.0, -2.0 * delta}, thresholds, rho};
    d.delta_override_ = delta;
    return d;
  }

  const Hypotheses& hypotheses() const noexcept { return hyps_; }
  const EvidenceThresholds& thresholds() const noexcept { return thresholds_; }
  double rho() const noexcept { return rho_; }
  double allocation_ratio() const noexcept { return allocation_; }

  double sigma() const noexcept { return (1.0 + allocation_) / std::sqrt(allocation_); }

  double delta() const noexcept {
    if (delta_override_) return *delta_override_;
    return std::abs(hyps_.theta1() - hyps_.theta0()) / sigma();
  }

  EvidenceScale scale() const noexcept { return {delta(), rho_}; }

 private:
  Hypotheses hyps_;
  EvidenceThresholds thresholds_;
  double rho_;
  double allocation_;
  std::optional<double> delta_override_;
};

inline OperatingCharacteristics operating_characteristics(const NormalDesign& design) {
  const double delta = design.delta();
  return sequential_characteristics(delta, design.rho(), design.thresholds().k0(), design.thresholds().k1(),
                                    -delta / 2.0, delta / 2.0);
}

/// Upper bounds on alpha_l and lower bound on power_l from the thresholds alone.
inline std::pair<double, double> threshold_bounds(const EvidenceThresholds& t) {
  const double alpha_max = (1.0 - t.k0()) / (t.k1() - t.k0());
  return {alpha_max, t.k1() * alpha_max};
}

struct EventBudget {
  double events = 0.0;
  double event_probability = 1.0;
};

/// Participants needed to observe the given number of events, n = ceil(d/p).
inline std::size_t subjects_needed(const EventBudget& budget) {
  if (!(budget.event_probability > 0.0 && budget.event_probability <= 1.0))
    throw DomainError("event probability must lie in (0, 1]");
  if (!(budget.events >= 1.0)) throw DomainError("event count must be >= 1");
  const double n = budget.events / budget.event_probability;
  // Absorb representation error such as 40/0.8 = 50.000000000000007.
  const double nearest = std::round(n);
  if (std::abs(n - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(n));
}

}  // namespace lrseq
