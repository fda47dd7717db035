#pragma once

// Evidence measurement from two-group survival data: Cox partial likelihood
// (Breslow ties), likelihood ratios, MLE, 1/k support intervals and the
// one-sided post-hoc supremum ratio.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrseq/core/errors.hpp"
#include "lrseq/core/roots.hpp"

namespace lrseq {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Two simple hypotheses on the log hazard ratio scale.
class Hypotheses {
 public:
  Hypotheses(double theta0, double theta1) : theta0_(theta0), theta1_(theta1) {
    if (!std::isfinite(theta0) || !std::isfinite(theta1))
      throw DomainError("hypotheses must be finite");
    if (theta0 == theta1) throw DomainError("hypotheses must differ");
  }

  /// From hazard ratios psi = exp(theta).
  static Hypotheses from_hazard_ratios(double psi0, double psi1) {
    if (!(psi0 > 0.0) || !(psi1 > 0.0)) throw DomainError("hazard ratios must be positive");
    return {std::log(psi0), std::log(psi1)};
  }

  double theta0() const noexcept { return theta0_; }
  double theta1() const noexcept { return theta1_; }
  double psi0() const noexcept { return std::exp(theta0_); }
  double psi1() const noexcept { return std::exp(theta1_); }

  friend bool operator==(const Hypotheses&, const Hypotheses&) = default;

 private:
  double theta0_;
  double theta1_;
};

/// Stopping levels: strong evidence for H0 at LR <= k0, for H1 at LR >= k1.
class EvidenceThresholds {
 public:
  EvidenceThresholds(double k0, double k1) : k0_(k0), k1_(k1) {
    if (!(k0 > 0.0 && k0 < 1.0 && k1 > 1.0 && std::isfinite(k1)))
      throw DomainError("thresholds require 0 < k0 < 1 < k1");
  }

  static EvidenceThresholds symmetric(double k) { return {1.0 / k, k}; }

  double k0() const noexcept { return k0_; }
  double k1() const noexcept { return k1_; }

  friend bool operator==(const EvidenceThresholds&, const EvidenceThresholds&) = default;

 private:
  double k0_;
  double k1_;
};

struct SurvivalRecord {
  std::string subject_id;
  double time = 0.0;
  int event = 0;  // 1 = event, 0 = right censored
  int group = 0;  // 1 = treatment, 0 = control

  friend bool operator==(const SurvivalRecord&, const SurvivalRecord&) = default;
};

inline void validate(const SurvivalRecord& r) {
  if (!(r.time >= 0.0) || !std::isfinite(r.time)) throw DomainError("record time must be finite and >= 0");
  if (r.event != 0 && r.event != 1) throw DomainError("event indicator must be 0 or 1");
  if (r.group != 0 && r.group != 1) throw DomainError("group indicator must be 0 or 1");
}

enum class Classification { strong_for_h1, weak, strong_for_h0 };

inline const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::strong_for_h1: return "strong-for-H1";
    case Classification::strong_for_h0: return "strong-for-H0";
    case Classification::weak: break;
  }
  return "weak";
}

inline Classification classify(double lr, const EvidenceThresholds& t) noexcept {
  if (lr >= t.k1()) return Classification::strong_for_h1;
  if (lr <= t.k0()) return Classification::strong_for_h0;
  return Classification::weak;
}

struct EvidenceReport {
  double lr = 1.0;
  double log_lr = 0.0;
  Classification classification = Classification::weak;
  std::size_t d_events = 0;

  friend bool operator==(const EvidenceReport&, const EvidenceReport&) = default;
};

struct SupportInterval {
  double k_level = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  double theta_hat = 0.0;

  friend bool operator==(const SupportInterval&, const SupportInterval&) = default;
};

// ---------------------------------------------------------------------------
// Risk table: the partial likelihood of a binary covariate only depends on
// per-event-time counts, so everything below works on this reduction.
// ---------------------------------------------------------------------------

/// Minimal observation used by the simulation engine (no subject id).
struct Observation {
  double time = 0.0;
  bool event = false;
  bool treated = false;
};

namespace detail {

struct EventStratum {
  double time;
  int deaths_control;
  int deaths_treated;
  int at_risk_control;
  int at_risk_treated;
};

/// Strata in increasing time. Risk set at t = every subject with time >= t
/// (censored-at-t subjects remain in the risk set), Breslow handling of ties.
class RiskTable {
 public:
  RiskTable() = default;

  template <class Range, class Proj>
  static RiskTable build(const Range& items, Proj proj) {
    std::vector<Observation> obs;
    obs.reserve(std::size(items));
    for (const auto& item : items) obs.push_back(proj(item));
    return build_from(obs);
  }

  static RiskTable build_from(std::vector<Observation>& obs) {
    RiskTable table;
    std::sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) {
      return a.time > b.time;
    });
    int n0 = 0;
    int n1 = 0;
    std::size_t i = 0;
    while (i < obs.size()) {
      const double t = obs[i].time;
      int d0 = 0;
      int d1 = 0;
      for (; i < obs.size() && obs[i].time == t; ++i) {
        (obs[i].treated ? n1 : n0) += 1;
        if (obs[i].event) (obs[i].treated ? d1 : d0) += 1;
      }
      if (d0 + d1 > 0) table.strata_.push_back({t, d0, d1, n0, n1});
    }
    std::reverse(table.strata_.begin(), table.strata_.end());
    for (const auto& s : table.strata_) {
      table.events_ += static_cast<std::size_t>(s.deaths_control + s.deaths_treated);
      table.events_treated_ += static_cast<std::size_t>(s.deaths_treated);
    }
    return table;
  }

  std::span<const EventStratum> strata() const noexcept { return strata_; }
  std::size_t events() const noexcept { return events_; }
  std::size_t events_treated() const noexcept { return events_treated_; }
  std::size_t events_control() const noexcept { return events_ - events_treated_; }

  double loglik(double theta) const {
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    if (events_ == 0) throw NoEventsError();
    double ll = 0.0;
    for (const auto& s : strata_) {
      ll += s.deaths_treated * theta - (s.deaths_control + s.deaths_treated) * log_risk(s, theta);
    }
    return ll;
  }

  /// d loglik / d theta.
  double score(double theta) const {
    if (events_ == 0) throw NoEventsError();
    double u = 0.0;
    for (const auto& s : strata_) u += s.deaths_treated - (s.deaths_control + s.deaths_treated) * treated_share(s, theta);
    return u;
  }

  /// -d^2 loglik / d theta^2.
  double information(double theta) const {
    if (events_ == 0) throw NoEventsError();
    double v = 0.0;
    for (const auto& s : strata_) {
      const double p = treated_share(s, theta);
      v += (s.deaths_control + s.deaths_treated) * p * (1.0 - p);
    }
    return v;
  }

  /// Limit of the score as theta -> +inf (sign = +1) or -inf (sign = -1).
  double score_limit(int sign) const {
    double u = 0.0;
    for (const auto& s : strata_) {
      const int d = s.deaths_control + s.deaths_treated;
      const bool treated_dominates = sign > 0 ? s.at_risk_treated > 0 : s.at_risk_control == 0;
      u += s.deaths_treated - (treated_dominates ? d : 0);
    }
    return u;
  }

  /// Limit of loglik as theta -> -inf; -inf when a treated event occurs
  /// while controls are still at risk.
  double loglik_limit_minus_inf() const {
    double ll = 0.0;
    for (const auto& s : strata_) {
      if (s.at_risk_control > 0) {
        if (s.deaths_treated > 0) return -std::numeric_limits<double>::infinity();
        ll -= s.deaths_control * std::log(static_cast<double>(s.at_risk_control));
      } else {
        ll -= s.deaths_treated * std::log(static_cast<double>(s.at_risk_treated));
      }
    }
    return ll;
  }

 private:
  static double log_risk(const EventStratum& s, double theta) {
    const double a = s.at_risk_treated > 0 ? theta + std::log(static_cast<double>(s.at_risk_treated))
                                           : -std::numeric_limits<double>::infinity();
    const double b = s.at_risk_control > 0 ? std::log(static_cast<double>(s.at_risk_control))
                                           : -std::numeric_limits<double>::infinity();
    return log_add_exp(a, b);
  }

  static double treated_share(const EventStratum& s, double theta) {
    if (s.at_risk_treated == 0) return 0.0;
    if (s.at_risk_control == 0) return 1.0;
    // n1 e^t / (n1 e^t + n0) = logistic(t + ln n1 - ln n0)
    const double z = theta + std::log(static_cast<double>(s.at_risk_treated)) -
                     std::log(static_cast<double>(s.at_risk_control));
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }

  std::vector<EventStratum> strata_;
  std::size_t events_ = 0;
  std::size_t events_treated_ = 0;
};

}  // namespace detail

/// Immutable collection of survival records with its precomputed risk table.
class SurvivalDataset {
 public:
  SurvivalDataset() = default;

  explicit SurvivalDataset(std::vector<SurvivalRecord> records) : records_(std::move(records)) {
    for (const auto& r : records_) validate(r);
    table_ = detail::RiskTable::build(records_, [](const SurvivalRecord& r) {
      return Observation{r.time, r.event == 1, r.group == 1};
    });
  }

  std::span<const SurvivalRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t events() const noexcept { return table_.events(); }
  const detail::RiskTable& risk_table() const noexcept { return table_; }

 private:
  std::vector<SurvivalRecord> records_;
  detail::RiskTable table_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline constexpr double kMleBracket = 10.0;
inline constexpr double kMleTolerance = 1e-8;

inline double cox_partial_loglik(const SurvivalDataset& data, double theta) {
  return data.risk_table().loglik(theta);
}

inline double cox_score(const SurvivalDataset& data, double theta) {
  return data.risk_table().score(theta);
}

inline double cox_information(const SurvivalDataset& data, double theta) {
  return data.risk_table().information(theta);
}

/// ln L(theta1) - ln L(theta0); exactly 0 when the two coincide.
inline double partial_log_lr(const detail::RiskTable& table, double theta0, double theta1) {
  if (theta0 == theta1) {
    if (table.events() == 0) throw NoEventsError();
    return 0.0;
  }
  return table.loglik(theta1) - table.loglik(theta0);
}

inline double partial_log_lr(const detail::RiskTable& table, const Hypotheses& h) {
  return partial_log_lr(table, h.theta0(), h.theta1());
}

inline EvidenceReport partial_lr(const SurvivalDataset& data, const Hypotheses& hyps,
                                 const EvidenceThresholds& thresholds) {
  EvidenceReport report;
  report.log_lr = partial_log_lr(data.risk_table(), hyps);
  report.lr = std::exp(report.log_lr);
  report.classification = classify(report.lr, thresholds);
  report.d_events = data.events();
  return report;
}

namespace detail {

// Score is decreasing in theta (the log likelihood is concave), so a finite
// root exists iff the score is positive at -inf and negative at +inf.
inline double mle_theta(const RiskTable& table) {
  if (table.events() == 0) throw NoEventsError();
  const double up = table.score_limit(+1);
  const double down = table.score_limit(-1);
  if (up >= 0.0 && down <= 0.0) throw MleDivergenceError(0, "likelihood is flat in theta");
  if (up >= 0.0) throw MleDivergenceError(+1, "likelihood increases monotonically in theta");
  if (down <= 0.0) throw MleDivergenceError(-1, "likelihood decreases monotonically in theta");

  double lo = -kMleBracket;
  double hi = kMleBracket;
  if (table.score(lo) < 0.0) throw MleDivergenceError(-1, "root below search bracket");
  if (table.score(hi) > 0.0) throw MleDivergenceError(+1, "root above search bracket");

  // Newton steps safeguarded by the shrinking bracket.
  double theta = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double u = table.score(theta);
    if (std::abs(u) < 1e-12) return theta;
    if (u > 0.0) lo = theta; else hi = theta;
    const double info = table.information(theta);
    double next = info > 0.0 ? theta + u / info : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 || next == theta) return next;
    theta = next;
  }
  return theta;
}

}  // namespace detail

/// Maximizer of the partial likelihood over [-10, 10].
inline double mle_theta(const SurvivalDataset& data) { return detail::mle_theta(data.risk_table()); }

/// Endpoints solve loglik(theta) - loglik(theta_hat) + ln k = 0 on each side
/// of the MLE. An endpoint is +/-inf when the likelihood never drops by a
/// factor k on that side.
inline SupportInterval support_interval(const SurvivalDataset& data, double k) {
  if (!(k > 1.0)) throw DomainError("support level k must exceed 1");
  const auto& table = data.risk_table();
  const double theta_hat = detail::mle_theta(table);
  const double ll_hat = table.loglik(theta_hat);
  const double log_k = std::log(k);
  auto f = [&](double theta) { return table.loglik(theta) - ll_hat + log_k; };

  auto endpoint = [&](int sign) {
    double step = 0.25;
    double inner = theta_hat;
    for (;;) {
      const double outer = theta_hat + sign * step;
      if (std::abs(outer) > 700.0) return sign * std::numeric_limits<double>::infinity();
      if (f(outer) < 0.0) {
        return sign > 0 ? detail::bisect(f, inner, outer, 1e-12)
                        : detail::bisect(f, outer, inner, 1e-12);
      }
      inner = outer;
      step *= 2.0;
    }
  };

  SupportInterval si;
  si.k_level = k;
  si.theta_hat = theta_hat;
  si.lower = endpoint(-1);
  si.upper = endpoint(+1);
  return si;
}

/// Natural log of sup_{theta < theta0} L(theta) / L(theta0).
inline double log_suplr_posthoc(const detail::RiskTable& table, double theta0) {
  if (!std::isfinite(theta0)) throw DomainError("theta0 must be finite");
  const double ll0 = table.loglik(theta0);
  try {
    const double theta_hat = detail::mle_theta(table);
    if (theta_hat >= theta0) return 0.0;
    return table.loglik(theta_hat) - ll0;
  } catch (const MleDivergenceError& e) {
    if (e.direction() >= 0) return 0.0;
    // Monotone decreasing likelihood: the supremum is the limit at -inf.
    return std::max(0.0, table.loglik_limit_minus_inf() - ll0);
  }
}

inline double suplr_posthoc(const SurvivalDataset& data, double theta0) {
  return std::exp(log_suplr_posthoc(data.risk_table(), theta0));
}

}  // namespace lrseq
