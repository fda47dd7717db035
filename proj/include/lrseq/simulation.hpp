#pragma once

// Seeded Monte Carlo for sequential likelihood designs: stopping-time
// distributions of the evidence walk, capped survival trials monitored with
// the Cox partial likelihood ratio, led-astray frequencies, and a
// conjugate-normal Bayesian comparator.
//
// Replicate r always draws from RandomStream(seed, r) and writes its outcome
// to slot r, so summaries are bit-identical for any worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "lrseq/core/errors.hpp"
#include "lrseq/core/normal.hpp"
#include "lrseq/design_normal.hpp"
#include "lrseq/design_poisson.hpp"
#include "lrseq/evidence.hpp"
#include "lrseq/misleading.hpp"
#include "lrseq/random.hpp"

namespace lrseq {

// ---------------------------------------------------------------------------
// Configuration and summaries
// ---------------------------------------------------------------------------

struct SimConfig {
  std::size_t replicates = 100000;
  std::uint64_t seed = 1;
  std::optional<std::size_t> max_events;  // cap on events per replicate
  std::size_t burn_in_events = 1;         // first event count at which stopping is allowed
  Hypothesis truth = Hypothesis::null;
  unsigned threads = 0;                   // 0 = hardware concurrency

  void validate() const {
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    if (burn_in_events < 1) throw ConfigError("burn-in must be >= 1 event");
    if (max_events && *max_events < burn_in_events) throw ConfigError("event cap must be >= burn-in");
  }
};

enum class StopReason { efficacy, inefficacy, non_stop };

inline const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::efficacy: return "efficacy";
    case StopReason::inefficacy: return "inefficacy";
    case StopReason::non_stop: break;
  }
  return "non-stop";
}

struct ReplicateOutcome {
  std::size_t events = 0;
  StopReason reason = StopReason::non_stop;
};

inline constexpr std::array<int, 7> kStoppingPercentiles{25, 50, 75, 80, 90, 95, 100};

struct StoppingSummary {
  std::size_t replicates = 0;
  double mean_events = 0.0;
  std::map<int, std::size_t> quantiles;  // percentile -> events
  std::map<int, double> quantile_se;     // percentile -> Monte Carlo standard error
  double prob_stop_efficacy = 0.0;
  double prob_stop_inefficacy = 0.0;
  double prob_non_stop = 0.0;
  double se_stop_efficacy = 0.0;
  double se_stop_inefficacy = 0.0;
  double se_non_stop = 0.0;

  friend bool operator==(const StoppingSummary&, const StoppingSummary&) = default;
};

struct MonteCarloEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::size_t replicates = 0;

  friend bool operator==(const MonteCarloEstimate&, const MonteCarloEstimate&) = default;
};

namespace detail {

inline double binomial_se(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

/// Calls body(r) for r in [0, n) and stores the results by index.
template <class Result, class Body>
std::vector<Result> run_replicates(std::size_t n, unsigned threads, Body body) {
  std::vector<Result> out(n);
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t r = 0; r < n; ++r) out[r] = body(r);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&out, &body, begin, end] {
      for (std::size_t r = begin; r < end; ++r) out[r] = body(r);
    });
  }
  pool.clear();  // join before handing out the results
  return out;
}

/// Inverse empirical CDF: smallest x with F(x) >= q.
inline std::size_t empirical_quantile(const std::vector<std::size_t>& sorted, double q) {
  if (sorted.empty()) return 0;
  const double pos = std::ceil(q * static_cast<double>(sorted.size()) - 1e-9);
  const auto idx = static_cast<std::size_t>(std::clamp(pos, 1.0, static_cast<double>(sorted.size()))) - 1;
  return sorted[idx];
}

inline StoppingSummary summarize(const std::vector<ReplicateOutcome>& outcomes) {
  StoppingSummary s;
  s.replicates = outcomes.size();
  std::vector<std::size_t> events;
  events.reserve(outcomes.size());
  std::size_t eff = 0;
  std::size_t ineff = 0;
  double total = 0.0;
  for (const auto& o : outcomes) {
    events.push_back(o.events);
    total += static_cast<double>(o.events);
    if (o.reason == StopReason::efficacy) ++eff;
    if (o.reason == StopReason::inefficacy) ++ineff;
  }
  const auto n = static_cast<double>(outcomes.size());
  s.mean_events = total / n;
  s.prob_stop_efficacy = static_cast<double>(eff) / n;
  s.prob_stop_inefficacy = static_cast<double>(ineff) / n;
  s.prob_non_stop = static_cast<double>(outcomes.size() - eff - ineff) / n;
  s.se_stop_efficacy = binomial_se(s.prob_stop_efficacy, outcomes.size());
  s.se_stop_inefficacy = binomial_se(s.prob_stop_inefficacy, outcomes.size());
  s.se_non_stop = binomial_se(s.prob_non_stop, outcomes.size());
  std::sort(events.begin(), events.end());
  for (int pct : kStoppingPercentiles) {
    const double q = pct / 100.0;
    s.quantiles[pct] = empirical_quantile(events, q);
    // Half the spread between the quantiles one binomial SE either side of q.
    const double h = binomial_se(q, events.size());
    const auto lo = empirical_quantile(events, std::max(0.0, q - h));
    const auto hi = empirical_quantile(events, std::min(1.0, q + h));
    s.quantile_se[pct] = 0.5 * static_cast<double>(hi - lo);
  }
  return s;
}

/// Events allowed when no cap is configured; replicates that reach it are
/// reported as non-stop.
inline constexpr std::size_t kUncappedEventLimit = 1'000'000;

/// Accumulates per-event log-LR increments until a threshold is crossed at or
/// after burn-in, or the cap is reached.
template <class Increment>
ReplicateOutcome walk_replicate(const EvidenceThresholds& thresholds, const SimConfig& config, Increment&& next) {
  const double upper = std::log(thresholds.k1());
  const double lower = std::log(thresholds.k0());
  const std::size_t cap = config.max_events.value_or(kUncappedEventLimit);
  double log_lr = 0.0;
  for (std::size_t d = 1; d <= cap; ++d) {
    log_lr += next();
    if (d < config.burn_in_events) continue;
    if (log_lr >= upper) return {d, StopReason::efficacy};
    if (log_lr <= lower) return {d, StopReason::inefficacy};
  }
  return {cap, StopReason::non_stop};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Evidence walks
// ---------------------------------------------------------------------------

/// Normal model: each event adds N(+/- delta^2/2, delta^2) to the log LR,
/// with the sign of the mean set by the true hypothesis.
inline std::vector<ReplicateOutcome> simulate_walk_outcomes(const NormalDesign& design, const SimConfig& config) {
  config.validate();
  const double delta = design.delta();
  const double mean = (config.truth == Hypothesis::alternative ? 0.5 : -0.5) * delta * delta;
  return detail::run_replicates<ReplicateOutcome>(config.replicates, config.threads, [&](std::size_t r) {
    RandomStream rng(config.seed, r);
    return detail::walk_replicate(design.thresholds(), config, [&] { return mean + delta * rng.normal(); });
  });
}

inline StoppingSummary simulate_walk_design(const NormalDesign& design, const SimConfig& config) {
  return detail::summarize(simulate_walk_outcomes(design, config));
}

/// Binomial model: each event falls in the treatment arm with probability
/// p_truth and is scored by the conditional binomial log LR.
inline std::vector<ReplicateOutcome> simulate_walk_outcomes(const OrientedPoissonDesign& oriented,
                                                            const SimConfig& config) {
  config.validate();
  const PoissonDesign& design = oriented.design;
  design.validate();
  const double p1 = design.p1();
  const double p0 = design.p0();
  const double p_truth = config.truth == Hypothesis::alternative ? p1 : p0;
  const double step_treated = std::log(p1 / p0);
  const double step_control = std::log((1.0 - p1) / (1.0 - p0));
  return detail::run_replicates<ReplicateOutcome>(config.replicates, config.threads, [&](std::size_t r) {
    RandomStream rng(config.seed, r);
    return detail::walk_replicate(design.thresholds, config,
                                  [&] { return rng.bernoulli(p_truth) ? step_treated : step_control; });
  });
}

inline StoppingSummary simulate_walk_design(const OrientedPoissonDesign& oriented, const SimConfig& config) {
  return detail::summarize(simulate_walk_outcomes(oriented, config));
}

// ---------------------------------------------------------------------------
// Survival trials with staggered entry
// ---------------------------------------------------------------------------

/// Exponential event times, uniform accrual, administrative censoring at
/// entry + followup and at study end (default accrual + followup).
struct SurvivalSimModel {
  double lambda_c = 0.25;
  double psi_true = 1.0;
  double accrual_years = 2.4;
  double followup_years = 4.5;
  std::size_t subjects_per_group = 50;
  std::optional<double> study_end_years;

  double study_end() const noexcept { return study_end_years.value_or(accrual_years + followup_years); }

  void validate() const {
    if (!(lambda_c > 0.0) || !(psi_true > 0.0)) throw ConfigError("hazards must be positive");
    if (!(accrual_years > 0.0)) throw ConfigError("accrual duration must be positive");
    if (!(followup_years >= 0.0)) throw ConfigError("follow-up must be >= 0");
    if (subjects_per_group < 1) throw ConfigError("need at least one subject per group");
    if (study_end_years && !(*study_end_years >= 0.0)) throw ConfigError("study end must be >= 0");
  }
};

namespace detail {

struct SimSubject {
  double entry;
  double time;  // time on study at event or administrative censoring
  bool event;
  bool treated;
};

class TrialPath {
 public:
  TrialPath(const SurvivalSimModel& model, RandomStream& rng) {
    const std::size_t n = model.subjects_per_group;
    const double end = model.study_end();
    subjects_.reserve(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const bool treated = i >= n;
      const double entry = model.accrual_years * rng.uniform();
      const double hazard = model.lambda_c * (treated ? model.psi_true : 1.0);
      const double t = rng.exponential(hazard);
      const double admin = std::max(0.0, std::min(model.followup_years, end - entry));
      subjects_.push_back({entry, std::min(t, admin), t <= admin && admin > 0.0, treated});
    }
    for (const auto& s : subjects_)
      if (s.event) event_calendar_.push_back(s.entry + s.time);
    std::sort(event_calendar_.begin(), event_calendar_.end());
  }

  const std::vector<double>& event_calendar() const noexcept { return event_calendar_; }

  /// Risk table of the data visible at calendar time c.
  RiskTable snapshot(double c, std::vector<Observation>& scratch) const {
    scratch.clear();
    for (const auto& s : subjects_) {
      if (s.entry > c) continue;
      const double elapsed = c - s.entry;
      const bool seen = s.event && s.time <= elapsed;
      scratch.push_back({std::min(s.time, elapsed), seen, s.treated});
    }
    return RiskTable::build_from(scratch);
  }

 private:
  std::vector<SimSubject> subjects_;
  std::vector<double> event_calendar_;
};

/// Applies `rule` to the visible data at each event from burn-in onward.
template <class Rule>
ReplicateOutcome monitor_path(const TrialPath& path, const SimConfig& config, Rule&& rule) {
  std::vector<Observation> scratch;
  const auto& events = path.event_calendar();
  const std::size_t cap = std::min(events.size(), config.max_events.value_or(events.size()));
  for (std::size_t d = config.burn_in_events; d <= cap; ++d) {
    const RiskTable table = path.snapshot(events[d - 1], scratch);
    const StopReason reason = rule(table);
    if (reason != StopReason::non_stop) return {d, reason};
  }
  return {cap, StopReason::non_stop};
}

}  // namespace detail

/// Survival trial monitored with the Cox partial LR of the design's
/// hypotheses after every event from burn-in onward.
inline std::vector<ReplicateOutcome> simulate_survival_outcomes(const NormalDesign& design,
                                                                const SurvivalSimModel& model,
                                                                const SimConfig& config) {
  config.validate();
  model.validate();
  const Hypotheses hyps = design.hypotheses();
  const double upper = std::log(design.thresholds().k1());
  const double lower = std::log(design.thresholds().k0());
  return detail::run_replicates<ReplicateOutcome>(config.replicates, config.threads, [&](std::size_t r) {
    RandomStream rng(config.seed, r);
    const detail::TrialPath path(model, rng);
    return detail::monitor_path(path, config, [&](const detail::RiskTable& table) {
      const double log_lr = partial_log_lr(table, hyps);
      if (log_lr >= upper) return StopReason::efficacy;
      if (log_lr <= lower) return StopReason::inefficacy;
      return StopReason::non_stop;
    });
  });
}

inline StoppingSummary simulate_survival_trial(const NormalDesign& design, const SurvivalSimModel& model,
                                               const SimConfig& config) {
  return detail::summarize(simulate_survival_outcomes(design, model, config));
}

// ---------------------------------------------------------------------------
// Led astray and fixed-n misleading evidence (normal model)
// ---------------------------------------------------------------------------

/// Frequency, under the null, of the one-sided post-hoc supremum LR reaching
/// k at some n in [m0, m]. In the unit-variance normal model the supremum
/// over theta < 0 is exp(S_n^2 / 2n) when the score walk S_n is negative.
inline MonteCarloEstimate simulate_led_astray(double k, const LookWindow& window, const SimConfig& config) {
  if (!(k > 1.0)) throw DomainError("k must exceed 1");
  window.validate();
  config.validate();
  if (window.unbounded()) throw ConfigError("led-astray simulation needs a finite last look");
  const auto m0 = static_cast<std::size_t>(window.m0);
  const auto m = static_cast<std::size_t>(window.m);
  const double two_log_k = 2.0 * std::log(k);
  auto hits = detail::run_replicates<char>(config.replicates, config.threads, [&](std::size_t r) -> char {
    RandomStream rng(config.seed, r);
    double s = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
      s += rng.normal();
      if (n >= m0 && s < 0.0 && s * s >= two_log_k * static_cast<double>(n)) return 1;
    }
    return 0;
  });
  MonteCarloEstimate est;
  est.replicates = config.replicates;
  est.probability = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / static_cast<double>(hits.size());
  est.standard_error = detail::binomial_se(est.probability, hits.size());
  return est;
}

/// Frequency of LR >= k for the false H1 after exactly n observations, with
/// hypotheses delta standard deviations apart.
inline MonteCarloEstimate simulate_fixed_misleading(double delta, std::size_t n, double k, const SimConfig& config) {
  if (!(k > 1.0)) throw DomainError("k must exceed 1");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (n < 1) throw DomainError("n must be >= 1");
  config.validate();
  const double log_k = std::log(k);
  auto hits = detail::run_replicates<char>(config.replicates, config.threads, [&](std::size_t r) -> char {
    RandomStream rng(config.seed, r);
    double log_lr = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_lr += -0.5 * delta * delta + delta * rng.normal();
    return log_lr >= log_k ? 1 : 0;
  });
  MonteCarloEstimate est;
  est.replicates = config.replicates;
  est.probability = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / static_cast<double>(hits.size());
  est.standard_error = detail::binomial_se(est.probability, hits.size());
  return est;
}

// ---------------------------------------------------------------------------
// Bayesian comparator
// ---------------------------------------------------------------------------

/// Normal prior on the log hazard ratio; stop when P(theta < 0 | data)
/// exceeds `upper_posterior_stop` or, if set, drops below `lower_posterior_stop`.
struct BayesDesign {
  double prior_mean = 0.0;
  double prior_sd = 0.5606;
  double upper_posterior_stop = 0.95;
  std::optional<double> lower_posterior_stop;

  void validate() const {
    if (!(prior_sd > 0.0) || !std::isfinite(prior_sd)) throw ConfigError("prior sd must be positive");
    if (!(upper_posterior_stop > 0.0 && upper_posterior_stop < 1.0))
      throw ConfigError("upper posterior stop must lie in (0, 1)");
    if (lower_posterior_stop && !(*lower_posterior_stop > 0.0 && *lower_posterior_stop < upper_posterior_stop))
      throw ConfigError("posterior stops require 0 < lower < upper < 1");
  }

  /// Prior information expressed as events, 4 / sd^2.
  double prior_events() const noexcept { return 4.0 / (prior_sd * prior_sd); }
};

/// Posterior P(theta < 0) combining the prior with theta_hat ~ N(theta, 4/d).
inline double posterior_prob_benefit(const BayesDesign& bayes, double theta_hat, std::size_t d) {
  const double prior_precision = 1.0 / (bayes.prior_sd * bayes.prior_sd);
  const double data_precision = static_cast<double>(d) / 4.0;
  const double precision = prior_precision + data_precision;
  const double mean = (bayes.prior_mean * prior_precision + theta_hat * data_precision) / precision;
  return normal_cdf(-mean * std::sqrt(precision));
}

namespace detail {

/// Cox MLE; while the likelihood is still monotone (typical in the first few
/// events) the one-step score estimate U(0)/I(0) stands in.
inline double estimate_log_hazard_ratio(const RiskTable& table) {
  try {
    return mle_theta(table);
  } catch (const MleDivergenceError&) {
    const double info = table.information(0.0);
    return info > 0.0 ? table.score(0.0) / info : 0.0;
  }
}

}  // namespace detail

inline StoppingSummary simulate_bayes_design(const BayesDesign& bayes, const SurvivalSimModel& model,
                                             const SimConfig& config) {
  config.validate();
  model.validate();
  bayes.validate();
  auto outcomes = detail::run_replicates<ReplicateOutcome>(config.replicates, config.threads, [&](std::size_t r) {
    RandomStream rng(config.seed, r);
    const detail::TrialPath path(model, rng);
    return detail::monitor_path(path, config, [&](const detail::RiskTable& table) {
      const double post = posterior_prob_benefit(bayes, detail::estimate_log_hazard_ratio(table), table.events());
      if (post > bayes.upper_posterior_stop) return StopReason::efficacy;
      if (bayes.lower_posterior_stop && post < *bayes.lower_posterior_stop) return StopReason::inefficacy;
      return StopReason::non_stop;
    });
  });
  return detail::summarize(outcomes);
}

/// Likelihood-ratio thresholds implied by posterior-probability stops when the
/// prior odds are one. k0 is 0 when there is no lower stop.
struct LrCalibration {
  double k0 = 0.0;
  double k1 = 0.0;

  friend bool operator==(const LrCalibration&, const LrCalibration&) = default;
};

inline LrCalibration bayes_lr_calibration(const BayesDesign& bayes) {
  if (std::abs(normal_cdf(-bayes.prior_mean / bayes.prior_sd) - 0.5) > 1e-12)
    throw ConfigError("calibration requires unit prior odds");
  auto odds = [](double p) { return p / (1.0 - p); };
  if (!(bayes.upper_posterior_stop > 0.0 && bayes.upper_posterior_stop < 1.0))
    throw ConfigError("posterior stop must lie in (0, 1)");
  // Probabilities such as 0.95 are not exact in binary; odds within 1e-12
  // of an integer n or of 1/n are reported as that value.
  auto snap = [](double x) {
    const double n = std::round(x);
    if (n >= 1.0 && std::abs(x - n) <= 1e-12 * n) return n;
    const double inv = std::round(1.0 / x);
    if (inv >= 1.0 && std::abs(1.0 / x - inv) <= 1e-12 * inv) return 1.0 / inv;
    return x;
  };
  LrCalibration out;
  out.k1 = snap(odds(bayes.upper_posterior_stop));
  if (bayes.lower_posterior_stop) out.k0 = snap(odds(*bayes.lower_posterior_stop));
  return out;
}

}  // namespace lrseq
