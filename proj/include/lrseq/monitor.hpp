#pragma once

// Sequential monitoring of a live two-arm survival trial: running partial LR,
// stop/continue decisions, interim projections and post-hoc scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lrseq/core/errors.hpp"
#include "lrseq/core/normal.hpp"
#include "lrseq/design_normal.hpp"
#include "lrseq/evidence.hpp"
#include "lrseq/misleading.hpp"

namespace lrseq {

enum class Verdict { continue_trial, stop_efficacy, stop_inefficacy, resources_exhausted_weak };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::stop_efficacy: return "stop-efficacy";
    case Verdict::stop_inefficacy: return "stop-inefficacy";
    case Verdict::resources_exhausted_weak: return "resources-exhausted-weak";
    case Verdict::continue_trial: break;
  }
  return "continue";
}

struct HistoryEntry {
  std::size_t d_events = 0;
  double log_lr = 0.0;
};

struct MonitorDecision {
  Verdict verdict = Verdict::continue_trial;
  double lr = 1.0;
  double log_lr = 0.0;
  std::size_t d_events = 0;

  friend bool operator==(const MonitorDecision&, const MonitorDecision&) = default;
};

/// Accumulating trial data. Each ingested event appends one history entry
/// holding the partial log LR of everything ingested so far; entries are never
/// rewritten, so the history is the audit trail of what was known when.
class TrialState {
 public:
  TrialState(NormalDesign design, std::size_t burn_in_events = 1, std::optional<std::size_t> max_events = {})
      : design_(std::move(design)), burn_in_(burn_in_events), max_events_(max_events) {
    if (burn_in_ < 1) throw ConfigError("burn-in must be >= 1 event");
    if (max_events_ && *max_events_ < burn_in_) throw ConfigError("event budget must be >= burn-in");
  }

  const NormalDesign& design() const noexcept { return design_; }
  const Hypotheses& hypotheses() const noexcept { return design_.hypotheses(); }
  const EvidenceThresholds& thresholds() const noexcept { return design_.thresholds(); }
  std::size_t burn_in_events() const noexcept { return burn_in_; }
  std::optional<std::size_t> max_events() const noexcept { return max_events_; }
  const std::vector<SurvivalRecord>& records() const noexcept { return records_; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  std::size_t events() const noexcept { return table_.events(); }
  const detail::RiskTable& risk_table() const noexcept { return table_; }

  SurvivalDataset dataset() const { return SurvivalDataset(records_); }

  /// Partial log LR of the current data; 0 before the first event.
  double log_lr() const { return table_.events() == 0 ? 0.0 : partial_log_lr(table_, hypotheses()); }

  /// Returns false when the record duplicates an already ingested one.
  bool ingest(const SurvivalRecord& record) {
    validate(record);
    if (auto it = index_.find(record.subject_id); it != index_.end()) {
      if (records_[it->second] == record) return false;
      throw DataError(0, "conflicting duplicate subject_id '" + record.subject_id + "'");
    }
    index_.emplace(record.subject_id, records_.size());
    records_.push_back(record);
    table_ = detail::RiskTable::build(records_, [](const SurvivalRecord& r) {
      return Observation{r.time, r.event == 1, r.group == 1};
    });
    if (record.event == 1) history_.push_back({table_.events(), log_lr()});
    return true;
  }

 private:
  NormalDesign design_;
  std::size_t burn_in_;
  std::optional<std::size_t> max_events_;
  std::vector<SurvivalRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  detail::RiskTable table_;
  std::vector<HistoryEntry> history_;
};

inline TrialState ingest_event(TrialState state, const SurvivalRecord& record) {
  state.ingest(record);
  return state;
}

/// Pure function of (LR, d, thresholds, burn-in, event budget).
inline MonitorDecision decide(double log_lr, std::size_t d, const EvidenceThresholds& t, std::size_t burn_in,
                              std::optional<std::size_t> max_events = {}) {
  MonitorDecision out;
  out.log_lr = log_lr;
  out.lr = std::exp(log_lr);
  out.d_events = d;
  if (d < burn_in) return out;
  if (out.lr > t.k1()) {
    out.verdict = Verdict::stop_efficacy;
  } else if (out.lr < t.k0()) {
    out.verdict = Verdict::stop_inefficacy;
  } else if (max_events && d >= *max_events) {
    out.verdict = Verdict::resources_exhausted_weak;
  }
  return out;
}

inline MonitorDecision evaluate(const TrialState& state) {
  return decide(state.log_lr(), state.events(), state.thresholds(), state.burn_in_events(), state.max_events());
}

// ---------------------------------------------------------------------------
// Interim projections
// ---------------------------------------------------------------------------

enum class RemainingUnit { events, participants };
enum class ProjectionMode { terminal_look, sequential };

struct ProjectionOptions {
  RemainingUnit unit = RemainingUnit::events;
  double event_probability = 1.0;  // converts participants to events
  ProjectionMode mode = ProjectionMode::terminal_look;
};

struct InterimProjection {
  double k_int = 1.0;
  double k_target = 1.0;
  double residual_threshold = 1.0;  // k_target / k_int
  double remaining_budget = 0.0;    // in the caller's unit
  double remaining_events = 0.0;
  bool achieved = false;
  double prob_under_null = 0.0;
  double prob_under_alt = 0.0;
  ProjectionMode mode = ProjectionMode::terminal_look;

  friend bool operator==(const InterimProjection&, const InterimProjection&) = default;
};

/// Probability that the evidence collected over n further events pushes the
/// LR past k under each hypothesis. Terminal look: a single look after the n
/// events. Sequential: a look after every event (boundary-crossing
/// approximation with overshoot correction under either drift).
inline std::pair<double, double> residual_probabilities(const EvidenceScale& scale, double n, double k,
                                                        ProjectionMode mode) {
  scale.validate();
  const double root_n = std::sqrt(n);
  const double log_k = std::log(k);
  if (mode == ProjectionMode::terminal_look || n < 1.0) {
    const double centre = -log_k / (scale.delta * root_n);
    const double drift = scale.delta * root_n / 2.0;
    return {normal_cdf(centre - drift), normal_cdf(centre + drift)};
  }
  const double p0 = extended_bump(scale, {1.0, n}, k);
  // Walk of log LR / delta with drift +delta/2 under H1, boundary c.
  const double c = log_k / scale.delta + scale.rho;
  const double half = scale.delta / 2.0;
  const double reflected = std::exp(scale.delta * c) * normal_cdf(-c / root_n - half * root_n);
  const double p1 = std::min(1.0, normal_cdf(-c / root_n + half * root_n) + (std::isfinite(reflected) ? reflected : 0.0));
  return {std::min(1.0, p0), p1};
}

/// Projection from an observed interim LR k_int: the final LR exceeds
/// k_target iff the LR of the data still to come exceeds k_target / k_int.
inline InterimProjection project_from_interim(double k_int, double k_target, double remaining,
                                              const EvidenceScale& scale, const ProjectionOptions& options = {}) {
  if (!(k_int > 0.0) || !std::isfinite(k_int)) throw DomainError("interim LR must be positive and finite");
  if (!(k_target > 0.0)) throw DomainError("target k must be positive");
  if (!(remaining >= 0.0)) throw DomainError("remaining budget must be >= 0");
  if (options.unit == RemainingUnit::participants &&
      !(options.event_probability > 0.0 && options.event_probability <= 1.0))
    throw DomainError("event probability must lie in (0, 1]");

  InterimProjection out;
  out.k_int = k_int;
  out.k_target = k_target;
  out.residual_threshold = k_target / k_int;
  out.remaining_budget = remaining;
  out.remaining_events = options.unit == RemainingUnit::participants ? remaining * options.event_probability : remaining;
  out.mode = options.mode;
  if (out.residual_threshold <= 1.0) {
    out.achieved = true;
    out.prob_under_null = out.prob_under_alt = 1.0;
    return out;
  }
  if (out.remaining_events <= 0.0) return out;
  const auto [p0, p1] = residual_probabilities(scale, out.remaining_events, out.residual_threshold, options.mode);
  out.prob_under_null = p0;
  out.prob_under_alt = p1;
  return out;
}

inline InterimProjection interim_projection(const TrialState& state, double k_target, double remaining,
                                            const ProjectionOptions& options = {}) {
  return project_from_interim(std::exp(state.log_lr()), k_target, remaining, state.design().scale(), options);
}

// ---------------------------------------------------------------------------
// Post-hoc scan
// ---------------------------------------------------------------------------

struct PosthocScan {
  double sup_lr = 1.0;
  bool astray = false;
  LookWindow window;
  AstrayBound bound{};
};

/// One-sided supremum LR against the design's theta0, flagged at k, with the
/// led-astray bound for the look window [burn-in, budget or current d].
inline PosthocScan posthoc_scan(const TrialState& state, double k) {
  if (!(k > 1.0)) throw DomainError("k must exceed 1");
  PosthocScan out;
  out.sup_lr = std::exp(log_suplr_posthoc(state.risk_table(), state.hypotheses().theta0()));
  out.astray = out.sup_lr >= k;
  const auto m0 = static_cast<double>(state.burn_in_events());
  const auto m = static_cast<double>(state.max_events().value_or(state.events()));
  out.window = {m0, std::max(m0, m)};
  out.bound = astray_sequential_bound(out.window, k);
  return out;
}

}  // namespace lrseq
