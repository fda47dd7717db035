#pragma once

// JSON mappings for the report types. Non-finite doubles (e.g. an unbounded
// support interval end) are written as null and read back as the matching
// infinity.

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "lrseq/design_normal.hpp"
#include "lrseq/design_poisson.hpp"
#include "lrseq/evidence.hpp"
#include "lrseq/misleading.hpp"
#include "lrseq/monitor.hpp"
#include "lrseq/simulation.hpp"

namespace lrseq {

using json = nlohmann::json;

namespace io {

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline double number_or(const json& j, double if_null) { return j.is_null() ? if_null : j.get<double>(); }

}  // namespace io

NLOHMANN_JSON_SERIALIZE_ENUM(Classification, {{Classification::strong_for_h1, "strong-for-h1"},
                                              {Classification::weak, "weak"},
                                              {Classification::strong_for_h0, "strong-for-h0"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Hypothesis, {{Hypothesis::null, "null"}, {Hypothesis::alternative, "alt"}})
NLOHMANN_JSON_SERIALIZE_ENUM(StopReason, {{StopReason::efficacy, "efficacy"},
                                          {StopReason::inefficacy, "inefficacy"},
                                          {StopReason::non_stop, "non-stop"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Verdict, {{Verdict::continue_trial, "continue"},
                                       {Verdict::stop_efficacy, "stop-efficacy"},
                                       {Verdict::stop_inefficacy, "stop-inefficacy"},
                                       {Verdict::resources_exhausted_weak, "resources-exhausted-weak"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ProjectionMode, {{ProjectionMode::terminal_look, "terminal-look"},
                                              {ProjectionMode::sequential, "sequential"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SurvivalRecord, subject_id, time, event, group)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvidenceReport, lr, log_lr, classification, d_events)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OperatingCharacteristics, alpha_l, power_l, e_events_null, e_events_alt)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ExposureProjection, t_c, t_t, gamma, target_events, expected_events)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MonteCarloEstimate, probability, standard_error, replicates)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MonitorDecision, verdict, lr, log_lr, d_events)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InterimProjection, k_int, k_target, residual_threshold, remaining_budget,
                                   remaining_events, achieved, prob_under_null, prob_under_alt, mode)

inline void to_json(json& j, const SupportInterval& s) {
  j = json{{"k_level", s.k_level},
           {"lower", io::finite_or_null(s.lower)},
           {"upper", io::finite_or_null(s.upper)},
           {"theta_hat", io::finite_or_null(s.theta_hat)}};
}

inline void from_json(const json& j, SupportInterval& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  s.k_level = j.at("k_level").get<double>();
  s.lower = io::number_or(j.at("lower"), -inf);
  s.upper = io::number_or(j.at("upper"), inf);
  // A diverging MLE sits at the open end of the interval.
  s.theta_hat = io::number_or(j.at("theta_hat"), std::isinf(s.lower) ? -inf : inf);
}

inline void to_json(json& j, const StoppingSummary& s) {
  json q = json::object();
  for (const auto& [pct, events] : s.quantiles) q[std::to_string(pct)] = events;
  json qse = json::object();
  for (const auto& [pct, se] : s.quantile_se) qse[std::to_string(pct)] = se;
  j = json{{"replicates", s.replicates},
           {"mean_events", s.mean_events},
           {"quantiles", q},
           {"quantile_se", qse},
           {"prob_stop_efficacy", s.prob_stop_efficacy},
           {"prob_stop_inefficacy", s.prob_stop_inefficacy},
           {"prob_non_stop", s.prob_non_stop},
           {"se_stop_efficacy", s.se_stop_efficacy},
           {"se_stop_inefficacy", s.se_stop_inefficacy},
           {"se_non_stop", s.se_non_stop}};
}

inline void from_json(const json& j, StoppingSummary& s) {
  s.replicates = j.at("replicates").get<std::size_t>();
  s.mean_events = j.at("mean_events").get<double>();
  s.quantiles.clear();
  for (const auto& [key, value] : j.at("quantiles").items()) s.quantiles[std::stoi(key)] = value.get<std::size_t>();
  s.quantile_se.clear();
  for (const auto& [key, value] : j.at("quantile_se").items()) s.quantile_se[std::stoi(key)] = value.get<double>();
  s.prob_stop_efficacy = j.at("prob_stop_efficacy").get<double>();
  s.prob_stop_inefficacy = j.at("prob_stop_inefficacy").get<double>();
  s.prob_non_stop = j.at("prob_non_stop").get<double>();
  s.se_stop_efficacy = j.at("se_stop_efficacy").get<double>();
  s.se_stop_inefficacy = j.at("se_stop_inefficacy").get<double>();
  s.se_non_stop = j.at("se_non_stop").get<double>();
}

inline void to_json(json& j, const AstrayBound& b) {
  j = json{{"sequential", b.sequential}, {"fixed", b.fixed}, {"reported", b.reported}};
}

inline void from_json(const json& j, AstrayBound& b) {
  b.sequential = j.at("sequential").get<double>();
  b.fixed = j.at("fixed").get<double>();
  b.reported = j.at("reported").get<double>();
}

inline void to_json(json& j, const LookWindow& w) { j = json{{"m0", w.m0}, {"m", io::finite_or_null(w.m)}}; }

inline void from_json(const json& j, LookWindow& w) {
  w.m0 = j.at("m0").get<double>();
  w.m = io::number_or(j.at("m"), std::numeric_limits<double>::infinity());
}

}  // namespace lrseq

namespace nlohmann {

// Types without a default constructor.
template <>
struct adl_serializer<lrseq::EvidenceThresholds> {
  static void to_json(json& j, const lrseq::EvidenceThresholds& t) { j = json{{"k0", t.k0()}, {"k1", t.k1()}}; }
  static lrseq::EvidenceThresholds from_json(const json& j) {
    return {j.at("k0").get<double>(), j.at("k1").get<double>()};
  }
};

template <>
struct adl_serializer<lrseq::Hypotheses> {
  static void to_json(json& j, const lrseq::Hypotheses& h) {
    j = json{{"theta0", h.theta0()}, {"theta1", h.theta1()}};
  }
  static lrseq::Hypotheses from_json(const json& j) {
    return {j.at("theta0").get<double>(), j.at("theta1").get<double>()};
  }
};

}  // namespace nlohmann
