#pragma once

// Command implementations behind the lrseq executable. Each takes a plain
// options struct and returns a Report; flag parsing lives in app.hpp.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrseq/cli/report.hpp"
#include "lrseq/design_normal.hpp"
#include "lrseq/design_poisson.hpp"
#include "lrseq/io/json.hpp"
#include "lrseq/io/table.hpp"
#include "lrseq/misleading.hpp"
#include "lrseq/simulation.hpp"

namespace lrseq::cli {

// ---------------------------------------------------------------------------
// design
// ---------------------------------------------------------------------------

struct DesignOptions {
  std::string model = "normal";
  std::optional<double> psi1;
  double psi0 = 1.0;
  double k0 = 1.0 / 8.0;
  double k1 = 8.0;
  std::optional<double> delta;  // normal model: pin the standardized distance
  double g = 1.0;
  std::optional<double> lambda_c;
  std::optional<double> rho;
  std::optional<double> event_prob;
  double gamma = 0.8;
};

namespace detail {

inline nlohmann::json subjects_block(const OperatingCharacteristics& oc, double p) {
  return {{"event_probability", p},
          {"null", {{"events", oc.e_events_null}, {"subjects", subjects_needed({oc.e_events_null, p})}}},
          {"alt", {{"events", oc.e_events_alt}, {"subjects", subjects_needed({oc.e_events_alt, p})}}}};
}

}  // namespace detail

inline Report design_report(const DesignOptions& o) {
  const EvidenceThresholds thresholds(o.k0, o.k1);
  Report r;
  OperatingCharacteristics oc;
  std::vector<std::string> extra_header;
  std::vector<std::string> extra_null, extra_alt, extra_null_exact, extra_alt_exact;

  if (o.model == "normal") {
    if (!o.psi1 && !o.delta) throw ConfigError("--psi1 or --delta is required");
    const double rho = o.rho.value_or(kRhoNormal);
    const NormalDesign design = o.delta ? NormalDesign::from_delta(*o.delta, thresholds, rho)
                                        : NormalDesign::from_hazard_ratios(*o.psi1, o.psi0, thresholds, rho);
    oc = operating_characteristics(design);
    const auto [alpha_max, power_min] = threshold_bounds(thresholds);
    r.body = {{"model", "normal"},
              {"hypotheses", design.hypotheses()},
              {"thresholds", thresholds},
              {"delta", design.delta()},
              {"sigma", design.sigma()},
              {"rho", rho},
              {"operating_characteristics", oc},
              {"threshold_bounds", {{"alpha_max", alpha_max}, {"power_min", power_min}}}};
    r.notes.push_back("model normal  delta " + io::fixed(design.delta(), 4) + "  rho " + io::fixed(rho, 3));
  } else if (o.model == "poisson") {
    if (!o.psi1) throw ConfigError("--psi1 is required");
    if (o.delta) throw ConfigError("--delta applies to the normal model only");
    PoissonDesign design{*o.psi1, o.psi0, o.g, o.lambda_c, thresholds, o.rho.value_or(kRhoBinomial)};
    const auto oriented = orient_hypotheses(design);
    oc = poisson_operating_characteristics(oriented);
    r.body = {{"model", "poisson"},
              {"psi0", o.psi0},
              {"psi1", *o.psi1},
              {"g", o.g},
              {"thresholds", thresholds},
              {"rho", design.rho},
              {"orientation",
               {{"flipped", oriented.flipped},
                {"psi0", oriented.design.psi0},
                {"psi1", oriented.design.psi1},
                {"g", oriented.design.g},
                {"p0", oriented.design.p0()},
                {"p1", oriented.design.p1()}}},
              {"delta", std::log(oriented.design.psi1 / oriented.design.psi0)},
              {"operating_characteristics", oc}};
    r.notes.push_back("model poisson  delta " + io::fixed(std::log(oriented.design.psi1 / oriented.design.psi0), 4) +
                      "  rho " + io::fixed(design.rho, 3));
    if (oriented.flipped)
      r.notes.push_back("note: p1 < p0, hypotheses re-expressed as control-to-treatment hazard ratios (psi1 " +
                        io::fixed(oriented.design.psi1, 4) + ", g " + io::fixed(oriented.design.g, 4) + ")");
    if (o.lambda_c) {
      if (!(o.gamma > 0.0 && o.gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
      const auto mean0 = exposure_time_simple(oc.e_events_null, design, Hypothesis::null);
      const auto mean1 = exposure_time_simple(oc.e_events_alt, design, Hypothesis::alternative);
      const auto target0 = static_cast<std::size_t>(std::ceil(oc.e_events_null));
      const auto target1 = static_cast<std::size_t>(std::ceil(oc.e_events_alt));
      const auto num0 = exposure_time_numeric(target0, o.gamma, design, Hypothesis::null);
      const auto num1 = exposure_time_numeric(target1, o.gamma, design, Hypothesis::alternative);
      r.body["exposure"] = {{"lambda_c", *o.lambda_c},
                            {"mean", {{"null", mean0}, {"alt", mean1}}},
                            {"assurance", {{"gamma", o.gamma}, {"null", num0}, {"alt", num1}}}};
      extra_header.insert(extra_header.end(), {"t_c(mean)", "t_c(gamma)"});
      extra_null.insert(extra_null.end(), {io::fixed(mean0.t_c, 3), io::fixed(num0.t_c, 3)});
      extra_alt.insert(extra_alt.end(), {io::fixed(mean1.t_c, 3), io::fixed(num1.t_c, 3)});
      extra_null_exact.insert(extra_null_exact.end(), {io::exact(mean0.t_c), io::exact(num0.t_c)});
      extra_alt_exact.insert(extra_alt_exact.end(), {io::exact(mean1.t_c), io::exact(num1.t_c)});
    }
  } else {
    throw ConfigError("unknown model '" + o.model + "'");
  }

  if (o.event_prob) {
    if (!(*o.event_prob > 0.0 && *o.event_prob <= 1.0)) throw DomainError("event probability must lie in (0, 1]");
    r.body["subjects_needed"] = detail::subjects_block(oc, *o.event_prob);
    extra_header.insert(extra_header.begin(), "subjects");
    const auto n0 = std::to_string(subjects_needed({oc.e_events_null, *o.event_prob}));
    const auto n1 = std::to_string(subjects_needed({oc.e_events_alt, *o.event_prob}));
    extra_null.insert(extra_null.begin(), n0);
    extra_alt.insert(extra_alt.begin(), n1);
    extra_null_exact.insert(extra_null_exact.begin(), n0);
    extra_alt_exact.insert(extra_alt_exact.begin(), n1);
  }

  std::vector<std::string> header{"truth", "P(strong for H1)", "E[D]"};
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  r.display = io::TextTable(header);
  r.data = io::TextTable(header);
  auto row = [](std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  r.display.add(row({"null", io::prob(oc.alpha_l), io::events(oc.e_events_null)}, extra_null));
  r.display.add(row({"alt", io::prob(oc.power_l), io::events(oc.e_events_alt)}, extra_alt));
  r.data.add(row({"null", io::exact(oc.alpha_l), io::exact(oc.e_events_null)}, extra_null_exact));
  r.data.add(row({"alt", io::exact(oc.power_l), io::exact(oc.e_events_alt)}, extra_alt_exact));
  return r;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

struct TablesOptions {
  int table = 1;
  std::size_t replicates = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Threshold pairs printed in the design tables.
inline const std::vector<std::pair<double, double>>& design_table_rows() {
  static const std::vector<std::pair<double, double>> rows{
      {1.0 / 8, 8}, {1.0 / 10, 20}, {1.0 / 20, 20}, {1.0 / 20, 32}, {1.0 / 32, 32}, {1.0 / 32, 64}, {1.0 / 64, 64}};
  return rows;
}

/// Standardized distances as printed for the normal-model tables.
inline constexpr double kTable2Delta = 0.44;
inline constexpr double kTable3Delta = 0.25;
/// Hazard ratio of the oriented Poisson-model table (g = 1).
inline constexpr double kTable4Psi = 2.41;

inline std::string ratio_label(double k) {
  if (k >= 1.0) return io::fixed(k, 0);
  return "1/" + io::fixed(1.0 / k, 0);
}

inline Report table1_report() {
  const auto cells = reproduce_table1();
  Report r;
  std::vector<std::string> header{"k"};
  for (double ratio : kTable1Ratios) header.push_back(io::compact(ratio));
  r.display = io::TextTable(header);
  r.data = io::TextTable(header);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < kTable1Levels.size(); ++i) {
    std::vector<std::string> shown{io::fixed(kTable1Levels[i], 0)};
    std::vector<std::string> exact{io::fixed(kTable1Levels[i], 0)};
    for (double v : cells[i]) {
      shown.push_back(io::prob(v));
      exact.push_back(io::exact(v));
    }
    r.display.add(shown);
    r.data.add(exact);
    rows.push_back({{"k", kTable1Levels[i]}, {"cells", cells[i]}});
  }
  r.body = {{"table", 1}, {"ratios", kTable1Ratios}, {"rows", rows}};
  r.notes.push_back("led-astray probability by strength of evidence k and sample constraint ratio m0/m");
  return r;
}

inline Report design_table_report(const TablesOptions& o) {
  if (o.replicates < 1) throw ConfigError("replicates must be >= 1");
  Report r;
  std::vector<std::string> header{"k0", "k1", "truth", "P(strong H1)", "E[D]"};
  for (int pct : kStoppingPercentiles)
    if (pct < 100) header.push_back(std::to_string(pct) + "%");
  r.display = io::TextTable(header);
  std::vector<std::string> data_header = header;
  for (int pct : kStoppingPercentiles)
    if (pct < 100) data_header.push_back("se" + std::to_string(pct));
  r.data = io::TextTable(data_header);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [k0, k1] : design_table_rows()) {
    const EvidenceThresholds t(k0, k1);
    OperatingCharacteristics oc;
    StoppingSummary sims[2];
    for (int h = 0; h < 2; ++h) {
      SimConfig cfg;
      cfg.replicates = o.replicates;
      cfg.seed = o.seed;
      cfg.threads = o.threads;
      cfg.truth = h == 0 ? Hypothesis::null : Hypothesis::alternative;
      if (o.table == 4) {
        PoissonDesign pd{kTable4Psi, 1.0, 1.0, std::nullopt, t, kRhoBinomial};
        const auto oriented = orient_hypotheses(pd);
        oc = poisson_operating_characteristics(oriented);
        sims[h] = simulate_walk_design(oriented, cfg);
      } else {
        const auto nd = NormalDesign::from_delta(o.table == 2 ? kTable2Delta : kTable3Delta, t);
        oc = operating_characteristics(nd);
        sims[h] = simulate_walk_design(nd, cfg);
      }
    }
    rows.push_back({{"k0", k0},
                    {"k1", k1},
                    {"operating_characteristics", oc},
                    {"null", sims[0]},
                    {"alt", sims[1]}});
    for (int h = 0; h < 2; ++h) {
      const double p = h == 0 ? oc.alpha_l : oc.power_l;
      const double e = h == 0 ? oc.e_events_null : oc.e_events_alt;
      std::vector<std::string> shown{ratio_label(k0), ratio_label(k1), h == 0 ? "null" : "alt", io::prob(p),
                                     io::events(e)};
      std::vector<std::string> exact{ratio_label(k0), ratio_label(k1), h == 0 ? "null" : "alt", io::exact(p),
                                     io::exact(e)};
      std::vector<std::string> ses;
      for (int pct : kStoppingPercentiles) {
        if (pct == 100) continue;
        shown.push_back(std::to_string(sims[h].quantiles.at(pct)));
        exact.push_back(std::to_string(sims[h].quantiles.at(pct)));
        ses.push_back(io::exact(sims[h].quantile_se.at(pct)));
      }
      exact.insert(exact.end(), ses.begin(), ses.end());
      r.display.add(shown);
      r.data.add(exact);
    }
  }

  r.body = {{"table", o.table}, {"replicates", o.replicates}, {"seed", o.seed}, {"rows", rows}};
  if (o.table == 4) {
    r.body["model"] = "poisson";
    r.body["psi1"] = kTable4Psi;
    r.body["g"] = 1.0;
    r.notes.push_back("poisson model, psi1 " + io::fixed(kTable4Psi, 2) + ", g 1, rho " + io::fixed(kRhoBinomial, 2));
  } else {
    const double delta = o.table == 2 ? kTable2Delta : kTable3Delta;
    r.body["model"] = "normal";
    r.body["delta"] = delta;
    r.notes.push_back("normal model, delta " + io::fixed(delta, 2) + ", rho " + io::fixed(kRhoNormal, 3));
  }
  r.notes.push_back("quantiles simulated with " + std::to_string(o.replicates) + " replicates, seed " +
                    std::to_string(o.seed) + "; Monte Carlo standard errors in the json and csv output");
  return r;
}

inline Report tables_report(const TablesOptions& o) {
  switch (o.table) {
    case 1: return table1_report();
    case 2:
    case 3:
    case 4: return design_table_report(o);
    default: throw ConfigError("unknown table id " + std::to_string(o.table));
  }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimOptions {
  std::size_t replicates = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::size_t burn_in = 1;
  std::optional<std::size_t> max_events;
  std::string truth = "null";
  double k0 = 1.0 / 20.0;
  double k1 = 20.0;

  SimConfig config() const {
    SimConfig c;
    c.replicates = replicates;
    c.seed = seed;
    c.threads = threads;
    c.burn_in_events = burn_in;
    c.max_events = max_events;
    if (truth == "alt") {
      c.truth = Hypothesis::alternative;
    } else if (truth != "null") {
      throw ConfigError("truth must be null or alt");
    }
    c.validate();
    return c;
  }
};

struct WalkOptions : SimOptions {
  std::string model = "normal";
  double psi1 = 0.415;
  double psi0 = 1.0;
  std::optional<double> delta;
  double g = 1.0;
};

struct SurvivalOptions : SimOptions {
  double psi1 = 0.415;  // design alternative
  std::optional<double> psi_true;
  double lambda_c = 0.25;
  double accrual = 2.4;
  double followup = 4.5;
  std::size_t per_group = 50;
  std::optional<double> study_end;

  SurvivalSimModel model() const {
    SurvivalSimModel m;
    m.lambda_c = lambda_c;
    m.psi_true = psi_true.value_or(truth == "alt" ? psi1 : 1.0);
    m.accrual_years = accrual;
    m.followup_years = followup;
    m.subjects_per_group = per_group;
    m.study_end_years = study_end;
    return m;
  }
};

struct AstrayOptions : SimOptions {
  double k = 20.0;
  double m0 = 1.0;
  double m = 100.0;
};

struct BayesOptions : SurvivalOptions {
  double prior_mean = 0.0;
  double prior_sd = 0.5606;
  double upper = 0.95;
  std::optional<double> lower;
};

namespace detail {

inline nlohmann::json config_json(const SimConfig& c) {
  return {{"replicates", c.replicates},
          {"seed", c.seed},
          {"burn_in_events", c.burn_in_events},
          {"max_events", c.max_events ? nlohmann::json(*c.max_events) : nlohmann::json(nullptr)},
          {"truth", c.truth}};
}

inline nlohmann::json model_json(const SurvivalSimModel& m) {
  return {{"lambda_c", m.lambda_c},
          {"psi_true", m.psi_true},
          {"accrual_years", m.accrual_years},
          {"followup_years", m.followup_years},
          {"subjects_per_group", m.subjects_per_group},
          {"study_end_years", m.study_end()}};
}

inline void summary_tables(Report& r, const StoppingSummary& s) {
  r.display = io::TextTable({"quantity", "estimate", "se"});
  r.data = io::TextTable({"quantity", "estimate", "se"});
  auto add = [&](const std::string& name, double v, double se, bool probability) {
    const bool has_se = !std::isnan(se);
    r.display.add({name, probability ? io::prob(v) : io::fixed(v, 1), has_se ? io::prob(se) : ""});
    r.data.add({name, io::exact(v), has_se ? io::exact(se) : ""});
  };
  add("P(stop efficacy)", s.prob_stop_efficacy, s.se_stop_efficacy, true);
  add("P(stop inefficacy)", s.prob_stop_inefficacy, s.se_stop_inefficacy, true);
  add("P(non-stop)", s.prob_non_stop, s.se_non_stop, true);
  add("mean events", s.mean_events, std::numeric_limits<double>::quiet_NaN(), false);
  for (const auto& [pct, q] : s.quantiles) {
    r.display.add({std::to_string(pct) + "% events", std::to_string(q), io::fixed(s.quantile_se.at(pct), 1)});
    r.data.add({std::to_string(pct) + "% events", std::to_string(q), io::exact(s.quantile_se.at(pct))});
  }
}

}  // namespace detail

inline Report simulate_walk_report(const WalkOptions& o) {
  const SimConfig cfg = o.config();
  const EvidenceThresholds t(o.k0, o.k1);
  Report r;
  StoppingSummary s;
  OperatingCharacteristics oc;
  if (o.model == "normal") {
    const auto design = o.delta ? NormalDesign::from_delta(*o.delta, t) : NormalDesign::from_hazard_ratios(o.psi1, o.psi0, t);
    s = simulate_walk_design(design, cfg);
    oc = operating_characteristics(design);
    r.body = {{"model", "normal"}, {"delta", design.delta()}};
  } else if (o.model == "poisson") {
    if (o.delta) throw ConfigError("--delta applies to the normal model only");
    const auto oriented = orient_hypotheses(PoissonDesign{o.psi1, o.psi0, o.g, std::nullopt, t, kRhoBinomial});
    s = simulate_walk_design(oriented, cfg);
    oc = poisson_operating_characteristics(oriented);
    r.body = {{"model", "poisson"}, {"psi1", oriented.design.psi1}, {"psi0", oriented.design.psi0},
              {"g", oriented.design.g}, {"flipped", oriented.flipped}};
  } else {
    throw ConfigError("unknown model '" + o.model + "'");
  }
  r.body["kind"] = "walk";
  r.body["thresholds"] = t;
  r.body["config"] = detail::config_json(cfg);
  r.body["summary"] = s;
  r.body["analytic"] = oc;
  detail::summary_tables(r, s);
  r.notes.push_back("evidence walk, truth " + o.truth + ", " + std::to_string(cfg.replicates) + " replicates");
  return r;
}

inline Report simulate_survival_report(const SurvivalOptions& o) {
  const SimConfig cfg = o.config();
  const auto model = o.model();
  const auto design = NormalDesign::from_hazard_ratios(o.psi1, 1.0, EvidenceThresholds(o.k0, o.k1));
  const auto s = simulate_survival_trial(design, model, cfg);
  Report r;
  r.body = {{"kind", "survival"},
            {"design", {{"psi1", o.psi1}, {"thresholds", design.thresholds()}}},
            {"model", detail::model_json(model)},
            {"config", detail::config_json(cfg)},
            {"summary", s}};
  detail::summary_tables(r, s);
  r.notes.push_back("capped survival trial, true hazard ratio " + io::fixed(model.psi_true, 3) + ", " +
                    std::to_string(model.subjects_per_group) + " per group");
  return r;
}

inline Report simulate_astray_report(const AstrayOptions& o) {
  SimConfig cfg = o.config();
  cfg.truth = Hypothesis::null;
  const LookWindow window{o.m0, o.m};
  const auto est = simulate_led_astray(o.k, window, cfg);
  const auto bound = astray_sequential_bound(window, o.k);
  Report r;
  r.body = {{"kind", "astray"}, {"k", o.k}, {"window", window}, {"config", detail::config_json(cfg)},
            {"estimate", est}, {"bound", bound}};
  r.display = io::TextTable({"quantity", "value", "se"});
  r.data = io::TextTable({"quantity", "value", "se"});
  r.display.add({"P(led astray)", io::prob(est.probability), io::prob(est.standard_error)});
  r.display.add({"bound", io::prob(bound.reported), ""});
  r.data.add({"P(led astray)", io::exact(est.probability), io::exact(est.standard_error)});
  r.data.add({"bound", io::exact(bound.reported), ""});
  r.notes.push_back("led astray with looks at events " + io::fixed(o.m0, 0) + ".." + io::fixed(o.m, 0) + ", k " +
                    io::fixed(o.k, 2));
  return r;
}

inline Report simulate_bayes_report(const BayesOptions& o) {
  const SimConfig cfg = o.config();
  const auto model = o.model();
  BayesDesign bayes{o.prior_mean, o.prior_sd, o.upper, o.lower};
  const auto s = simulate_bayes_design(bayes, model, cfg);
  Report r;
  r.body = {{"kind", "bayes"},
            {"prior", {{"mean", o.prior_mean}, {"sd", o.prior_sd}, {"prior_events", bayes.prior_events()}}},
            {"stops", {{"upper", o.upper}, {"lower", o.lower ? nlohmann::json(*o.lower) : nlohmann::json(nullptr)}}},
            {"model", detail::model_json(model)},
            {"config", detail::config_json(cfg)},
            {"summary", s}};
  try {
    const auto cal = bayes_lr_calibration(bayes);
    r.body["lr_calibration"] = {{"k0", cal.k0}, {"k1", cal.k1}};
  } catch (const ConfigError&) {
    r.body["lr_calibration"] = nullptr;
  }
  detail::summary_tables(r, s);
  r.notes.push_back("bayesian comparator, prior sd " + io::fixed(o.prior_sd, 4) + " (" +
                    io::fixed(bayes.prior_events(), 1) + " prior events)");
  return r;
}

// ---------------------------------------------------------------------------
// misleading
// ---------------------------------------------------------------------------

struct MisleadingOptions {
  std::string quantity;  // bound | bump | bump-max | extended | tepee | astray
  double k = 8.0;
  double delta = 1.0;
  double n = 20.0;
  double m0 = 1.0;
  double m = std::numeric_limits<double>::infinity();
  std::optional<double> rho;
  bool two_sided = false;
};

inline Report misleading_report(const MisleadingOptions& o) {
  Report r;
  nlohmann::json inputs{{"k", o.k}};
  double value = 0.0;
  const double rho = o.rho.value_or(kRhoNormal);
  const EvidenceScale scale{o.delta, rho};
  if (o.quantity == "bound") {
    value = universal_bound(o.k);
  } else if (o.quantity == "bump") {
    value = bump(scale, o.n, o.k);
    inputs["delta"] = o.delta;
    inputs["n"] = o.n;
  } else if (o.quantity == "bump-max") {
    const auto b = bump_max(o.k);
    value = b.probability;
    inputs["standardized_distance"] = b.standardized_distance;
  } else if (o.quantity == "extended") {
    const LookWindow w{o.m0, o.m};
    value = extended_bump(scale, w, o.k);
    inputs["delta"] = o.delta;
    inputs["rho"] = rho;
    inputs["window"] = w;
  } else if (o.quantity == "tepee") {
    value = tepee(scale, o.k);
    inputs["delta"] = o.delta;
    inputs["rho"] = rho;
  } else if (o.quantity == "astray") {
    if (std::isinf(o.m)) {
      value = astray_fixed(o.k, o.two_sided);
      inputs["two_sided"] = o.two_sided;
    } else {
      const LookWindow w{o.m0, o.m};
      const auto b = astray_sequential_bound(w, o.k);
      value = b.reported;
      inputs["window"] = w;
      inputs["bound"] = b;
    }
  } else {
    throw ConfigError("unknown quantity '" + o.quantity + "'");
  }
  r.body = {{"quantity", o.quantity}, {"inputs", inputs}, {"probability", value}};
  r.display = io::TextTable({"quantity", "probability"});
  r.data = io::TextTable({"quantity", "probability"});
  r.display.add({o.quantity, io::prob(value)});
  r.data.add({o.quantity, io::exact(value)});
  return r;
}

struct CurveOptions {
  std::string kind = "bump";  // bump | extended | tepee
  double k = 8.0;
  double n = 20.0;
  double m0 = 1.0;
  double m = std::numeric_limits<double>::infinity();
  std::optional<double> rho;
  double delta_max = 3.0;
  std::size_t points = 301;
};

/// Plot-ready curve of the misleading-evidence probability against delta.
inline Report curve_report(const CurveOptions& o) {
  if (o.points < 2) throw ConfigError("points must be >= 2");
  if (!(o.delta_max > 0.0)) throw DomainError("delta-max must be positive");
  if (o.kind != "bump" && o.kind != "extended" && o.kind != "tepee")
    throw ConfigError("unknown curve kind '" + o.kind + "'");
  const double rho = o.rho.value_or(kRhoNormal);
  Report r;
  r.display = io::TextTable({"delta", "probability"});
  r.data = io::TextTable({"delta", "probability"});
  nlohmann::json xs = nlohmann::json::array();
  nlohmann::json ys = nlohmann::json::array();
  for (std::size_t i = 0; i < o.points; ++i) {
    // Skip delta = 0, where the bump is degenerate.
    const double delta = o.delta_max * static_cast<double>(i + 1) / static_cast<double>(o.points);
    const EvidenceScale scale{delta, rho};
    double p = 0.0;
    if (o.kind == "bump") p = bump(scale, o.n, o.k);
    else if (o.kind == "extended") p = extended_bump(scale, {o.m0, o.m}, o.k);
    else p = tepee(scale, o.k);
    xs.push_back(delta);
    ys.push_back(p);
    r.display.add({io::fixed(delta, 4), io::prob(p)});
    r.data.add({io::exact(delta), io::exact(p)});
  }
  r.body = {{"kind", o.kind}, {"k", o.k}, {"rho", rho}, {"delta", xs}, {"probability", ys}};
  if (o.kind == "bump") r.body["n"] = o.n;
  if (o.kind == "extended") r.body["window"] = LookWindow{o.m0, o.m};
  return r;
}

}  // namespace lrseq::cli
