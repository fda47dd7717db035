#pragma once

// Flag parsing and dispatch for the lrseq executable.
// Exit codes: 0 success, 2 usage or configuration error, 3 data error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrseq/cli/commands.hpp"
#include "lrseq/cli/monitor_stream.hpp"
#include "lrseq/cli/report.hpp"
#include "lrseq/core/errors.hpp"
#include "lrseq/io/fraction.hpp"
#include "lrseq/io/manifest.hpp"
#include "lrseq/version.hpp"

namespace lrseq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Default seed: $LRSEQ_SEED when it holds an unsigned integer, else 1.
inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("LRSEQ_SEED"); s && *s) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (*end == '\0') return v;
  }
  return 1;
}

namespace detail {

// Thresholds are taken as text so that "1/20" is divided exactly once.
struct ThresholdFlags {
  std::string k0 = "1/8";
  std::string k1 = "8";
  std::optional<std::string> k;  // symmetric shortcut: k0 = 1/k, k1 = k

  void add(CLI::App* app) {
    app->add_option("--k0", k0, "lower threshold, decimal or p/q")->capture_default_str();
    app->add_option("--k1", k1, "upper threshold, decimal or p/q")->capture_default_str();
    app->add_option("--k", k, "symmetric thresholds 1/k and k");
  }

  std::pair<double, double> values() const {
    if (k) {
      const double v = io::parse_ratio(*k);
      return {1.0 / v, v};
    }
    return {io::parse_ratio(k0), io::parse_ratio(k1)};
  }
};

struct CommonFlags {
  std::string format = "json";
  std::optional<std::string> out;

  void add(CLI::App* app) {
    app->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "table", "csv"}))
        ->capture_default_str();
    app->add_option("--out", out, "write the report to this file instead of stdout");
  }
};

struct SimFlags {
  std::size_t reps = 100000;
  std::uint64_t seed = default_seed();
  unsigned threads = 0;
  std::size_t burn_in = 1;
  std::optional<std::size_t> max_events;
  std::string truth = "null";

  void add(CLI::App* app) {
    app->add_option("--reps", reps, "Monte Carlo replicates")->capture_default_str();
    app->add_option("--seed", seed, "random seed (default $LRSEQ_SEED or 1)")->capture_default_str();
    app->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
    app->add_option("--burn-in", burn_in, "first event count at which stopping is allowed")->capture_default_str();
    app->add_option("--max-events", max_events, "cap on events per replicate");
    app->add_option("--truth", truth, "true hypothesis")
        ->check(CLI::IsMember({"null", "alt"}))
        ->capture_default_str();
  }

  void apply(SimOptions& o, const ThresholdFlags& t) const {
    if (reps < 1) throw ConfigError("--reps must be >= 1");
    o.replicates = reps;
    o.seed = seed;
    o.threads = threads;
    o.burn_in = burn_in;
    o.max_events = max_events;
    o.truth = truth;
    std::tie(o.k0, o.k1) = t.values();
  }
};

}  // namespace detail

/// Runs the tool on `args` (without the program name). Reports go to `out`
/// (or to --out), diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Likelihood-ratio sequential trial design and monitoring"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  io::RunManifest manifest;
  manifest.command_line = io::join_command_line(args);
  manifest.timestamp = io::timestamp_from_env();

  detail::CommonFlags common;
  std::function<Report()> action;

  // design
  DesignOptions design;
  detail::ThresholdFlags design_t;
  auto* cmd_design = app.add_subcommand("design", "operating characteristics and sample-size projections");
  cmd_design->add_option("--model", design.model)->check(CLI::IsMember({"normal", "poisson"}))->capture_default_str();
  cmd_design->add_option("--psi1", design.psi1, "alternative hazard ratio");
  cmd_design->add_option("--psi0", design.psi0, "null hazard ratio")->capture_default_str();
  cmd_design->add_option("--delta", design.delta, "standardized distance (normal model)");
  cmd_design->add_option("--g", design.g, "exposure ratio t_c/t_t (poisson model)")->capture_default_str();
  cmd_design->add_option("--lambda-c", design.lambda_c, "control hazard for exposure projections");
  cmd_design->add_option("--rho", design.rho, "overshoot correction");
  cmd_design->add_option("--event-prob", design.event_prob, "probability a participant has an event");
  cmd_design->add_option("--gamma", design.gamma, "assurance for exposure projections")->capture_default_str();
  design_t.add(cmd_design);
  common.add(cmd_design);
  cmd_design->callback([&] {
    action = [&] {
      std::tie(design.k0, design.k1) = design_t.values();
      return design_report(design);
    };
  });

  // tables
  TablesOptions tables;
  tables.seed = default_seed();
  auto* cmd_tables = app.add_subcommand("tables", "regenerate a published design table");
  cmd_tables->add_option("--table", tables.table, "table id 1-4")->required();
  cmd_tables->add_option("--reps", tables.replicates, "replicates for simulated columns")->capture_default_str();
  cmd_tables->add_option("--seed", tables.seed, "random seed")->capture_default_str();
  cmd_tables->add_option("--threads", tables.threads, "worker threads, 0 = all cores")->capture_default_str();
  common.add(cmd_tables);
  cmd_tables->callback([&] {
    if (tables.table >= 2) manifest.seed = tables.seed;
    action = [&] { return tables_report(tables); };
  });

  // simulate
  auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo runs");
  cmd_sim->require_subcommand(1);

  WalkOptions walk;
  detail::SimFlags walk_f;
  detail::ThresholdFlags walk_t;
  walk_t.k0 = "1/20";
  walk_t.k1 = "20";
  auto* sim_walk = cmd_sim->add_subcommand("walk", "stopping-time distribution of the evidence walk");
  sim_walk->add_option("--model", walk.model)->check(CLI::IsMember({"normal", "poisson"}))->capture_default_str();
  sim_walk->add_option("--psi1", walk.psi1)->capture_default_str();
  sim_walk->add_option("--psi0", walk.psi0)->capture_default_str();
  sim_walk->add_option("--delta", walk.delta, "standardized distance (normal model)");
  sim_walk->add_option("--g", walk.g)->capture_default_str();
  walk_f.add(sim_walk);
  walk_t.add(sim_walk);
  common.add(sim_walk);
  sim_walk->callback([&] {
    manifest.seed = walk_f.seed;
    action = [&] {
      walk_f.apply(walk, walk_t);
      return simulate_walk_report(walk);
    };
  });

  SurvivalOptions surv;
  detail::SimFlags surv_f;
  detail::ThresholdFlags surv_t;
  surv_t.k0 = "1/20";
  surv_t.k1 = "20";
  auto add_model_flags = [](CLI::App* c, SurvivalOptions& o) {
    c->add_option("--psi1", o.psi1, "design alternative hazard ratio")->capture_default_str();
    c->add_option("--psi-true", o.psi_true, "true hazard ratio (default from --truth)");
    c->add_option("--lambda-c", o.lambda_c, "control hazard per year")->capture_default_str();
    c->add_option("--accrual", o.accrual, "accrual period, years")->capture_default_str();
    c->add_option("--followup", o.followup, "maximum follow-up, years")->capture_default_str();
    c->add_option("--cap", o.per_group, "subjects per group")->capture_default_str();
    c->add_option("--study-end", o.study_end, "calendar end of study, years");
  };
  auto* sim_surv = cmd_sim->add_subcommand("survival", "capped survival trial monitored by the partial LR");
  add_model_flags(sim_surv, surv);
  surv_f.add(sim_surv);
  surv_t.add(sim_surv);
  common.add(sim_surv);
  sim_surv->callback([&] {
    manifest.seed = surv_f.seed;
    action = [&] {
      surv_f.apply(surv, surv_t);
      return simulate_survival_report(surv);
    };
  });

  AstrayOptions astray;
  detail::SimFlags astray_f;
  auto* sim_astray = cmd_sim->add_subcommand("astray", "probability of being led astray by post-hoc alternatives");
  sim_astray->add_option("--k", astray.k)->capture_default_str();
  sim_astray->add_option("--m0", astray.m0, "first look")->capture_default_str();
  sim_astray->add_option("--m", astray.m, "last look")->capture_default_str();
  sim_astray->add_option("--reps", astray_f.reps)->capture_default_str();
  sim_astray->add_option("--seed", astray_f.seed)->capture_default_str();
  sim_astray->add_option("--threads", astray_f.threads)->capture_default_str();
  common.add(sim_astray);
  sim_astray->callback([&] {
    manifest.seed = astray_f.seed;
    action = [&] {
      detail::ThresholdFlags unused;
      unused.k0 = "1/20";
      unused.k1 = "20";
      const double k = astray.k;
      astray_f.apply(astray, unused);
      astray.k = k;
      return simulate_astray_report(astray);
    };
  });

  BayesOptions bayes;
  detail::SimFlags bayes_f;
  auto* sim_bayes = cmd_sim->add_subcommand("bayes", "conjugate-normal Bayesian comparator");
  add_model_flags(sim_bayes, bayes);
  sim_bayes->add_option("--prior-mean", bayes.prior_mean)->capture_default_str();
  sim_bayes->add_option("--prior-sd", bayes.prior_sd)->capture_default_str();
  sim_bayes->add_option("--upper", bayes.upper, "posterior probability of benefit to stop for efficacy")
      ->capture_default_str();
  sim_bayes->add_option("--lower", bayes.lower, "posterior probability of benefit to stop for inefficacy");
  bayes_f.add(sim_bayes);
  common.add(sim_bayes);
  sim_bayes->callback([&] {
    manifest.seed = bayes_f.seed;
    action = [&] {
      detail::ThresholdFlags unused;
      unused.k0 = "1/20";
      unused.k1 = "20";
      bayes_f.apply(bayes, unused);
      return simulate_bayes_report(bayes);
    };
  });

  // misleading
  auto* cmd_mis = app.add_subcommand("misleading", "probabilities of misleading evidence");
  cmd_mis->require_subcommand(1);
  MisleadingOptions mis;
  for (const char* q : {"bound", "bump", "bump-max", "extended", "tepee", "astray"}) {
    auto* sub = cmd_mis->add_subcommand(q);
    sub->add_option("--k", mis.k)->capture_default_str();
    if (std::string(q) == "bump") {
      sub->add_option("--delta", mis.delta)->capture_default_str();
      sub->add_option("--n", mis.n)->capture_default_str();
    }
    if (std::string(q) == "extended" || std::string(q) == "tepee") {
      sub->add_option("--delta", mis.delta)->capture_default_str();
      sub->add_option("--rho", mis.rho, "overshoot correction (default 0.583)");
    }
    if (std::string(q) == "extended" || std::string(q) == "astray") {
      sub->add_option("--m0", mis.m0)->capture_default_str();
      sub->add_option("--m", mis.m, "last look (default unbounded)");
    }
    if (std::string(q) == "astray") sub->add_flag("--two-sided", mis.two_sided);
    common.add(sub);
    sub->callback([&, q] {
      mis.quantity = q;
      action = [&] { return misleading_report(mis); };
    });
  }
  CurveOptions curve;
  auto* mis_curve = cmd_mis->add_subcommand("curve", "plot-ready curve against delta");
  mis_curve->add_option("--kind", curve.kind)->check(CLI::IsMember({"bump", "extended", "tepee"}))->capture_default_str();
  mis_curve->add_option("--k", curve.k)->capture_default_str();
  mis_curve->add_option("--n", curve.n)->capture_default_str();
  mis_curve->add_option("--m0", curve.m0)->capture_default_str();
  mis_curve->add_option("--m", curve.m);
  mis_curve->add_option("--rho", curve.rho);
  mis_curve->add_option("--delta-max", curve.delta_max)->capture_default_str();
  mis_curve->add_option("--points", curve.points)->capture_default_str();
  common.format = "json";
  mis_curve->add_option("--format", common.format)->check(CLI::IsMember({"json", "table", "csv"}))->default_str("csv");
  mis_curve->add_option("--out", common.out);
  bool curve_format_given = false;
  mis_curve->callback([&] {
    curve_format_given = mis_curve->count("--format") > 0;
    action = [&] { return curve_report(curve); };
  });

  // monitor
  MonitorOptions mon;
  detail::ThresholdFlags mon_t;
  auto* cmd_mon = app.add_subcommand("monitor", "sequential monitoring of an event file");
  cmd_mon->add_option("--data", mon.data, "event CSV")->required();
  cmd_mon->add_option("--theta1", mon.theta1, "alternative log hazard ratio")->required();
  cmd_mon->add_option("--theta0", mon.theta0, "null log hazard ratio")->capture_default_str();
  mon_t.add(cmd_mon);
  cmd_mon->add_option("--burn-in", mon.burn_in)->capture_default_str();
  cmd_mon->add_option("--max-events", mon.max_events, "event budget");
  cmd_mon->add_option("--project-to", mon.project_to, "target k for interim projections");
  cmd_mon->add_option("--remaining", mon.remaining, "remaining budget for projections");
  cmd_mon->add_option("--remaining-unit", mon.remaining_unit)
      ->check(CLI::IsMember({"events", "participants"}))
      ->capture_default_str();
  cmd_mon->add_option("--event-prob", mon.event_prob, "converts participants to events")->capture_default_str();
  cmd_mon->add_option("--projection", mon.projection)
      ->check(CLI::IsMember({"terminal", "sequential"}))
      ->capture_default_str();
  cmd_mon->add_flag("--watch", mon.watch, "keep reading as the file grows");
  cmd_mon->add_option("--poll-ms", mon.poll_ms)->capture_default_str();
  cmd_mon->add_option("--idle-exit", mon.idle_exit_seconds, "watch mode: exit after this many idle seconds")
      ->capture_default_str();
  bool monitoring = false;
  cmd_mon->callback([&] { monitoring = true; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (monitoring) {
      std::tie(mon.k0, mon.k1) = mon_t.values();
      std::ofstream file;
      if (common.out) {
        file.open(*common.out, std::ios::binary);
        if (!file) throw ConfigError("cannot write '" + *common.out + "'");
      }
      run_monitor(mon, manifest, common.out ? static_cast<std::ostream&>(file) : out);
      return kExitOk;
    }
    if (!action) return kExitUsage;
    const Report report = action();
    Format format = parse_format(common.format);
    if (mis_curve->parsed() && !curve_format_given) format = Format::csv;
    const std::string text = render(report, manifest, format);
    if (common.out) {
      std::ofstream file(*common.out, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + *common.out + "'");
      file << text;
    } else {
      out << text;
    }
    return kExitOk;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace lrseq::cli
