#pragma once

// Streaming monitor: CSV lines in, one JSON decision line per event out.

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lrseq/core/errors.hpp"
#include "lrseq/io/csv.hpp"
#include "lrseq/io/json.hpp"
#include "lrseq/io/manifest.hpp"
#include "lrseq/io/table.hpp"
#include "lrseq/monitor.hpp"

namespace lrseq::cli {

inline constexpr double kMonitorSupportLevels[] = {8.0, 32.0};

struct MonitorOptions {
  std::string data;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double k0 = 1.0 / 8.0;
  double k1 = 8.0;
  std::size_t burn_in = 1;
  std::optional<std::size_t> max_events;
  std::optional<double> project_to;
  std::optional<double> remaining;
  std::string remaining_unit = "events";
  double event_prob = 1.0;
  std::string projection = "terminal";
  bool watch = false;
  unsigned poll_ms = 200;
  double idle_exit_seconds = 0.0;  // watch mode: stop after this long without new data; 0 waits forever

  ProjectionOptions projection_options() const {
    ProjectionOptions p;
    if (remaining_unit == "participants") p.unit = RemainingUnit::participants;
    else if (remaining_unit != "events") throw ConfigError("remaining unit must be events or participants");
    if (projection == "sequential") p.mode = ProjectionMode::sequential;
    else if (projection != "terminal") throw ConfigError("projection must be terminal or sequential");
    p.event_probability = event_prob;
    return p;
  }
};

class MonitorSession {
 public:
  explicit MonitorSession(const MonitorOptions& o)
      : options_(o),
        state_(NormalDesign(Hypotheses(o.theta0, o.theta1), EvidenceThresholds(o.k0, o.k1)), o.burn_in,
               o.max_events),
        projection_(o.projection_options()) {
    if (o.project_to && !o.remaining) throw ConfigError("--project-to needs --remaining");
    if (o.project_to && !(*o.project_to > 0.0)) throw DomainError("target k must be positive");
    if (o.remaining && !(*o.remaining >= 0.0)) throw DomainError("remaining budget must be >= 0");
  }

  const TrialState& state() const noexcept { return state_; }

  nlohmann::json header() const {
    return {{"design",
             {{"hypotheses", state_.hypotheses()},
              {"thresholds", state_.thresholds()},
              {"burn_in_events", state_.burn_in_events()},
              {"max_events", state_.max_events() ? nlohmann::json(*state_.max_events()) : nlohmann::json(nullptr)}}}};
  }

  /// Feeds one CSV line; returns the decision record when it adds an event.
  std::optional<nlohmann::json> feed(std::string_view line) {
    auto row = parser_.feed(line);
    if (!row) return std::nullopt;
    bool added = false;
    try {
      added = state_.ingest(row->record);
    } catch (const DataError& e) {
      throw DataError(row->line, e.what());
    } catch (const DomainError& e) {
      throw DataError(row->line, e.what());
    }
    if (!added || row->record.event != 1) return std::nullopt;
    return decision_record(row->record);
  }

 private:
  nlohmann::json decision_record(const SurvivalRecord& record) const {
    const auto decision = evaluate(state_);
    nlohmann::json j{{"d", decision.d_events},
                     {"subject_id", record.subject_id},
                     {"log_lr", decision.log_lr},
                     {"lr", io::finite_or_null(decision.lr)},
                     {"verdict", decision.verdict}};
    const auto data = state_.dataset();
    nlohmann::json support = nlohmann::json::object();
    for (double k : kMonitorSupportLevels) {
      const std::string key = io::fixed(k, 0);
      try {
        support[key] = support_interval(data, k);
      } catch (const MleDivergenceError& e) {
        support[key] = nullptr;
        j["support_note"] = e.what();
      }
    }
    j["support"] = support;
    if (options_.project_to) {
      try {
        j["projection"] = interim_projection(state_, *options_.project_to, *options_.remaining, projection_);
      } catch (const DomainError& e) {
        j["projection"] = nullptr;
        j["projection_note"] = e.what();
      }
    }
    return j;
  }

  MonitorOptions options_;
  TrialState state_;
  ProjectionOptions projection_;
  io::EventCsvParser parser_;
};

/// Runs the monitor over a file. Emits the manifest line first, then one
/// line per event. Returns the number of decision lines written.
inline std::size_t run_monitor(const MonitorOptions& o, io::RunManifest manifest, std::ostream& out) {
  MonitorSession session(o);
  std::ifstream in(o.data, std::ios::binary);
  if (!in) throw DataError(0, "cannot open '" + o.data + "'");

  std::size_t written = 0;
  auto process = [&](std::string_view line) {
    if (auto rec = session.feed(line)) {
      out << rec->dump() << '\n';
      out.flush();
      ++written;
    }
  };

  std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  manifest.input_digests[o.data] = io::sha256_hex(content);
  nlohmann::json head = session.header();
  head["manifest"] = manifest;
  out << head.dump() << '\n';

  std::string pending;
  auto consume = [&](std::string_view chunk) {
    pending.append(chunk);
    std::size_t start = 0;
    for (auto nl = pending.find('\n'); nl != std::string::npos; nl = pending.find('\n', start)) {
      process(std::string_view(pending).substr(start, nl - start));
      start = nl + 1;
    }
    pending.erase(0, start);
  };
  consume(content);

  if (o.watch) {
    using clock = std::chrono::steady_clock;
    auto last_data = clock::now();
    std::vector<char> buf(1 << 16);
    for (;;) {
      in.clear();
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      const auto got = in.gcount();
      if (got > 0) {
        consume(std::string_view(buf.data(), static_cast<std::size_t>(got)));
        last_data = clock::now();
        continue;
      }
      if (o.idle_exit_seconds > 0.0 &&
          std::chrono::duration<double>(clock::now() - last_data).count() >= o.idle_exit_seconds)
        break;
      std::this_thread::sleep_for(std::chrono::milliseconds(o.poll_ms));
    }
  }
  if (!pending.empty()) process(pending);
  return written;
}

}  // namespace lrseq::cli
