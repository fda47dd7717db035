#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrseq/io/manifest.hpp"
#include "lrseq/io/table.hpp"

namespace lrseq::cli {

enum class Format { json, table, csv };

inline Format parse_format(const std::string& s) {
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  return Format::json;
}

/// A command's result: the JSON payload, a rounded display table and a
/// full-precision data table for CSV.
struct Report {
  nlohmann::json body = nlohmann::json::object();
  io::TextTable display{{}};
  io::TextTable data{{}};
  std::vector<std::string> notes;
};

inline std::string manifest_comment(const io::RunManifest& m) {
  std::string out = "# " + m.command_line + "\n# lrseq " + m.tool_version;
  if (m.seed) out += " seed=" + std::to_string(*m.seed);
  if (m.timestamp) out += " at " + *m.timestamp;
  out += '\n';
  for (const auto& [path, digest] : m.input_digests) out += "# sha256 " + digest + "  " + path + "\n";
  return out;
}

inline std::string render(const Report& report, const io::RunManifest& manifest, Format format) {
  switch (format) {
    case Format::json: {
      nlohmann::json doc{{"manifest", manifest}, {"report", report.body}};
      return doc.dump(2) + "\n";
    }
    case Format::table: {
      std::string out = manifest_comment(manifest);
      for (const auto& n : report.notes) out += n + "\n";
      return out + report.display.aligned();
    }
    case Format::csv:
      return manifest_comment(manifest) + report.data.csv();
  }
  return {};
}

}  // namespace lrseq::cli
