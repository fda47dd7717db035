#pragma once

// Event CSV ingestion.
//
// Grammar (UTF-8, optional BOM, LF or CRLF line endings):
//   header : "subject_id,time,event,group"
//   row    : id "," time "," ("0"|"1") "," ("0"|"1")
// Fields are trimmed of surrounding blanks; blank lines are skipped. `id` is a
// non-empty unquoted token, `time` a finite non-negative decimal. Anything
// else is rejected with the 1-based line number. An empty input has no rows.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lrseq/core/errors.hpp"
#include "lrseq/evidence.hpp"

namespace lrseq::io {

inline constexpr std::string_view kEventCsvHeader = "subject_id,time,event,group";

struct CsvRow {
  std::size_t line = 0;
  SurvivalRecord record;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline int parse_indicator(std::string_view field, std::size_t line, const char* name) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError(line, std::string(name) + " must be 0 or 1, got '" + std::string(field) + "'");
}

inline double parse_time(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && field.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::fixed | std::chars_format::scientific);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw DataError(line, "time must be a finite decimal, got '" + std::string(field) + "'");
  if (value < 0.0) throw DataError(line, "time must be >= 0");
  return value;
}

}  // namespace detail

/// Line-at-a-time parser, usable on a growing file.
class EventCsvParser {
 public:
  /// Parses one physical line (without its trailing '\n'). Returns a row for
  /// data lines, nothing for the header and blank lines.
  std::optional<CsvRow> feed(std::string_view line) {
    ++line_no_;
    if (line_no_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) return std::nullopt;

    const auto fields = detail::split_fields(line);
    if (!seen_header_) {
      if (fields.size() != 4 || fields[0] != "subject_id" || fields[1] != "time" || fields[2] != "event" ||
          fields[3] != "group")
        throw DataError(line_no_, "expected header '" + std::string(kEventCsvHeader) + "'");
      seen_header_ = true;
      return std::nullopt;
    }
    if (fields.size() != 4)
      throw DataError(line_no_, "expected 4 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw DataError(line_no_, "subject_id is empty");
    if (fields[0].find('"') != std::string_view::npos) throw DataError(line_no_, "quoted fields are not supported");

    CsvRow row;
    row.line = line_no_;
    row.record.subject_id = std::string(fields[0]);
    row.record.time = detail::parse_time(fields[1], line_no_);
    row.record.event = detail::parse_indicator(fields[2], line_no_, "event");
    row.record.group = detail::parse_indicator(fields[3], line_no_, "group");
    return row;
  }

  std::size_t lines_seen() const noexcept { return line_no_; }
  bool seen_header() const noexcept { return seen_header_; }

 private:
  std::size_t line_no_ = 0;
  bool seen_header_ = false;
};

inline std::vector<CsvRow> read_event_csv(std::istream& in) {
  EventCsvParser parser;
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto row = parser.feed(line)) rows.push_back(std::move(*row));
  }
  return rows;
}

inline std::string write_event_csv(const std::vector<SurvivalRecord>& records) {
  std::string out(kEventCsvHeader);
  out += '\n';
  char buf[64];
  for (const auto& r : records) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.time);
    out += r.subject_id;
    out += ',';
    out.append(buf, res.ptr);
    out += ',';
    out += static_cast<char>('0' + r.event);
    out += ',';
    out += static_cast<char>('0' + r.group);
    out += '\n';
  }
  return out;
}

}  // namespace lrseq::io
