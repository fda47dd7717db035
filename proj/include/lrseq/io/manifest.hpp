#pragma once

// Run manifest embedded in every report. The timestamp comes from
// SOURCE_DATE_EPOCH when set and is null otherwise, so that reruns with the
// same flags, seed and inputs produce byte-identical output.

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "lrseq/core/errors.hpp"
#include "lrseq/version.hpp"

namespace lrseq::io {

struct RunManifest {
  std::string command_line;
  std::optional<std::uint64_t> seed;
  std::string tool_version = std::string(kVersion);
  std::optional<std::string> timestamp;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(0, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::optional<std::string> timestamp_from_env() {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (!epoch || !*epoch) return std::nullopt;
  char* end = nullptr;
  const long long secs = std::strtoll(epoch, &end, 10);
  if (*end != '\0') return std::nullopt;
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

inline std::string join_command_line(const std::vector<std::string>& args) {
  std::string out = "lrseq";
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  return out;
}

inline void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"command_line", m.command_line},
                     {"seed", m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr)},
                     {"tool_version", m.tool_version},
                     {"timestamp", m.timestamp ? nlohmann::json(*m.timestamp) : nlohmann::json(nullptr)},
                     {"input_digests", m.input_digests}};
}

inline void from_json(const nlohmann::json& j, RunManifest& m) {
  m.command_line = j.at("command_line").get<std::string>();
  const auto& seed = j.at("seed");
  m.seed = seed.is_null() ? std::nullopt : std::optional<std::uint64_t>(seed.get<std::uint64_t>());
  m.tool_version = j.at("tool_version").get<std::string>();
  const auto& ts = j.at("timestamp");
  m.timestamp = ts.is_null() ? std::nullopt : std::optional<std::string>(ts.get<std::string>());
  m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
}

}  // namespace lrseq::io
