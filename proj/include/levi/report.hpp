#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "levi/errors.hpp"

namespace levi {

using Json = nlohmann::ordered_json;

/// All floating-point values in reports are rounded to 12 significant
/// digits so that repeated runs serialize identically.
inline double round_significant(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline Json report_number(double x) { return Json(round_significant(x)); }

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Non-cryptographic content fingerprint used to tie reports to inputs.
inline std::string digest_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

struct RunReport {
  std::string command;
  Json inputs = Json::array();  // {"path", "digest"} per input file
  std::string status = "ok";    // "ok" | "obstructed" | "refused" | "fail"
  std::string error;            // error code name when not ok
  std::string message;
  Json records = Json::object();
  Json outputs = Json::array();
  double wall_ms = 0.0;
  bool include_time = true;
  std::string timestamp;

  void add_input(const std::string& path, std::string_view bytes) {
    Json e;
    e["path"] = path;
    e["digest"] = digest_hex(bytes);
    inputs.push_back(std::move(e));
  }

  void stamp_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    timestamp = buf;
  }

  Json to_json() const {
    Json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    if (!message.empty()) j["message"] = message;
    j["records"] = records;
    if (!outputs.empty()) j["outputs"] = outputs;
    // Wall time varies run to run, so it travels with the timestamp and
    // both are dropped for byte-stable output.
    if (include_time) {
      j["wall_ms"] = report_number(wall_ms);
      j["timestamp"] = timestamp;
    }
    return j;
  }

  std::string serialize() const { return to_json().dump(2) + "\n"; }
};

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::ParseError, "cannot write " + path);
  out << content;
}

}  // namespace levi
