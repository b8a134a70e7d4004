#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "probelens/capture/jsonl.hpp"
#include "probelens/capture/types.hpp"

namespace probelens::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // a check ran and did not pass
  kExitFormatError = 2,
  kExitConfigError = 3,
  kExitUsageError = 64,
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Environment lookup, injectable for tests.
struct Env {
  std::function<std::optional<std::string>(const std::string&)> get;

  static Env process() {
    return {[](const std::string& name) -> std::optional<std::string> {
      const char* v = std::getenv(name.c_str());
      if (!v || !*v) return std::nullopt;
      return std::string(v);
    }};
  }
};

enum class Format { Json, Csv, Text };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "text") return Format::Text;
  throw UsageError("unknown format '" + s + "' (expected json, csv or text)");
}

/// Writes to `path`, or to `fallback` when path is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw ConfigError("cannot open output file " + path);
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

/// Non-blank lines of a UTF-8 text file; '\r' stripped.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw capture::FormatError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

/// SSID list line: plain text, or "b64:<base64>" for raw octets.
inline capture::Ssid ssid_from_line(const std::string& line) {
  if (line.rfind("b64:", 0) == 0) {
    auto raw = capture::base64_decode(line.substr(4));
    if (!raw) throw capture::FormatError("bad base64 SSID line: " + line);
    return capture::Ssid(*raw);
  }
  if (line.size() > capture::Ssid::kMaxLength) {
    throw capture::FormatError("SSID longer than 32 octets: " + line);
  }
  return capture::Ssid(line);
}

inline nlohmann::ordered_json ssid_value(const capture::Ssid& s) {
  if (s.is_utf8()) return s.bytes();
  return {{"ssid_b64", capture::base64_encode(s.bytes())}};
}

/// ssid_value for SSID bytes held as a plain string.
inline nlohmann::ordered_json text_value(const std::string& bytes) {
  return ssid_value(capture::Ssid(bytes));
}

/// Inverse view of ssid_value for CSV/text cells.
inline std::string value_text(const nlohmann::ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return "b64:" + v.at("ssid_b64").get<std::string>();
}

inline std::string ssid_text(const capture::Ssid& s) {
  return s.is_utf8() ? s.bytes() : "b64:" + capture::base64_encode(s.bytes());
}

inline std::string mac_text(const capture::MacAddress& m, bool redact) {
  return redact ? m.redacted() : m.to_string();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// "a.b.c: value" lines for any JSON document.
inline void render_text(const nlohmann::ordered_json& j, std::ostream& out,
                        const std::string& prefix = {}) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_text(v, out, prefix.empty() ? k : prefix + "." + k);
  } else if (j.is_array()) {
    if (j.empty()) out << prefix << ": []\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      render_text(j[i], out, prefix + "[" + std::to_string(i) + "]");
    }
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

}  // namespace probelens::cli
