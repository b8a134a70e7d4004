#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>

#include "probelens/ssidlens/edit_distance.hpp"
#include "probelens/ssidlens/flags.hpp"

namespace probelens::ssidlens {

/// Lowercase names, one per line in the source file.
class NameDictionary {
 public:
  NameDictionary() = default;
  explicit NameDictionary(std::set<std::string> names) {
    for (const auto& n : names) add(n);
  }

  /// Missing or unreadable file: warns on `log` and returns a disabled (empty)
  /// dictionary so the rest of the analysis still runs.
  static NameDictionary load(const std::string& path, std::ostream& log = std::cerr) {
    NameDictionary dict;
    std::ifstream in(path);
    if (!in) {
      log << "warning: name dictionary '" << path
          << "' not readable; DictionaryName detection disabled\n";
      return dict;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] == '#') continue;
      const auto e = line.find_last_not_of(" \t");
      dict.add(line.substr(b, e - b + 1));
    }
    return dict;
  }

  void add(std::string_view name) { names_.insert(lowercase_utf8(name)); }
  bool contains_token(std::string_view token) const {
    return names_.count(lowercase_utf8(token)) != 0;
  }
  bool enabled() const { return !names_.empty(); }
  std::size_t size() const { return names_.size(); }

 private:
  std::set<std::string> names_;
};

/// Conservative subset of RFC 5322 addr-spec: dot-atom local part, dotted
/// domain, alphabetic TLD of at least two letters.
inline bool contains_email(std::string_view ssid) {
  static const std::regex pattern(
      R"([A-Za-z0-9!#$%&'*+/=?^_`{|}~-]+(\.[A-Za-z0-9!#$%&'*+/=?^_`{|}~-]+)*)"
      R"(@[A-Za-z0-9]([A-Za-z0-9-]*[A-Za-z0-9])?(\.[A-Za-z0-9]([A-Za-z0-9-]*[A-Za-z0-9])?)*)"
      R"(\.[A-Za-z]{2,})");
  return std::regex_search(ssid.begin(), ssid.end(), pattern);
}

inline FlagSet detect_identifiers(std::string_view ssid, const NameDictionary& names) {
  FlagSet flags;
  if (contains_email(ssid)) flags.set(Flag::Email);
  if (names.enabled()) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= ssid.size(); ++i) {
      if (i == ssid.size() || ssid[i] == ' ' || ssid[i] == '_' || ssid[i] == '-') {
        if (i > start && names.contains_token(ssid.substr(start, i - start))) {
          flags.set(Flag::DictionaryName);
          break;
        }
        start = i + 1;
      }
    }
  }
  return flags;
}

}  // namespace probelens::ssidlens
