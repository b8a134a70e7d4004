#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "probelens/ssidlens/edit_distance.hpp"
#include "probelens/ssidlens/flags.hpp"

namespace probelens::ssidlens {

inline constexpr std::size_t kPasswordDigits = 16;
inline constexpr std::array<std::string_view, 4> kPasswordKeywords = {"pass", "pw", "kennwort",
                                                                       "wpa"};

constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }
constexpr bool is_group_separator(char c) { return c == ' ' || c == '.' || c == ','; }

namespace detail {

struct DigitRun {
  std::size_t start;
  std::size_t len;
};

inline std::vector<DigitRun> digit_runs(std::string_view s) {
  std::vector<DigitRun> runs;
  for (std::size_t i = 0; i < s.size();) {
    if (!is_digit(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    runs.push_back({i, j - i});
    i = j;
  }
  return runs;
}

/// True if some chain of separator-joined runs reads as 4-digit groups
/// (the last one may be shorter) holding at least 16 digits in total.
inline bool has_grouped_digits(std::string_view s, const std::vector<DigitRun>& runs) {
  std::size_t chain_begin = 0;
  while (chain_begin < runs.size()) {
    std::size_t chain_end = chain_begin + 1;
    while (chain_end < runs.size()) {
      const auto& prev = runs[chain_end - 1];
      const std::size_t gap = prev.start + prev.len;
      if (runs[chain_end].start != gap + 1 || !is_group_separator(s[gap])) break;
      ++chain_end;
    }
    for (std::size_t i = chain_begin; i < chain_end; ++i) {
      std::size_t j = i;
      std::size_t digits = 0;
      while (j < chain_end && runs[j].len == 4) digits += runs[j++].len;
      std::size_t groups = j - i;
      if (groups >= 1 && j < chain_end && runs[j].len < 4) {
        digits += runs[j].len;
        ++groups;
      }
      if (groups >= 2 && digits >= kPasswordDigits) return true;
    }
    chain_begin = chain_end;
  }
  return false;
}

}  // namespace detail

/// ProbablePassword: >= 16 consecutive digits, or >= 16 digits written in
/// separator-delimited 4-digit groups (which also sets DigitGroupVariant).
/// KeywordPassword: a lowercase keyword substring ("pass", "pw", ...);
/// substring matching over-triggers, so this flag is a heuristic.
inline FlagSet classify_password(std::string_view ssid) {
  FlagSet flags;
  const auto runs = detail::digit_runs(ssid);
  for (const auto& r : runs) {
    if (r.len >= kPasswordDigits) flags.set(Flag::ProbablePassword);
  }
  if (detail::has_grouped_digits(ssid, runs)) {
    flags.set(Flag::ProbablePassword);
    flags.set(Flag::DigitGroupVariant);
  }
  const std::string lower = lowercase_utf8(ssid);
  for (auto kw : kPasswordKeywords) {
    if (lower.find(kw) != std::string::npos) {
      flags.set(Flag::KeywordPassword);
      break;
    }
  }
  return flags;
}

/// Either password criterion; the set used for geolocation cross-checks.
inline bool is_password_candidate(FlagSet flags) {
  return flags.has(Flag::ProbablePassword) || flags.has(Flag::KeywordPassword);
}

}  // namespace probelens::ssidlens
