#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "probelens/capture/types.hpp"

namespace probelens::ssidlens {

/// Simple lowercase mapping for ASCII, Latin-1, Latin Extended-A, Greek and
/// basic Cyrillic. Other scalars map to themselves.
constexpr char32_t to_lower(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 0x20 : c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c == 0x130) return U'i';
  if (c >= 0x100 && c <= 0x137) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

/// Unicode scalar values of a (possibly invalid) UTF-8 string; invalid bytes
/// become U+FFFD.
inline std::u32string to_scalars(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  for (std::size_t pos = 0; pos < utf8.size();) {
    out.push_back(capture::detail::decode_utf8(utf8, pos));
  }
  return out;
}

inline std::u32string lowercase_scalars(std::string_view utf8) {
  auto s = to_scalars(utf8);
  for (auto& c : s) c = to_lower(c);
  return s;
}

inline std::string lowercase_utf8(std::string_view utf8) {
  std::string out;
  for (char32_t c : lowercase_scalars(utf8)) capture::detail::encode_utf8(c, out);
  return out;
}

/// Insert/delete/substitute distance, two-row dynamic programme.
inline std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Levenshtein distance of the lowercased strings divided by the longer
/// length, counted in scalar values. Two empty strings are at distance 0.
inline double normalized_edit_distance(std::string_view a, std::string_view b) {
  const auto la = lowercase_scalars(a);
  const auto lb = lowercase_scalars(b);
  const std::size_t longest = std::max(la.size(), lb.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(la, lb)) / static_cast<double>(longest);
}

}  // namespace probelens::ssidlens
