#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "probelens/burstflow.hpp"
#include "probelens/ssidlens/edit_distance.hpp"
#include "probelens/ssidlens/password.hpp"

namespace probelens::ssidlens {

inline constexpr double kDefaultTypoThreshold = 0.3;

struct WitnessPair {
  std::string a;
  std::string b;
  double distance = 0.0;

  friend bool operator==(const WitnessPair&, const WitnessPair&) = default;
};

struct TypoGroup {
  std::vector<std::string> members;  // sorted, >= 2
  std::vector<WitnessPair> witness_pairs;

  friend bool operator==(const TypoGroup&, const TypoGroup&) = default;
};

struct TypoAnalysis {
  std::vector<TypoGroup> groups;
  std::vector<WitnessPair> guarded_pairs;  // within threshold, dropped as model numbers
};

/// Model-number guard: "Fritz!Box 7490" vs "Fritz!Box 7590" are distinct
/// networks, not typos. Applies when the two strings differ only in their
/// digits and both end in a run of at least two digits.
inline bool model_number_pair(std::string_view a, std::string_view b) {
  auto trailing_digits = [](std::string_view s) {
    std::size_t n = 0;
    while (n < s.size() && is_digit(s[s.size() - 1 - n])) ++n;
    return n;
  };
  if (trailing_digits(a) < 2 || trailing_digits(b) < 2) return false;
  const std::string la = lowercase_utf8(a);
  const std::string lb = lowercase_utf8(b);
  if (la == lb) return false;
  auto strip = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (!is_digit(c)) out.push_back(c);
    }
    return out;
  };
  return strip(la) == strip(lb);
}

/// Single-linkage grouping of SSIDs whose normalized distance is within
/// `threshold`. threshold == 0 disables grouping.
inline TypoAnalysis analyze_typos(std::vector<std::string> ssids,
                                  double threshold = kDefaultTypoThreshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("typo threshold must be in [0, 1)");
  }
  std::sort(ssids.begin(), ssids.end());
  ssids.erase(std::unique(ssids.begin(), ssids.end()), ssids.end());
  std::erase(ssids, std::string{});

  TypoAnalysis out;
  if (threshold == 0.0) return out;

  const std::size_t n = ssids.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::vector<WitnessPair> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = normalized_edit_distance(ssids[i], ssids[j]);
      if (d > threshold) continue;
      if (model_number_pair(ssids[i], ssids[j])) {
        out.guarded_pairs.push_back({ssids[i], ssids[j], d});
        continue;
      }
      edges.push_back({ssids[i], ssids[j], d});
      parent[find(i)] = find(j);
    }
  }

  std::vector<std::vector<std::size_t>> by_root(n);
  for (std::size_t i = 0; i < n; ++i) by_root[find(i)].push_back(i);
  for (const auto& idx : by_root) {
    if (idx.size() < 2) continue;
    TypoGroup g;
    for (std::size_t i : idx) g.members.push_back(ssids[i]);
    for (const auto& e : edges) {
      if (std::binary_search(g.members.begin(), g.members.end(), e.a)) g.witness_pairs.push_back(e);
    }
    out.groups.push_back(std::move(g));
  }
  std::sort(out.groups.begin(), out.groups.end(),
            [](const TypoGroup& x, const TypoGroup& y) { return x.members < y.members; });
  return out;
}

inline std::vector<TypoGroup> find_typo_groups(const burstflow::Pnl& pnl,
                                               double threshold = kDefaultTypoThreshold) {
  std::vector<std::string> ssids;
  for (const auto& s : pnl.ssids) ssids.push_back(s.bytes());
  return analyze_typos(std::move(ssids), threshold).groups;
}

}  // namespace probelens::ssidlens
