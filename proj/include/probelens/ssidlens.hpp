#pragma once

// SSID privacy classification: probable passwords, typo groups, identifiers.

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "probelens/burstflow.hpp"
#include "probelens/capture/jsonl.hpp"
#include "probelens/ssidlens/edit_distance.hpp"
#include "probelens/ssidlens/flags.hpp"
#include "probelens/ssidlens/identifiers.hpp"
#include "probelens/ssidlens/password.hpp"
#include "probelens/ssidlens/typo.hpp"

namespace probelens::ssidlens {

struct SsidVerdict {
  capture::Ssid ssid;
  FlagSet flags;
  std::optional<std::size_t> typo_group_id;

  bool benign() const { return flags.empty(); }
};

/// Password and identifier flags for one SSID (typo membership needs context).
inline FlagSet classify_ssid(std::string_view ssid, const NameDictionary& names) {
  FlagSet flags = classify_password(ssid);
  flags |= detect_identifiers(ssid, names);
  return flags;
}

struct CooccurrenceEntry {
  std::size_t cluster_index = 0;
  std::string ssid;
  std::size_t pnl_size = 0;
  bool sole_entry = false;
};

struct CooccurrenceReport {
  std::vector<CooccurrenceEntry> entries;
  std::size_t password_entries = 0;
  std::size_t sole_entries = 0;
  double sole_entry_pct = 0.0;
};

/// For each probable password in each cluster PNL: is it the only entry? A
/// password sent next to other SSIDs likely travels with its network's name.
inline CooccurrenceReport password_cooccurrence(std::span<const burstflow::Cluster> clusters) {
  CooccurrenceReport r;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& pnl = clusters[i].pnl;
    for (const auto& s : pnl.ssids) {
      if (!classify_password(s.bytes()).has(Flag::ProbablePassword)) continue;
      CooccurrenceEntry e{i, s.bytes(), pnl.size(), pnl.size() == 1};
      ++r.password_entries;
      if (e.sole_entry) ++r.sole_entries;
      r.entries.push_back(std::move(e));
    }
  }
  r.sole_entry_pct = r.password_entries ? 100.0 * static_cast<double>(r.sole_entries) /
                                              static_cast<double>(r.password_entries)
                                        : 0.0;
  return r;
}

struct TypoFinding {
  std::size_t group_id = 0;
  std::size_t cluster_index = 0;
  TypoGroup group;
};

struct SsidAnalysis {
  std::vector<SsidVerdict> verdicts;  // one per distinct non-wildcard SSID, byte order
  std::vector<TypoFinding> typo_groups;
  std::vector<WitnessPair> guarded_pairs;
  CooccurrenceReport cooccurrence;
  std::size_t ssids_in_typo_groups = 0;
};

/// Classifies every SSID appearing in a cluster PNL. Typo groups are searched
/// per cluster PNL; identical groups found in several clusters get one id.
inline SsidAnalysis analyze_clusters(std::span<const burstflow::Cluster> clusters,
                                     const NameDictionary& names,
                                     double typo_threshold = kDefaultTypoThreshold) {
  SsidAnalysis out;
  std::map<capture::Ssid, SsidVerdict> verdicts;
  std::map<std::vector<std::string>, std::size_t> group_ids;

  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    std::vector<std::string> members;
    for (const auto& s : clusters[ci].pnl.ssids) {
      members.push_back(s.bytes());
      if (!verdicts.count(s)) verdicts[s] = SsidVerdict{s, classify_ssid(s.bytes(), names), {}};
    }
    auto typos = analyze_typos(std::move(members), typo_threshold);
    for (auto& g : typos.groups) {
      auto [it, inserted] = group_ids.try_emplace(g.members, group_ids.size());
      for (const auto& m : g.members) {
        auto& v = verdicts[capture::Ssid(m)];
        v.flags.set(Flag::TypoGroupMember);
        if (!v.typo_group_id) v.typo_group_id = it->second;
      }
      if (inserted) out.typo_groups.push_back({it->second, ci, std::move(g)});
    }
    for (auto& p : typos.guarded_pairs) out.guarded_pairs.push_back(std::move(p));
  }
  for (auto& [ssid, v] : verdicts) {
    if (v.flags.has(Flag::TypoGroupMember)) ++out.ssids_in_typo_groups;
    out.verdicts.push_back(std::move(v));
  }
  out.cooccurrence = password_cooccurrence(clusters);
  return out;
}

inline nlohmann::ordered_json to_json(const SsidVerdict& v) {
  nlohmann::ordered_json j;
  if (v.ssid.is_utf8()) {
    j["ssid"] = v.ssid.bytes();
  } else {
    j["ssid_b64"] = capture::base64_encode(v.ssid.bytes());
  }
  j["flags"] = nlohmann::ordered_json::array();
  for (auto name : v.flags.names()) j["flags"].push_back(std::string(name));
  if (v.typo_group_id) j["typo_group"] = *v.typo_group_id;
  return j;
}

inline void write_verdicts_jsonl(std::span<const SsidVerdict> verdicts, std::ostream& out) {
  for (const auto& v : verdicts) out << to_json(v).dump() << '\n';
}

}  // namespace probelens::ssidlens
