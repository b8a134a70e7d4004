#pragma once

// Burst grouping, PNL clustering and fleet-level statistics.

#include <algorithm>
#include <array>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "probelens/capture/types.hpp"

namespace probelens::burstflow {

using capture::MacAddress;
using capture::ProbeRecord;
using capture::Ssid;

inline constexpr double kDefaultWindowSeconds = 4.0;

struct Burst {
  MacAddress mac;
  std::vector<ProbeRecord> records;  // timestamp order
  double start_time = 0.0;
  double end_time = 0.0;
};

/// Preferred network list: the set of directed SSIDs, wildcards excluded.
struct Pnl {
  std::set<Ssid> ssids;

  std::size_t size() const { return ssids.size(); }
  bool empty() const { return ssids.empty(); }
  bool contains(const Ssid& s) const { return ssids.count(s) != 0; }

  friend auto operator<=>(const Pnl&, const Pnl&) = default;
  friend bool operator==(const Pnl&, const Pnl&) = default;
};

struct Cluster {
  Pnl pnl;
  std::vector<Burst> bursts;

  /// A one-SSID PNL can't distinguish two devices probing for the same network.
  bool ambiguous() const { return pnl.size() == 1; }

  std::set<MacAddress> macs() const {
    std::set<MacAddress> out;
    for (const auto& b : bursts) out.insert(b.mac);
    return out;
  }
};

struct Clustering {
  std::vector<Cluster> clusters;    // sorted by PNL
  std::vector<Burst> wildcard_only;  // bursts with an empty PNL
};

/// Chain-gap grouping: a record joins the open burst of its MAC when it
/// follows that burst's last record by at most `window_s`.
inline std::vector<Burst> group_bursts(std::span<const ProbeRecord> records,
                                       double window_s = kDefaultWindowSeconds) {
  std::vector<const ProbeRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ProbeRecord* a, const ProbeRecord* b) {
    return a->timestamp < b->timestamp;
  });

  std::vector<Burst> bursts;
  std::map<MacAddress, std::size_t> open;  // mac -> index into bursts
  for (const ProbeRecord* r : order) {
    auto it = open.find(r->mac);
    if (it != open.end() && r->timestamp - bursts[it->second].end_time <= window_s) {
      Burst& b = bursts[it->second];
      b.records.push_back(*r);
      b.end_time = r->timestamp;
      continue;
    }
    Burst b;
    b.mac = r->mac;
    b.records.push_back(*r);
    b.start_time = b.end_time = r->timestamp;
    open[r->mac] = bursts.size();
    bursts.push_back(std::move(b));
  }
  return bursts;
}

inline Pnl pnl_of(const Burst& burst) {
  Pnl pnl;
  for (const auto& r : burst.records) {
    if (!r.ssid.is_wildcard()) pnl.ssids.insert(r.ssid);
  }
  return pnl;
}

inline bool burst_before(const Burst& a, const Burst& b) {
  if (a.start_time != b.start_time) return a.start_time < b.start_time;
  if (a.mac != b.mac) return a.mac < b.mac;
  return a.records.size() < b.records.size();
}

/// Exact PNL equality; partially overlapping PNLs never merge.
inline Clustering cluster_by_pnl(std::span<const Burst> bursts) {
  std::map<Pnl, Cluster> by_pnl;
  Clustering out;
  for (const auto& b : bursts) {
    Pnl pnl = pnl_of(b);
    if (pnl.empty()) {
      out.wildcard_only.push_back(b);
      continue;
    }
    auto [it, inserted] = by_pnl.try_emplace(pnl);
    if (inserted) it->second.pnl = std::move(pnl);
    it->second.bursts.push_back(b);
  }
  for (auto& [pnl, cluster] : by_pnl) {
    std::sort(cluster.bursts.begin(), cluster.bursts.end(), burst_before);
    out.clusters.push_back(std::move(cluster));
  }
  std::sort(out.wildcard_only.begin(), out.wildcard_only.end(), burst_before);
  return out;
}

enum class DeviceKind { SingleMac, Randomizing, Leaking, Other };

/// Randomizing: >= 2 distinct MACs, all locally administered. Leaking: >= 2
/// MACs mixing global and local addresses (the global one exposes the device).
inline DeviceKind classify_device(const Cluster& cluster) {
  const auto macs = cluster.macs();
  if (macs.size() == 1) return DeviceKind::SingleMac;
  std::size_t local = 0;
  for (const auto& m : macs) local += m.is_local() ? 1 : 0;
  if (local == macs.size()) return DeviceKind::Randomizing;
  if (local > 0) return DeviceKind::Leaking;
  return DeviceKind::Other;
}

inline constexpr std::size_t kHistogramBuckets = 9;  // 1..8 SSIDs, then >8

struct FleetStats {
  std::size_t total_probes = 0;
  std::size_t probes_with_ssid = 0;
  double probes_with_ssid_pct = 0.0;
  std::size_t probes_2_4ghz = 0;
  std::size_t probes_5ghz = 0;
  double ssid_pct_2_4ghz = 0.0;
  double ssid_pct_5ghz = 0.0;
  std::array<double, kHistogramBuckets> ssids_per_cluster_histogram{};
  double avg_probes_per_mac = 0.0;
  double avg_probes_per_mac_ssid_only = 0.0;
  std::size_t randomizing_device_count = 0;
  std::size_t single_mac_device_count = 0;
  std::size_t leaking_device_count = 0;
  std::size_t cluster_count = 0;
  std::size_t ambiguous_cluster_count = 0;
  std::size_t burst_count = 0;
  std::size_t wildcard_only_burst_count = 0;
  std::size_t distinct_mac_count = 0;
};

namespace detail {
inline double pct(std::size_t part, std::size_t whole) {
  return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}
}  // namespace detail

inline FleetStats fleet_stats(std::span<const ProbeRecord> records, std::span<const Burst> bursts,
                              const Clustering& clustering) {
  FleetStats s;
  s.total_probes = records.size();
  std::size_t ssid_24 = 0;
  std::size_t ssid_5 = 0;
  std::set<MacAddress> macs;
  std::set<MacAddress> ssid_macs;
  for (const auto& r : records) {
    const bool directed = !r.ssid.is_wildcard();
    const bool low = r.band() == capture::Band::GHz2_4;
    (low ? s.probes_2_4ghz : s.probes_5ghz)++;
    macs.insert(r.mac);
    if (directed) {
      ++s.probes_with_ssid;
      (low ? ssid_24 : ssid_5)++;
      ssid_macs.insert(r.mac);
    }
  }
  s.probes_with_ssid_pct = detail::pct(s.probes_with_ssid, s.total_probes);
  s.ssid_pct_2_4ghz = detail::pct(ssid_24, s.probes_2_4ghz);
  s.ssid_pct_5ghz = detail::pct(ssid_5, s.probes_5ghz);
  s.distinct_mac_count = macs.size();
  s.avg_probes_per_mac =
      macs.empty() ? 0.0 : static_cast<double>(s.total_probes) / static_cast<double>(macs.size());
  s.avg_probes_per_mac_ssid_only =
      ssid_macs.empty()
          ? 0.0
          : static_cast<double>(s.probes_with_ssid) / static_cast<double>(ssid_macs.size());

  s.burst_count = bursts.size();
  s.wildcard_only_burst_count = clustering.wildcard_only.size();
  s.cluster_count = clustering.clusters.size();
  std::array<std::size_t, kHistogramBuckets> hist{};
  for (const auto& c : clustering.clusters) {
    hist[std::min(c.pnl.size(), kHistogramBuckets) - 1]++;
    if (c.ambiguous()) ++s.ambiguous_cluster_count;
    switch (classify_device(c)) {
      case DeviceKind::SingleMac: ++s.single_mac_device_count; break;
      case DeviceKind::Randomizing: ++s.randomizing_device_count; break;
      case DeviceKind::Leaking: ++s.leaking_device_count; break;
      case DeviceKind::Other: break;
    }
  }
  for (std::size_t i = 0; i < kHistogramBuckets; ++i) {
    s.ssids_per_cluster_histogram[i] = detail::pct(hist[i], s.cluster_count);
  }
  return s;
}

/// Convenience: group, cluster and summarize in one go.
inline FleetStats fleet_stats(std::span<const ProbeRecord> records,
                              double window_s = kDefaultWindowSeconds) {
  const auto bursts = group_bursts(records, window_s);
  return fleet_stats(records, bursts, cluster_by_pnl(bursts));
}

/// Removes from `a` every burst whose PNL also occurs in `b`: devices seen
/// on both days are treated as stationary. Wildcard-only bursts can't be
/// matched and are kept.
inline std::vector<ProbeRecord> subtract(std::span<const ProbeRecord> a,
                                         std::span<const ProbeRecord> b,
                                         double window_s = kDefaultWindowSeconds) {
  std::set<Pnl> stationary;
  for (const auto& burst : group_bursts(b, window_s)) {
    Pnl pnl = pnl_of(burst);
    if (!pnl.empty()) stationary.insert(std::move(pnl));
  }
  std::vector<ProbeRecord> out;
  for (const auto& burst : group_bursts(a, window_s)) {
    if (stationary.count(pnl_of(burst))) continue;
    out.insert(out.end(), burst.records.begin(), burst.records.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const ProbeRecord& x, const ProbeRecord& y) {
    return x.timestamp < y.timestamp;
  });
  return out;
}

inline constexpr std::array<const char*, kHistogramBuckets> kHistogramLabels = {
    "1", "2", "3", "4", "5", "6", "7", "8", ">8"};

inline nlohmann::ordered_json to_json(const FleetStats& s) {
  nlohmann::ordered_json j;
  j["total_probes"] = s.total_probes;
  j["probes_with_ssid"] = s.probes_with_ssid;
  j["probes_with_ssid_pct"] = s.probes_with_ssid_pct;
  j["probes_2_4ghz"] = s.probes_2_4ghz;
  j["probes_5ghz"] = s.probes_5ghz;
  j["ssid_pct_2_4ghz"] = s.ssid_pct_2_4ghz;
  j["ssid_pct_5ghz"] = s.ssid_pct_5ghz;
  auto& hist = j["ssids_per_cluster_histogram"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kHistogramBuckets; ++i) {
    hist[kHistogramLabels[i]] = s.ssids_per_cluster_histogram[i];
  }
  j["avg_probes_per_mac"] = s.avg_probes_per_mac;
  j["avg_probes_per_mac_ssid_only"] = s.avg_probes_per_mac_ssid_only;
  j["randomizing_device_count"] = s.randomizing_device_count;
  j["single_mac_device_count"] = s.single_mac_device_count;
  j["leaking_device_count"] = s.leaking_device_count;
  j["cluster_count"] = s.cluster_count;
  j["ambiguous_cluster_count"] = s.ambiguous_cluster_count;
  j["burst_count"] = s.burst_count;
  j["wildcard_only_burst_count"] = s.wildcard_only_burst_count;
  j["distinct_mac_count"] = s.distinct_mac_count;
  return j;
}

/// One header line and one data row. Histogram buckets are flattened into
/// ssids_per_cluster_histogram_1 .. _8 and _gt8.
inline std::string to_csv(const FleetStats& s) {
  const auto j = to_json(s);
  std::ostringstream header;
  std::ostringstream row;
  bool first = true;
  auto cell = [&](const std::string& name, const nlohmann::ordered_json& v) {
    if (!first) {
      header << ',';
      row << ',';
    }
    first = false;
    header << name;
    row << v.dump();
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "ssids_per_cluster_histogram") {
      for (std::size_t i = 0; i < kHistogramBuckets; ++i) {
        const std::string suffix = i + 1 < kHistogramBuckets ? std::to_string(i + 1) : "gt8";
        cell(key + "_" + suffix, value[kHistogramLabels[i]]);
      }
    } else {
      cell(key, value);
    }
  }
  return header.str() + "\n" + row.str() + "\n";
}

}  // namespace probelens::burstflow
