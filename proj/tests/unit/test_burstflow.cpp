#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "probelens/burstflow.hpp"
#include "probelens/capture/synth.hpp"

using namespace probelens;
using namespace probelens::burstflow;
using capture::MacAddress;
using capture::SequenceNumber;

namespace {

ProbeRecord rec(double t, const char* mac, const char* ssid = "") {
  ProbeRecord r;
  r.timestamp = t;
  r.mac = *MacAddress::parse(mac);
  r.ssid = capture::Ssid(ssid);
  r.channel = 1;
  r.frame_len = 60;
  return r;
}

Burst burst_with(const char* mac, std::vector<const char*> ssids, double t = 0.0) {
  std::vector<ProbeRecord> recs;
  for (auto* s : ssids) {
    recs.push_back(rec(t, mac, s));
    t += 0.01;
  }
  return group_bursts(recs).front();
}

}  // namespace

TEST(GroupBursts, GapsWithinWindowChain) {
  const std::vector<ProbeRecord> r = {rec(0.0, "02:00:00:00:00:01"),
                                      rec(1.5, "02:00:00:00:00:01"),
                                      rec(3.9, "02:00:00:00:00:01")};
  const auto bursts = group_bursts(r);
  ASSERT_EQ(bursts.size(), 1u);
  EXPECT_EQ(bursts[0].records.size(), 3u);
  EXPECT_DOUBLE_EQ(bursts[0].start_time, 0.0);
  EXPECT_DOUBLE_EQ(bursts[0].end_time, 3.9);
}

TEST(GroupBursts, GapBeyondWindowSplits) {
  const std::vector<ProbeRecord> r = {rec(0.0, "02:00:00:00:00:01"),
                                      rec(4.5, "02:00:00:00:00:01")};
  EXPECT_EQ(group_bursts(r).size(), 2u);
}

TEST(GroupBursts, ChainMayExceedWindow) {
  // each gap <= 4 s, total span 10 s: still one burst under chain-gap rules
  const std::vector<ProbeRecord> r = {rec(0.0, "02:00:00:00:00:01"),
                                      rec(3.5, "02:00:00:00:00:01"),
                                      rec(7.0, "02:00:00:00:00:01"),
                                      rec(10.0, "02:00:00:00:00:01")};
  EXPECT_EQ(group_bursts(r).size(), 1u);
  EXPECT_EQ(group_bursts(r, 2.9).size(), 4u);
}

TEST(GroupBursts, MacsPartition) {
  const std::vector<ProbeRecord> r = {rec(0.0, "02:00:00:00:00:01"),
                                      rec(0.1, "02:00:00:00:00:02")};
  EXPECT_EQ(group_bursts(r).size(), 2u);
}

TEST(GroupBursts, UnsortedInputAndEmpty) {
  const std::vector<ProbeRecord> r = {rec(3.0, "02:00:00:00:00:01"),
                                      rec(0.0, "02:00:00:00:00:01")};
  const auto b = group_bursts(r);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_DOUBLE_EQ(b[0].records.front().timestamp, 0.0);
  EXPECT_TRUE(group_bursts(std::vector<ProbeRecord>{}).empty());
}

TEST(PnlOf, SetSemanticsWithoutWildcard) {
  const auto pnl = pnl_of(burst_with("02:00:00:00:00:01", {"", "a", "a", "b"}));
  EXPECT_EQ(pnl.size(), 2u);
  EXPECT_TRUE(pnl.contains("a"));
  EXPECT_TRUE(pnl.contains("b"));
  EXPECT_FALSE(pnl.contains(""));
  EXPECT_TRUE(pnl_of(burst_with("02:00:00:00:00:01", {"", ""})).empty());
}

TEST(PnlOf, ThreeNamedAndWildcard) {
  const auto pnl = pnl_of(burst_with("02:00:00:00:00:01", {"net-a", "net-b", "net-c", ""}));
  EXPECT_EQ(pnl.size(), 3u);
}

TEST(ClusterByPnl, PartialOverlapNeverMerges) {
  std::vector<Burst> bursts = {burst_with("02:00:00:00:00:01", {"a", "b"}),
                               burst_with("02:00:00:00:00:02", {"a", "b"}, 10),
                               burst_with("02:00:00:00:00:03", {"a"}, 20)};
  auto c = cluster_by_pnl(bursts);
  EXPECT_EQ(c.clusters.size(), 2u);

  bursts = {burst_with("02:00:00:00:00:01", {"a"}), burst_with("02:00:00:00:00:02", {"b"}, 10),
            burst_with("02:00:00:00:00:03", {"a", "b"}, 20)};
  c = cluster_by_pnl(bursts);
  EXPECT_EQ(c.clusters.size(), 3u);
  for (const auto& cl : c.clusters) {
    for (const auto& b : cl.bursts) EXPECT_EQ(pnl_of(b), cl.pnl);
  }
}

TEST(ClusterByPnl, SingleBurstAndWildcardBucket) {
  std::vector<Burst> bursts = {burst_with("02:00:00:00:00:01", {"a"}),
                               burst_with("02:00:00:00:00:02", {""}, 10)};
  const auto c = cluster_by_pnl(bursts);
  ASSERT_EQ(c.clusters.size(), 1u);
  EXPECT_TRUE(c.clusters[0].ambiguous());
  EXPECT_EQ(c.wildcard_only.size(), 1u);
}

TEST(FleetStats, RandomizingDeviceCount) {
  std::vector<ProbeRecord> r = {rec(0, "02:00:00:00:00:01", "home"),
                                rec(30, "06:00:00:00:00:02", "home"),
                                rec(60, "0a:00:00:00:00:03", "home")};
  const auto s = fleet_stats(r);
  EXPECT_EQ(s.cluster_count, 1u);
  EXPECT_EQ(s.randomizing_device_count, 1u);
  EXPECT_EQ(s.single_mac_device_count, 0u);
}

TEST(FleetStats, LeakingAndSingle) {
  std::vector<ProbeRecord> r = {rec(0, "02:00:00:00:00:01", "x"), rec(30, "00:00:00:00:00:02", "x"),
                                rec(0, "00:11:00:00:00:09", "y"), rec(30, "00:11:00:00:00:09", "y")};
  const auto s = fleet_stats(r);
  EXPECT_EQ(s.leaking_device_count, 1u);
  EXPECT_EQ(s.single_mac_device_count, 1u);
  EXPECT_EQ(s.randomizing_device_count, 0u);
}

TEST(FleetStats, HistogramArithmetic) {
  std::vector<ProbeRecord> r = {rec(0, "00:00:00:00:00:01", "a"), rec(0, "00:00:00:00:00:02", "b"),
                                rec(0, "00:00:00:00:00:03", "c"),
                                rec(0.1, "00:00:00:00:00:03", "d")};
  const auto s = fleet_stats(r);
  ASSERT_EQ(s.cluster_count, 3u);
  EXPECT_NEAR(s.ssids_per_cluster_histogram[0], 66.7, 0.05);
  EXPECT_NEAR(s.ssids_per_cluster_histogram[1], 33.3, 0.05);
}

TEST(FleetStats, OverEightBucket) {
  std::vector<ProbeRecord> r;
  for (int i = 0; i < 9; ++i) {
    r.push_back(rec(0.01 * i, "00:00:00:00:00:01", std::string(1, static_cast<char>('a' + i)).c_str()));
  }
  const auto s = fleet_stats(r);
  EXPECT_DOUBLE_EQ(s.ssids_per_cluster_histogram[8], 100.0);
}

TEST(FleetStats, SharesAndAverages) {
  std::vector<ProbeRecord> r = {rec(0, "00:00:00:00:00:01", "a"), rec(0.1, "00:00:00:00:00:01"),
                                rec(0.2, "00:00:00:00:00:01"), rec(0, "02:00:00:00:00:02")};
  r[3].channel = 36;
  const auto s = fleet_stats(r);
  EXPECT_DOUBLE_EQ(s.probes_with_ssid_pct, 25.0);
  EXPECT_EQ(s.probes_2_4ghz, 3u);
  EXPECT_EQ(s.probes_5ghz, 1u);
  EXPECT_NEAR(s.ssid_pct_2_4ghz, 100.0 / 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.ssid_pct_5ghz, 0.0);
  EXPECT_DOUBLE_EQ(s.avg_probes_per_mac, 2.0);
  EXPECT_DOUBLE_EQ(s.avg_probes_per_mac_ssid_only, 1.0);
}

TEST(FleetStats, EmptyCapture) {
  const auto s = fleet_stats(std::vector<ProbeRecord>{});
  EXPECT_EQ(s.total_probes, 0u);
  EXPECT_DOUBLE_EQ(s.probes_with_ssid_pct, 0.0);
}

TEST(FleetStats, TargetShareProfile) {
  capture::FleetParams p;
  p.device_count = 400;
  p.target_ssid_share = 0.232;
  const auto recs = capture::synth_capture(capture::make_fleet_profile(p, 2022), 2022);
  const auto s = fleet_stats(recs);
  EXPECT_NEAR(s.probes_with_ssid_pct, 23.2, 0.5);
}

TEST(FleetStats, CsvAndJsonFieldNames) {
  const auto s = fleet_stats(std::vector<ProbeRecord>{rec(0, "00:00:00:00:00:01", "a")});
  const auto j = to_json(s);
  for (const char* key : {"total_probes", "probes_with_ssid_pct", "ssids_per_cluster_histogram",
                          "avg_probes_per_mac", "avg_probes_per_mac_ssid_only",
                          "randomizing_device_count", "single_mac_device_count"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const auto csv = to_csv(s);
  const auto header = csv.substr(0, csv.find('\n'));
  EXPECT_NE(header.find("ssids_per_cluster_histogram_gt8"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  const auto row = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}

TEST(Subtract, RemovesStationaryPnls) {
  std::vector<ProbeRecord> day1 = {rec(0, "00:00:00:00:00:01", "office"),
                                   rec(0, "00:00:00:00:00:02", "tourist"),
                                   rec(0, "02:00:00:00:00:03")};
  std::vector<ProbeRecord> day2 = {rec(5, "00:00:00:00:00:07", "office")};
  const auto rest = subtract(day1, day2);
  ASSERT_EQ(rest.size(), 2u);
  for (const auto& r : rest) EXPECT_NE(r.ssid.bytes(), "office");
}

// Properties over random fleets.
class RandomCaptures : public ::testing::TestWithParam<int> {};

TEST_P(RandomCaptures, PartitionPermutationHistogram) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  capture::FleetParams p;
  p.device_count = 20 + seed % 30;
  const auto recs = capture::synth_capture(capture::make_fleet_profile(p, seed), seed);
  const auto bursts = group_bursts(recs);

  std::size_t total = 0;
  for (const auto& b : bursts) {
    total += b.records.size();
    for (std::size_t i = 1; i < b.records.size(); ++i) {
      EXPECT_EQ(b.records[i].mac, b.mac);
      EXPECT_LE(b.records[i].timestamp - b.records[i - 1].timestamp, kDefaultWindowSeconds);
    }
  }
  EXPECT_EQ(total, recs.size());

  const auto c1 = cluster_by_pnl(bursts);
  auto shuffled = bursts;
  std::mt19937_64 rng(seed);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto c2 = cluster_by_pnl(shuffled);
  ASSERT_EQ(c1.clusters.size(), c2.clusters.size());
  for (std::size_t i = 0; i < c1.clusters.size(); ++i) {
    EXPECT_EQ(c1.clusters[i].pnl, c2.clusters[i].pnl);
    ASSERT_EQ(c1.clusters[i].bursts.size(), c2.clusters[i].bursts.size());
    for (std::size_t k = 0; k < c1.clusters[i].bursts.size(); ++k) {
      EXPECT_EQ(c1.clusters[i].bursts[k].records, c2.clusters[i].bursts[k].records);
    }
  }

  const auto s = fleet_stats(recs, bursts, c1);
  if (s.cluster_count) {
    const double sum = std::accumulate(s.ssids_per_cluster_histogram.begin(),
                                       s.ssids_per_cluster_histogram.end(), 0.0);
    EXPECT_NEAR(sum, 100.0, 0.1);
  }
  EXPECT_LE(s.randomizing_device_count + s.single_mac_device_count, s.cluster_count);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomCaptures, ::testing::Range(1, 21));
