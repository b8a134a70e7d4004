// Builds a synthetic capture and prints the fleet statistics.
//   fleet_report [devices] [seed]

#include <cstdlib>
#include <iostream>

#include "probelens/burstflow.hpp"
#include "probelens/capture/synth.hpp"
#include "probelens/ssidlens.hpp"

int main(int argc, char** argv) {
  using namespace probelens;
  capture::FleetParams params;
  params.device_count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 40;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

  const auto records = capture::synth_capture(capture::make_fleet_profile(params, seed), seed);
  const auto bursts = burstflow::group_bursts(records);
  const auto clustering = burstflow::cluster_by_pnl(bursts);
  const auto stats = burstflow::fleet_stats(records, bursts, clustering);
  std::cout << burstflow::to_json(stats).dump(2) << '\n';

  const auto analysis = ssidlens::analyze_clusters(clustering.clusters, {});
  std::cout << analysis.typo_groups.size() << " typo groups, "
            << analysis.cooccurrence.password_entries << " password-like PNL entries\n";
  for (const auto& g : analysis.typo_groups) {
    std::cout << "  cluster " << g.cluster_index << ':';
    for (const auto& m : g.group.members) std::cout << " \"" << m << '"';
    std::cout << '\n';
  }
}
