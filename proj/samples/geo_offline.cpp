// Looks up SSIDs against a local mock service.
//   geo_offline <mock-dir> ssid...

#include <iostream>
#include <vector>

#include "probelens/geoprobe.hpp"

int main(int argc, char** argv) {
  using namespace probelens;
  if (argc < 3) {
    std::cerr << "usage: geo_offline <mock-dir> ssid...\n";
    return 64;
  }
  auto server = geoprobe::MockServer::from_dir(argv[1]);
  geoprobe::GeoConfig config;
  config.base_url = server->base_url();
  config.token = "offline";
  config.max_requests_per_s = 0;
  geoprobe::GeoClient client(config);

  std::vector<capture::Ssid> ssids(argv + 2, argv + argc);
  const auto batch = geoprobe::batch_lookup(ssids, client);
  for (const auto& r : batch.results) std::cout << geoprobe::to_json(r).dump() << '\n';
  for (const auto& e : batch.errors) std::cerr << geoprobe::to_json(e).dump() << '\n';
  std::cout << geoprobe::to_json(geoprobe::summarize(batch.results)).dump() << '\n';
  return batch.errors.empty() ? 0 : 1;
}
