#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

#include "probelens/geoprobe.hpp"

using namespace probelens;
using namespace probelens::geoprobe;

namespace {

const std::filesystem::path kMockDir = std::filesystem::path(PROBELENS_FIXTURE_DIR) / "geo_mock";

GeoConfig offline_config(const MockServer& server, std::string token = "t") {
  GeoConfig c;
  c.base_url = server.base_url();
  c.token = std::move(token);
  c.max_requests_per_s = 0;
  c.initial_backoff = std::chrono::milliseconds(10);
  c.timeout = std::chrono::seconds(5);
  return c;
}

std::vector<Ssid> fixture_ssids() {
  std::vector<Ssid> out;
  std::ifstream in(kMockDir / "ssids.txt");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(Truncate, TowardZero) {
  EXPECT_EQ(truncate_centi(53.5511), 5355);
  EXPECT_EQ(truncate_centi(9.9937), 999);
  EXPECT_EQ(truncate_centi(9.999), 999);
  EXPECT_EQ(truncate_centi(-0.0512), -5);
  EXPECT_EQ(truncate_centi(-33.86785), -3386);
  EXPECT_EQ(truncate_centi(53.55), 5355);
  EXPECT_EQ(truncate_centi(0.29), 29);
  EXPECT_THROW(truncate_centi(std::nan("")), std::invalid_argument);
}

TEST(Truncate, Formatting) {
  EXPECT_EQ(format_centi(5355), "53.55");
  EXPECT_EQ(format_centi(990), "9.90");
  EXPECT_EQ(format_centi(-5), "-0.05");
  EXPECT_EQ(format_centi(0), "0.00");
  EXPECT_EQ(format_centi(-18000), "-180.00");
  EXPECT_EQ(parse_centi("-0.05"), -5);
  EXPECT_EQ(parse_centi("9.90"), 990);
  EXPECT_FALSE(parse_centi("9.9"));
  EXPECT_FALSE(parse_centi("9.999"));
  EXPECT_FALSE(parse_centi(".99"));
}

TEST(Truncate, Properties) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> deg(-180.0, 180.0);
  const std::regex two_decimals(R"(-?\d+\.\d\d)");
  for (int i = 0; i < 100000; ++i) {
    const double c = deg(rng);
    const double t = truncate2(c);
    EXPECT_LT(std::fabs(t - c), 0.01);
    EXPECT_LE(std::fabs(t), std::fabs(c) + 1e-9);
    EXPECT_EQ(truncate2(t), t);
    const auto s = format_centi(truncate_centi(c));
    ASSERT_TRUE(std::regex_match(s, two_decimals)) << s;
    EXPECT_EQ(parse_centi(s), truncate_centi(c));
  }
}

TEST(Classify, StatusFromDistinctCells) {
  const std::vector<RawHit> same_cell = {{53.5511, 9.9937}, {53.5512, 9.9938}};
  auto r = classify(Ssid("a"), same_cell);
  EXPECT_EQ(r.status, GeoStatus::Unique);
  ASSERT_EQ(r.locations.size(), 1u);
  EXPECT_EQ(r.locations[0].lat_str(), "53.55");
  EXPECT_EQ(r.locations[0].lon_str(), "9.99");
  EXPECT_EQ(r.raw_hit_count, 2u);

  r = classify(Ssid("a"), std::vector<RawHit>{});
  EXPECT_EQ(r.status, GeoStatus::NotFound);

  const std::vector<RawHit> two_cities = {{53.5511, 9.9937}, {48.1371, 11.5754}};
  r = classify(Ssid("a"), two_cities);
  EXPECT_EQ(r.status, GeoStatus::Multiple);
  EXPECT_EQ(r.locations.size(), 2u);
}

TEST(Classify, PureFunctionOfCellSet) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<RawHit> hits;
    for (int i = 0; i < 6; ++i) {
      hits.push_back({50.0 + static_cast<double>(rng() % 300) / 1000.0,
                      8.0 + static_cast<double>(rng() % 300) / 1000.0});
    }
    auto a = classify("x", hits);
    std::shuffle(hits.begin(), hits.end(), rng);
    hits.push_back(hits.front());
    auto b = classify("x", hits);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.locations, b.locations);
  }
}

TEST(Queryable, SpecialCharacters) {
  EXPECT_TRUE(is_queryable(Ssid("FRITZ!Box 7490")));
  EXPECT_TRUE(is_queryable(Ssid("my-net_5G (guest)")));
  EXPECT_FALSE(is_queryable(Ssid("")));
  EXPECT_FALSE(is_queryable(Ssid("100% Free WiFi")));
  EXPECT_FALSE(is_queryable(Ssid("caf\xc3\xa9")));
  EXPECT_FALSE(is_queryable(Ssid(std::string("a\0b", 3))));
  EXPECT_FALSE(is_queryable(Ssid("back\\slash")));
}

TEST(Summary, CountsAndPercentages) {
  EXPECT_EQ(summarize(std::vector<GeoResult>{}).total, 0u);
  EXPECT_DOUBLE_EQ(summarize(std::vector<GeoResult>{}).pct(0), 0.0);

  std::vector<GeoResult> results;
  auto add = [&](GeoStatus s, int n) {
    for (int i = 0; i < n; ++i) results.push_back({Ssid("x"), s, {}, 0});
  };
  add(GeoStatus::Unique, 334);
  add(GeoStatus::Multiple, 377);
  add(GeoStatus::NotFound, 729);
  add(GeoStatus::Unresolvable, 38);
  const auto s = summarize(results);
  EXPECT_EQ(s.total, 1478u);
  EXPECT_NEAR(s.pct(s.unique), 22.6, 0.1);
  EXPECT_NEAR(s.pct(s.multiple), 25.5, 0.1);
  EXPECT_NEAR(s.pct(s.not_found), 49.3, 0.1);
  EXPECT_NEAR(s.pct(s.unresolvable), 2.6, 0.1);
  EXPECT_EQ(s.unique + s.multiple + s.not_found + s.unresolvable, s.total);
}

TEST(Serialization, RoundTripAndNoRawCoordinates) {
  const std::vector<RawHit> hits = {{-0.0512, -78.4678}, {0.0512, -78.4678}};
  const auto r = classify(Ssid("Westend 3"), hits);
  const auto text = to_json(r).dump();
  EXPECT_EQ(text,
            R"({"ssid":"Westend 3","status":"multiple","locations":[{"lat":"-0.05","lon":"-78.46"},)"
            R"({"lat":"0.05","lon":"-78.46"}],"raw_hit_count":2})");
  EXPECT_EQ(text.find("4678"), std::string::npos);
  EXPECT_EQ(result_from_json(nlohmann::json::parse(text)), r);
}

TEST(ResponseParsing, Shapes) {
  EXPECT_EQ(parse_search_response(R"({"success":true,"results":[]})").size(), 0u);
  EXPECT_EQ(parse_search_response(R"({"results":[{"trilat":1.5,"trilong":2},{"x":1}]})").size(), 1u);
  EXPECT_THROW(parse_search_response("<html>"), GeoError);
  EXPECT_THROW(parse_search_response(R"({"success":false,"message":"too many queries"})"),
               GeoError);
}

TEST(MockServer, FixtureLookups) {
  auto server = MockServer::from_dir(kMockDir);
  GeoClient client(offline_config(*server));
  const auto unique = lookup(Ssid("harbour-cafe"), client);
  EXPECT_EQ(unique.status, GeoStatus::Unique);
  EXPECT_EQ(unique.locations[0].lat_str(), "53.55");
  EXPECT_EQ(unique.locations[0].lon_str(), "9.99");
  EXPECT_EQ(lookup(Ssid("no-such-net"), client).status, GeoStatus::NotFound);
  EXPECT_EQ(lookup(Ssid("FreeWifi"), client).status, GeoStatus::Multiple);

  const std::size_t before = server->request_count();
  EXPECT_EQ(lookup(Ssid("100% Free WiFi"), client).status, GeoStatus::Unresolvable);
  EXPECT_EQ(server->request_count(), before);
}

TEST(MockServer, BatchMatchesFixtureSummary) {
  auto server = MockServer::from_dir(kMockDir);
  GeoClient client(offline_config(*server));
  const auto ssids = fixture_ssids();
  ASSERT_EQ(ssids.size(), 10u);
  const auto batch = batch_lookup(ssids, client);
  EXPECT_TRUE(batch.errors.empty());
  const auto s = summarize(batch.results);

  std::ifstream in(kMockDir / "expected_summary.json");
  const auto expected = nlohmann::json::parse(in);
  EXPECT_EQ(s.total, expected["total"].get<std::size_t>());
  EXPECT_EQ(s.unique, expected["unique"].get<std::size_t>());
  EXPECT_EQ(s.multiple, expected["multiple"].get<std::size_t>());
  EXPECT_EQ(s.not_found, expected["not_found"].get<std::size_t>());
  EXPECT_EQ(s.unresolvable, expected["unresolvable"].get<std::size_t>());
}

TEST(MockServer, CacheServesRepeatRunsWithoutRequests) {
  TempDir dir("probelens_geo_cache_test");
  auto server = MockServer::from_dir(kMockDir);
  GeoClient client(offline_config(*server));
  GeoCache cache(dir.path);
  auto ssids = fixture_ssids();
  ssids.push_back(Ssid("harbour-cafe"));  // duplicate within a run

  const auto first = batch_lookup(ssids, client, &cache);
  const std::size_t requests = server->request_count();
  EXPECT_EQ(requests, 9u);

  const auto second = batch_lookup(ssids, client, &cache);
  EXPECT_EQ(server->request_count(), requests);
  EXPECT_EQ(second.cache_hits, 9u);
  ASSERT_EQ(first.results.size(), second.results.size());
  for (std::size_t i = 0; i < first.results.size(); ++i) {
    EXPECT_EQ(to_json(first.results[i]).dump(), to_json(second.results[i]).dump());
  }

  for (const auto& entry : std::filesystem::directory_iterator(dir.path)) {
    std::ifstream in(entry.path());
    const std::string body((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(body.find("5511"), std::string::npos);
    EXPECT_EQ(body.find("9937"), std::string::npos);
  }
}

TEST(MockServer, RateLimitBackoffThenSuccess) {
  MockServer server(nlohmann::json::parse(R"({"networks":{"busy":{"sequence":[
      {"status":429},{"status":429,"retry_after":2},[[10.123,20.456]]]}}})"));
  std::vector<std::chrono::milliseconds> waits;
  GeoClient client(offline_config(server), [&](auto d) { waits.push_back(d); });
  const auto r = lookup(Ssid("busy"), client);
  EXPECT_EQ(r.status, GeoStatus::Unique);
  ASSERT_EQ(waits.size(), 2u);
  EXPECT_EQ(waits[0], std::chrono::milliseconds(10));
  EXPECT_EQ(waits[1], std::chrono::milliseconds(2000));
  EXPECT_EQ(server.request_count(), 3u);
}

TEST(MockServer, RateLimitCapIsAnError) {
  MockServer server(nlohmann::json::parse(R"({"networks":{"busy":{"status":429}}})"));
  auto cfg = offline_config(server);
  cfg.max_retries = 2;
  GeoClient client(cfg, [](auto) {});
  try {
    lookup(Ssid("busy"), client);
    FAIL() << "expected GeoError";
  } catch (const GeoError& e) {
    EXPECT_EQ(e.kind(), GeoErrorKind::RateLimited);
  }
  EXPECT_EQ(server.request_count(), 3u);
}

TEST(MockServer, AuthFailureStopsBatch) {
  MockServer server(nlohmann::json::parse(R"({"token":"right","networks":{"a":[[1,2]]}})"));
  GeoClient client(offline_config(server, "wrong"));
  try {
    lookup(Ssid("a"), client);
    FAIL() << "expected GeoError";
  } catch (const GeoError& e) {
    EXPECT_EQ(e.kind(), GeoErrorKind::Auth);
    EXPECT_EQ(e.http_status(), 401);
  }
  const std::vector<Ssid> ssids = {Ssid("a"), Ssid("b"), Ssid("c"), Ssid("50%")};
  const std::size_t before = server.request_count();
  const auto batch = batch_lookup(ssids, client);
  EXPECT_EQ(server.request_count(), before + 1);
  EXPECT_EQ(batch.errors.size(), 3u);
  ASSERT_EQ(batch.results.size(), 1u);
  EXPECT_EQ(batch.results[0].status, GeoStatus::Unresolvable);

  GeoClient good(offline_config(server, "right"));
  EXPECT_EQ(lookup(Ssid("a"), good).status, GeoStatus::Unique);
}

TEST(MockServer, HttpErrorIsDistinctFromNotFound) {
  MockServer server(nlohmann::json::parse(R"({"networks":{"x":{"status":500,"body":"oops"}}})"));
  GeoClient client(offline_config(server));
  const std::vector<Ssid> ssids = {Ssid("x"), Ssid("y")};
  const auto batch = batch_lookup(ssids, client);
  ASSERT_EQ(batch.errors.size(), 1u);
  EXPECT_EQ(batch.errors[0].kind, GeoErrorKind::Http);
  ASSERT_EQ(batch.results.size(), 1u);
  EXPECT_EQ(batch.results[0].status, GeoStatus::NotFound);
}

TEST(Client, TransportFailure) {
  GeoConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.max_requests_per_s = 0;
  cfg.timeout = std::chrono::seconds(2);
  GeoClient client(cfg);
  try {
    client.search(Ssid("a"));
    FAIL() << "expected GeoError";
  } catch (const GeoError& e) {
    EXPECT_EQ(e.kind(), GeoErrorKind::Transport);
  }
}

TEST(Client, PacingSleepsBetweenRequests) {
  MockServer server(nlohmann::json::parse(R"({"networks":{}})"));
  auto cfg = offline_config(server);
  cfg.max_requests_per_s = 20;
  std::vector<std::chrono::milliseconds> waits;
  GeoClient client(cfg, [&](auto d) { waits.push_back(d); });
  client.search(Ssid("a"));
  client.search(Ssid("b"));
  ASSERT_EQ(waits.size(), 1u);
  EXPECT_GT(waits[0].count(), 0);
  EXPECT_LE(waits[0].count(), 50);
}
