#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "probelens/cli/app.hpp"

using namespace probelens;
using probelens::cli::Env;

namespace {

std::string fixture(const std::string& name) {
  return std::string(PROBELENS_FIXTURE_DIR) + "/" + name;
}

std::string data_file(const std::string& name) {
  return std::string(PROBELENS_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Env no_env() {
  return {[](const std::string&) -> std::optional<std::string> { return std::nullopt; }};
}

Result run(const std::vector<std::string>& args, const Env& env = no_env()) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, {out, err}, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("probelens_cli_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(CliIngest, GoldenPcap) {
  const auto r = run({"ingest", fixture("golden_3frames.pcap")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 3u);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  const auto first = nlohmann::json::parse(line);
  EXPECT_EQ(first["mac"], "02:11:22:33:44:55");
  EXPECT_EQ(first["ssid"], "");
  EXPECT_EQ(first["seq"], 100);
}

TEST(CliIngest, PcapAndPcapngAgree) {
  EXPECT_EQ(run({"ingest", fixture("golden_3frames.pcap")}).out,
            run({"ingest", fixture("golden_3frames.pcapng")}).out);
}

TEST(CliIngest, EmptyPcapIsNotAnError) {
  const auto r = run({"ingest", fixture("empty.pcap")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST(CliIngest, CorruptHeaderIsFormatError) {
  const auto r = run({"ingest", fixture("corrupt_header.pcap")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("format error"), std::string::npos);
}

TEST(CliIngest, MissingFileIsFormatError) {
  EXPECT_EQ(run({"ingest", fixture("does_not_exist.pcap")}).code, 2);
}

TEST(CliIngest, OutputFile) {
  const auto dir = temp_dir("ingest");
  const auto path = (dir / "out.jsonl").string();
  const auto r = run({"ingest", fixture("golden_3frames.pcap"), "-o", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(count_lines(slurp(path)), 3u);
}

TEST(CliUsage, Errors) {
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"analyze"}).code, 64);
  EXPECT_EQ(run({"analyze", fixture("synth_small.jsonl"), "--format", "xml"}).code, 64);
  EXPECT_EQ(run({"analyze", fixture("synth_small.jsonl"), "--window", "0"}).code, 64);
  EXPECT_EQ(run({"analyze", fixture("synth_small.jsonl"), "--typo-threshold", "1"}).code, 64);
  EXPECT_EQ(run({"analyze", fixture("synth_small.jsonl"), "--trunc-len", "20"}).code, 64);
  EXPECT_EQ(run({"protocol"}).code, 64);
  EXPECT_EQ(run({"protocol", "vectors", "--check", "--generate"}).code, 64);
}

TEST(CliUsage, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("analyze"), std::string::npos);
}

TEST(CliAnalyze, MatchesFrozenReport) {
  const auto r = run({"analyze", fixture("synth_small.jsonl"), "--names-dict", fixture("names.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto actual = nlohmann::ordered_json::parse(r.out);
  actual["capture"]["source"] = "synth_small.jsonl";
  const auto expected = nlohmann::ordered_json::parse(slurp(fixture("analyze_golden.json")));
  EXPECT_EQ(actual, expected);
}

TEST(CliAnalyze, Deterministic) {
  for (const char* f : {"json", "csv", "text"}) {
    const std::vector<std::string> args = {"analyze", fixture("synth_small.jsonl"), "--format", f};
    const auto a = run(args);
    const auto b = run(args);
    ASSERT_EQ(a.code, 0) << f;
    EXPECT_FALSE(a.out.empty()) << f;
    EXPECT_EQ(a.out, b.out) << f;
  }
}

TEST(CliAnalyze, NoSsidProbesGiveZeroShare) {
  const auto dir = temp_dir("wildcard");
  const auto path = (dir / "wild.jsonl").string();
  {
    std::ofstream out(path);
    for (int i = 0; i < 5; ++i) {
      out << R"({"t":)" << i * 0.5 << R"(,"mac":"02:00:00:00:00:01","seq":)" << i
          << R"(,"ssid":"","ch":1,"rssi":-50,"len":60})" << '\n';
    }
  }
  const auto r = run({"analyze", path});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["fleet"]["probes_with_ssid"], 0);
  EXPECT_DOUBLE_EQ(j["fleet"]["probes_with_ssid_pct"].get<double>(), 0.0);
  EXPECT_TRUE(j["verdicts"].empty());
  EXPECT_TRUE(j["typo_groups"].empty());
}

TEST(CliAnalyze, ZeroThresholdDisablesTypoGroups) {
  const auto r = run({"analyze", fixture("synth_small.jsonl"), "--typo-threshold", "0"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["typo_groups"].empty());
  EXPECT_EQ(j["ssids_in_typo_groups"], 0);
  for (const auto& v : j["verdicts"]) {
    EXPECT_FALSE(v.contains("typo_group"));
  }
}

TEST(CliAnalyze, RedactedByDefault) {
  const auto r = run({"analyze", fixture("synth_small.jsonl")});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_FALSE(j["clusters"].empty());
  for (const auto& c : j["clusters"]) {
    for (const auto& m : c["macs"]) {
      const auto s = m.get<std::string>();
      EXPECT_EQ(s.substr(8), ":xx:xx:xx") << s;
    }
  }
  // No full capture MAC anywhere in the report, in any format.
  std::vector<std::string> macs;
  std::istringstream in(slurp(fixture("synth_small.jsonl")));
  for (std::string line; std::getline(in, line);) {
    macs.push_back(nlohmann::json::parse(line)["mac"].get<std::string>());
  }
  for (const char* f : {"json", "csv", "text"}) {
    const auto out = run({"analyze", fixture("synth_small.jsonl"), "--format", f}).out;
    for (const auto& m : macs) EXPECT_EQ(out.find(m), std::string::npos) << f << " leaks " << m;
  }
}

TEST(CliAnalyze, NoRedactNeedsAcknowledgment) {
  EXPECT_EQ(run({"analyze", fixture("synth_small.jsonl"), "--no-redact"}).code, 64);
  const auto r = run(
      {"analyze", fixture("synth_small.jsonl"), "--no-redact", "--ack-raw-identifiers"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["config"]["redacted"], false);
  EXPECT_EQ(j["clusters"][0]["macs"][0].get<std::string>().find("xx"), std::string::npos);
}

TEST(CliAnalyze, MissingNamesDictWarns) {
  const auto r = run({"analyze", fixture("synth_small.jsonl"), "--names-dict",
                      fixture("no_such_names.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(CliGeo, MockFixtureSummary) {
  const auto r = run({"geo", fixture("geo_mock/ssids.txt"), "--mock", fixture("geo_mock")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto expected = nlohmann::json::parse(slurp(fixture("geo_mock/expected_summary.json")));
  for (const auto& [k, v] : expected.items()) EXPECT_EQ(j["summary"][k], v) << k;
  EXPECT_TRUE(j["errors"].empty());
  for (const auto& res : j["results"]) {
    for (const auto& loc : res["locations"]) {
      for (const char* axis : {"lat", "lon"}) {
        const auto s = loc[axis].get<std::string>();
        const auto dot = s.find('.');
        ASSERT_NE(dot, std::string::npos) << s;
        EXPECT_EQ(s.size() - dot - 1, 2u) << s;
      }
    }
  }
}

TEST(CliGeo, CacheMakesRerunIdentical) {
  const auto cache = temp_dir("geo_cache");
  const std::vector<std::string> args = {"geo", fixture("geo_mock/ssids.txt"), "--mock",
                                         fixture("geo_mock"), "--cache-dir", cache.string()};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(b.err.find(" 0 requests"), std::string::npos) << b.err;
}

TEST(CliGeo, OnlineWithoutTokenIsConfigError) {
  const auto r = run({"geo", fixture("geo_mock/ssids.txt")});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("GEO_API_TOKEN"), std::string::npos);
}

TEST(CliGeo, EmptyListGivesZeroSummary) {
  const auto dir = temp_dir("geo_empty");
  const auto path = (dir / "none.txt").string();
  std::ofstream(path).close();
  const auto r = run({"geo", path, "--mock", fixture("geo_mock")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["summary"]["total"], 0);
  EXPECT_EQ(j["summary"]["unique"], 0);
  EXPECT_TRUE(j["results"].empty());
}

TEST(CliGeo, CsvHasOneRowPerSsid) {
  const auto r = run({"geo", fixture("geo_mock/ssids.txt"), "--mock", fixture("geo_mock"),
                      "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 11u);
}

TEST(CliProtocol, VectorsCheck) {
  const auto r = run({"protocol", "vectors", "--check", "--file", data_file("golden_vectors.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("ok: ", 0), 0u) << r.out;
}

TEST(CliProtocol, VectorsGenerateReproducesFile) {
  const auto r =
      run({"protocol", "vectors", "--generate", "--file", data_file("golden_vectors.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::ordered_json::parse(r.out),
            nlohmann::ordered_json::parse(slurp(data_file("golden_vectors.json"))));
}

TEST(CliProtocol, TamperedVectorsFail) {
  auto j = nlohmann::ordered_json::parse(slurp(data_file("golden_vectors.json")));
  auto hex = j[0]["digest_hex"].get<std::string>();
  hex[0] = hex[0] == '0' ? '1' : '0';
  j[0]["digest_hex"] = hex;
  const auto dir = temp_dir("vectors");
  const auto path = (dir / "bad.json").string();
  std::ofstream(path) << j.dump(2);
  const auto r = run({"protocol", "vectors", "--file", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("vector 0"), std::string::npos);
}

TEST(CliProtocol, MalformedVectorsFileIsFormatError) {
  EXPECT_EQ(run({"protocol", "vectors", "--file", fixture("synth_small.jsonl")}).code, 2);
}

TEST(CliProtocol, SimulateOverhead) {
  const auto r = run({"protocol", "simulate", fixture("overhead_147.jsonl"), "--dictionary",
                      fixture("overhead_dictionary.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["overhead"]["pct_increase"].get<double>(), 14.0, 0.05);
  EXPECT_DOUBLE_EQ(j["recovery_pct"].get<double>(), 100.0);
}

TEST(CliProtocol, SimulateErrors) {
  EXPECT_EQ(run({"protocol", "simulate", fixture("overhead_147.jsonl"), "--dictionary",
                 fixture("missing_dictionary.txt")})
                .code,
            3);
  EXPECT_EQ(run({"protocol", "simulate", fixture("golden_3frames.pcap")}).code, 0);
  EXPECT_EQ(run({"protocol", "simulate", fixture("empty.pcap")}).code, 2);
}

TEST(CliProtocol, BenchArguments) {
  EXPECT_EQ(run({"protocol", "bench", "--n", "0"}).code, 64);
  EXPECT_EQ(run({"protocol", "bench", "--ssid-len", "33"}).code, 64);
  EXPECT_EQ(run({"protocol", "bench", "--match-fraction", "1.5"}).code, 64);
}

TEST(CliProtocol, BenchPrimaryOutputIsDeterministic) {
  const std::vector<std::string> args = {"protocol", "bench", "--n", "2000", "--seed", "9"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("_us"), std::string::npos);
  EXPECT_NE(a.err.find("timings:"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(a.out)["verdict_agreement"], true);
}

TEST(CliProtocol, OverheadArithmetic) {
  const auto r = run({"protocol", "overhead", "--trunc-len", "16"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["new_avg_pkt_len_with_ssid"].get<double>(), 151.6, 1e-9);
  EXPECT_NEAR(j["pct_increase"].get<double>(), 3.13, 0.01);
  EXPECT_EQ(run({"protocol", "overhead", "--avg-pkt", "0"}).code, 64);
}

TEST(CliSynth, SeedDeterminesOutput) {
  const auto a = run({"synth", "--devices", "10", "--seed", "5"});
  const auto b = run({"synth", "--devices", "10", "--seed", "5"});
  const auto c = run({"synth", "--devices", "10", "--seed", "6"});
  ASSERT_EQ(a.code, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(run({"synth", "--target-share", "1.5"}).code, 64);
}
