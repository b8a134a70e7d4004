#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "probelens/burstflow.hpp"
#include "probelens/capture.hpp"
#include "probelens/cli/support.hpp"
#include "probelens/geoprobe.hpp"
#include "probelens/hashprobe.hpp"
#include "probelens/ssidlens.hpp"

namespace probelens::cli {

struct RunConfig {
  std::string subcommand;  // "ingest", "analyze", "geo", "protocol vectors", ...
  std::vector<std::string> inputs;
  std::string output;  // empty: stdout
  Format format = Format::Json;

  double window_s = burstflow::kDefaultWindowSeconds;
  double typo_threshold = ssidlens::kDefaultTypoThreshold;
  std::string names_dict;

  std::string cache_dir;
  std::string mock_dir;
  std::string api_url = "https://api.wigle.net";
  std::optional<double> rate;  // requests/s; default 1, or unlimited with --mock

  std::uint64_t seed = 1;
  bool redact = true;
  bool ack_raw_identifiers = false;
  std::size_t trunc_len = hashprobe::kFullDigestLen;

  // protocol
  bool vectors_generate = false;
  std::string vectors_file = "data/golden_vectors.json";
  std::size_t bench_n = 1'000'000;
  std::size_t ssid_len = 11;
  double match_fraction = 0.5;
  std::string dictionary;
  double avg_pkt_len = 147.0;
  double avg_ssid_len = 11.4;

  // synth
  std::size_t devices = 100;
  std::optional<double> target_share;
};

/// Range checks shared by all subcommands. Throws UsageError.
inline void validate(const RunConfig& c) {
  if (!(c.window_s > 0.0)) throw UsageError("--window must be > 0");
  if (!(c.typo_threshold >= 0.0 && c.typo_threshold < 1.0)) {
    throw UsageError("--typo-threshold must be in [0, 1)");
  }
  if (!hashprobe::valid_trunc_len(c.trunc_len)) throw UsageError("--trunc-len must be 16 or 32");
  if (!c.redact && !c.ack_raw_identifiers) {
    throw UsageError("--no-redact writes raw MAC addresses; confirm with --ack-raw-identifiers");
  }
  if (c.rate && *c.rate < 0.0) throw UsageError("--rate must be >= 0");
  if (c.subcommand == "protocol bench") {
    if (c.bench_n == 0) throw UsageError("--n must be at least 1");
    if (c.ssid_len == 0 || c.ssid_len > capture::Ssid::kMaxLength) {
      throw UsageError("--ssid-len must be in 1..32");
    }
    if (!(c.match_fraction >= 0.0 && c.match_fraction <= 1.0)) {
      throw UsageError("--match-fraction must be in [0, 1]");
    }
  }
  if (c.subcommand == "protocol overhead" && !(c.avg_pkt_len > 0.0)) {
    throw UsageError("--avg-pkt must be > 0");
  }
  if (c.target_share && !(*c.target_share > 0.0 && *c.target_share < 1.0)) {
    throw UsageError("--target-share must be in (0, 1)");
  }
}

inline void report_meta(const capture::CaptureMeta& m, std::ostream& err) {
  err << m.source << ": " << m.record_count << " probe requests";
  if (m.frames_examined) {
    err << " from " << m.frames_examined << " frames (" << m.parse_error_count << " malformed, "
        << m.ignored_count << " other frames, " << m.duplicate_count << " duplicates)";
  } else if (m.parse_error_count) {
    err << ", " << m.parse_error_count << " invalid lines";
  }
  err << '\n';
}

inline nlohmann::ordered_json meta_json(const capture::CaptureMeta& m) {
  return {{"source", m.source},
          {"frames_examined", m.frames_examined},
          {"record_count", m.record_count},
          {"parse_error_count", m.parse_error_count},
          {"ignored_count", m.ignored_count},
          {"duplicate_count", m.duplicate_count}};
}

// ---- ingest ------------------------------------------------------------------

inline int cmd_ingest(const RunConfig& c, Streams s) {
  const auto cap = capture::load_capture(c.inputs.at(0));
  report_meta(cap.meta, s.err);
  Output out(c.output, s.out);
  capture::write_jsonl(cap.records, out.stream());
  return kExitOk;
}

// ---- analyze -----------------------------------------------------------------

constexpr std::string_view to_string(burstflow::DeviceKind k) {
  switch (k) {
    case burstflow::DeviceKind::SingleMac: return "single_mac";
    case burstflow::DeviceKind::Randomizing: return "randomizing";
    case burstflow::DeviceKind::Leaking: return "leaking";
    case burstflow::DeviceKind::Other: return "other";
  }
  return "other";
}

inline nlohmann::ordered_json analyze_report(const capture::Capture& cap, const RunConfig& c,
                                             const ssidlens::NameDictionary& names) {
  const auto bursts = burstflow::group_bursts(cap.records, c.window_s);
  const auto clustering = burstflow::cluster_by_pnl(bursts);
  const auto stats = burstflow::fleet_stats(cap.records, bursts, clustering);
  const auto analysis = ssidlens::analyze_clusters(clustering.clusters, names, c.typo_threshold);

  nlohmann::ordered_json j;
  j["capture"] = meta_json(cap.meta);
  j["config"] = {{"window_s", c.window_s},
                 {"typo_threshold", c.typo_threshold},
                 {"name_dictionary_entries", names.size()},
                 {"redacted", c.redact}};
  j["fleet"] = burstflow::to_json(stats);

  auto clusters = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < clustering.clusters.size(); ++i) {
    const auto& cl = clustering.clusters[i];
    std::set<std::string> macs;
    std::size_t probes = 0;
    for (const auto& m : cl.macs()) macs.insert(mac_text(m, c.redact));
    for (const auto& b : cl.bursts) probes += b.records.size();
    auto pnl = nlohmann::ordered_json::array();
    for (const auto& ssid : cl.pnl.ssids) pnl.push_back(ssid_value(ssid));
    clusters.push_back({{"id", i},
                        {"pnl", pnl},
                        {"ambiguous", cl.ambiguous()},
                        {"device_kind", std::string(to_string(burstflow::classify_device(cl)))},
                        {"burst_count", cl.bursts.size()},
                        {"probe_count", probes},
                        {"mac_count", cl.macs().size()},
                        {"macs", macs}});
  }
  j["clusters"] = clusters;

  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : analysis.verdicts) verdicts.push_back(ssidlens::to_json(v));
  j["verdicts"] = verdicts;

  auto groups = nlohmann::ordered_json::array();
  for (const auto& g : analysis.typo_groups) {
    auto witnesses = nlohmann::ordered_json::array();
    for (const auto& w : g.group.witness_pairs) {
      witnesses.push_back({{"a", text_value(w.a)}, {"b", text_value(w.b)}, {"distance", w.distance}});
    }
    auto members = nlohmann::ordered_json::array();
    for (const auto& m : g.group.members) members.push_back(text_value(m));
    groups.push_back({{"id", g.group_id},
                      {"cluster", g.cluster_index},
                      {"members", members},
                      {"witness_pairs", witnesses}});
  }
  j["typo_groups"] = groups;
  j["ssids_in_typo_groups"] = analysis.ssids_in_typo_groups;

  auto guarded = nlohmann::ordered_json::array();
  for (const auto& w : analysis.guarded_pairs) {
    guarded.push_back({{"a", text_value(w.a)}, {"b", text_value(w.b)}, {"distance", w.distance}});
  }
  j["model_number_pairs"] = guarded;

  const auto& co = analysis.cooccurrence;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : co.entries) {
    entries.push_back({{"cluster", e.cluster_index},
                       {"ssid", ssid_value(capture::Ssid(e.ssid))},
                       {"pnl_size", e.pnl_size},
                       {"sole_entry", e.sole_entry}});
  }
  j["password_cooccurrence"] = {{"password_entries", co.password_entries},
                                {"sole_entries", co.sole_entries},
                                {"sole_entry_pct", co.sole_entry_pct},
                                {"entries", entries}};
  j["notes"] = {"KeywordPassword is a substring heuristic and over-triggers on ordinary words"};
  return j;
}

inline void write_analyze_csv(const nlohmann::ordered_json& report,
                              const burstflow::FleetStats& stats, std::ostream& out) {
  out << burstflow::to_csv(stats) << '\n';
  out << "ssid,flags,typo_group\n";
  for (const auto& v : report["verdicts"]) {
    std::string flags;
    for (const auto& f : v["flags"]) flags += (flags.empty() ? "" : "|") + f.get<std::string>();
    const std::string ssid = v.contains("ssid") ? v["ssid"].get<std::string>()
                                                : value_text(v);
    out << csv_field(ssid) << ',' << csv_field(flags) << ','
        << (v.contains("typo_group") ? v["typo_group"].dump() : "") << '\n';
  }
  out << '\n' << "typo_group,cluster,members\n";
  for (const auto& g : report["typo_groups"]) {
    std::string members;
    for (const auto& m : g["members"]) members += (members.empty() ? "" : "|") + value_text(m);
    out << g["id"].dump() << ',' << g["cluster"].dump() << ',' << csv_field(members) << '\n';
  }
  const auto& co = report["password_cooccurrence"];
  out << '\n' << "password_entries,sole_entries,sole_entry_pct\n"
      << co["password_entries"].dump() << ',' << co["sole_entries"].dump() << ','
      << co["sole_entry_pct"].dump() << '\n';
}

inline int cmd_analyze(const RunConfig& c, Streams s) {
  const auto cap = capture::load_capture(c.inputs.at(0));
  report_meta(cap.meta, s.err);
  ssidlens::NameDictionary names;
  if (!c.names_dict.empty()) names = ssidlens::NameDictionary::load(c.names_dict, s.err);
  const auto report = analyze_report(cap, c, names);

  Output out(c.output, s.out);
  switch (c.format) {
    case Format::Json: out.stream() << report.dump(2) << '\n'; break;
    case Format::Text: render_text(report, out.stream()); break;
    case Format::Csv:
      write_analyze_csv(report, burstflow::fleet_stats(cap.records, c.window_s), out.stream());
      break;
  }
  return kExitOk;
}

// ---- geo -----------------------------------------------------------------------

inline int cmd_geo(const RunConfig& c, const Env& env, Streams s) {
  std::vector<capture::Ssid> ssids;
  for (const auto& line : read_lines(c.inputs.at(0))) ssids.push_back(ssid_from_line(line));

  geoprobe::GeoConfig gc;
  std::unique_ptr<geoprobe::MockServer> mock;
  const auto token = env.get(geoprobe::kTokenEnvVar);
  if (!c.mock_dir.empty()) {
    try {
      mock = geoprobe::MockServer::from_dir(c.mock_dir);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    gc.base_url = mock->base_url();
    gc.token = token.value_or("offline");
    gc.max_requests_per_s = c.rate.value_or(0.0);
  } else {
    if (!token) {
      throw ConfigError(std::string("online lookups need an API credential in ") +
                        geoprobe::kTokenEnvVar + " (or use --mock <dir>)");
    }
    gc.base_url = c.api_url;
    gc.token = *token;
    gc.max_requests_per_s = c.rate.value_or(1.0);
  }

  std::optional<geoprobe::GeoClient> client;
  try {
    client.emplace(gc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::optional<geoprobe::GeoCache> cache;
  if (!c.cache_dir.empty()) cache.emplace(c.cache_dir);

  const auto batch = geoprobe::batch_lookup(ssids, *client, cache ? &*cache : nullptr);
  const auto summary = geoprobe::summarize(batch.results);

  nlohmann::ordered_json j;
  j["summary"] = geoprobe::to_json(summary);
  auto results = nlohmann::ordered_json::array();
  for (const auto& r : batch.results) results.push_back(geoprobe::to_json(r));
  j["results"] = results;
  auto errors = nlohmann::ordered_json::array();
  for (const auto& e : batch.errors) errors.push_back(geoprobe::to_json(e));
  j["errors"] = errors;

  s.err << "geo: " << ssids.size() << " SSIDs, " << client->requests_sent() << " requests, "
        << batch.cache_hits << " cache hits, " << batch.unresolvable_skipped
        << " unresolvable (not sent), " << batch.errors.size() << " failures\n";

  Output out(c.output, s.out);
  switch (c.format) {
    case Format::Json: out.stream() << j.dump(2) << '\n'; break;
    case Format::Text: render_text(j, out.stream()); break;
    case Format::Csv:
      out.stream() << "ssid,status,locations,raw_hit_count\n";
      for (const auto& r : batch.results) {
        std::string locs;
        for (const auto& l : r.locations) {
          locs += (locs.empty() ? "" : "|") + l.lat_str() + " " + l.lon_str();
        }
        out.stream() << csv_field(ssid_text(r.ssid)) << ',' << geoprobe::to_string(r.status) << ','
                     << csv_field(locs) << ',' << r.raw_hit_count << '\n';
      }
      break;
  }

  for (const auto& e : batch.errors) {
    if (e.kind == geoprobe::GeoErrorKind::Auth) return kExitConfigError;
  }
  return kExitOk;
}

// ---- protocol --------------------------------------------------------------------

inline void write_json(const nlohmann::ordered_json& j, Format f, std::ostream& out) {
  if (f == Format::Text) {
    render_text(j, out);
  } else {
    out << j.dump(2) << '\n';
  }
}

inline int cmd_protocol_vectors(const RunConfig& c, Streams s) {
  std::vector<hashprobe::GoldenVector> vectors;
  try {
    vectors = hashprobe::load_vectors(c.vectors_file);
  } catch (const std::runtime_error& e) {
    throw capture::FormatError(e.what());
  } catch (const std::exception& e) {
    throw capture::FormatError(c.vectors_file + ": " + e.what());
  }
  if (c.vectors_generate) {
    Output out(c.output, s.out);
    out.stream() << hashprobe::regenerate_vectors(vectors).dump(2, ' ', false) << '\n';
    return kExitOk;
  }
  const auto bad = hashprobe::check_vectors(vectors);
  for (const auto& b : bad) {
    s.err << "vector " << b.index << ": expected " << b.expected_hex << ", got " << b.actual_hex
          << '\n';
  }
  s.out << (bad.empty() ? "ok" : "FAILED") << ": " << vectors.size() - bad.size() << "/"
        << vectors.size() << " vectors match\n";
  return bad.empty() ? kExitOk : kExitFailure;
}

/// Deterministic fields go to the primary stream, timings to `err`.
inline int cmd_protocol_bench(const RunConfig& c, Streams s) {
  const auto r = hashprobe::bench(c.bench_n, c.ssid_len, c.match_fraction, c.seed, c.trunc_len);
  nlohmann::ordered_json primary = {{"n_ops", r.n_ops},
                                    {"ssid_len", r.ssid_len},
                                    {"trunc_len", r.trunc_len},
                                    {"match_fraction", r.match_fraction},
                                    {"matches", r.matches},
                                    {"verdict_agreement", r.verdict_agreement}};
  nlohmann::ordered_json timings = {{"mean_time_hashed_us", r.mean_time_hashed_us},
                                    {"mean_time_baseline_us", r.mean_time_baseline_us},
                                    {"overhead_pct", r.overhead_pct},
                                    {"hashed_ops_per_s", r.hashed_ops_per_s}};
  Output out(c.output, s.out);
  write_json(primary, c.format, out.stream());
  s.err << "timings: " << timings.dump() << '\n';
  return r.verdict_agreement ? kExitOk : kExitFailure;
}

inline int cmd_protocol_simulate(const RunConfig& c, Streams s) {
  const auto cap = capture::load_capture(c.inputs.at(0));
  report_meta(cap.meta, s.err);
  std::vector<capture::Ssid> dictionary;
  if (!c.dictionary.empty()) {
    std::vector<std::string> lines;
    try {
      lines = read_lines(c.dictionary);
    } catch (const capture::FormatError& e) {
      throw ConfigError(e.what());
    }
    for (const auto& l : lines) dictionary.push_back(ssid_from_line(l));
  }
  hashprobe::SimulationReport r;
  try {
    r = hashprobe::simulate(cap.records, dictionary, c.trunc_len);
  } catch (const std::invalid_argument& e) {
    throw capture::FormatError(cap.meta.source + ": " + e.what());
  }
  Output out(c.output, s.out);
  write_json(hashprobe::to_json(r), c.format, out.stream());
  return kExitOk;
}

inline int cmd_protocol_overhead(const RunConfig& c, Streams s) {
  const auto r = hashprobe::bandwidth_overhead(c.avg_pkt_len, c.avg_ssid_len, c.trunc_len);
  Output out(c.output, s.out);
  write_json(hashprobe::to_json(r), c.format, out.stream());
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------------

inline int cmd_synth(const RunConfig& c, Streams s) {
  capture::FleetParams p;
  p.device_count = c.devices;
  p.target_ssid_share = c.target_share;
  const auto records = capture::synth_capture(capture::make_fleet_profile(p, c.seed), c.seed);
  Output out(c.output, s.out);
  capture::write_jsonl(records, out.stream());
  s.err << "synth: " << records.size() << " probe requests from " << c.devices
        << " devices (seed " << c.seed << ")\n";
  return kExitOk;
}

}  // namespace probelens::cli
