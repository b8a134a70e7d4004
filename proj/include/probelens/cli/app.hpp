#pragma once

#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probelens/cli/commands.hpp"

namespace probelens::cli {

namespace detail {

inline void add_output_options(CLI::App& app, RunConfig& c, std::string& format) {
  app.add_option("-o,--output", c.output, "Output file (default: stdout)");
  app.add_option("--format", format, "json, csv or text")->capture_default_str();
}

}  // namespace detail

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns the process exit code.
inline int run(const std::vector<std::string>& args, Streams s, const Env& env) {
  RunConfig c;
  std::string format = "json";

  CLI::App app{"Probe-request privacy analysis", "probelens"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", c.seed, "Seed for synthetic data and benchmarks")->capture_default_str();
  app.add_flag("--redact,!--no-redact", c.redact, "Redact MAC addresses in reports (default on)");
  app.add_flag("--ack-raw-identifiers", c.ack_raw_identifiers,
               "Confirm that raw identifiers may be written with --no-redact");
  app.add_option("--trunc-len", c.trunc_len, "Digest length in octets: 16 or 32")
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Parse a capture into JSONL probe records");
  ingest->add_option("capture", c.inputs, "pcap, pcapng or JSONL file")->required();
  detail::add_output_options(*ingest, c, format);

  auto* analyze = app.add_subcommand("analyze", "Burst, cluster and SSID analysis");
  analyze->add_option("capture", c.inputs, "pcap, pcapng or JSONL file")->required();
  analyze->add_option("--window", c.window_s, "Burst gap in seconds")->capture_default_str();
  analyze->add_option("--typo-threshold", c.typo_threshold,
                      "Normalized edit distance for typo groups; 0 disables")
      ->capture_default_str();
  analyze->add_option("--names-dict", c.names_dict, "Personal-name dictionary, one per line");
  detail::add_output_options(*analyze, c, format);

  auto* geo = app.add_subcommand("geo", "Look up SSIDs in a wardriving database");
  geo->add_option("ssids", c.inputs, "SSID list, one per line (b64:<...> for raw octets)")
      ->required();
  geo->add_option("--cache-dir", c.cache_dir, "Response cache directory");
  geo->add_option("--mock", c.mock_dir, "Serve lookups from <dir>/responses.json locally");
  geo->add_option("--api-url", c.api_url, "Service base URL")->capture_default_str();
  geo->add_option("--rate", c.rate, "Max requests per second; 0 disables pacing");
  detail::add_output_options(*geo, c, format);

  auto* protocol = app.add_subcommand("protocol", "Salted-hash probe scheme");
  protocol->require_subcommand(1);

  auto* vectors = protocol->add_subcommand("vectors", "Check or regenerate golden vectors");
  auto* check = vectors->add_flag("--check", "Recompute and compare (default)");
  vectors->add_flag("--generate", c.vectors_generate, "Print regenerated vectors")->excludes(check);
  vectors->add_option("--file", c.vectors_file, "Golden vector file")->capture_default_str();
  detail::add_output_options(*vectors, c, format);

  auto* bench = protocol->add_subcommand("bench", "Time AP-side verification");
  bench->add_option("--n", c.bench_n, "Verifications per arm")->capture_default_str();
  bench->add_option("--ssid-len", c.ssid_len, "SSID length in octets")->capture_default_str();
  bench->add_option("--match-fraction", c.match_fraction, "Share of matching probes")
      ->capture_default_str();
  detail::add_output_options(*bench, c, format);

  auto* simulate = protocol->add_subcommand("simulate", "Replay a capture with hashed probes");
  simulate->add_option("capture", c.inputs, "pcap, pcapng or JSONL file")->required();
  simulate->add_option("--dictionary", c.dictionary, "Candidate SSIDs for the attacker");
  detail::add_output_options(*simulate, c, format);

  auto* overhead = protocol->add_subcommand("overhead", "Bandwidth overhead arithmetic");
  overhead->add_option("--avg-pkt", c.avg_pkt_len, "Mean probe length in octets")
      ->capture_default_str();
  overhead->add_option("--avg-ssid", c.avg_ssid_len, "Mean SSID length in octets")
      ->capture_default_str();
  detail::add_output_options(*overhead, c, format);

  auto* synth = app.add_subcommand("synth", "Write a synthetic capture as JSONL");
  synth->add_option("--devices", c.devices, "Number of devices")->capture_default_str();
  synth->add_option("--target-share", c.target_share, "Share of devices sending SSIDs");
  detail::add_output_options(*synth, c, format);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("probelens");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, s.out, s.err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, s.out, s.err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, s.out, s.err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, s.out, s.err);
    return kExitUsageError;
  }

  try {
    c.format = parse_format(format);
    if (ingest->parsed()) c.subcommand = "ingest";
    if (analyze->parsed()) c.subcommand = "analyze";
    if (geo->parsed()) c.subcommand = "geo";
    if (vectors->parsed()) c.subcommand = "protocol vectors";
    if (bench->parsed()) c.subcommand = "protocol bench";
    if (simulate->parsed()) c.subcommand = "protocol simulate";
    if (overhead->parsed()) c.subcommand = "protocol overhead";
    if (synth->parsed()) c.subcommand = "synth";
    validate(c);

    if (c.subcommand == "ingest") return cmd_ingest(c, s);
    if (c.subcommand == "analyze") return cmd_analyze(c, s);
    if (c.subcommand == "geo") return cmd_geo(c, env, s);
    if (c.subcommand == "protocol vectors") return cmd_protocol_vectors(c, s);
    if (c.subcommand == "protocol bench") return cmd_protocol_bench(c, s);
    if (c.subcommand == "protocol simulate") return cmd_protocol_simulate(c, s);
    if (c.subcommand == "protocol overhead") return cmd_protocol_overhead(c, s);
    if (c.subcommand == "synth") return cmd_synth(c, s);
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    s.err << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const ConfigError& e) {
    s.err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const capture::FormatError& e) {
    s.err << "format error: " << e.what() << '\n';
    return kExitFormatError;
  } catch (const std::exception& e) {
    s.err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace probelens::cli
