#pragma once

// Attack cost, salt entropy, bandwidth and computational overhead of the
// salted-hash scheme.

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "probelens/capture/synth.hpp"
#include "probelens/hashprobe/scheme.hpp"

namespace probelens::hashprobe {

// ---- attacker -------------------------------------------------------------

struct AttackResult {
  std::map<std::size_t, Ssid> recovered;  // observation index -> SSID
  std::uint64_t hash_count = 0;

  double recovery_pct(std::size_t observed) const {
    return observed ? 100.0 * static_cast<double>(recovered.size()) /
                          static_cast<double>(observed)
                    : 0.0;
  }
};

/// Dictionary attack with each probe's own salt. Nothing carries over
/// between probes, so the cost is one hash per (probe, candidate) tried;
/// the search for a probe stops at its first match. Wildcard entries are
/// skipped.
inline AttackResult attacker_brute_force(std::span<const HashedProbe> observed,
                                         std::span<const Ssid> dictionary) {
  AttackResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const auto& p = observed[i];
    for (const auto& candidate : dictionary) {
      if (candidate.is_wildcard()) continue;
      ++r.hash_count;
      if (ap_verify(p, candidate)) {
        r.recovered.emplace(i, candidate);
        break;
      }
    }
  }
  return r;
}

// ---- salt entropy -----------------------------------------------------------

struct SaltEntropy {
  int mac_bits = 24;
  int sn_bits = 12;
  int total_bits = 36;
};

/// Lower estimate: only the MAC bits assumed random count (24 for the NIC
/// part of a vendor-prefixed address, up to 46 for a fully random local
/// unicast MAC), plus the 12-bit sequence number.
inline SaltEntropy salt_entropy(int assumed_mac_bits = 24) {
  if (assumed_mac_bits < 0 || assumed_mac_bits > 48) {
    throw std::invalid_argument("assumed_mac_bits must be in [0, 48]");
  }
  return {assumed_mac_bits, 12, assumed_mac_bits + 12};
}

/// Birthday approximation of colliding pairs among n uniform draws from
/// 2^bits values.
inline double birthday_expected_pairs(std::uint64_t n, int bits) {
  const double space = std::ldexp(1.0, bits);
  const double dn = static_cast<double>(n);
  return dn * (dn - 1.0) / (2.0 * space);
}

/// Exact expectation of draws that repeat an earlier value.
inline double expected_repeats(std::uint64_t n, int bits) {
  const double space = std::ldexp(1.0, bits);
  const double dn = static_cast<double>(n);
  return dn + space * std::expm1(dn * std::log1p(-1.0 / space));
}

/// Draws n salts (mac_bits random MAC bits, 12-bit SN) and counts draws
/// whose salt was already seen.
inline std::uint64_t count_repeated_salts(std::uint64_t n, int mac_bits, std::uint64_t seed) {
  const auto e = salt_entropy(mac_bits);
  if (e.total_bits > 63) throw std::invalid_argument("salt space too large to sample");
  capture::SynthRng rng(seed);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(n));
  std::uint64_t repeats = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t mac = rng.below(std::uint64_t{1} << e.mac_bits);
    const std::uint64_t sn = rng.below(std::uint64_t{1} << e.sn_bits);
    if (!seen.insert(mac << e.sn_bits | sn).second) ++repeats;
  }
  return repeats;
}

// ---- bandwidth ---------------------------------------------------------------

struct OverheadReport {
  std::optional<double> avg_pkt_len_all;
  double avg_pkt_len_with_ssid = 0.0;
  double avg_ssid_len = 0.0;
  std::size_t hash_len = kFullDigestLen;
  double new_avg_pkt_len_with_ssid = 0.0;
  double pct_increase = 0.0;
};

inline OverheadReport bandwidth_overhead(double avg_pkt_with_ssid, double avg_ssid_len,
                                         std::size_t hash_len) {
  if (!(avg_pkt_with_ssid > 0.0)) throw std::invalid_argument("average packet length must be > 0");
  OverheadReport r;
  r.avg_pkt_len_with_ssid = avg_pkt_with_ssid;
  r.avg_ssid_len = avg_ssid_len;
  r.hash_len = hash_len;
  r.new_avg_pkt_len_with_ssid = avg_pkt_with_ssid + (static_cast<double>(hash_len) - avg_ssid_len);
  r.pct_increase =
      100.0 * (r.new_avg_pkt_len_with_ssid - avg_pkt_with_ssid) / avg_pkt_with_ssid;
  return r;
}

/// Averages measured from a capture: packet lengths over all records and over
/// SSID-bearing ones, SSID length over SSID-bearing ones. Throws
/// std::invalid_argument if no record carries an SSID.
inline OverheadReport bandwidth_overhead(std::span<const capture::ProbeRecord> records,
                                         std::size_t hash_len) {
  double all = 0.0, with = 0.0, ssid = 0.0;
  std::size_t n_with = 0;
  for (const auto& r : records) {
    all += r.frame_len;
    if (r.ssid.is_wildcard()) continue;
    with += r.frame_len;
    ssid += static_cast<double>(r.ssid.size());
    ++n_with;
  }
  if (n_with == 0) throw std::invalid_argument("capture has no SSID-bearing probes");
  const double k = static_cast<double>(n_with);
  auto rep = bandwidth_overhead(with / k, ssid / k, hash_len);
  rep.avg_pkt_len_all = all / static_cast<double>(records.size());
  return rep;
}

inline nlohmann::ordered_json to_json(const OverheadReport& r) {
  nlohmann::ordered_json j;
  j["avg_pkt_len_all"] = r.avg_pkt_len_all ? nlohmann::ordered_json(*r.avg_pkt_len_all) : nullptr;
  j["avg_pkt_len_with_ssid"] = r.avg_pkt_len_with_ssid;
  j["avg_ssid_len"] = r.avg_ssid_len;
  j["hash_len"] = r.hash_len;
  j["new_avg_pkt_len_with_ssid"] = r.new_avg_pkt_len_with_ssid;
  j["pct_increase"] = r.pct_increase;
  return j;
}

// ---- simulation ----------------------------------------------------------------

struct SimulationReport {
  OverheadReport overhead;           // digest in place of the SSID
  double pct_increase_with_marker = 0.0;  // also counting the marker element
  std::size_t hashed_probes = 0;
  std::size_t verified = 0;          // decoded from the wire and accepted by the AP
  std::size_t dictionary_size = 0;
  std::size_t recovered = 0;
  double recovery_pct = 0.0;
  std::uint64_t hash_count = 0;
};

/// Re-emits every SSID-bearing probe as a hashed frame, checks that the AP
/// side accepts it, then runs the dictionary attack over the observations.
inline SimulationReport simulate(std::span<const capture::ProbeRecord> records,
                                 std::span<const Ssid> dictionary,
                                 std::size_t trunc_len = kFullDigestLen) {
  SimulationReport rep;
  rep.overhead = bandwidth_overhead(records, trunc_len);
  const double marker = static_cast<double>(2 + marker_element().body.size());
  rep.pct_increase_with_marker =
      100.0 * (rep.overhead.new_avg_pkt_len_with_ssid + marker - rep.overhead.avg_pkt_len_with_ssid) /
      rep.overhead.avg_pkt_len_with_ssid;

  std::vector<HashedProbe> observed;
  for (const auto& r : records) {
    if (r.ssid.is_wildcard()) continue;
    auto probe = make_hashed_probe(r.mac, r.seq, r.ssid, trunc_len);
    const auto frame = encode_frame(probe, r.channel == 0 ? 1 : r.channel, r.rssi);
    const auto decoded = decode_hashed(capture::decode_radiotap_frame(frame, frame.size()));
    if (decoded && *decoded == probe && ap_verify(*decoded, r.ssid)) ++rep.verified;
    observed.push_back(std::move(probe));
  }
  rep.hashed_probes = observed.size();
  rep.dictionary_size = dictionary.size();
  const auto attack = attacker_brute_force(observed, dictionary);
  rep.recovered = attack.recovered.size();
  rep.recovery_pct = attack.recovery_pct(observed.size());
  rep.hash_count = attack.hash_count;
  return rep;
}

inline nlohmann::ordered_json to_json(const SimulationReport& r) {
  nlohmann::ordered_json j;
  j["overhead"] = to_json(r.overhead);
  j["pct_increase_with_marker"] = r.pct_increase_with_marker;
  j["hashed_probes"] = r.hashed_probes;
  j["verified"] = r.verified;
  j["dictionary_size"] = r.dictionary_size;
  j["recovered"] = r.recovered;
  j["recovery_pct"] = r.recovery_pct;
  j["hash_count"] = r.hash_count;
  return j;
}

// ---- computational overhead -----------------------------------------------------

struct BenchReport {
  std::size_t n_ops = 0;
  std::size_t ssid_len = 0;
  std::size_t trunc_len = kFullDigestLen;
  double match_fraction = 0.0;
  std::size_t matches = 0;
  double mean_time_hashed_us = 0.0;
  double mean_time_baseline_us = 0.0;
  double overhead_pct = 0.0;
  double hashed_ops_per_s = 0.0;
  bool verdict_agreement = false;
};

/// Times `n_ops` AP-side hash-then-compare verifications against plain SSID
/// comparison on the same randomized inputs, `match_fraction` of which are
/// true matches. Single-threaded. Throws std::invalid_argument for n_ops == 0
/// or an SSID length outside 1..32.
inline BenchReport bench(std::size_t n_ops, std::size_t ssid_len = 11, double match_fraction = 0.5,
                         std::uint64_t seed = 1, std::size_t trunc_len = kFullDigestLen) {
  if (n_ops == 0) throw std::invalid_argument("bench needs at least one operation");
  if (ssid_len == 0 || ssid_len > Ssid::kMaxLength) {
    throw std::invalid_argument("ssid_len must be in 1..32");
  }
  if (!(match_fraction >= 0.0 && match_fraction <= 1.0)) {
    throw std::invalid_argument("match_fraction must be in [0, 1]");
  }

  struct Input {
    HashedProbe received;
    Ssid sent_ssid;
    Ssid ap_ssid;
  };
  capture::SynthRng rng(seed);
  auto random_ssid = [&] {
    std::string s(ssid_len, ' ');
    for (auto& c : s) c = static_cast<char>('!' + rng.below(94));
    return Ssid(s);
  };
  const std::size_t pool_size = std::min<std::size_t>(n_ops, 1u << 14);
  std::vector<Input> pool;
  pool.reserve(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) {
    const auto mac = capture::random_mac(rng, true);
    const SequenceNumber seq(static_cast<std::uint32_t>(rng.below(4096)));
    Ssid sent = random_ssid();
    Ssid ap = rng.chance(match_fraction) ? sent : random_ssid();
    pool.push_back({make_hashed_probe(mac, seq, sent, trunc_len), std::move(sent), std::move(ap)});
  }

  std::vector<std::uint8_t> hashed(n_ops), baseline(n_ops);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  for (std::size_t i = 0; i < n_ops; ++i) {
    const auto& in = pool[i % pool_size];
    hashed[i] = ap_verify(in.received, in.ap_ssid);
  }
  const auto t1 = clock::now();
  for (std::size_t i = 0; i < n_ops; ++i) {
    const auto& in = pool[i % pool_size];
    baseline[i] = legacy_match(in.sent_ssid, in.ap_ssid);
  }
  const auto t2 = clock::now();

  BenchReport r;
  r.n_ops = n_ops;
  r.ssid_len = ssid_len;
  r.trunc_len = trunc_len;
  r.match_fraction = match_fraction;
  r.verdict_agreement = hashed == baseline;
  for (auto v : hashed) r.matches += v;
  const double hashed_s = std::chrono::duration<double>(t1 - t0).count();
  const double baseline_s = std::chrono::duration<double>(t2 - t1).count();
  const auto n = static_cast<double>(n_ops);
  r.mean_time_hashed_us = hashed_s * 1e6 / n;
  r.mean_time_baseline_us = baseline_s * 1e6 / n;
  r.overhead_pct = baseline_s > 0 ? 100.0 * (hashed_s - baseline_s) / baseline_s : 0.0;
  r.hashed_ops_per_s = hashed_s > 0 ? n / hashed_s : 0.0;
  return r;
}

inline nlohmann::ordered_json to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["n_ops"] = r.n_ops;
  j["ssid_len"] = r.ssid_len;
  j["trunc_len"] = r.trunc_len;
  j["match_fraction"] = r.match_fraction;
  j["matches"] = r.matches;
  j["mean_time_hashed_us"] = r.mean_time_hashed_us;
  j["mean_time_baseline_us"] = r.mean_time_baseline_us;
  j["overhead_pct"] = r.overhead_pct;
  j["hashed_ops_per_s"] = r.hashed_ops_per_s;
  j["verdict_agreement"] = r.verdict_agreement;
  return j;
}

}  // namespace probelens::hashprobe
