#pragma once

// Deterministic synthetic probe-request captures. Everything is derived from
// std::mt19937_64 raw output (whose sequence is fixed by the standard), never
// from <random> distributions, so a seed reproduces byte-identical captures
// on every platform.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "probelens/capture/types.hpp"

namespace probelens::capture {

class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); modulo bias is below 2^-40 for the n used here.
  std::uint64_t below(std::uint64_t n) { return n ? engine_() % n : 0; }
  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

struct SynthDevice {
  std::vector<std::string> pnl;  // directed SSIDs, probed once per burst each
  bool randomizing = false;      // fresh local MAC and random start SN per burst
  std::size_t bursts = 1;
  std::size_t wildcards_per_burst = 1;
  std::size_t extra_ie_bytes = 100;  // rates, capabilities, vendor IEs
};

struct SynthProfile {
  std::vector<SynthDevice> devices;
  double burst_interval_s = 30.0;
  double frame_gap_s = 0.02;
  double five_ghz_fraction = 0.5;
};

inline MacAddress random_mac(SynthRng& rng, bool local) {
  const std::uint64_t v = rng.next();
  MacAddress::Octets o{};
  for (std::size_t i = 0; i < 6; ++i) o[i] = static_cast<std::uint8_t>(v >> (8 * i));
  o[0] &= 0xFC;  // unicast
  if (local) o[0] |= 0x02;
  return MacAddress(o);
}

/// Pure function of (profile, seed). Records are sorted by timestamp.
inline std::vector<ProbeRecord> synth_capture(const SynthProfile& profile, std::uint64_t seed) {
  static const std::vector<int> channels_24 = {1, 6, 11};
  static const std::vector<int> channels_5 = {36, 40, 44, 48, 100, 149};

  SynthRng rng(seed);
  std::vector<ProbeRecord> out;
  for (const auto& dev : profile.devices) {
    const MacAddress fixed_mac = random_mac(rng, false);
    SequenceNumber seq(static_cast<std::uint32_t>(rng.below(4096)));
    const double offset = rng.unit() * profile.burst_interval_s;

    for (std::size_t b = 0; b < dev.bursts; ++b) {
      MacAddress mac = fixed_mac;
      if (dev.randomizing) {
        mac = random_mac(rng, true);
        seq = SequenceNumber(static_cast<std::uint32_t>(rng.below(4096)));
      }
      const bool five = rng.chance(profile.five_ghz_fraction);
      const int channel = five ? rng.pick(channels_5) : rng.pick(channels_24);
      double t = offset + static_cast<double>(b) * profile.burst_interval_s + rng.unit();

      auto emit = [&](const std::string& ssid) {
        ProbeRecord rec;
        rec.timestamp = std::round(t * 1e6) / 1e6;
        rec.mac = mac;
        rec.seq = seq;
        rec.ssid = Ssid(ssid);
        rec.channel = channel;
        rec.rssi = -35 - static_cast<int>(rng.below(55));
        rec.frame_len = static_cast<std::uint32_t>(kMinManagementFrameLen + 2 + ssid.size() +
                                                   dev.extra_ie_bytes);
        out.push_back(std::move(rec));
        seq = seq.next();
        t += profile.frame_gap_s;
      };
      for (std::size_t w = 0; w < dev.wildcards_per_burst; ++w) emit("");
      for (const auto& ssid : dev.pnl) emit(ssid);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ProbeRecord& a, const ProbeRecord& b) {
    return a.timestamp < b.timestamp;
  });
  return out;
}

/// Parameters for a randomly composed fleet of devices.
struct FleetParams {
  std::size_t device_count = 50;
  double randomizing_fraction = 0.6;  // modern devices: wildcard-only, random MACs
  std::size_t max_pnl_size = 10;
  std::size_t min_bursts = 1;
  std::size_t max_bursts = 5;
  double typo_rate = 0.15;      // per legacy device: add a mistyped copy of a PNL entry
  double password_rate = 0.1;   // per legacy device: add a 16/20 digit password
  double grouped_password_rate = 0.5;  // given a password, also add the 4-digit grouped form
  double keyword_rate = 0.03;   // per legacy device: add a "PW:..." style entry
  double legacy_ssid_rate = 1.0;  // share of non-randomizing devices that probe with SSIDs
  double randomizing_ssid_rate = 0.2;  // share of randomizing devices that still do
  std::optional<double> target_ssid_share;  // pad with wildcard-only devices to hit it
  double five_ghz_fraction = 0.5;
};

namespace detail {

inline std::string random_digits(SynthRng& rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng.below(10)));
  return s;
}

inline std::string random_network_name(SynthRng& rng) {
  static const std::vector<std::string> stems = {
      "FRITZ!Box ", "Vodafone-", "WLAN-", "o2-WLAN", "Telekom-", "home", "Hotel ",
      "Cafe ", "Ferienwohnung ", "Guest ", "AndroidAP", "iPhone von ", "Praxis ",
      "Buero", "UPC", "NETGEAR", "TP-Link_", "Livebox-", "eduroam", "Airport "};
  static const std::vector<std::string> words = {
      "Nord", "Sonne", "Meer", "Berg", "Haus", "Garten", "Linde", "Anker",
      "Hafen", "Park", "Mitte", "West", "Stern", "Wald", "Insel", "Kai"};
  std::string name = rng.pick(stems);
  switch (rng.below(3)) {
    case 0: name += random_digits(rng, 4); break;
    case 1: name += rng.pick(words); break;
    default: name += rng.pick(words) + random_digits(rng, 2); break;
  }
  if (name.size() > Ssid::kMaxLength) name.resize(Ssid::kMaxLength);
  return name;
}

inline std::string mistype(SynthRng& rng, const std::string& s) {
  if (s.size() < 3) return s + "_";
  std::string out = s;
  const std::size_t i = 1 + rng.below(out.size() - 2);
  switch (rng.below(4)) {
    case 0: out.erase(i, 1); break;                       // drop a character
    case 1: std::swap(out[i], out[i + 1]); break;          // transpose
    case 2: out.insert(out.begin() + static_cast<long>(i), out[i]); break;  // double
    default:
      for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
  }
  if (out == s) out.insert(out.begin() + static_cast<long>(i), '_');
  if (out.size() > Ssid::kMaxLength) out.resize(Ssid::kMaxLength);
  return out;
}

inline std::string grouped(const std::string& digits, char sep) {
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && i % 4 == 0) out.push_back(sep);
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace detail

inline SynthProfile make_fleet_profile(const FleetParams& params, std::uint64_t seed) {
  SynthRng rng(seed ^ 0x9e3779b97f4a7c15ull);
  SynthProfile profile;
  profile.five_ghz_fraction = params.five_ghz_fraction;
  const std::size_t burst_span = params.max_bursts - std::min(params.min_bursts, params.max_bursts) + 1;

  for (std::size_t d = 0; d < params.device_count; ++d) {
    SynthDevice dev;
    dev.bursts = params.min_bursts + rng.below(burst_span);
    dev.wildcards_per_burst = 1 + rng.below(3);
    dev.extra_ie_bytes = 80 + rng.below(60);
    dev.randomizing = rng.chance(params.randomizing_fraction);
    const double ssid_rate = dev.randomizing ? params.randomizing_ssid_rate : params.legacy_ssid_rate;
    if (rng.chance(ssid_rate)) {
      const std::size_t n = 1 + rng.below(std::max<std::size_t>(params.max_pnl_size, 1));
      std::vector<std::string> pnl;
      while (pnl.size() < n) {
        auto name = detail::random_network_name(rng);
        if (std::find(pnl.begin(), pnl.end(), name) == pnl.end()) pnl.push_back(name);
      }
      if (rng.chance(params.typo_rate)) pnl.push_back(detail::mistype(rng, rng.pick(pnl)));
      if (rng.chance(params.password_rate)) {
        const auto digits = detail::random_digits(rng, rng.chance(0.5) ? 16 : 20);
        pnl.push_back(digits);
        if (rng.chance(params.grouped_password_rate)) {
          static const char seps[] = {' ', '.', ','};
          pnl.push_back(detail::grouped(digits, seps[rng.below(3)]));
        }
      }
      if (rng.chance(params.keyword_rate)) {
        pnl.push_back("PW:" + detail::random_digits(rng, 8 + rng.below(8)));
      }
      std::sort(pnl.begin(), pnl.end());
      pnl.erase(std::unique(pnl.begin(), pnl.end()), pnl.end());
      dev.pnl = std::move(pnl);
    }
    profile.devices.push_back(std::move(dev));
  }

  if (params.target_ssid_share) {
    const double share = *params.target_ssid_share;
    std::size_t directed = 0;
    std::size_t wildcard = 0;
    for (const auto& dev : profile.devices) {
      directed += dev.bursts * dev.pnl.size();
      wildcard += dev.bursts * dev.wildcards_per_burst;
    }
    if (share > 0.0 && share < 1.0) {
      const auto needed = static_cast<std::size_t>(
          std::llround(static_cast<double>(directed) * (1.0 - share) / share));
      // Only ever add wildcards; callers pick params that leave room.
      std::size_t missing = needed > wildcard ? needed - wildcard : 0;
      while (missing > 0) {
        SynthDevice dev;
        dev.randomizing = true;
        dev.bursts = 1 + rng.below(3);
        dev.wildcards_per_burst = std::min<std::size_t>(4, (missing + dev.bursts - 1) / dev.bursts);
        if (dev.bursts * dev.wildcards_per_burst > missing) {
          dev.bursts = missing / dev.wildcards_per_burst;
          if (dev.bursts == 0) {
            dev.bursts = 1;
            dev.wildcards_per_burst = missing;
          }
        }
        missing -= dev.bursts * dev.wildcards_per_burst;
        profile.devices.push_back(std::move(dev));
      }
    }
  }
  return profile;
}

}  // namespace probelens::capture
