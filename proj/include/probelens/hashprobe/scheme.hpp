#pragma once

// Salted-hash directed probes: the sender transmits
// SHA-256(MAC || SN || SSID) instead of the SSID, the AP recomputes it for
// its own SSID and compares.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "probelens/capture/frame.hpp"
#include "probelens/capture/types.hpp"
#include "probelens/crypto.hpp"

namespace probelens::hashprobe {

using capture::MacAddress;
using capture::SequenceNumber;
using capture::Ssid;

inline constexpr std::size_t kFullDigestLen = 32;
inline constexpr std::size_t kTruncatedDigestLen = 16;
inline constexpr std::size_t kPreimageSaltLen = 8;

inline bool valid_trunc_len(std::size_t n) {
  return n == kFullDigestLen || n == kTruncatedDigestLen;
}

struct HashedProbe {
  MacAddress mac;
  SequenceNumber seq;
  std::vector<std::uint8_t> digest;  // trunc_len() octets

  std::size_t trunc_len() const { return digest.size(); }
  auto operator<=>(const HashedProbe&) const = default;
};

/// 6 MAC octets, SN as 2 big-endian octets (upper 4 bits zero), SSID octets.
inline std::vector<std::uint8_t> preimage(const MacAddress& mac, SequenceNumber seq,
                                          const Ssid& ssid) {
  std::vector<std::uint8_t> out;
  out.reserve(kPreimageSaltLen + ssid.size());
  out.insert(out.end(), mac.octets().begin(), mac.octets().end());
  out.push_back(static_cast<std::uint8_t>(seq.value() >> 8));
  out.push_back(static_cast<std::uint8_t>(seq.value() & 0xff));
  out.insert(out.end(), ssid.bytes().begin(), ssid.bytes().end());
  return out;
}

namespace detail {

/// Digest into a caller buffer; avoids allocation on the AP verify path.
inline crypto::Sha256Digest salted_digest(const MacAddress& mac, SequenceNumber seq,
                                          const Ssid& ssid) {
  std::array<std::uint8_t, kPreimageSaltLen + Ssid::kMaxLength> buf;
  std::copy(mac.octets().begin(), mac.octets().end(), buf.begin());
  buf[6] = static_cast<std::uint8_t>(seq.value() >> 8);
  buf[7] = static_cast<std::uint8_t>(seq.value() & 0xff);
  std::copy(ssid.bytes().begin(), ssid.bytes().end(), buf.begin() + kPreimageSaltLen);
  return crypto::sha256(std::span(buf.data(), kPreimageSaltLen + ssid.size()));
}

}  // namespace detail

/// Throws std::invalid_argument for a wildcard SSID (nothing to conceal) or
/// a trunc_len other than 16 or 32.
inline HashedProbe make_hashed_probe(const MacAddress& mac, SequenceNumber seq, const Ssid& ssid,
                                     std::size_t trunc_len = kFullDigestLen) {
  if (ssid.is_wildcard()) throw std::invalid_argument("wildcard probes are not hashed");
  if (!valid_trunc_len(trunc_len)) throw std::invalid_argument("trunc_len must be 16 or 32");
  const auto d = detail::salted_digest(mac, seq, ssid);
  return {mac, seq, std::vector<std::uint8_t>(d.begin(), d.begin() + trunc_len)};
}

/// AP side. Constant-time in the digest contents.
inline bool ap_verify(const MacAddress& mac, SequenceNumber seq,
                      std::span<const std::uint8_t> digest, const Ssid& ap_ssid) {
  if (!valid_trunc_len(digest.size()) || ap_ssid.is_wildcard()) return false;
  const auto expected = detail::salted_digest(mac, seq, ap_ssid);
  return crypto::constant_time_equal(std::span(expected.data(), digest.size()), digest);
}

inline bool ap_verify(const HashedProbe& probe, const Ssid& ap_ssid) {
  return ap_verify(probe.mac, probe.seq, probe.digest, ap_ssid);
}

/// Today's behaviour: plain SSID equality.
inline bool legacy_match(const Ssid& probe_ssid, const Ssid& ap_ssid) {
  return probe_ssid.bytes() == ap_ssid.bytes();
}

// Simulated wire format: the digest occupies the SSID element; a vendor
// element carrying kMarkerOui, type kMarkerType and flag bit 0 marks the
// probe as hashed.
inline constexpr std::array<std::uint8_t, 3> kMarkerOui = {0x02, 0x50, 0x4c};
inline constexpr std::uint8_t kMarkerType = 0x01;
inline constexpr std::uint8_t kMarkerHashedBit = 0x01;

inline capture::InformationElement marker_element() {
  return {capture::kIeVendorSpecific,
          {kMarkerOui[0], kMarkerOui[1], kMarkerOui[2], kMarkerType, kMarkerHashedBit}};
}

inline bool is_marker(const capture::InformationElement& ie) {
  return ie.tag == capture::kIeVendorSpecific && ie.body.size() >= 5 &&
         std::equal(kMarkerOui.begin(), kMarkerOui.end(), ie.body.begin()) &&
         ie.body[3] == kMarkerType && (ie.body[4] & kMarkerHashedBit);
}

/// Radiotap + probe request carrying the digest and the marker element.
inline std::vector<std::uint8_t> encode_frame(const HashedProbe& probe, int channel,
                                              std::optional<int> rssi = std::nullopt) {
  const std::array<capture::InformationElement, 1> extra = {marker_element()};
  return capture::build_probe_request(probe.mac, probe.seq, probe.digest, channel, rssi, extra);
}

/// The hashed probe in a decoded frame, or nullopt for a legacy probe.
inline std::optional<HashedProbe> decode_hashed(const capture::DecodedFrame& frame) {
  if (frame.kind != capture::FrameKind::Probe) return std::nullopt;
  if (std::none_of(frame.vendor_ies.begin(), frame.vendor_ies.end(), is_marker)) {
    return std::nullopt;
  }
  const auto& bytes = frame.record.ssid.bytes();
  if (!valid_trunc_len(bytes.size())) return std::nullopt;
  return HashedProbe{frame.record.mac, frame.record.seq,
                     std::vector<std::uint8_t>(bytes.begin(), bytes.end())};
}

// Golden vectors: JSON list of {mac, seq, ssid, digest_hex, trunc_len}, with
// an optional preimage_hex.
struct GoldenVector {
  MacAddress mac;
  SequenceNumber seq;
  Ssid ssid;
  std::string digest_hex;
  std::size_t trunc_len = kFullDigestLen;
  std::optional<std::string> preimage_hex;
};

inline std::vector<GoldenVector> parse_vectors(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("golden vectors must be a JSON array");
  std::vector<GoldenVector> out;
  for (const auto& v : j) {
    auto mac = MacAddress::parse(v.at("mac").get<std::string>());
    if (!mac) throw std::invalid_argument("bad MAC in golden vector");
    GoldenVector g{*mac,
                   SequenceNumber(v.at("seq").get<int>()),
                   Ssid(v.at("ssid").get<std::string>()),
                   v.at("digest_hex").get<std::string>(),
                   v.at("trunc_len").get<std::size_t>(),
                   {}};
    if (v.contains("preimage_hex")) g.preimage_hex = v["preimage_hex"].get<std::string>();
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<GoldenVector> load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open golden vectors " + path);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("golden vectors are not valid JSON");
  return parse_vectors(j);
}

struct VectorMismatch {
  std::size_t index = 0;
  std::string expected_hex;
  std::string actual_hex;
};

/// Recomputes each vector. Empty result means the file validates bit-exactly.
inline std::vector<VectorMismatch> check_vectors(std::span<const GoldenVector> vectors) {
  std::vector<VectorMismatch> bad;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    std::string actual;
    try {
      actual = crypto::to_hex(make_hashed_probe(v.mac, v.seq, v.ssid, v.trunc_len).digest);
    } catch (const std::invalid_argument& e) {
      actual = std::string("error: ") + e.what();
    }
    if (actual != v.digest_hex) {
      bad.push_back({i, v.digest_hex, actual});
      continue;
    }
    if (v.preimage_hex) {
      const auto pre = crypto::to_hex(preimage(v.mac, v.seq, v.ssid));
      if (pre != *v.preimage_hex) bad.push_back({i, *v.preimage_hex, pre});
    }
  }
  return bad;
}

inline nlohmann::ordered_json to_json(const GoldenVector& v) {
  nlohmann::ordered_json j;
  j["mac"] = v.mac.to_string();
  j["seq"] = v.seq.value();
  j["ssid"] = v.ssid.bytes();
  j["preimage_hex"] = crypto::to_hex(preimage(v.mac, v.seq, v.ssid));
  j["digest_hex"] = crypto::to_hex(make_hashed_probe(v.mac, v.seq, v.ssid, v.trunc_len).digest);
  j["trunc_len"] = v.trunc_len;
  return j;
}

/// Fresh digests and preimages for the given inputs.
inline nlohmann::ordered_json regenerate_vectors(std::span<const GoldenVector> vectors) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& v : vectors) out.push_back(to_json(v));
  return out;
}

}  // namespace probelens::hashprobe
