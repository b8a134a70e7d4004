#pragma once

// Portable one-object-per-line capture format:
//   {"t":0.0,"mac":"02:00:00:00:00:01","seq":12,"ssid":"","ch":1,"rssi":-60,"len":120}
// Non-UTF-8 SSIDs use "ssid_b64" instead of "ssid".

#include <openssl/evp.h>

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "probelens/capture/types.hpp"

namespace probelens::capture {

inline std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

inline std::optional<std::string> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::string out(text.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock counts padding as zero bytes
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

/// Converts one JSON object to a record; nullopt on schema or invariant
/// violations (bad MAC, seq outside 12 bits, SSID over 32 octets, ...).
inline std::optional<ProbeRecord> record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  auto number = [&](const char* key) -> const nlohmann::json* {
    auto it = j.find(key);
    return it != j.end() && it->is_number() ? &*it : nullptr;
  };
  auto integer = [&](const char* key) -> const nlohmann::json* {
    auto it = j.find(key);
    return it != j.end() && it->is_number_integer() ? &*it : nullptr;
  };

  const auto* t = number("t");
  const auto* seq = integer("seq");
  const auto* ch = integer("ch");
  const auto* len = integer("len");
  auto mac_it = j.find("mac");
  if (!t || !seq || !ch || !len || mac_it == j.end() || !mac_it->is_string()) {
    return std::nullopt;
  }

  ProbeRecord rec;
  rec.timestamp = t->get<double>();
  if (!std::isfinite(rec.timestamp)) return std::nullopt;
  auto mac = MacAddress::parse(mac_it->get_ref<const std::string&>());
  if (!mac) return std::nullopt;
  rec.mac = *mac;

  const auto seq_v = seq->get<std::int64_t>();
  if (!SequenceNumber::valid(seq_v)) return std::nullopt;
  rec.seq = SequenceNumber(static_cast<std::uint32_t>(seq_v));

  const auto ch_v = ch->get<std::int64_t>();
  if (ch_v < 0 || ch_v > 255) return std::nullopt;
  rec.channel = static_cast<int>(ch_v);

  const auto len_v = len->get<std::int64_t>();
  if (len_v < kMinManagementFrameLen || len_v > 65535) return std::nullopt;
  rec.frame_len = static_cast<std::uint32_t>(len_v);

  auto ssid_it = j.find("ssid");
  auto b64_it = j.find("ssid_b64");
  const bool has_text = ssid_it != j.end();
  const bool has_b64 = b64_it != j.end();
  if (has_text == has_b64) return std::nullopt;
  std::string bytes;
  if (has_text) {
    if (!ssid_it->is_string()) return std::nullopt;
    bytes = ssid_it->get<std::string>();
  } else {
    if (!b64_it->is_string()) return std::nullopt;
    auto decoded = base64_decode(b64_it->get_ref<const std::string&>());
    if (!decoded) return std::nullopt;
    bytes = std::move(*decoded);
  }
  if (bytes.size() > Ssid::kMaxLength) return std::nullopt;
  rec.ssid = Ssid(std::move(bytes));
  // Minimum frame: header plus the SSID element itself.
  if (rec.frame_len < kMinManagementFrameLen + 2 + rec.ssid.size()) return std::nullopt;

  if (auto it = j.find("rssi"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) return std::nullopt;
    const auto v = it->get<std::int64_t>();
    if (v < -128 || v > 127) return std::nullopt;
    rec.rssi = static_cast<int>(v);
  }
  return rec;
}

inline nlohmann::ordered_json record_to_json(const ProbeRecord& rec) {
  nlohmann::ordered_json j;
  j["t"] = rec.timestamp;
  j["mac"] = rec.mac.to_string();
  j["seq"] = rec.seq.value();
  if (rec.ssid.is_utf8()) {
    j["ssid"] = rec.ssid.bytes();
  } else {
    j["ssid_b64"] = base64_encode(rec.ssid.bytes());
  }
  j["ch"] = rec.channel;
  if (rec.rssi) j["rssi"] = *rec.rssi;
  j["len"] = rec.frame_len;
  return j;
}

/// Malformed or invariant-violating lines are skipped and counted. Blank
/// lines are ignored and not counted as frames.
inline Capture parse_jsonl(std::istream& in, std::string source = {}) {
  Capture cap;
  cap.meta.source = std::move(source);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++cap.meta.frames_examined;
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    auto rec = j.is_discarded() ? std::nullopt : record_from_json(j);
    if (!rec) {
      ++cap.meta.parse_error_count;
      continue;
    }
    cap.records.push_back(std::move(*rec));
  }
  cap.meta.record_count = cap.records.size();
  return cap;
}

inline void write_jsonl(std::span<const ProbeRecord> records, std::ostream& out) {
  for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

}  // namespace probelens::capture
