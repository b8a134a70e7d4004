#pragma once

// Radiotap and 802.11 management-frame decoding for probe requests, plus a
// small builder used to emit synthetic frames.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "probelens/capture/types.hpp"

namespace probelens::capture {

namespace detail {

inline std::uint16_t load_le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
inline std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
inline void store_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void store_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace detail

struct RadiotapInfo {
  std::size_t header_len = 0;
  std::uint8_t flags = 0;
  std::optional<int> frequency_mhz;
  std::optional<int> antenna_signal_dbm;

  static constexpr std::uint8_t kFlagFcsAtEnd = 0x10;
  static constexpr std::uint8_t kFlagBadFcs = 0x40;

  bool has_fcs() const { return (flags & kFlagFcsAtEnd) != 0; }
  bool bad_fcs() const { return (flags & kFlagBadFcs) != 0; }
};

/// Parses the radiotap header. Only the fields preceding and including the
/// dBm antenna signal are decoded; later fields are never needed.
inline std::optional<RadiotapInfo> parse_radiotap(std::span<const std::uint8_t> data) {
  if (data.size() < 8 || data[0] != 0) return std::nullopt;
  RadiotapInfo info;
  info.header_len = detail::load_le16(&data[2]);
  if (info.header_len < 8 || info.header_len > data.size()) return std::nullopt;

  const std::uint32_t present = detail::load_le32(&data[4]);
  std::size_t off = 8;
  for (std::uint32_t word = present; word & 0x80000000u;) {
    if (off + 4 > info.header_len) return std::nullopt;
    word = detail::load_le32(&data[off]);
    off += 4;
  }

  struct FieldLayout {
    std::size_t align;
    std::size_t size;
  };
  // TSFT, Flags, Rate, Channel, FHSS, dBm antenna signal
  constexpr FieldLayout layout[] = {{8, 8}, {1, 1}, {1, 1}, {2, 4}, {2, 2}, {1, 1}};

  for (std::size_t bit = 0; bit < std::size(layout); ++bit) {
    if (!(present & (1u << bit))) continue;
    const auto [align, size] = layout[bit];
    off = (off + align - 1) / align * align;
    if (off + size > info.header_len) return std::nullopt;
    const std::uint8_t* field = &data[off];
    switch (bit) {
      case 1:
        info.flags = field[0];
        break;
      case 3:
        info.frequency_mhz = detail::load_le16(field);
        break;
      case 5:
        info.antenna_signal_dbm = static_cast<std::int8_t>(field[0]);
        break;
      default:
        break;
    }
    off += size;
  }
  return info;
}

enum class FrameKind { Probe, NotProbe, Malformed };

struct InformationElement {
  std::uint8_t tag = 0;
  std::vector<std::uint8_t> body;
};

struct DecodedFrame {
  FrameKind kind = FrameKind::Malformed;
  ProbeRecord record;  // timestamp left at 0; valid only for Probe
  std::vector<InformationElement> vendor_ies;  // tag-221 elements in frame order
};

inline constexpr std::uint8_t kIeSsid = 0;
inline constexpr std::uint8_t kIeVendorSpecific = 221;

/// Decodes one radiotap-encapsulated frame. `orig_len` is the on-wire length
/// from the capture record (>= captured bytes).
inline DecodedFrame decode_radiotap_frame(std::span<const std::uint8_t> data,
                                          std::size_t orig_len) {
  DecodedFrame out;
  const auto rt = parse_radiotap(data);
  if (!rt || rt->bad_fcs()) return out;
  if (orig_len < data.size()) orig_len = data.size();

  const bool truncated = orig_len > data.size();
  auto frame = data.subspan(rt->header_len);
  std::size_t frame_len = orig_len - rt->header_len;
  if (rt->has_fcs()) {
    if (frame_len < 4) return out;
    frame_len -= 4;
    if (!truncated) frame = frame.first(frame.size() - 4);
  }
  if (frame.size() < kMinManagementFrameLen) return out;

  const std::uint8_t fc0 = frame[0];
  if ((fc0 & 0x03) != 0) return out;  // protocol version must be 0
  const int type = fc0 >> 2 & 0x03;
  const int subtype = fc0 >> 4;
  if (type == 3) return out;  // reserved
  if (type != 0 || subtype != 4) {
    out.kind = FrameKind::NotProbe;
    return out;
  }

  ProbeRecord& rec = out.record;
  rec.mac = MacAddress::from_bytes(frame.subspan<10, 6>());
  rec.seq = SequenceNumber(detail::load_le16(&frame[22]) >> 4);
  rec.frame_len = static_cast<std::uint32_t>(frame_len);
  rec.channel = rt->frequency_mhz ? channel_for_frequency(*rt->frequency_mhz) : 0;
  rec.rssi = rt->antenna_signal_dbm;

  bool have_ssid = false;
  std::size_t off = kMinManagementFrameLen;
  while (off < frame.size()) {
    if (off + 2 > frame.size()) {
      if (truncated) break;
      return out;
    }
    const std::uint8_t tag = frame[off];
    const std::size_t len = frame[off + 1];
    if (off + 2 + len > frame.size()) {
      if (truncated) break;
      return out;
    }
    const auto body = frame.subspan(off + 2, len);
    if (tag == kIeSsid && !have_ssid) {
      if (len > Ssid::kMaxLength) return out;
      rec.ssid = Ssid(std::string(body.begin(), body.end()));
      have_ssid = true;
    } else if (tag == kIeVendorSpecific) {
      out.vendor_ies.push_back({tag, std::vector<std::uint8_t>(body.begin(), body.end())});
    }
    off += 2 + len;
  }
  if (!have_ssid) return out;
  out.kind = FrameKind::Probe;
  return out;
}

inline int frequency_for_channel(int channel) {
  if (channel == 14) return 2484;
  if (channel >= 1 && channel <= 13) return 2407 + 5 * channel;
  if (channel > 14) return 5000 + 5 * channel;
  return 0;
}

/// Builds radiotap (flags, channel, antenna signal) + probe request. The
/// SSID element carries `ssid_field` verbatim; `extra` elements follow it.
inline std::vector<std::uint8_t> build_probe_request(
    const MacAddress& sender, SequenceNumber seq, std::span<const std::uint8_t> ssid_field,
    int channel, std::optional<int> rssi, std::span<const InformationElement> extra = {}) {
  std::vector<std::uint8_t> out;
  // radiotap: version, pad, len, present = Flags | Channel | dBm signal
  const std::uint32_t present = (1u << 1) | (1u << 3) | (rssi ? (1u << 5) : 0u);
  out.insert(out.end(), {0, 0, 0, 0});
  detail::store_le32(out, present);
  out.push_back(0);  // flags
  out.push_back(0);  // align channel to 2
  const int freq = frequency_for_channel(channel);
  detail::store_le16(out, static_cast<std::uint16_t>(freq));
  detail::store_le16(out, freq >= 5000 ? 0x0140 : 0x00a0);
  if (rssi) out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(*rssi)));
  const auto rt_len = static_cast<std::uint16_t>(out.size());
  out[2] = static_cast<std::uint8_t>(rt_len);
  out[3] = static_cast<std::uint8_t>(rt_len >> 8);

  out.insert(out.end(), {0x40, 0x00, 0x00, 0x00});  // FC: mgmt/probe req, duration
  out.insert(out.end(), 6, 0xff);                     // DA broadcast
  out.insert(out.end(), sender.octets().begin(), sender.octets().end());
  out.insert(out.end(), 6, 0xff);  // BSSID wildcard
  detail::store_le16(out, static_cast<std::uint16_t>(seq.value() << 4));

  out.push_back(kIeSsid);
  out.push_back(static_cast<std::uint8_t>(ssid_field.size()));
  out.insert(out.end(), ssid_field.begin(), ssid_field.end());
  for (const auto& ie : extra) {
    out.push_back(ie.tag);
    out.push_back(static_cast<std::uint8_t>(ie.body.size()));
    out.insert(out.end(), ie.body.begin(), ie.body.end());
  }
  return out;
}

/// Frame for a record, padded with a filler vendor element so the 802.11
/// part has exactly `rec.frame_len` bytes when it is large enough.
inline std::vector<std::uint8_t> build_probe_request(const ProbeRecord& rec) {
  const auto& s = rec.ssid.bytes();
  std::span<const std::uint8_t> ssid(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
  std::vector<InformationElement> extra;
  std::size_t have = kMinManagementFrameLen + 2 + s.size();
  while (rec.frame_len >= have + 2) {
    const std::size_t body = std::min<std::size_t>(255, rec.frame_len - have - 2);
    // a 1..2 byte remainder can't hold its own element; shrink this one
    const std::size_t rest = rec.frame_len - have - 2 - body;
    const std::size_t take = (rest == 1) ? body - 1 : body;
    extra.push_back({kIeVendorSpecific, std::vector<std::uint8_t>(take, 0)});
    have += 2 + take;
  }
  return build_probe_request(rec.mac, rec.seq, ssid, rec.channel, rec.rssi, extra);
}

}  // namespace probelens::capture
