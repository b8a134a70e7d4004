#pragma once

// Classic pcap and pcapng readers for radiotap (linktype 127) captures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "probelens/capture/frame.hpp"
#include "probelens/capture/types.hpp"

namespace probelens::capture {

inline constexpr std::uint32_t kLinkTypeRadiotap = 127;

namespace detail {

class ByteCursor {
 public:
  ByteCursor(std::span<const std::uint8_t> data, bool big_endian)
      : data_(data), big_endian_(big_endian) {}

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  void skip(std::size_t n) { pos_ += n; }
  void set_big_endian(bool be) { big_endian_ = be; }

  std::uint16_t u16() {
    const auto* p = &data_[pos_];
    pos_ += 2;
    return big_endian_ ? static_cast<std::uint16_t>(p[0] << 8 | p[1]) : load_le16(p);
  }
  std::uint32_t u32() {
    const auto* p = &data_[pos_];
    pos_ += 4;
    if (!big_endian_) return load_le32(p);
    return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
           static_cast<std::uint32_t>(p[2]) << 8 | p[3];
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  bool big_endian_;
};

struct RawFrame {
  std::int64_t ts_ns;
  std::span<const std::uint8_t> data;
  std::size_t orig_len;
};

// Upper bound on one captured frame; anything larger means the record header
// is garbage and the stream can't be resynchronised.
inline constexpr std::uint32_t kMaxFrameLen = 1u << 18;

inline void read_classic(std::span<const std::uint8_t> file, std::vector<RawFrame>& frames,
                         CaptureMeta& meta) {
  const std::uint32_t magic = load_le32(file.data());
  bool big_endian;
  std::int64_t frac_to_ns;
  switch (magic) {
    case 0xa1b2c3d4: big_endian = false, frac_to_ns = 1000; break;
    case 0xd4c3b2a1: big_endian = true, frac_to_ns = 1000; break;
    case 0xa1b23c4d: big_endian = false, frac_to_ns = 1; break;
    case 0x4d3cb2a1: big_endian = true, frac_to_ns = 1; break;
    default: throw FormatError("not a pcap file");
  }
  if (file.size() < 24) throw FormatError("truncated pcap file header");
  ByteCursor cur(file, big_endian);
  cur.seek(20);
  const std::uint32_t linktype = cur.u32() & 0x0fffffff;
  if (linktype != kLinkTypeRadiotap) {
    throw FormatError("unsupported link type " + std::to_string(linktype) +
                      " (expected radiotap, 127)");
  }

  while (cur.remaining() > 0) {
    ++meta.frames_examined;
    if (cur.remaining() < 16) {
      ++meta.parse_error_count;
      break;
    }
    const std::uint32_t sec = cur.u32();
    const std::uint32_t frac = cur.u32();
    const std::uint32_t incl = cur.u32();
    const std::uint32_t orig = cur.u32();
    if (incl > kMaxFrameLen || incl > cur.remaining()) {
      ++meta.parse_error_count;
      break;
    }
    frames.push_back({static_cast<std::int64_t>(sec) * 1'000'000'000 + frac * frac_to_ns,
                      cur.bytes(incl), std::max<std::size_t>(orig, incl)});
  }
}

struct PcapngInterface {
  std::uint32_t linktype = 0;
  std::uint32_t snaplen = 0;
  long double tick_ns = 1000.0L;  // default resolution: microseconds
};

inline void read_pcapng(std::span<const std::uint8_t> file, std::vector<RawFrame>& frames,
                        CaptureMeta& meta) {
  constexpr std::uint32_t kShb = 0x0A0D0D0A;
  constexpr std::uint32_t kIdb = 1;
  constexpr std::uint32_t kSpb = 3;
  constexpr std::uint32_t kEpb = 6;

  if (file.size() < 28) throw FormatError("truncated pcapng section header");
  ByteCursor cur(file, false);
  bool section_be = false;
  std::vector<PcapngInterface> ifaces;
  bool first_block = true;

  auto frame_error = [&meta] {
    ++meta.frames_examined;
    ++meta.parse_error_count;
  };

  while (cur.remaining() > 0) {
    const std::size_t block_start = cur.position();
    if (cur.remaining() < 12) {
      frame_error();
      break;
    }
    // The SHB's byte-order magic decides endianness for the whole section.
    if (load_le32(&file[block_start]) == kShb) {
      const std::uint32_t bom = load_le32(&file[block_start + 8]);
      if (bom == 0x1A2B3C4D) {
        section_be = false;
      } else if (bom == 0x4D3C2B1A) {
        section_be = true;
      } else if (first_block) {
        throw FormatError("bad pcapng byte-order magic");
      } else {
        frame_error();
        break;
      }
      cur.set_big_endian(section_be);
      ifaces.clear();
    } else if (first_block) {
      throw FormatError("pcapng file does not start with a section header");
    }
    first_block = false;

    const std::uint32_t type = cur.u32();
    const std::uint32_t total = cur.u32();
    if (total < 12 || total % 4 != 0 || total - 8 > cur.remaining()) {
      frame_error();
      break;
    }
    ByteCursor b(cur.bytes(total - 12), section_be);
    cur.skip(4);  // trailing copy of the block length

    if (type == kIdb) {
      if (b.remaining() < 8) {
        frame_error();
        continue;
      }
      PcapngInterface iface;
      iface.linktype = b.u16();
      b.u16();
      iface.snaplen = b.u32();
      while (b.remaining() >= 4) {
        const std::uint16_t code = b.u16();
        const std::uint16_t len = b.u16();
        if (code == 0 || len > b.remaining()) break;
        auto value = b.bytes(len);
        if (code == 9 && len >= 1) {
          const std::uint8_t r = value[0];
          iface.tick_ns = (r & 0x80) ? 1e9L / std::pow(2.0L, r & 0x7f)
                                     : 1e9L / std::pow(10.0L, r & 0x7f);
        }
        b.skip(std::min<std::size_t>((4 - len % 4) % 4, b.remaining()));
      }
      if (iface.linktype != kLinkTypeRadiotap) {
        throw FormatError("unsupported link type " + std::to_string(iface.linktype) +
                          " (expected radiotap, 127)");
      }
      ifaces.push_back(iface);
    } else if (type == kEpb) {
      if (b.remaining() < 20) {
        frame_error();
        continue;
      }
      const std::uint32_t if_id = b.u32();
      const std::uint64_t hi = b.u32();
      const std::uint64_t ts = hi << 32 | b.u32();
      const std::uint32_t caplen = b.u32();
      const std::uint32_t origlen = b.u32();
      if (if_id >= ifaces.size() || caplen > b.remaining()) {
        frame_error();
        continue;
      }
      ++meta.frames_examined;
      const auto ns = static_cast<std::int64_t>(std::llround(ts * ifaces[if_id].tick_ns));
      frames.push_back({ns, b.bytes(caplen), std::max<std::size_t>(origlen, caplen)});
    } else if (type == kSpb) {
      if (b.remaining() < 4 || ifaces.empty()) {
        frame_error();
        continue;
      }
      ++meta.frames_examined;
      const std::uint32_t origlen = b.u32();
      std::size_t caplen = std::min<std::size_t>(origlen, b.remaining());
      if (ifaces[0].snaplen) caplen = std::min<std::size_t>(caplen, ifaces[0].snaplen);
      // SPBs carry no timestamp; order is all we know.
      const std::int64_t ns = frames.empty() ? 0 : frames.back().ts_ns;
      frames.push_back({ns, b.bytes(caplen), std::max<std::size_t>(origlen, caplen)});
    }
  }
}

}  // namespace detail

/// Drops exact (mac, seq, ssid) repeats arriving within 1 ms of each other,
/// e.g. the same frame heard on two antennas. Returns the number dropped.
inline std::size_t remove_duplicates(std::vector<ProbeRecord>& records) {
  using Key = std::tuple<MacAddress, std::uint16_t, std::string>;
  std::map<Key, double> last_seen;
  std::vector<ProbeRecord> kept;
  kept.reserve(records.size());
  std::size_t dropped = 0;
  for (auto& rec : records) {
    Key key{rec.mac, rec.seq.value(), rec.ssid.bytes()};
    auto it = last_seen.find(key);
    if (it != last_seen.end() && std::abs(rec.timestamp - it->second) <= 0.001 + 1e-12) {
      ++dropped;
      continue;
    }
    last_seen[key] = rec.timestamp;
    kept.push_back(std::move(rec));
  }
  records = std::move(kept);
  return dropped;
}

/// Parses a pcap or pcapng byte stream. Throws FormatError only for an
/// unreadable file header or unsupported link type; bad frames are counted.
inline Capture parse_pcap(std::span<const std::uint8_t> file, std::string source = {}) {
  Capture cap;
  cap.meta.source = std::move(source);
  if (file.size() < 4) throw FormatError("file too short for a capture header");

  std::vector<detail::RawFrame> frames;
  if (detail::load_le32(file.data()) == 0x0A0D0D0A) {
    detail::read_pcapng(file, frames, cap.meta);
  } else {
    detail::read_classic(file, frames, cap.meta);
  }

  std::int64_t origin = 0;
  if (!frames.empty()) {
    origin = std::min_element(frames.begin(), frames.end(), [](auto& a, auto& b) {
               return a.ts_ns < b.ts_ns;
             })->ts_ns;
  }
  for (const auto& f : frames) {
    auto decoded = decode_radiotap_frame(f.data, f.orig_len);
    switch (decoded.kind) {
      case FrameKind::Probe:
        decoded.record.timestamp = static_cast<double>(f.ts_ns - origin) / 1e9;
        cap.records.push_back(std::move(decoded.record));
        break;
      case FrameKind::NotProbe:
        ++cap.meta.ignored_count;
        break;
      case FrameKind::Malformed:
        ++cap.meta.parse_error_count;
        break;
    }
  }
  std::stable_sort(cap.records.begin(), cap.records.end(),
                   [](const ProbeRecord& a, const ProbeRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  cap.meta.duplicate_count = remove_duplicates(cap.records);
  cap.meta.record_count = cap.records.size();
  return cap;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Capture parse_pcap_file(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return parse_pcap(bytes, path);
}

/// Writes already radiotap-encapsulated frames as a classic little-endian
/// microsecond pcap.
inline std::vector<std::uint8_t> write_pcap_frames(
    std::span<const std::vector<std::uint8_t>> frames, std::span<const double> timestamps) {
  std::vector<std::uint8_t> out;
  detail::store_le32(out, 0xa1b2c3d4);
  detail::store_le16(out, 2);
  detail::store_le16(out, 4);
  detail::store_le32(out, 0);
  detail::store_le32(out, 0);
  detail::store_le32(out, 65535);
  detail::store_le32(out, kLinkTypeRadiotap);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double t = i < timestamps.size() ? timestamps[i] : 0.0;
    const auto us = static_cast<std::int64_t>(std::llround(t * 1e6));
    detail::store_le32(out, static_cast<std::uint32_t>(us / 1'000'000));
    detail::store_le32(out, static_cast<std::uint32_t>(us % 1'000'000));
    detail::store_le32(out, static_cast<std::uint32_t>(frames[i].size()));
    detail::store_le32(out, static_cast<std::uint32_t>(frames[i].size()));
    out.insert(out.end(), frames[i].begin(), frames[i].end());
  }
  return out;
}

inline std::vector<std::uint8_t> write_pcap(std::span<const ProbeRecord> records) {
  std::vector<std::vector<std::uint8_t>> frames;
  std::vector<double> ts;
  frames.reserve(records.size());
  for (const auto& rec : records) {
    frames.push_back(build_probe_request(rec));
    ts.push_back(rec.timestamp);
  }
  return write_pcap_frames(frames, ts);
}

}  // namespace probelens::capture
