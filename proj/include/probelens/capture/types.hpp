#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace probelens::capture {

/// Fatal, non-recoverable input problem (unreadable file header, unsupported
/// link type). Per-frame problems are counted instead.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MacAddress {
 public:
  using Octets = std::array<std::uint8_t, 6>;

  constexpr MacAddress() = default;
  constexpr explicit MacAddress(const Octets& octets) : octets_(octets) {}

  /// Accepts "aa:bb:cc:dd:ee:ff" in either case. Returns nullopt otherwise.
  static std::optional<MacAddress> parse(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    Octets out{};
    for (std::size_t i = 0; i < 6; ++i) {
      if (i > 0 && text[i * 3 - 1] != ':') return std::nullopt;
      int hi = hex_value(text[i * 3]);
      int lo = hex_value(text[i * 3 + 1]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return MacAddress(out);
  }

  static MacAddress from_bytes(std::span<const std::uint8_t, 6> bytes) {
    Octets out{};
    for (std::size_t i = 0; i < 6; ++i) out[i] = bytes[i];
    return MacAddress(out);
  }

  constexpr const Octets& octets() const { return octets_; }

  /// U/L bit: second-least-significant bit of the first octet.
  constexpr bool is_local() const { return (octets_[0] & 0x02) != 0; }
  /// I/G bit: least-significant bit of the first octet.
  constexpr bool is_multicast() const { return (octets_[0] & 0x01) != 0; }
  constexpr std::array<std::uint8_t, 3> oui() const {
    return {octets_[0], octets_[1], octets_[2]};
  }

  std::string to_string() const {
    std::string s;
    s.reserve(17);
    for (std::size_t i = 0; i < 6; ++i) {
      if (i) s.push_back(':');
      append_hex(s, octets_[i]);
    }
    return s;
  }

  /// OUI followed by "xx:xx:xx".
  std::string redacted() const {
    std::string s;
    for (std::size_t i = 0; i < 3; ++i) {
      append_hex(s, octets_[i]);
      s.push_back(':');
    }
    s += "xx:xx:xx";
    return s;
  }

  friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;

 private:
  static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }
  static void append_hex(std::string& s, std::uint8_t v) {
    constexpr char digits[] = "0123456789abcdef";
    s.push_back(digits[v >> 4]);
    s.push_back(digits[v & 0x0f]);
  }

  Octets octets_{};
};

inline bool mac_is_local(const MacAddress& mac) { return mac.is_local(); }
inline bool mac_is_multicast(const MacAddress& mac) { return mac.is_multicast(); }
inline std::array<std::uint8_t, 3> oui(const MacAddress& mac) { return mac.oui(); }

/// 12-bit 802.11 sequence number.
class SequenceNumber {
 public:
  static constexpr std::uint16_t kMax = 4095;

  constexpr SequenceNumber() = default;
  explicit SequenceNumber(std::uint32_t value) : value_(checked(value)) {}

  static constexpr bool valid(std::int64_t value) { return value >= 0 && value <= kMax; }

  constexpr std::uint16_t value() const { return value_; }
  SequenceNumber next() const { return SequenceNumber((value_ + 1u) & kMax); }

  friend constexpr auto operator<=>(const SequenceNumber&, const SequenceNumber&) = default;

 private:
  static std::uint16_t checked(std::uint32_t v) {
    if (v > kMax) throw std::out_of_range("sequence number exceeds 12 bits");
    return static_cast<std::uint16_t>(v);
  }
  std::uint16_t value_ = 0;
};

namespace detail {

/// Decodes one UTF-8 scalar at `pos`. Returns U+FFFD and advances one byte on
/// invalid input (overlongs, surrogates and out-of-range values included).
inline char32_t decode_utf8(std::string_view s, std::size_t& pos, bool* ok = nullptr) {
  auto fail = [&]() {
    if (ok) *ok = false;
    ++pos;
    return char32_t{0xFFFD};
  };
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return fail();
  }
  if (pos + len > s.size()) return fail();
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return fail();
    cp = cp << 6 | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return fail();
  pos += len;
  return cp;
}

inline void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | cp >> 6));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | cp >> 12));
    out.push_back(static_cast<char>(0x80 | (cp >> 6 & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | cp >> 18));
    out.push_back(static_cast<char>(0x80 | (cp >> 12 & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp >> 6 & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace detail

inline bool is_valid_utf8(std::string_view s) {
  bool ok = true;
  for (std::size_t pos = 0; pos < s.size() && ok;) detail::decode_utf8(s, pos, &ok);
  return ok;
}

/// SSID field contents, kept as raw octets (0-32 bytes).
class Ssid {
 public:
  static constexpr std::size_t kMaxLength = 32;

  Ssid() = default;
  explicit Ssid(std::string bytes) : bytes_(std::move(bytes)) {
    if (bytes_.size() > kMaxLength) throw std::length_error("SSID longer than 32 octets");
  }
  Ssid(const char* bytes) : Ssid(std::string(bytes)) {}

  const std::string& bytes() const { return bytes_; }
  std::size_t size() const { return bytes_.size(); }
  bool is_wildcard() const { return bytes_.empty(); }
  bool is_utf8() const { return is_valid_utf8(bytes_); }

  /// Lossy UTF-8 view; invalid sequences become U+FFFD.
  std::string display() const {
    std::string out;
    out.reserve(bytes_.size());
    for (std::size_t pos = 0; pos < bytes_.size();) {
      detail::encode_utf8(detail::decode_utf8(bytes_, pos), out);
    }
    return out;
  }

  friend auto operator<=>(const Ssid&, const Ssid&) = default;

 private:
  std::string bytes_;
};

enum class Band { GHz2_4, GHz5 };

constexpr Band band_for_channel(int channel) {
  return channel >= 1 && channel <= 14 ? Band::GHz2_4 : Band::GHz5;
}

constexpr std::string_view to_string(Band band) {
  return band == Band::GHz2_4 ? "2.4GHz" : "5GHz";
}

/// Channel number for a centre frequency in MHz; 0 if unknown.
constexpr int channel_for_frequency(int mhz) {
  if (mhz == 2484) return 14;
  if (mhz >= 2412 && mhz <= 2472) return (mhz - 2407) / 5;
  if (mhz >= 5000 && mhz < 5950) return (mhz - 5000) / 5;
  if (mhz >= 4910 && mhz < 5000) return (mhz - 4000) / 5;
  return 0;
}

/// 24-byte management header; anything shorter is not a management frame.
inline constexpr std::uint32_t kMinManagementFrameLen = 24;

struct ProbeRecord {
  double timestamp = 0.0;  // seconds, capture-relative
  MacAddress mac;
  SequenceNumber seq;
  Ssid ssid;
  int channel = 0;
  std::optional<int> rssi;  // dBm
  std::uint32_t frame_len = kMinManagementFrameLen;

  Band band() const { return band_for_channel(channel); }

  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

struct CaptureMeta {
  std::string source;
  std::size_t frames_examined = 0;
  std::size_t record_count = 0;
  std::size_t parse_error_count = 0;
  std::size_t ignored_count = 0;    // well-formed frames that are not probe requests
  std::size_t duplicate_count = 0;  // multi-antenna duplicates dropped

  bool consistent() const {
    return record_count + parse_error_count + ignored_count + duplicate_count ==
           frames_examined;
  }
};

struct Capture {
  std::vector<ProbeRecord> records;
  CaptureMeta meta;
};

}  // namespace probelens::capture
