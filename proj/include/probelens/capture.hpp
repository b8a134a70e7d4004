#pragma once

#include <sstream>
#include <string>

#include "probelens/capture/frame.hpp"
#include "probelens/capture/jsonl.hpp"
#include "probelens/capture/pcap.hpp"
#include "probelens/capture/synth.hpp"
#include "probelens/capture/types.hpp"

namespace probelens::capture {

enum class InputFormat { Pcap, Pcapng, Jsonl };

inline InputFormat sniff_format(std::span<const std::uint8_t> head) {
  if (head.size() >= 4) {
    switch (detail::load_le32(head.data())) {
      case 0x0A0D0D0A: return InputFormat::Pcapng;
      case 0xa1b2c3d4:
      case 0xd4c3b2a1:
      case 0xa1b23c4d:
      case 0x4d3cb2a1: return InputFormat::Pcap;
      default: break;
    }
  }
  return InputFormat::Jsonl;
}

/// Loads pcap, pcapng or JSONL, chosen by content. Throws FormatError when
/// the file is unreadable or a capture header is broken.
inline Capture load_capture(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  const auto fmt = sniff_format(bytes);
  if (fmt != InputFormat::Jsonl) return parse_pcap(bytes, path);
  // Anything that isn't a capture magic must at least look like JSON lines.
  const auto first = std::find_if(bytes.begin(), bytes.end(), [](std::uint8_t c) {
    return c != ' ' && c != '\t' && c != '\r' && c != '\n';
  });
  if (first != bytes.end() && *first != '{') {
    throw FormatError(path + ": unrecognised capture format");
  }
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return parse_jsonl(in, path);
}

}  // namespace probelens::capture
