#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "probelens/capture/jsonl.hpp"
#include "probelens/capture/types.hpp"

namespace probelens::geoprobe {

using capture::Ssid;

/// Truncates toward zero to a whole number of hundredths. Values that are
/// already on the grid up to floating-point noise (53.55 * 100 ==
/// 5354.999...) snap to it instead of dropping a cell.
inline std::int64_t truncate_centi(double degrees) {
  if (!std::isfinite(degrees)) throw std::invalid_argument("coordinate is not finite");
  const double scaled = degrees * 100.0;
  const double nearest = std::round(scaled);
  if (std::fabs(scaled - nearest) < 1e-7) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::trunc(scaled));
}

inline double truncate2(double degrees) {
  return static_cast<double>(truncate_centi(degrees)) / 100.0;
}

/// "-0.05", "53.55", "9.90": always two decimals.
inline std::string format_centi(std::int64_t centi) {
  const bool negative = centi < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-centi)
                                     : static_cast<std::uint64_t>(centi);
  std::string frac = std::to_string(mag % 100);
  if (frac.size() < 2) frac.insert(frac.begin(), '0');
  return (negative ? "-" : "") + std::to_string(mag / 100) + "." + frac;
}

/// Parses a coordinate written with exactly two decimals.
inline std::optional<std::int64_t> parse_centi(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  const auto dot = s.find('.');
  if (s.empty() || dot == std::string_view::npos || dot == 0 || s.size() - dot != 3) {
    return std::nullopt;
  }
  std::int64_t v = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == dot) continue;
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
    if (v > 100000) return std::nullopt;
  }
  return negative ? -v : v;
}

/// A ~1 km cell. Only truncated coordinates are ever stored.
struct Location {
  std::int64_t lat_centi = 0;
  std::int64_t lon_centi = 0;

  static Location from_degrees(double lat, double lon) {
    return {truncate_centi(lat), truncate_centi(lon)};
  }
  double lat() const { return static_cast<double>(lat_centi) / 100.0; }
  double lon() const { return static_cast<double>(lon_centi) / 100.0; }
  std::string lat_str() const { return format_centi(lat_centi); }
  std::string lon_str() const { return format_centi(lon_centi); }

  auto operator<=>(const Location&) const = default;
};

enum class GeoStatus { Unresolvable, NotFound, Unique, Multiple };

constexpr std::string_view to_string(GeoStatus s) {
  switch (s) {
    case GeoStatus::Unresolvable: return "unresolvable";
    case GeoStatus::NotFound: return "not_found";
    case GeoStatus::Unique: return "unique";
    case GeoStatus::Multiple: return "multiple";
  }
  return "unknown";
}

inline std::optional<GeoStatus> status_from_string(std::string_view s) {
  for (auto st : {GeoStatus::Unresolvable, GeoStatus::NotFound, GeoStatus::Unique,
                  GeoStatus::Multiple}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

struct GeoResult {
  Ssid ssid;
  GeoStatus status = GeoStatus::NotFound;
  std::vector<Location> locations;  // sorted, distinct
  std::size_t raw_hit_count = 0;

  friend bool operator==(const GeoResult&, const GeoResult&) = default;
};

/// Raw hit from the API, held in memory only until classified.
struct RawHit {
  double lat = 0.0;
  double lon = 0.0;
};

inline GeoResult classify(const Ssid& ssid, std::span<const RawHit> hits) {
  std::set<Location> cells;
  for (const auto& h : hits) cells.insert(Location::from_degrees(h.lat, h.lon));
  GeoResult r;
  r.ssid = ssid;
  r.raw_hit_count = hits.size();
  r.locations.assign(cells.begin(), cells.end());
  r.status = cells.empty()       ? GeoStatus::NotFound
             : cells.size() == 1 ? GeoStatus::Unique
                                 : GeoStatus::Multiple;
  return r;
}

inline GeoResult unresolvable(const Ssid& ssid) {
  GeoResult r;
  r.ssid = ssid;
  r.status = GeoStatus::Unresolvable;
  return r;
}

/// The search endpoint rejects control characters, non-ASCII bytes and a
/// few characters its query parser treats specially. Empty SSIDs can't be
/// searched either.
inline bool is_queryable(const Ssid& ssid) {
  if (ssid.is_wildcard()) return false;
  for (unsigned char c : ssid.bytes()) {
    if (c < 0x20 || c >= 0x7f) return false;
    if (c == '%' || c == '\\' || c == '"') return false;
  }
  return true;
}

inline nlohmann::ordered_json to_json(const GeoResult& r) {
  nlohmann::ordered_json j;
  if (r.ssid.is_utf8()) {
    j["ssid"] = r.ssid.bytes();
  } else {
    j["ssid_b64"] = capture::base64_encode(r.ssid.bytes());
  }
  j["status"] = std::string(to_string(r.status));
  j["locations"] = nlohmann::ordered_json::array();
  for (const auto& l : r.locations) {
    j["locations"].push_back({{"lat", l.lat_str()}, {"lon", l.lon_str()}});
  }
  j["raw_hit_count"] = r.raw_hit_count;
  return j;
}

inline std::optional<GeoResult> result_from_json(const nlohmann::json& j) {
  try {
    GeoResult r;
    if (j.contains("ssid")) {
      r.ssid = Ssid(j.at("ssid").get<std::string>());
    } else {
      auto raw = capture::base64_decode(j.at("ssid_b64").get<std::string>());
      if (!raw) return std::nullopt;
      r.ssid = Ssid(*raw);
    }
    auto status = status_from_string(j.at("status").get<std::string>());
    if (!status) return std::nullopt;
    r.status = *status;
    for (const auto& l : j.at("locations")) {
      auto lat = parse_centi(l.at("lat").get<std::string>());
      auto lon = parse_centi(l.at("lon").get<std::string>());
      if (!lat || !lon) return std::nullopt;
      r.locations.push_back({*lat, *lon});
    }
    r.raw_hit_count = j.at("raw_hit_count").get<std::size_t>();
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct GeoSummary {
  std::size_t unique = 0;
  std::size_t multiple = 0;
  std::size_t not_found = 0;
  std::size_t unresolvable = 0;
  std::size_t total = 0;

  double pct(std::size_t count) const {
    return total ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
  }
};

inline GeoSummary summarize(std::span<const GeoResult> results) {
  GeoSummary s;
  for (const auto& r : results) {
    switch (r.status) {
      case GeoStatus::Unique: ++s.unique; break;
      case GeoStatus::Multiple: ++s.multiple; break;
      case GeoStatus::NotFound: ++s.not_found; break;
      case GeoStatus::Unresolvable: ++s.unresolvable; break;
    }
  }
  s.total = results.size();
  return s;
}

inline nlohmann::ordered_json to_json(const GeoSummary& s) {
  nlohmann::ordered_json j;
  j["total"] = s.total;
  j["unique"] = s.unique;
  j["multiple"] = s.multiple;
  j["not_found"] = s.not_found;
  j["unresolvable"] = s.unresolvable;
  j["unique_pct"] = s.pct(s.unique);
  j["multiple_pct"] = s.pct(s.multiple);
  j["not_found_pct"] = s.pct(s.not_found);
  j["unresolvable_pct"] = s.pct(s.unresolvable);
  return j;
}

}  // namespace probelens::geoprobe
