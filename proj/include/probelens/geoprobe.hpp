#pragma once

// SSID geolocation through a WiGLE-compatible search API, with 2-decimal
// truncation and resolvability classification.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "probelens/geoprobe/cache.hpp"
#include "probelens/geoprobe/client.hpp"
#include "probelens/geoprobe/mock.hpp"
#include "probelens/geoprobe/result.hpp"

namespace probelens::geoprobe {

/// Unqueryable SSIDs come back Unresolvable without a request.
inline GeoResult lookup(const Ssid& ssid, GeoClient& client) {
  if (!is_queryable(ssid)) return unresolvable(ssid);
  const auto hits = client.search(ssid);
  return classify(ssid, hits);
}

struct LookupFailure {
  Ssid ssid;
  GeoErrorKind kind = GeoErrorKind::Transport;
  std::string message;
};

struct BatchResult {
  std::vector<GeoResult> results;  // completed lookups, input order
  std::vector<LookupFailure> errors;
  std::size_t cache_hits = 0;
  std::size_t unresolvable_skipped = 0;
};

/// Looks up each distinct SSID once, serving repeats from `cache` when
/// given. After an authentication failure no more requests are sent and the
/// remaining SSIDs are listed as failures.
inline BatchResult batch_lookup(std::span<const Ssid> ssids, GeoClient& client,
                                GeoCache* cache = nullptr) {
  BatchResult out;
  std::map<Ssid, GeoResult> done;
  std::map<Ssid, bool> failed;
  std::optional<GeoError> auth_failure;

  for (const auto& ssid : ssids) {
    if (auto it = done.find(ssid); it != done.end()) {
      out.results.push_back(it->second);
      continue;
    }
    if (failed.count(ssid)) continue;
    if (!is_queryable(ssid)) {
      ++out.unresolvable_skipped;
      done.emplace(ssid, unresolvable(ssid));
      out.results.push_back(done.at(ssid));
      continue;
    }
    if (cache) {
      if (auto hit = cache->get(ssid)) {
        ++out.cache_hits;
        done.emplace(ssid, *hit);
        out.results.push_back(std::move(*hit));
        continue;
      }
    }
    if (auth_failure) {
      failed[ssid] = true;
      out.errors.push_back({ssid, GeoErrorKind::Auth,
                            std::string("not attempted: ") + auth_failure->what()});
      continue;
    }
    try {
      auto r = lookup(ssid, client);
      if (cache) cache->put(r);
      done.emplace(ssid, r);
      out.results.push_back(std::move(r));
    } catch (const GeoError& e) {
      failed[ssid] = true;
      out.errors.push_back({ssid, e.kind(), e.what()});
      if (e.kind() == GeoErrorKind::Auth) auth_failure = e;
    }
  }
  return out;
}

inline nlohmann::ordered_json to_json(const LookupFailure& f) {
  nlohmann::ordered_json j;
  if (f.ssid.is_utf8()) {
    j["ssid"] = f.ssid.bytes();
  } else {
    j["ssid_b64"] = capture::base64_encode(f.ssid.bytes());
  }
  j["kind"] = std::string(to_string(f.kind));
  j["message"] = f.message;
  return j;
}

}  // namespace probelens::geoprobe
