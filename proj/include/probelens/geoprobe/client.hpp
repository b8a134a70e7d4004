#pragma once

// Client for a WiGLE-compatible network search API.

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "probelens/geoprobe/result.hpp"

namespace probelens::geoprobe {

inline constexpr const char* kSearchPath = "/api/v2/network/search";
inline constexpr const char* kTokenEnvVar = "GEO_API_TOKEN";

struct GeoConfig {
  std::string base_url = "https://api.wigle.net";
  std::string token;                 // sent as "Authorization: Basic <token>"
  double max_requests_per_s = 1.0;   // <= 0 disables pacing
  int max_retries = 4;               // on HTTP 429
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{30};
};

enum class GeoErrorKind { Auth, RateLimited, Http, Transport, BadResponse };

constexpr std::string_view to_string(GeoErrorKind k) {
  switch (k) {
    case GeoErrorKind::Auth: return "auth";
    case GeoErrorKind::RateLimited: return "rate_limited";
    case GeoErrorKind::Http: return "http";
    case GeoErrorKind::Transport: return "transport";
    case GeoErrorKind::BadResponse: return "bad_response";
  }
  return "unknown";
}

/// A failed lookup. Unlike NotFound this says nothing about the SSID; the
/// query may succeed when retried later.
class GeoError : public std::runtime_error {
 public:
  GeoError(GeoErrorKind kind, const std::string& what, int http_status = 0)
      : std::runtime_error(what), kind_(kind), http_status_(http_status) {}
  GeoErrorKind kind() const { return kind_; }
  int http_status() const { return http_status_; }

 private:
  GeoErrorKind kind_;
  int http_status_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Parses a search response body into raw hits. Results missing a numeric
/// trilat/trilong are ignored.
inline std::vector<RawHit> parse_search_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw GeoError(GeoErrorKind::BadResponse, "search response is not a JSON object");
  }
  if (j.contains("success") && j["success"].is_boolean() && !j["success"].get<bool>()) {
    const std::string msg = j.value("message", std::string("request rejected"));
    throw GeoError(GeoErrorKind::BadResponse, "search failed: " + msg);
  }
  std::vector<RawHit> hits;
  if (!j.contains("results")) return hits;
  if (!j["results"].is_array()) {
    throw GeoError(GeoErrorKind::BadResponse, "search response has non-array results");
  }
  for (const auto& r : j["results"]) {
    if (!r.is_object()) continue;
    const auto lat = r.find("trilat");
    const auto lon = r.find("trilong");
    if (lat == r.end() || lon == r.end() || !lat->is_number() || !lon->is_number()) continue;
    const double la = lat->get<double>(), lo = lon->get<double>();
    if (!std::isfinite(la) || !std::isfinite(lo)) continue;
    hits.push_back({la, lo});
  }
  return hits;
}

/// One logical requester per credential: not thread-safe by design.
class GeoClient {
 public:
  explicit GeoClient(GeoConfig config, Sleeper sleeper = sleep_for)
      : config_(std::move(config)), sleeper_(std::move(sleeper)), http_(config_.base_url) {
    if (!http_.is_valid()) {
      throw std::invalid_argument("unsupported geo API base URL: " + config_.base_url);
    }
    http_.set_connection_timeout(config_.timeout);
    http_.set_read_timeout(config_.timeout);
  }

  /// Returns raw hits by exact SSID. Throws GeoError on failure.
  std::vector<RawHit> search(const Ssid& ssid) {
    const httplib::Params params = {{"ssid", ssid.bytes()}};
    const httplib::Headers headers = {{"Authorization", "Basic " + config_.token},
                                      {"Accept", "application/json"}};
    auto backoff = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      pace();
      ++requests_sent_;
      auto res = http_.Get(kSearchPath, params, headers);
      if (!res) {
        throw GeoError(GeoErrorKind::Transport,
                       "request failed: " + httplib::to_string(res.error()));
      }
      const int status = res->status;
      if (status == 200) return parse_search_response(res->body);
      if (status == 401 || status == 403) {
        throw GeoError(GeoErrorKind::Auth, "API rejected the credential (HTTP " +
                                               std::to_string(status) + ")",
                       status);
      }
      if (status != 429) {
        throw GeoError(GeoErrorKind::Http, "HTTP " + std::to_string(status), status);
      }
      if (attempt >= config_.max_retries) {
        throw GeoError(GeoErrorKind::RateLimited,
                       "rate limited after " + std::to_string(attempt + 1) + " attempts", 429);
      }
      auto wait = backoff;
      if (res->has_header("Retry-After")) {
        try {
          wait = std::chrono::seconds(std::stoi(res->get_header_value("Retry-After")));
        } catch (const std::exception&) {
        }
      }
      sleeper_(wait);
      backoff *= 2;
    }
  }

  std::size_t requests_sent() const { return requests_sent_; }
  const GeoConfig& config() const { return config_; }

 private:
  void pace() {
    using clock = std::chrono::steady_clock;
    if (config_.max_requests_per_s > 0 && last_request_) {
      const auto interval = std::chrono::duration_cast<clock::duration>(
          std::chrono::duration<double>(1.0 / config_.max_requests_per_s));
      const auto due = *last_request_ + interval;
      const auto now = clock::now();
      if (now < due) {
        sleeper_(std::chrono::ceil<std::chrono::milliseconds>(due - now));
      }
    }
    last_request_ = clock::now();
  }

  GeoConfig config_;
  Sleeper sleeper_;
  httplib::Client http_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  std::size_t requests_sent_ = 0;
};

}  // namespace probelens::geoprobe
