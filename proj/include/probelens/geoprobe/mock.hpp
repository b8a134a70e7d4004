#pragma once

// Loopback server replaying canned search responses, for offline runs.
//
// responses.json:
//   {
//     "token": "optional; requests with another credential get 401",
//     "networks": {
//       "<ssid>": [[lat, lon], ...],                       // 200 with these hits
//       "<ssid>": {"status": 429, "body": {...}},          // raw reply
//       "<ssid>": {"sequence": [<entry>, <entry>, ...]}    // one per request, last repeats
//     }
//   }
// Unknown SSIDs get a 200 reply with no results.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "probelens/geoprobe/client.hpp"

namespace probelens::geoprobe {

class MockServer {
 public:
  explicit MockServer(nlohmann::json responses) : responses_(std::move(responses)) {
    if (!responses_.is_object()) throw std::invalid_argument("mock responses must be an object");
    if (responses_.contains("token")) token_ = responses_["token"].get<std::string>();
    if (responses_.contains("networks")) networks_ = responses_["networks"];

    server_.Get(kSearchPath, [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("mock server could not bind a loopback port");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  /// Loads `<dir>/responses.json`.
  static std::unique_ptr<MockServer> from_dir(const std::filesystem::path& dir) {
    const auto file = dir / "responses.json";
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read mock responses " + file.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("mock responses are not valid JSON");
    return std::make_unique<MockServer>(std::move(j));
  }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  ~MockServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t request_count() const { return requests_.load(); }

 private:
  static nlohmann::json hits_body(const nlohmann::json& hits, const std::string& ssid) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& h : hits) {
      results.push_back({{"ssid", ssid}, {"trilat", h.at(0)}, {"trilong", h.at(1)}});
    }
    return {{"success", true}, {"totalResults", results.size()}, {"results", results}};
  }

  void reply(const nlohmann::json& entry, const std::string& ssid, httplib::Response& res) {
    if (entry.is_array()) {
      res.status = 200;
      res.set_content(hits_body(entry, ssid).dump(), "application/json");
      return;
    }
    res.status = entry.value("status", 200);
    if (entry.contains("retry_after")) {
      res.set_header("Retry-After", std::to_string(entry["retry_after"].get<int>()));
    }
    const auto& body = entry.contains("body") ? entry["body"] : nlohmann::json::object();
    res.set_content(body.is_string() ? body.get<std::string>() : body.dump(), "application/json");
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (!token_.empty() && req.get_header_value("Authorization") != "Basic " + token_) {
      res.status = 401;
      res.set_content(R"({"success":false,"message":"invalid credential"})", "application/json");
      return;
    }
    const std::string ssid = req.get_param_value("ssid");
    auto it = networks_.find(ssid);
    if (it == networks_.end()) {
      reply(nlohmann::json::array(), ssid, res);
      return;
    }
    if (it->is_object() && it->contains("sequence")) {
      const auto& seq = (*it)["sequence"];
      std::size_t n;
      {
        const std::lock_guard lock(mu_);
        n = served_[ssid]++;
      }
      reply(seq.at(std::min(n, seq.size() - 1)), ssid, res);
      return;
    }
    reply(*it, ssid, res);
  }

  nlohmann::json responses_;
  nlohmann::json networks_ = nlohmann::json::object();
  std::string token_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<std::size_t> requests_{0};
  std::mutex mu_;
  std::map<std::string, std::size_t> served_;
};

}  // namespace probelens::geoprobe
