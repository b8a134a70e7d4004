#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <system_error>

#include "probelens/crypto.hpp"
#include "probelens/geoprobe/result.hpp"

namespace probelens::geoprobe {

/// One JSON file per SSID, named by the SHA-256 of the SSID bytes. Entries
/// hold the classified result only, so raw coordinates never reach disk.
class GeoCache {
 public:
  explicit GeoCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::filesystem::path path_for(const Ssid& ssid) const {
    return dir_ / (crypto::to_hex(crypto::sha256(ssid.bytes())) + ".json");
  }

  std::optional<GeoResult> get(const Ssid& ssid) const {
    std::ifstream in(path_for(ssid), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    const auto j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    auto r = result_from_json(j);
    if (!r || r->ssid != ssid) return std::nullopt;
    return r;
  }

  /// Writes are serialized and atomic (temp file + rename).
  void put(const GeoResult& result) {
    const std::lock_guard lock(write_mu_);
    const auto target = path_for(result.ssid);
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << to_json(result).dump() << '\n';
      if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex write_mu_;
};

}  // namespace probelens::geoprobe
