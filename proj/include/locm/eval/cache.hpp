#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "locm/digest.hpp"
#include "locm/error.hpp"
#include "locm/eval/client.hpp"
#include "locm/json.hpp"

namespace locm::eval {

inline Json cache_request(const std::string& model_id, const std::string& prompt, const Decoding& decoding) {
  return Json{{"model", model_id}, {"prompt", prompt}, {"decoding", decoding}};
}

inline std::string cache_key(const std::string& model_id, const std::string& prompt, const Decoding& decoding) {
  return sha256_hex(cache_request(model_id, prompt, decoding).dump());
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Content-addressed response store: one <key>.json file per request.
// Readers share the lock; writers are serialized and publish by rename.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create cache directory " + dir_.string());
  }

  const std::filesystem::path& dir() const noexcept { return dir_; }

  std::optional<Completion> get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto path = dir_ / (key + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    auto j = Json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("key", std::string()) != key) return std::nullopt;
    return completion_from_json(j.at("response"));
  }

  void put(const std::string& key, const Json& request, const Completion& response) {
    Json entry{{"key", key}, {"request", request}, {"response", response}, {"timestamp", utc_timestamp()}};
    std::unique_lock lock(mutex_);
    auto final_path = dir_ / (key + ".json");
    auto tmp = dir_ / (key + ".json.tmp" + std::to_string(++tmp_counter_));
    {
      std::ofstream out(tmp);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
      out << entry.dump(2) << '\n';
    }
    std::error_code ec;
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot publish cache entry " + final_path.string());
  }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::uint64_t tmp_counter_ = 0;
};

}  // namespace locm::eval
