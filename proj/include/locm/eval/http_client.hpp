#pragma once

// Chat-completions client over cpp-httplib. Include from as few translation
// units as possible: httplib.h is large.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <cstdlib>
#include <string>
#include <utility>

#include "locm/error.hpp"
#include "locm/eval/client.hpp"
#include "locm/json.hpp"

namespace locm::eval {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash, e.g. "/v1"
};

/// Splits "https://host:port/v1/" into origin and path prefix.
inline Endpoint split_base_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::ConfigError, "base URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

struct HttpClientConfig {
  std::string base_url;
  std::string api_key;
  std::string model;
  int timeout_seconds = 120;

  /// Reads EVAL_BASE_URL, EVAL_API_KEY and EVAL_MODEL.
  static HttpClientConfig from_env() {
    auto get = [](const char* name) {
      const char* v = std::getenv(name);
      return v ? std::string(v) : std::string();
    };
    HttpClientConfig c{get("EVAL_BASE_URL"), get("EVAL_API_KEY"), get("EVAL_MODEL")};
    if (c.base_url.empty()) throw Error(ErrorCode::ConfigError, "EVAL_BASE_URL is not set");
    if (c.model.empty()) throw Error(ErrorCode::ConfigError, "EVAL_MODEL is not set");
    return c;
  }
};

class HttpChatClient : public ModelClient {
 public:
  explicit HttpChatClient(HttpClientConfig config)
      : config_(std::move(config)), endpoint_(split_base_url(config_.base_url)) {}

  std::string model_id() const override { return config_.model; }

  Completion send(const std::string& prompt, const Decoding& decoding) override {
    httplib::Client http(endpoint_.origin);
    http.set_connection_timeout(config_.timeout_seconds);
    http.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    Json body{{"model", config_.model},
              {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
              {"temperature", decoding.temperature},
              {"max_tokens", decoding.max_tokens}};
    auto res = http.Post(endpoint_.path + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportFailure("request failed: " + httplib::to_string(res.error()), true);
    int status = res->status;
    if (status == 429 || status >= 500)
      throw TransportFailure("server returned " + std::to_string(status), true, status);
    if (status != 200) throw TransportFailure("server returned " + std::to_string(status) + ": " + res->body, false, status);

    auto j = Json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw TransportFailure("response is not JSON", false, status);
    try {
      Completion c;
      const auto& content = j.at("choices").at(0).at("message").at("content");
      c.text = content.is_string() ? content.get<std::string>() : std::string();
      if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
        c.usage.prompt_tokens = u->value("prompt_tokens", 0);
        c.usage.completion_tokens = u->value("completion_tokens", 0);
      }
      return c;
    } catch (const Json::exception& e) {
      throw TransportFailure(std::string("unexpected response shape: ") + e.what(), false, status);
    }
  }

 private:
  HttpClientConfig config_;
  Endpoint endpoint_;
};

}  // namespace locm::eval
