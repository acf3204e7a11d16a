#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include "locm/error.hpp"
#include "locm/json.hpp"

namespace locm::eval {

struct Decoding {
  double temperature = 0.0;
  int max_tokens = 1024;
};

inline void to_json(Json& j, const Decoding& d) {
  j = Json{{"temperature", d.temperature}, {"max_tokens", d.max_tokens}};
}

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct Completion {
  std::string text;
  Usage usage;
};

inline void to_json(Json& j, const Completion& c) {
  j = Json{{"text", c.text},
           {"usage", {{"prompt_tokens", c.usage.prompt_tokens}, {"completion_tokens", c.usage.completion_tokens}}}};
}

inline Completion completion_from_json(const Json& j) {
  Completion c;
  c.text = j.at("text").get<std::string>();
  if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
    c.usage.prompt_tokens = it->value("prompt_tokens", 0);
    c.usage.completion_tokens = it->value("completion_tokens", 0);
  }
  return c;
}

// Raised by clients. retryable marks rate limits, server errors and
// connection failures.
class TransportFailure : public Error {
 public:
  TransportFailure(const std::string& message, bool retryable, int status = 0)
      : Error(ErrorCode::TransportError, message), retryable_(retryable), status_(status) {}

  bool retryable() const noexcept { return retryable_; }
  int status() const noexcept { return status_; }

 private:
  bool retryable_;
  int status_;
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string model_id() const = 0;
  /// One attempt. Throws TransportFailure.
  virtual Completion send(const std::string& prompt, const Decoding& decoding) = 0;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{8000};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// Retries retryable failures with exponential backoff, then rethrows.
inline Completion send_with_retry(ModelClient& client, const std::string& prompt, const Decoding& decoding,
                                  const RetryPolicy& policy = {}, const Sleeper& sleep = real_sleep) {
  auto delay = policy.initial_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      return client.send(prompt, decoding);
    } catch (const TransportFailure& e) {
      if (!e.retryable() || attempt >= policy.max_attempts) throw;
    }
    sleep(delay);
    auto next = std::chrono::duration_cast<std::chrono::milliseconds>(delay * policy.multiplier);
    delay = std::min(next, policy.max_delay);
  }
}

}  // namespace locm::eval
