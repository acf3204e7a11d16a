#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "locm/complexity.hpp"
#include "locm/error.hpp"
#include "locm/eval/cache.hpp"
#include "locm/eval/client.hpp"
#include "locm/eval/extract.hpp"
#include "locm/eval/prompt.hpp"
#include "locm/instance.hpp"
#include "locm/record.hpp"

namespace locm::eval {

struct EvalOptions {
  PromptMode mode = PromptMode::Naive;
  int parallelism = 4;
  Decoding decoding;
  RetryPolicy retry;
  ResponseCache* cache = nullptr;
  Sleeper sleep = real_sleep;
};

namespace detail {

inline EvalRecord base_record(const ReasoningInstance& inst, const std::string& model, PromptMode mode) {
  if (!inst.score) throw Error(ErrorCode::InvalidArgument, "instance '" + inst.id + "' is not scored");
  EvalRecord r;
  r.instance_id = inst.id;
  r.locm_value = inst.score->value;
  r.raw = inst.score->raw;
  r.gold = inst.gold_label;
  r.prompt_mode = mode;
  r.model_id = model;
  r.premise_count = static_cast<int>(inst.premises.size());
  r.num_options = static_cast<int>(inst.options.size());
  r.profile = profile_instance(inst);
  return r;
}

}  // namespace detail

/// One record per instance, in corpus order. Responses come from the cache
/// when present and are cached as soon as they arrive. Transport failures
/// that survive retries yield failed records; other errors abort the run.
inline std::vector<EvalRecord> run_eval(const std::vector<ReasoningInstance>& corpus, ModelClient& client,
                                        const EvalOptions& options = {}) {
  const std::string model = client.model_id();
  const auto exemplars = default_exemplars(options.mode);
  std::vector<EvalRecord> records(corpus.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        const auto& inst = corpus[i];
        auto rec = detail::base_record(inst, model, options.mode);
        auto prompt = render_prompt(inst, options.mode, exemplars).text();
        auto key = cache_key(model, prompt, options.decoding);
        std::optional<Completion> completion;
        if (options.cache) completion = options.cache->get(key);
        if (!completion) {
          try {
            completion = send_with_retry(client, prompt, options.decoding, options.retry, options.sleep);
          } catch (const TransportFailure&) {
            rec.failed = true;
          }
          if (completion && options.cache)
            options.cache->put(key, cache_request(model, prompt, options.decoding), *completion);
        }
        if (completion) {
          rec.predicted = extract_answer(completion->text, inst.options);
          rec.completion_length = pseudo_tokens(completion->text);
        }
        rec.correct = !rec.failed && rec.predicted == rec.gold;
        records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = corpus.size();
      }
    }
  };

  int workers = std::clamp(options.parallelism, 1, 64);
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(1, corpus.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return records;
}

}  // namespace locm::eval
