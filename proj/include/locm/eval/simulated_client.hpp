#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "locm/digest.hpp"
#include "locm/eval/client.hpp"
#include "locm/eval/prompt.hpp"
#include "locm/instance.hpp"

namespace locm::eval {

// Offline stand-in for a model server. Answers registered prompts with the
// gold option with probability
//   baseline + (peak - baseline) / (1 + exp((locm - center) / scale)),
// decided by a hash of (seed, instance id), so replies are reproducible.
class SimulatedClient : public ModelClient {
 public:
  struct Params {
    std::string model = "simulated";
    std::uint64_t seed = 0;
    double peak = 0.95;
    double center = 5.0;
    double scale = 0.6;
  };

  explicit SimulatedClient(Params params) : params_(std::move(params)) {}

  void add(const ReasoningInstance& inst, PromptMode mode) {
    entries_[render_prompt(inst, mode).text()] = Entry{inst, mode};
  }

  std::string model_id() const override { return params_.model; }

  double p_correct(const ReasoningInstance& inst) const {
    double baseline = 1.0 / static_cast<double>(inst.options.size());
    double v = inst.score ? inst.score->value : 0.0;
    return baseline + (params_.peak - baseline) / (1.0 + std::exp((v - params_.center) / params_.scale));
  }

  Completion send(const std::string& prompt, const Decoding&) override {
    ++calls_;
    auto it = entries_.find(prompt);
    if (it == entries_.end()) return {"I cannot tell from the context.", {pseudo_count(prompt), 8}};
    const auto& [inst, mode] = it->second;

    std::uint64_t h = mix64(fnv1a64(std::to_string(params_.seed) + "/" + inst.id));
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    std::size_t gold = 0;
    while (gold < inst.options.size() && inst.options[gold] != inst.gold_label) ++gold;
    std::size_t pick = gold;
    if (u >= p_correct(inst)) {
      std::size_t n = inst.options.size();
      pick = (gold + 1 + (h & 1) % (n - 1)) % n;
    }
    std::string letter(1, option_letter(pick));

    std::string text;
    if (mode == PromptMode::Naive) {
      text = "{\"answer\": \"" + letter + "\"}";
    } else {
      std::string reasoning;
      int steps = 1 + static_cast<int>(std::lround(inst.score ? inst.score->value * 2.0 : 1.0));
      for (int s = 1; s <= steps; ++s)
        reasoning += "step" + std::to_string(s) + ": apply the premises to the current facts. ";
      text = "{\"reasoning\": \"" + reasoning + "The correct option is: " + letter + ".\", \"answer\": \"" + letter +
             "\"}";
    }
    return {text, {pseudo_count(prompt), pseudo_count(text)}};
  }

  int calls() const noexcept { return calls_.load(); }

 private:
  struct Entry {
    ReasoningInstance inst;
    PromptMode mode;
  };
  static int pseudo_count(const std::string& s) { return static_cast<int>((s.size() + 3) / 4); }

  Params params_;
  std::map<std::string, Entry> entries_;
  std::atomic<int> calls_{0};
};

}  // namespace locm::eval
