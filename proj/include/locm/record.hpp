#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "locm/complexity.hpp"
#include "locm/error.hpp"
#include "locm/instance.hpp"
#include "locm/json.hpp"

namespace locm {

enum class PromptMode { Naive, CoT };

constexpr std::string_view to_string(PromptMode m) noexcept { return m == PromptMode::Naive ? "Naive" : "CoT"; }

inline std::optional<PromptMode> prompt_mode_from_string(std::string_view s) noexcept {
  if (s == "Naive" || s == "naive") return PromptMode::Naive;
  if (s == "CoT" || s == "cot") return PromptMode::CoT;
  return std::nullopt;
}

// One model answer to one instance.
struct EvalRecord {
  std::string instance_id;
  double locm_value = 0.0;
  double raw = 0.0;
  Label predicted = Label::Unparseable;
  Label gold = Label::Uncertain;
  bool correct = false;
  int completion_length = 0;
  PromptMode prompt_mode = PromptMode::Naive;
  std::string model_id;
  int premise_count = 0;
  int num_options = 3;
  std::optional<OperatorProfile> profile;
  // Transport failure after retries. Failed records are excluded from curves.
  bool failed = false;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

inline void to_json(Json& j, const EvalRecord& r) {
  j = Json{{"instance_id", r.instance_id},
           {"locm_value", round3(r.locm_value)},
           {"raw", round3(r.raw)},
           {"predicted", to_string(r.predicted)},
           {"gold", to_string(r.gold)},
           {"correct", r.correct},
           {"completion_length", r.completion_length},
           {"prompt_mode", to_string(r.prompt_mode)},
           {"model_id", r.model_id},
           {"premise_count", r.premise_count},
           {"num_options", r.num_options}};
  if (r.profile) j["profile"] = *r.profile;
  j["failed"] = r.failed;
}

inline EvalRecord record_from_json(const Json& j) {
  auto label = [&](const char* key) {
    auto l = label_from_string(j.at(key).get<std::string>());
    if (!l) throw Error(ErrorCode::SchemaError, std::string("record field '") + key + "' is not a label");
    return *l;
  };
  EvalRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.locm_value = j.at("locm_value").get<double>();
  r.raw = j.value("raw", 0.0);
  r.predicted = label("predicted");
  r.gold = label("gold");
  r.correct = j.at("correct").get<bool>();
  r.completion_length = j.value("completion_length", 0);
  auto mode = prompt_mode_from_string(j.value("prompt_mode", std::string("Naive")));
  if (!mode) throw Error(ErrorCode::SchemaError, "unknown prompt_mode");
  r.prompt_mode = *mode;
  r.model_id = j.value("model_id", std::string());
  r.premise_count = j.value("premise_count", 0);
  r.num_options = j.value("num_options", 3);
  if (auto it = j.find("profile"); it != j.end() && !it->is_null()) r.profile = profile_from_json(*it);
  r.failed = j.value("failed", false);
  return r;
}

}  // namespace locm
