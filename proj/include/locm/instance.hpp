#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locm/error.hpp"
#include "locm/json.hpp"
#include "locm/score.hpp"

namespace locm {

// Answer labels. Unparseable only ever appears as a model prediction.
enum class Label { True, False, Uncertain, Unparseable };

constexpr std::string_view to_string(Label l) noexcept {
  switch (l) {
    case Label::True: return "True";
    case Label::False: return "False";
    case Label::Uncertain: return "Uncertain";
    case Label::Unparseable: return "Unparseable";
  }
  return "?";
}

inline std::optional<Label> label_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true") return Label::True;
  if (lower == "false") return Label::False;
  if (lower == "uncertain") return Label::Uncertain;
  if (lower == "unparseable") return Label::Unparseable;
  return std::nullopt;
}

inline const std::vector<Label>& default_options() {
  static const std::vector<Label> options = {Label::True, Label::False, Label::Uncertain};
  return options;
}

// A natural-language sentence and its FOL rendering. fol is empty only when
// lenient ingest nulled a malformed formula.
struct AlignedStatement {
  std::string nl;
  std::optional<std::string> fol;

  friend bool operator==(const AlignedStatement&, const AlignedStatement&) = default;
};

struct ChainStep {
  std::vector<AlignedStatement> facts;
  std::optional<AlignedStatement> rule;
  AlignedStatement conclusion;

  friend bool operator==(const ChainStep&, const ChainStep&) = default;
};

struct ReasoningInstance {
  std::string id;
  std::vector<AlignedStatement> premises;
  AlignedStatement question;
  std::vector<Label> options = default_options();
  Label gold_label = Label::Uncertain;
  std::optional<std::vector<ChainStep>> chain;
  std::optional<ComplexityScore> score;
  // Lenient-ingest notes such as "premises[3].fol: UnbalancedParens".
  std::vector<std::string> flags;

  friend bool operator==(const ReasoningInstance&, const ReasoningInstance&) = default;
};

// -- JSON ------------------------------------------------------------------

inline void to_json(Json& j, const AlignedStatement& s) {
  j = Json{{"nl", s.nl}};
  if (s.fol)
    j["fol"] = *s.fol;
  else
    j["fol"] = nullptr;
}

inline void to_json(Json& j, const ChainStep& step) {
  j = Json::object();
  j["facts"] = step.facts;
  if (step.rule)
    j["rule"] = *step.rule;
  else
    j["rule"] = nullptr;
  j["conclusion"] = step.conclusion;
}

inline void to_json(Json& j, const ReasoningInstance& inst) {
  j = Json::object();
  j["id"] = inst.id;
  j["premises"] = inst.premises;
  j["question"] = inst.question;
  Json options = Json::array();
  for (auto l : inst.options) options.push_back(to_string(l));
  j["options"] = std::move(options);
  j["gold_label"] = to_string(inst.gold_label);
  if (inst.chain)
    j["chain"] = *inst.chain;
  else
    j["chain"] = nullptr;
  if (inst.score)
    j["score"] = *inst.score;
  else
    j["score"] = nullptr;
  if (!inst.flags.empty()) j["flags"] = inst.flags;
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SchemaError, where + ": " + what);
}

inline const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_string(const Json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) schema_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

inline AlignedStatement parse_statement(const Json& j, const std::string& where) {
  AlignedStatement s;
  s.nl = require_string(j, "nl", where);
  const auto& fol = require(j, "fol", where);
  if (fol.is_string())
    s.fol = fol.get<std::string>();
  else if (!fol.is_null())
    schema_error(where + ".fol", "expected a string or null");
  return s;
}

inline std::vector<AlignedStatement> parse_statements(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array");
  std::vector<AlignedStatement> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_statement(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

/// Decodes one corpus object. Throws Error(SchemaError) naming the offending field.
inline ReasoningInstance instance_from_json(const Json& j) {
  using namespace detail;
  ReasoningInstance inst;
  inst.id = require_string(j, "id", "instance");
  const std::string where = "instance '" + inst.id + "'";
  inst.premises = parse_statements(require(j, "premises", where), "premises");
  inst.question = parse_statement(require(j, "question", where), "question");

  const auto& options = require(j, "options", where);
  if (!options.is_array() || options.size() < 2 || options.size() > 3)
    schema_error("options", "expected an array of 2 or 3 labels");
  inst.options.clear();
  for (const auto& o : options) {
    auto l = o.is_string() ? label_from_string(o.get<std::string>()) : std::nullopt;
    if (!l || *l == Label::Unparseable) schema_error("options", "unknown label " + o.dump());
    if (std::find(inst.options.begin(), inst.options.end(), *l) != inst.options.end())
      schema_error("options", "duplicate label " + o.dump());
    inst.options.push_back(*l);
  }
  auto gold = label_from_string(require_string(j, "gold_label", where));
  if (!gold || std::find(inst.options.begin(), inst.options.end(), *gold) == inst.options.end())
    schema_error("gold_label", "must be one of the options");
  inst.gold_label = *gold;

  if (auto it = j.find("chain"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) schema_error("chain", "expected an array or null");
    std::vector<ChainStep> chain;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& sj = (*it)[i];
      std::string at = "chain[" + std::to_string(i) + "]";
      ChainStep step;
      step.facts = parse_statements(require(sj, "facts", at), at + ".facts");
      if (auto r = sj.find("rule"); r != sj.end() && !r->is_null()) step.rule = parse_statement(*r, at + ".rule");
      step.conclusion = parse_statement(require(sj, "conclusion", at), at + ".conclusion");
      if (step.facts.empty() && !step.rule) schema_error(at, "needs at least one fact or a rule");
      chain.push_back(std::move(step));
    }
    inst.chain = std::move(chain);
  }

  if (auto it = j.find("score"); it != j.end() && !it->is_null()) {
    const auto& s = *it;
    const auto& raw = require(s, "raw", "score");
    const auto& value = require(s, "value", "score");
    if (!raw.is_number() || !value.is_number()) schema_error("score", "raw and value must be numbers");
    auto t = transform_from_string(require_string(s, "transform", "score"));
    if (!t) schema_error("score.transform", "unknown transform");
    inst.score = ComplexityScore{raw.get<double>(), value.get<double>(), *t};
  }

  if (auto it = j.find("flags"); it != j.end() && it->is_array())
    for (const auto& f : *it)
      if (f.is_string()) inst.flags.push_back(f.get<std::string>());
  return inst;
}

}  // namespace locm
