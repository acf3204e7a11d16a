#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "locm/complexity.hpp"
#include "locm/error.hpp"
#include "locm/fol/parser.hpp"
#include "locm/fol/validate.hpp"
#include "locm/instance.hpp"
#include "locm/interval.hpp"
#include "locm/json.hpp"

namespace locm {

enum class Strictness { Strict, Lenient };

// A line that did not make it into the corpus. code is a diagnostic code
// name, a violation name, "SchemaError" or "MissingFOL".
struct Reject {
  std::size_t line = 0;
  std::string id;
  std::string code;
  std::string message;
};

inline void to_json(Json& j, const Reject& r) {
  j = Json{{"line", r.line}, {"id", r.id}, {"code", r.code}, {"message", r.message}};
}

struct IngestResult {
  std::vector<ReasoningInstance> instances;
  std::vector<Reject> rejects;
};

namespace detail {

struct FolProblem {
  std::string code;
  std::string message;
};

inline std::optional<FolProblem> check_fol(const std::optional<std::string>& fol) {
  if (!fol) return FolProblem{"MissingFOL", "fol is null"};
  auto parsed = fol::parse(*fol);
  if (!parsed) {
    const auto& d = parsed.diagnostic();
    return FolProblem{std::string(fol::to_string(d.code)), d.message};
  }
  auto report = fol::validate_wff(*parsed.value());
  if (!report.ok()) {
    const auto& v = report.violations.front();
    std::string code(fol::to_string(v.kind));
    std::replace(code.begin(), code.end(), ' ', '_');
    return FolProblem{code, v.message};
  }
  return std::nullopt;
}

// Visits every aligned statement with its schema path.
template <class Inst, class Fn>
void for_each_statement(Inst& inst, Fn&& fn) {
  for (std::size_t i = 0; i < inst.premises.size(); ++i) fn(inst.premises[i], "premises[" + std::to_string(i) + "]");
  fn(inst.question, std::string("question"));
  if (!inst.chain) return;
  for (std::size_t s = 0; s < inst.chain->size(); ++s) {
    auto& step = (*inst.chain)[s];
    std::string at = "chain[" + std::to_string(s) + "]";
    for (std::size_t f = 0; f < step.facts.size(); ++f) fn(step.facts[f], at + ".facts[" + std::to_string(f) + "]");
    if (step.rule) fn(*step.rule, at + ".rule");
    fn(step.conclusion, at + ".conclusion");
  }
}

}  // namespace detail

/// Parses one JSONL stream. Blank lines are skipped; line numbers are 1-based.
inline IngestResult ingest_stream(std::istream& in, Strictness strictness) {
  IngestResult result;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;

    ReasoningInstance inst;
    try {
      inst = instance_from_json(Json::parse(text));
    } catch (const Json::parse_error& e) {
      result.rejects.push_back({line, "", "SchemaError", std::string("invalid JSON: ") + e.what()});
      continue;
    } catch (const Error& e) {
      result.rejects.push_back({line, "", std::string(to_string(e.code())), e.what()});
      continue;
    }

    std::optional<Reject> reject;
    detail::for_each_statement(inst, [&](AlignedStatement& s, const std::string& path) {
      if (reject) return;
      if (s.nl.empty()) {
        reject = Reject{line, inst.id, "SchemaError", path + ".nl is empty"};
        return;
      }
      auto problem = detail::check_fol(s.fol);
      if (!problem) return;
      if (strictness == Strictness::Strict) {
        reject = Reject{line, inst.id, problem->code, path + ".fol: " + problem->message};
      } else {
        s.fol.reset();
        inst.flags.push_back(path + ".fol: " + problem->code);
      }
    });
    if (reject)
      result.rejects.push_back(std::move(*reject));
    else
      result.instances.push_back(std::move(inst));
  }
  return result;
}

inline IngestResult ingest(const std::string& path, Strictness strictness) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return ingest_stream(in, strictness);
}

inline void write_jsonl(std::ostream& out, const std::vector<ReasoningInstance>& instances) {
  for (const auto& inst : instances) out << Json(inst).dump() << '\n';
}

inline ComplexityScore score_instance(const ReasoningInstance& inst, const OperatorWeights& weights,
                                      Transform transform) {
  try {
    return locm(profile_instance(inst), weights, transform);
  } catch (const Error& e) {
    throw Error(e.code(), "instance '" + inst.id + "': " + e.what());
  }
}

/// Returns a copy with every score populated. Throws MissingFOL naming the
/// first instance that cannot be scored.
inline std::vector<ReasoningInstance> score_corpus(std::vector<ReasoningInstance> instances,
                                                   const OperatorWeights& weights, Transform transform) {
  for (auto& inst : instances) inst.score = score_instance(inst, weights, transform);
  return instances;
}

// -- stratification -------------------------------------------------------

enum class HardBound { Min, Max };

constexpr std::string_view to_string(HardBound b) noexcept { return b == HardBound::Min ? "min" : "max"; }

struct ExperiencePool {
  std::vector<std::string> easy;
  std::vector<std::string> medium;
  std::vector<std::string> hard;
  double tau_first_min = 0.0;
  double tau_last_min = 0.0;
  HardBound hard_bound = HardBound::Min;
  // Threshold actually used for hard: tau_last_min, or tau_K max under HardBound::Max.
  double hard_threshold = 0.0;

  std::size_t size() const noexcept { return easy.size() + medium.size() + hard.size(); }
};

inline void to_json(Json& j, const ExperiencePool& p) {
  j = Json{{"tau_first_min", p.tau_first_min},
           {"tau_last_min", p.tau_last_min},
           {"hard_bound", to_string(p.hard_bound)},
           {"hard_threshold", p.hard_threshold},
           {"easy", p.easy},
           {"medium", p.medium},
           {"hard", p.hard}};
}

inline ExperiencePool pool_from_json(const Json& j) {
  ExperiencePool p;
  p.easy = j.at("easy").get<std::vector<std::string>>();
  p.medium = j.at("medium").get<std::vector<std::string>>();
  p.hard = j.at("hard").get<std::vector<std::string>>();
  p.tau_first_min = j.at("tau_first_min").get<double>();
  p.tau_last_min = j.at("tau_last_min").get<double>();
  p.hard_bound = j.value("hard_bound", std::string("min")) == "max" ? HardBound::Max : HardBound::Min;
  p.hard_threshold = j.value("hard_threshold", p.tau_last_min);
  return p;
}

struct ScoredId {
  std::string id;
  double value = 0.0;
};

/// Easy is strictly below tau_1 min, hard strictly above the hard threshold,
/// and everything else (including exact ties) is medium.
inline ExperiencePool stratify_scores(const std::vector<ScoredId>& scores,
                                      const std::vector<CriticalInterval>& intervals,
                                      HardBound hard_bound = HardBound::Min) {
  if (intervals.empty()) throw Error(ErrorCode::EmptyIntervals, "stratify needs at least one critical interval");
  for (std::size_t i = 1; i < intervals.size(); ++i)
    if (intervals[i].tau_min < intervals[i - 1].tau_min)
      throw Error(ErrorCode::InvalidArgument, "intervals must be sorted by tau_min");

  ExperiencePool pool;
  pool.tau_first_min = intervals.front().tau_min;
  pool.tau_last_min = intervals.back().tau_min;
  pool.hard_bound = hard_bound;
  pool.hard_threshold = hard_bound == HardBound::Min ? intervals.back().tau_min : intervals.back().tau_max;
  for (const auto& s : scores) {
    if (s.value < pool.tau_first_min)
      pool.easy.push_back(s.id);
    else if (s.value > pool.hard_threshold)
      pool.hard.push_back(s.id);
    else
      pool.medium.push_back(s.id);
  }
  return pool;
}

inline ExperiencePool stratify(const std::vector<ReasoningInstance>& instances,
                               const std::vector<CriticalInterval>& intervals,
                               HardBound hard_bound = HardBound::Min) {
  std::vector<ScoredId> scores;
  scores.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!inst.score) throw Error(ErrorCode::InvalidArgument, "instance '" + inst.id + "' is not scored");
    scores.push_back({inst.id, inst.score->value});
  }
  return stratify_scores(scores, intervals, hard_bound);
}

}  // namespace locm
