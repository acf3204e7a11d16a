#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "locm/error.hpp"
#include "locm/fol/formula.hpp"
#include "locm/fol/parser.hpp"
#include "locm/fol/validate.hpp"
#include "locm/instance.hpp"
#include "locm/json.hpp"
#include "locm/score.hpp"

namespace locm {

using fol::Operator;
using fol::kAllOperators;
using fol::kOperatorCount;

// Per-operator occurrence counts and maximum AST depths, plus the two
// instance-level quantities the score needs.
struct OperatorProfile {
  std::array<int, kOperatorCount> counts{};
  std::array<int, kOperatorCount> max_depth{};
  int premise_count = 0;
  int hops = 0;

  int count(Operator op) const noexcept { return counts[fol::index_of(op)]; }
  int depth(Operator op) const noexcept { return max_depth[fol::index_of(op)]; }

  /// Merges operator statistics: counts add, depths take the maximum.
  /// premise_count and hops are instance properties and are left alone.
  OperatorProfile& operator+=(const OperatorProfile& other) noexcept {
    for (std::size_t i = 0; i < kOperatorCount; ++i) {
      counts[i] += other.counts[i];
      max_depth[i] = std::max(max_depth[i], other.max_depth[i]);
    }
    return *this;
  }

  friend bool operator==(const OperatorProfile&, const OperatorProfile&) = default;
};

namespace detail {

inline void profile_walk(const fol::Formula& f, int depth, OperatorProfile& p) {
  if (auto op = f.op()) {
    auto i = fol::index_of(*op);
    ++depth;
    ++p.counts[i];
    p.max_depth[i] = std::max(p.max_depth[i], depth);
  }
  if (auto* q = f.as<fol::Quantified>()) {
    profile_walk(*q->body, depth, p);
  } else if (auto* n = f.as<fol::Negation>()) {
    profile_walk(*n->operand, depth, p);
  } else if (auto* b = f.as<fol::Binary>()) {
    profile_walk(*b->left, depth, p);
    profile_walk(*b->right, depth, p);
  }
}

}  // namespace detail

/// Counts operator nodes. Depth is the number of operator/quantifier
/// ancestors, counting the node itself as depth 1.
inline OperatorProfile profile_formula(const fol::Formula& formula) {
  OperatorProfile p;
  detail::profile_walk(formula, 0, p);
  return p;
}

inline fol::FormulaPtr parse_statement_fol(const AlignedStatement& s, const std::string& where) {
  if (!s.fol) throw Error(ErrorCode::MissingFOL, where + " has no FOL");
  auto parsed = fol::parse(*s.fol);
  if (!parsed)
    throw Error(ErrorCode::MissingFOL, where + " FOL does not parse (" +
                                           std::string(fol::to_string(parsed.diagnostic().code)) + ")");
  auto f = std::move(parsed).value();
  auto report = fol::validate_wff(*f);
  if (!report.ok()) throw Error(ErrorCode::MissingFOL, where + " FOL is not well formed: " +
                                                           report.violations.front().message);
  return f;
}

/// Operators are counted over every premise plus the question. The gold
/// chain contributes only its length, as hops.
inline OperatorProfile profile_instance(const ReasoningInstance& inst) {
  OperatorProfile p;
  for (std::size_t i = 0; i < inst.premises.size(); ++i)
    p += profile_formula(*parse_statement_fol(inst.premises[i], "premises[" + std::to_string(i) + "]"));
  p += profile_formula(*parse_statement_fol(inst.question, "question"));
  p.premise_count = static_cast<int>(inst.premises.size());
  p.hops = inst.chain ? static_cast<int>(inst.chain->size()) : 0;
  return p;
}

/// True when the instance has no gold chain, so its score carries no hop term.
inline bool is_hopless(const ReasoningInstance& inst) { return !inst.chain.has_value(); }

// Unconstrained weights. Ablations produce these; the scorer accepts them.
struct OperatorWeights {
  std::array<double, kOperatorCount> weights{};
  double gamma = 0.0;

  double weight(Operator op) const noexcept { return weights[fol::index_of(op)]; }

  friend bool operator==(const OperatorWeights&, const OperatorWeights&) = default;
};

// Validated table: every weight and gamma strictly positive.
class WeightTable {
 public:
  static WeightTable defaults() {
    OperatorWeights w;
    auto set = [&w](Operator op, double v) { w.weights[fol::index_of(op)] = v; };
    set(Operator::And, 1.0);
    set(Operator::Or, 1.0);
    set(Operator::ForAll, 2.0);
    set(Operator::Exists, 2.0);
    set(Operator::Not, 2.0);
    set(Operator::Implies, 3.0);
    set(Operator::Iff, 3.0);
    set(Operator::Xor, 3.5);
    w.gamma = 2.0;
    return WeightTable(w);
  }

  static WeightTable from(const OperatorWeights& w) {
    for (auto op : kAllOperators)
      if (!(w.weight(op) > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    "weight for '" + std::string(fol::name_of(op)) + "' must be positive");
    if (!(w.gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
    return WeightTable(w);
  }

  double weight(Operator op) const noexcept { return w_.weight(op); }
  double gamma() const noexcept { return w_.gamma; }
  const OperatorWeights& values() const noexcept { return w_; }

  operator const OperatorWeights&() const noexcept { return w_; }  // NOLINT(google-explicit-constructor)

 private:
  explicit WeightTable(OperatorWeights w) : w_(w) {}
  OperatorWeights w_;
};

/// Weighted operator sum plus gamma * hops, then the transform. The sum runs in
/// fixed operator order so results are bit-reproducible.
inline ComplexityScore locm(const OperatorProfile& profile, const OperatorWeights& weights,
                            Transform transform = Transform::Sqrt) {
  double raw = 0.0;
  for (auto op : kAllOperators) raw += weights.weight(op) * profile.count(op);
  raw += weights.gamma * profile.hops;
  return {raw, apply(transform, raw), transform};
}

enum class AblationMode { Remove, Only };
enum class OperatorFamily { Negation, BasicConnectives, Quantifiers, Conditionals, Xor, Hops };

inline constexpr std::array<OperatorFamily, 6> kAllFamilies = {
    OperatorFamily::Negation, OperatorFamily::BasicConnectives, OperatorFamily::Quantifiers,
    OperatorFamily::Conditionals, OperatorFamily::Xor, OperatorFamily::Hops};

constexpr std::string_view to_string(AblationMode m) noexcept { return m == AblationMode::Remove ? "Remove" : "Only"; }

constexpr std::string_view to_string(OperatorFamily f) noexcept {
  switch (f) {
    case OperatorFamily::Negation: return "Negation";
    case OperatorFamily::BasicConnectives: return "Basic connectives";
    case OperatorFamily::Quantifiers: return "Quantifiers";
    case OperatorFamily::Conditionals: return "Conditional";
    case OperatorFamily::Xor: return "XOR";
    case OperatorFamily::Hops: return "Hops";
  }
  return "?";
}

constexpr std::string_view symbols_of(OperatorFamily f) noexcept {
  switch (f) {
    case OperatorFamily::Negation: return "¬";
    case OperatorFamily::BasicConnectives: return "∧,∨";
    case OperatorFamily::Quantifiers: return "∀,∃";
    case OperatorFamily::Conditionals: return "→,↔";
    case OperatorFamily::Xor: return "⊕";
    case OperatorFamily::Hops: return "h";
  }
  return "?";
}

constexpr bool in_family(Operator op, OperatorFamily f) noexcept {
  switch (f) {
    case OperatorFamily::Negation: return op == Operator::Not;
    case OperatorFamily::BasicConnectives: return op == Operator::And || op == Operator::Or;
    case OperatorFamily::Quantifiers: return op == Operator::ForAll || op == Operator::Exists;
    case OperatorFamily::Conditionals: return op == Operator::Implies || op == Operator::Iff;
    case OperatorFamily::Xor: return op == Operator::Xor;
    case OperatorFamily::Hops: return false;
  }
  return false;
}

/// Remove zeroes the family (gamma for Hops); Only zeroes everything else.
inline OperatorWeights ablate_weights(const OperatorWeights& base, AblationMode mode, OperatorFamily family) {
  OperatorWeights out = base;
  bool keep_family = mode == AblationMode::Only;
  for (auto op : kAllOperators)
    if (in_family(op, family) != keep_family) out.weights[fol::index_of(op)] = 0.0;
  if ((family == OperatorFamily::Hops) != keep_family) out.gamma = 0.0;
  return out;
}

// -- JSON ------------------------------------------------------------------

inline Json counts_json(const std::array<int, kOperatorCount>& values) {
  Json j = Json::object();
  for (auto op : kAllOperators) j[std::string(fol::name_of(op))] = values[fol::index_of(op)];
  return j;
}

inline void to_json(Json& j, const OperatorWeights& w) {
  j = Json::object();
  for (auto op : kAllOperators) j[std::string(fol::name_of(op))] = w.weight(op);
  j["gamma"] = w.gamma;
}

inline void to_json(Json& j, const OperatorProfile& p) {
  j = Json{{"counts", counts_json(p.counts)},
           {"max_depth", counts_json(p.max_depth)},
           {"premise_count", p.premise_count},
           {"hops", p.hops}};
}

inline OperatorProfile profile_from_json(const Json& j) {
  OperatorProfile p;
  for (auto op : kAllOperators) {
    auto key = std::string(fol::name_of(op));
    p.counts[fol::index_of(op)] = j.at("counts").value(key, 0);
    if (j.contains("max_depth")) p.max_depth[fol::index_of(op)] = j.at("max_depth").value(key, 0);
  }
  p.premise_count = j.value("premise_count", 0);
  p.hops = j.value("hops", 0);
  return p;
}

/// The per-instance score record: {raw, value, transform, counts, hops, premise_count}.
inline Json score_record(const ComplexityScore& s, const OperatorProfile& p) {
  Json j = s;
  j["counts"] = counts_json(p.counts);
  j["hops"] = p.hops;
  j["premise_count"] = p.premise_count;
  return j;
}

}  // namespace locm
