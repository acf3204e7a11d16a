#pragma once

// Seeded generators for property tests and desk-scale experiments.
// Sampling is done by hand on top of mt19937_64 so streams are identical
// across standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "locm/complexity.hpp"
#include "locm/fol/formula.hpp"
#include "locm/fol/serialize.hpp"
#include "locm/instance.hpp"
#include "locm/record.hpp"
#include "locm/transition.hpp"

namespace locm::synthetic {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }
inline double normal(Rng& rng) {
  double u1 = uniform01(rng), u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}
inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// -- formulas -------------------------------------------------------------

struct FormulaShape {
  int max_depth = 5;
  int max_arity = 3;
  std::vector<std::string> predicates = {"P", "Q", "R", "is_cat", "loves_attn", "S2"};
  std::vector<std::string> constants = {"a", "b", "Wynter", "K", "cust"};
};

namespace detail {

class FormulaGen {
 public:
  FormulaGen(Rng& rng, const FormulaShape& shape) : rng_(rng), shape_(shape) {}

  fol::FormulaPtr run() { return gen(shape_.max_depth); }

 private:
  fol::FormulaPtr atom() {
    const auto& preds = shape_.predicates;
    std::string pred = preds[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(preds.size()) - 1))];
    int arity = uniform_int(rng_, 1, shape_.max_arity);
    std::vector<fol::Term> args;
    for (int i = 0; i < arity; ++i) {
      if (!bound_.empty() && bernoulli(rng_, 0.6)) {
        args.push_back(fol::Term::variable(bound_[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(bound_.size()) - 1))]));
      } else {
        const auto& cs = shape_.constants;
        args.push_back(fol::Term::constant(cs[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(cs.size()) - 1))]));
      }
    }
    return fol::Formula::atom(std::move(pred), std::move(args));
  }

  fol::FormulaPtr gen(int depth) {
    if (depth <= 0 || bernoulli(rng_, 0.25)) return atom();
    int pick = uniform_int(rng_, 0, 6);
    if (pick == 0) return fol::Formula::negation(gen(depth - 1));
    if (pick == 1) {
      auto q = bernoulli(rng_, 0.5) ? fol::Quantifier::ForAll : fol::Quantifier::Exists;
      std::string var = next_var();
      bound_.push_back(var);
      auto body = gen(depth - 1);
      bound_.pop_back();
      return fol::Formula::quantified(q, std::move(var), std::move(body));
    }
    static constexpr fol::Connective kOps[] = {fol::Connective::And, fol::Connective::Or, fol::Connective::Xor,
                                                fol::Connective::Implies, fol::Connective::Iff};
    auto op = kOps[uniform_int(rng_, 0, 4)];
    auto left = gen(depth - 1);
    auto right = gen(depth - 1);
    return fol::Formula::binary(op, std::move(left), std::move(right));
  }

  // Variable names never collide with constants or with each other.
  std::string next_var() {
    static const char* const kNames[] = {"x", "y", "z", "w", "u"};
    std::string base = kNames[uniform_int(rng_, 0, 4)];
    return base + std::to_string(counter_++);
  }

  Rng& rng_;
  const FormulaShape& shape_;
  std::vector<std::string> bound_;
  int counter_ = 0;
};

}  // namespace detail

/// Random well-formed formula: no shadowing, every atom has arguments.
inline fol::FormulaPtr random_formula(Rng& rng, const FormulaShape& shape = {}) {
  return detail::FormulaGen(rng, shape).run();
}

// -- profiles and records -------------------------------------------------

inline OperatorProfile random_profile(Rng& rng, int max_count = 4, int max_hops = 8) {
  OperatorProfile p;
  for (auto op : kAllOperators) {
    int c = uniform_int(rng, 0, max_count);
    p.counts[fol::index_of(op)] = c;
    p.max_depth[fol::index_of(op)] = c > 0 ? uniform_int(rng, 1, 4) : 0;
  }
  p.hops = uniform_int(rng, 1, max_hops);
  p.premise_count = uniform_int(rng, 1, 20);
  return p;
}

struct LogisticCorpus {
  std::size_t n = 5000;
  std::uint64_t seed = 7;
  double intercept = 3.0;  // logit at sqrt(S) = 0
  double slope = 0.5;      // logit decrease per unit sqrt(S)
};

/// Records whose correctness probability is sigmoid(intercept - slope * sqrt(S)),
/// with S computed from a random profile under the default weights.
inline std::vector<EvalRecord> logistic_sqrt_corpus(const LogisticCorpus& cfg = {}) {
  Rng rng(cfg.seed);
  const auto weights = WeightTable::defaults();
  std::vector<EvalRecord> out;
  out.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto profile = random_profile(rng);
    auto score = locm(profile, weights, Transform::Sqrt);
    EvalRecord r;
    r.instance_id = "syn-" + std::to_string(i);
    r.raw = score.raw;
    r.locm_value = score.value;
    r.gold = static_cast<Label>(uniform_int(rng, 0, 2));
    r.correct = bernoulli(rng, sigmoid(cfg.intercept - cfg.slope * score.value));
    r.predicted = r.correct ? r.gold : static_cast<Label>((static_cast<int>(r.gold) + 1) % 3);
    r.premise_count = profile.premise_count;
    r.profile = profile;
    r.model_id = "synthetic";
    out.push_back(std::move(r));
  }
  return out;
}

/// Accuracy independent of premise count and decreasing in LoCM.
inline std::vector<EvalRecord> premise_independent_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    EvalRecord r;
    r.instance_id = "cv-" + std::to_string(i);
    r.premise_count = uniform_int(rng, 1, 20);
    r.locm_value = uniform(rng, 1.0, 10.0);
    r.raw = r.locm_value * r.locm_value;
    r.gold = static_cast<Label>(uniform_int(rng, 0, 2));
    r.correct = bernoulli(rng, 0.97 - 0.07 * r.locm_value);
    r.predicted = r.correct ? r.gold : Label::Unparseable;
    out.push_back(std::move(r));
  }
  return out;
}

/// completion_length = per_unit * locm + gaussian noise, clamped at 0.
inline std::vector<EvalRecord> effort_corpus(std::size_t n, std::uint64_t seed, double per_unit = 20.0,
                                             double noise_sd = 5.0) {
  Rng rng(seed);
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    EvalRecord r;
    r.instance_id = "eff-" + std::to_string(i);
    r.locm_value = uniform(rng, 1.0, 10.0);
    r.gold = static_cast<Label>(i % 3);
    r.completion_length = std::max(0, static_cast<int>(std::lround(per_unit * r.locm_value + noise_sd * normal(rng))));
    r.correct = bernoulli(rng, 0.95 - 0.06 * r.locm_value);
    r.predicted = r.correct ? r.gold : Label::Unparseable;
    out.push_back(std::move(r));
  }
  return out;
}

// -- curves ---------------------------------------------------------------

// a(x) = baseline + (plateau - baseline) / (1 + exp((x - center) / scale))
struct LogisticCollapse {
  double lo = 0.0;
  double hi = 12.0;
  int bins = 9;
  double center = 5.0;
  double scale = 0.8;
  double plateau = 0.9;
  double baseline = 1.0 / 3.0;

  double width() const { return (hi - lo) / bins; }
  double at(double x) const { return baseline + (plateau - baseline) / (1.0 + std::exp((x - center) / scale)); }

  /// Left point where the per-bin decrease |a'(x)| * width first reaches delta.
  /// Requires scale <= (plateau - baseline) * width / (4 * delta).
  double onset(double delta) const {
    double amp = plateau - baseline;
    double s = std::sqrt(4.0 * scale * delta / (amp * width()));
    double arcsech = std::log((1.0 + std::sqrt(1.0 - s * s)) / s);
    return center - 2.0 * scale * arcsech;
  }
};

/// Accuracy evaluated at bin centers, one million trials per bin.
inline AccuracyCurve logistic_curve(const LogisticCollapse& c) {
  std::vector<double> edges;
  for (int i = 0; i <= c.bins; ++i) edges.push_back(c.lo + c.width() * i);
  std::vector<double> acc;
  for (int i = 0; i < c.bins; ++i) acc.push_back(c.at(c.lo + c.width() * (i + 0.5)));
  return curve_from_accuracies(std::move(edges), acc, c.baseline, 1000000);
}

/// Random collapse with a steep region wide enough to exist at the bin scale.
inline LogisticCollapse random_collapse(Rng& rng, double delta = 0.08) {
  LogisticCollapse c;
  c.bins = uniform_int(rng, 9, 15);
  c.center = uniform(rng, 3.0, 9.0);
  c.plateau = uniform(rng, 0.8, 0.98);
  double max_scale = (c.plateau - c.baseline) * c.width() / (4.0 * 1.25 * delta);
  c.scale = uniform(rng, std::min(0.2, max_scale), max_scale);
  return c;
}

/// Two stacked collapses: plateau -> mid -> baseline.
inline AccuracyCurve two_collapse_curve(int bins = 18, double lo = 0.0, double hi = 18.0) {
  std::vector<double> edges, acc;
  double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) edges.push_back(lo + w * i);
  for (int i = 0; i < bins; ++i) {
    double x = lo + w * (i + 0.5);
    acc.push_back(1.0 / 3.0 + 0.3 / (1.0 + std::exp((x - 4.0) / 0.4)) + 0.3 / (1.0 + std::exp((x - 12.0) / 0.4)));
  }
  return curve_from_accuracies(std::move(edges), acc, 1.0 / 3.0, 1000000);
}

// -- instances ------------------------------------------------------------

/// Random instance with 1..max_premises premises and a chain of 0..max_hops
/// steps. Text fields are placeholders; FOL fields are valid formulas.
inline ReasoningInstance random_instance(Rng& rng, const std::string& id, int max_premises = 10, int max_hops = 8) {
  FormulaShape shape;
  shape.max_depth = 3;
  shape.max_arity = 2;
  auto stmt = [&](const std::string& nl) {
    return AlignedStatement{nl, fol::serialize(*random_formula(rng, shape))};
  };
  ReasoningInstance inst;
  inst.id = id;
  int n = uniform_int(rng, 1, max_premises);
  for (int i = 0; i < n; ++i) inst.premises.push_back(stmt("Premise " + std::to_string(i + 1) + " of " + id + "."));
  inst.question = stmt("Question of " + id + ".");
  inst.gold_label = static_cast<Label>(uniform_int(rng, 0, 2));
  int hops = uniform_int(rng, 0, max_hops);
  if (hops > 0) {
    std::vector<ChainStep> chain;
    for (int h = 0; h < hops; ++h) {
      ChainStep step;
      step.facts.push_back(inst.premises[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))]);
      step.conclusion = AlignedStatement{"Step " + std::to_string(h + 1) + " conclusion.",
                                         "derived_" + std::to_string(h + 1) + "(a)"};
      chain.push_back(std::move(step));
    }
    inst.chain = std::move(chain);
  }
  return inst;
}

}  // namespace locm::synthetic
