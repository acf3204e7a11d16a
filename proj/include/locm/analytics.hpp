#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locm/complexity.hpp"
#include "locm/error.hpp"
#include "locm/json.hpp"
#include "locm/record.hpp"
#include "locm/score.hpp"
#include "locm/transition.hpp"

namespace locm {

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  std::string spec;
};

inline void to_json(Json& j, const CorrelationResult& c) {
  j = Json{{"r", round3(c.r)}, {"n", c.n}, {"spec", c.spec}};
}

/// Product-moment correlation, computed on centered values.
inline CorrelationResult pearson(const std::vector<double>& xs, const std::vector<double>& ys, std::string spec = {}) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::LengthMismatch, "pearson needs equal-length series");
  if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "pearson needs at least 2 samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error(ErrorCode::DegenerateSeries, (spec.empty() ? std::string("series") : spec) + " is constant");
  double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return {r, xs.size(), std::move(spec)};
}

namespace detail {

inline std::vector<const EvalRecord*> usable(const std::vector<EvalRecord>& records) {
  std::vector<const EvalRecord*> out;
  for (const auto& r : records)
    if (!r.failed) out.push_back(&r);
  return out;
}

inline std::vector<double> correctness(const std::vector<const EvalRecord*>& rs) {
  std::vector<double> out;
  out.reserve(rs.size());
  for (auto* r : rs) out.push_back(r->correct ? 1.0 : 0.0);
  return out;
}

}  // namespace detail

// -- transforms -----------------------------------------------------------

struct TransformRow {
  Transform transform;
  CorrelationResult result;
};

struct TransformSweep {
  std::vector<TransformRow> rows;  // in Transform declaration order
  std::vector<Transform> ranking;  // by descending |r|, ties in declaration order
};

/// Correlates f(raw) with correctness for every transform.
inline TransformSweep transform_sweep(const std::vector<EvalRecord>& records) {
  auto rs = detail::usable(records);
  auto ys = detail::correctness(rs);
  TransformSweep out;
  for (auto t : kAllTransforms) {
    std::vector<double> xs;
    xs.reserve(rs.size());
    for (auto* r : rs) xs.push_back(apply(t, r->raw));
    out.rows.push_back({t, pearson(xs, ys, std::string(to_string(t)))});
  }
  std::vector<std::size_t> order(out.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(out.rows[a].result.r) > std::abs(out.rows[b].result.r);
  });
  for (auto i : order) out.ranking.push_back(out.rows[i].transform);
  return out;
}

// -- ablations ------------------------------------------------------------

struct AblationRow {
  std::string setting;                   // "Remove", "Only" or "Full"
  std::optional<OperatorFamily> family;  // empty for Full
  OperatorWeights weights;
  std::optional<CorrelationResult> result;
  std::optional<ErrorCode> error;
  std::string error_message;
};

inline void to_json(Json& j, const AblationRow& row) {
  j = Json{{"setting", row.setting},
           {"operators", row.family ? std::string(symbols_of(*row.family)) : std::string("All operators")},
           {"type", row.family ? std::string(to_string(*row.family)) : std::string("Complete LoCM")},
           {"weights", row.weights}};
  j["r"] = row.result ? Json(round3(row.result->r)) : Json(nullptr);
  j["n"] = row.result ? Json(row.result->n) : Json(nullptr);
  if (row.error) j["error"] = to_string(*row.error);
}

/// Every Remove and Only ablation followed by the Full row. Scores are
/// recomputed from the stored profiles, so records must carry them.
/// A degenerate setting is recorded on its row and the sweep continues.
inline std::vector<AblationRow> ablation_sweep(const std::vector<EvalRecord>& records, const OperatorWeights& base,
                                               Transform transform = Transform::Linear) {
  auto rs = detail::usable(records);
  for (auto* r : rs)
    if (!r->profile)
      throw Error(ErrorCode::InvalidArgument, "record '" + r->instance_id + "' carries no operator profile");
  auto ys = detail::correctness(rs);

  auto run = [&](AblationRow row) {
    std::vector<double> xs;
    xs.reserve(rs.size());
    for (auto* r : rs) xs.push_back(locm(*r->profile, row.weights, transform).value);
    std::string spec = row.setting + (row.family ? " " + std::string(to_string(*row.family)) : std::string());
    try {
      row.result = pearson(xs, ys, spec);
    } catch (const Error& e) {
      row.error = e.code();
      row.error_message = e.what();
    }
    return row;
  };

  std::vector<AblationRow> rows;
  for (auto mode : {AblationMode::Remove, AblationMode::Only})
    for (auto family : kAllFamilies)
      rows.push_back(run({std::string(to_string(mode)), family, ablate_weights(base, mode, family), {}, {}, {}}));
  rows.push_back(run({"Full", std::nullopt, base, {}, {}, {}}));
  return rows;
}

// -- binned accuracy tables -----------------------------------------------

struct AccuracyCell {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  int correct = 0;
  std::optional<double> accuracy;
};

/// Accuracy as a percentage with two decimals, the layout of the published tables.
inline std::string format_percent(const std::optional<double>& accuracy) {
  return accuracy ? format_fixed(*accuracy * 100.0, 2) : std::string("-");
}

inline void to_json(Json& j, const AccuracyCell& c) {
  j = Json{{"lo", round3(c.lo)}, {"hi", round3(c.hi)}, {"count", c.count}, {"correct", c.correct}};
  j["accuracy"] = c.accuracy ? Json(format_percent(c.accuracy)) : Json(nullptr);
}

namespace detail {

// Bins (value, correct) pairs. A single distinct value under equal-width
// binning collapses to a zero-width first bin instead of failing.
inline std::vector<AccuracyCell> bin_cells(const std::vector<std::pair<double, bool>>& items, const Binning& binning) {
  std::vector<double> edges;
  if (auto* e = std::get_if<Edges>(&binning)) {
    check_edges(e->edges);
    edges = e->edges;
  } else {
    int bins = std::get<EqualWidth>(binning).bins;
    if (bins < 1) throw Error(ErrorCode::InvalidArgument, "need at least one bin");
    if (items.empty()) return std::vector<AccuracyCell>(static_cast<std::size_t>(bins));
    auto [lo, hi] = std::minmax_element(items.begin(), items.end());
    if (hi->first > lo->first) {
      edges = equal_width_edges(lo->first, hi->first, bins);
    } else {
      std::vector<AccuracyCell> cells(static_cast<std::size_t>(bins));
      for (auto& c : cells) c.lo = c.hi = lo->first;
      for (const auto& [v, ok] : items) {
        ++cells[0].count;
        cells[0].correct += ok;
      }
      cells[0].accuracy = static_cast<double>(cells[0].correct) / cells[0].count;
      return cells;
    }
  }
  std::vector<AccuracyCell> cells(edges.size() - 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].lo = edges[i];
    cells[i].hi = edges[i + 1];
  }
  for (const auto& [v, ok] : items) {
    auto i = bin_index(edges, v);
    if (!i) continue;
    ++cells[*i].count;
    cells[*i].correct += ok;
  }
  for (auto& c : cells)
    if (c.count > 0) c.accuracy = static_cast<double>(c.correct) / c.count;
  return cells;
}

}  // namespace detail

struct PremiseStratum {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  std::vector<AccuracyCell> cells;
};

inline void to_json(Json& j, const PremiseStratum& s) {
  j = Json{{"premise_lo", s.lo}, {"premise_hi", s.hi}, {"n", s.n}, {"bins", s.cells}};
}

/// Within each closed premise-count interval, bins records by LoCM.
/// EqualWidth spans each stratum's own LoCM range; Edges is shared.
inline std::vector<PremiseStratum> control_variate(const std::vector<EvalRecord>& records,
                                                   const std::vector<std::pair<double, double>>& premise_intervals,
                                                   const Binning& locm_binning = EqualWidth{4}) {
  auto rs = detail::usable(records);
  std::vector<PremiseStratum> out;
  for (const auto& [lo, hi] : premise_intervals) {
    if (hi < lo) throw Error(ErrorCode::InvalidArgument, "premise interval has hi < lo");
    std::vector<std::pair<double, bool>> items;
    for (auto* r : rs)
      if (r->premise_count >= lo && r->premise_count <= hi) items.emplace_back(r->locm_value, r->correct);
    out.push_back({lo, hi, static_cast<int>(items.size()), detail::bin_cells(items, locm_binning)});
  }
  return out;
}

struct LabelCorrelation {
  Label label;
  std::size_t n = 0;
  std::optional<CorrelationResult> result;
  std::optional<ErrorCode> error;
};

struct EffortAnalysis {
  std::vector<AccuracyCell> length_bins;
  std::vector<LabelCorrelation> per_label;  // True, False, Uncertain
};

inline void to_json(Json& j, const EffortAnalysis& e) {
  Json labels = Json::object();
  for (const auto& l : e.per_label) {
    Json entry{{"n", l.n}};
    entry["r"] = l.result ? Json(round3(l.result->r)) : Json(nullptr);
    if (l.error) entry["error"] = to_string(*l.error);
    labels[std::string(to_string(l.label))] = std::move(entry);
  }
  j = Json{{"length_bins", e.length_bins}, {"per_label_corr", labels}};
}

/// Accuracy by completion length, and length-vs-LoCM correlation per gold label.
inline EffortAnalysis effort_analysis(const std::vector<EvalRecord>& records,
                                      const Binning& length_binning = EqualWidth{7}) {
  auto rs = detail::usable(records);
  if (rs.empty()) throw Error(ErrorCode::EmptyRecords, "no usable evaluation records");
  std::vector<std::pair<double, bool>> items;
  for (auto* r : rs) items.emplace_back(r->completion_length, r->correct);

  EffortAnalysis out;
  out.length_bins = detail::bin_cells(items, length_binning);
  for (auto label : {Label::True, Label::False, Label::Uncertain}) {
    std::vector<double> lengths, scores;
    for (auto* r : rs)
      if (r->gold == label) {
        lengths.push_back(r->completion_length);
        scores.push_back(r->locm_value);
      }
    LabelCorrelation lc{label, lengths.size(), std::nullopt, std::nullopt};
    try {
      lc.result = pearson(lengths, scores, "completion_length~locm | gold=" + std::string(to_string(label)));
    } catch (const Error& e) {
      lc.error = e.code();
    }
    out.per_label.push_back(std::move(lc));
  }
  return out;
}

}  // namespace locm
