#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "locm/error.hpp"
#include "locm/interval.hpp"
#include "locm/json.hpp"
#include "locm/record.hpp"

namespace locm {

struct EqualWidth {
  int bins = 9;
};
struct Edges {
  std::vector<double> edges;
};
using Binning = std::variant<EqualWidth, Edges>;

// Binned accuracy over LoCM. Bins with no records have no accuracy.
struct AccuracyCurve {
  std::vector<double> bin_edges;
  std::vector<std::optional<double>> bin_accuracy;
  std::vector<int> bin_counts;
  std::vector<int> bin_correct;
  double baseline = 1.0 / 3.0;

  std::size_t size() const noexcept { return bin_counts.size(); }
  double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }

  std::vector<std::size_t> populated() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (bin_counts[i] > 0) out.push_back(i);
    return out;
  }
};

namespace detail {

inline std::vector<double> equal_width_edges(double lo, double hi, int bins) {
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + w * i;
  edges.back() = hi;
  return edges;
}

inline void check_edges(const std::vector<double>& edges) {
  if (edges.size() < 3) throw Error(ErrorCode::InvalidArgument, "explicit binning needs at least 3 edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw Error(ErrorCode::InvalidArgument, "bin edges must be strictly increasing");
}

}  // namespace detail

/// Bin index for value under left-closed bins with a right-closed last bin.
/// Returns nullopt outside [edges.front(), edges.back()].
inline std::optional<std::size_t> bin_index(const std::vector<double>& edges, double value) {
  if (value < edges.front() || value > edges.back()) return std::nullopt;
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  auto i = static_cast<std::size_t>(it - edges.begin());
  return std::min(i, edges.size() - 1) - 1;
}

inline std::vector<double> resolve_edges(const std::vector<double>& values, const Binning& binning) {
  if (auto* e = std::get_if<Edges>(&binning)) {
    detail::check_edges(e->edges);
    return e->edges;
  }
  int bins = std::get<EqualWidth>(binning).bins;
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "equal-width binning needs at least 2 bins");
  if (values.empty()) throw Error(ErrorCode::EmptyRecords, "no values to bin");
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*hi > *lo)) throw Error(ErrorCode::DegenerateRange, "all values are equal");
  return detail::equal_width_edges(*lo, *hi, bins);
}

/// Failed records are skipped. Records outside explicit edges are dropped.
inline AccuracyCurve bin_curve(const std::vector<EvalRecord>& records, const Binning& binning = EqualWidth{}) {
  std::vector<const EvalRecord*> usable;
  for (const auto& r : records)
    if (!r.failed) usable.push_back(&r);
  if (usable.empty()) throw Error(ErrorCode::EmptyRecords, "no usable evaluation records");

  std::vector<double> values;
  values.reserve(usable.size());
  for (auto* r : usable) values.push_back(r->locm_value);

  AccuracyCurve curve;
  curve.bin_edges = resolve_edges(values, binning);
  std::size_t n = curve.bin_edges.size() - 1;
  curve.bin_counts.assign(n, 0);
  curve.bin_correct.assign(n, 0);
  double baseline_sum = 0.0;
  for (auto* r : usable) {
    baseline_sum += 1.0 / std::max(1, r->num_options);
    auto i = bin_index(curve.bin_edges, r->locm_value);
    if (!i) continue;
    ++curve.bin_counts[*i];
    if (r->correct) ++curve.bin_correct[*i];
  }
  curve.baseline = baseline_sum / static_cast<double>(usable.size());
  curve.bin_accuracy.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (curve.bin_counts[i] > 0)
      curve.bin_accuracy[i] = static_cast<double>(curve.bin_correct[i]) / curve.bin_counts[i];
  return curve;
}

/// Builds a curve directly from per-bin accuracies, e.g. a published table row.
/// Each bin gets `per_bin` synthetic trials with round(acc * per_bin) successes.
inline AccuracyCurve curve_from_accuracies(std::vector<double> edges, const std::vector<double>& accuracy,
                                           double baseline = 1.0 / 3.0, int per_bin = 1000) {
  detail::check_edges(edges);
  if (accuracy.size() + 1 != edges.size())
    throw Error(ErrorCode::LengthMismatch, "need one accuracy per bin");
  AccuracyCurve c;
  c.bin_edges = std::move(edges);
  c.baseline = baseline;
  for (double a : accuracy) {
    int correct = static_cast<int>(std::lround(a * per_bin));
    c.bin_counts.push_back(per_bin);
    c.bin_correct.push_back(correct);
    c.bin_accuracy.emplace_back(static_cast<double>(correct) / per_bin);
  }
  return c;
}

// -- detection ------------------------------------------------------------

struct DetectorParams {
  double plateau_eps = 0.03;
  double drop_delta = 0.08;
  double baseline_eps = 0.05;
};

struct Convergence {
  bool converged = false;
  std::optional<std::size_t> first_bin;
};

/// Smallest bin index from which every populated bin lies within eps of the
/// baseline, provided at least one populated bin does.
inline Convergence baseline_convergence(const AccuracyCurve& curve, double eps) {
  Convergence out;
  auto pop = curve.populated();
  for (auto it = pop.rbegin(); it != pop.rend(); ++it) {
    if (std::abs(*curve.bin_accuracy[*it] - curve.baseline) > eps) break;
    out.converged = true;
    out.first_bin = *it;
  }
  return out;
}

/// Slope-run detector. A run opens at a populated step whose accuracy
/// decrease is at least drop_delta and extends while successive steps move
/// by at least plateau_eps and the curve has not reached the baseline band.
/// The final run is stretched to the first bin of baseline convergence when
/// the curve only settles at the baseline after the run stops.
inline std::vector<CriticalInterval> detect_intervals(const AccuracyCurve& curve, const DetectorParams& params = {}) {
  auto pop = curve.populated();
  std::vector<CriticalInterval> out;
  if (pop.size() < 3) return out;
  auto acc = [&](std::size_t p) { return *curve.bin_accuracy[pop[p]]; };
  auto near_baseline = [&](std::size_t p) { return std::abs(acc(p) - curve.baseline) <= params.baseline_eps; };

  struct Run {
    std::size_t entry, exit;
  };
  std::vector<Run> runs;
  std::size_t p = 0;
  while (p + 1 < pop.size()) {
    if (acc(p) - acc(p + 1) < params.drop_delta) {
      ++p;
      continue;
    }
    std::size_t exit = p + 1;
    while (exit + 1 < pop.size() && !near_baseline(exit) &&
           std::abs(acc(exit) - acc(exit + 1)) >= params.plateau_eps)
      ++exit;
    if (acc(p) - acc(exit) > 0.0) runs.push_back({p, exit});
    p = exit;
  }

  if (!runs.empty()) {
    auto conv = baseline_convergence(curve, params.baseline_eps);
    if (conv.converged) {
      auto j = static_cast<std::size_t>(std::find(pop.begin(), pop.end(), *conv.first_bin) - pop.begin());
      auto& last = runs.back();
      if (j > last.exit && acc(last.entry) - acc(j) > 0.0) last.exit = j;
    }
  }

  for (const auto& r : runs) {
    CriticalInterval ci;
    ci.k = static_cast<int>(out.size()) + 1;
    ci.tau_min = curve.center(pop[r.entry]);
    ci.tau_max = curve.center(pop[r.exit]);
    ci.drop = acc(r.entry) - acc(r.exit);
    out.push_back(ci);
  }
  return out;
}

// -- output ---------------------------------------------------------------

inline std::string format_fixed(double v, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline Json curve_to_json(const AccuracyCurve& c, const std::vector<CriticalInterval>& intervals = {}) {
  Json bins = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    Json b{{"bin", i + 1},
           {"lo", round3(c.bin_edges[i])},
           {"hi", round3(c.bin_edges[i + 1])},
           {"count", c.bin_counts[i]},
           {"correct", c.bin_correct[i]}};
    b["accuracy"] = c.bin_accuracy[i] ? Json(round3(*c.bin_accuracy[i])) : Json(nullptr);
    bins.push_back(std::move(b));
  }
  Json edges = Json::array();
  for (double e : c.bin_edges) edges.push_back(round3(e));
  return Json{{"baseline", round3(c.baseline)}, {"bin_edges", edges}, {"bins", bins}, {"intervals", intervals}};
}

inline AccuracyCurve curve_from_json(const Json& j) {
  AccuracyCurve c;
  c.baseline = j.at("baseline").get<double>();
  c.bin_edges = j.at("bin_edges").get<std::vector<double>>();
  for (const auto& b : j.at("bins")) {
    c.bin_counts.push_back(b.at("count").get<int>());
    c.bin_correct.push_back(b.at("correct").get<int>());
    const auto& a = b.at("accuracy");
    c.bin_accuracy.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
  }
  if (c.bin_counts.size() + 1 != c.bin_edges.size()) throw Error(ErrorCode::SchemaError, "curve edges/bins mismatch");
  return c;
}

/// One row per bin; intervals follow as comment lines.
inline std::string curve_to_csv(const AccuracyCurve& c, const std::vector<CriticalInterval>& intervals = {}) {
  std::ostringstream os;
  os << "bin,lo,hi,center,count,correct,accuracy\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << i + 1 << ',' << format_fixed(c.bin_edges[i]) << ',' << format_fixed(c.bin_edges[i + 1]) << ','
       << format_fixed(c.center(i)) << ',' << c.bin_counts[i] << ',' << c.bin_correct[i] << ','
       << (c.bin_accuracy[i] ? format_fixed(*c.bin_accuracy[i]) : std::string()) << '\n';
  }
  os << "# baseline=" << format_fixed(c.baseline) << '\n';
  for (const auto& ci : intervals)
    os << "# interval k=" << ci.k << " tau_min=" << format_fixed(ci.tau_min) << " tau_max=" << format_fixed(ci.tau_max)
       << " drop=" << format_fixed(ci.drop) << '\n';
  return os.str();
}

struct AccuracyRow {
  std::string name;
  std::vector<double> accuracy;
};

/// Reads "name,acc1,acc2,..." rows. Lines starting with '#' and a header row
/// whose second cell is not numeric are skipped.
inline std::vector<AccuracyRow> parse_accuracy_table(const std::string& text) {
  std::vector<AccuracyRow> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() < 2) continue;
    AccuracyRow row{cells[0], {}};
    try {
      for (std::size_t i = 1; i < cells.size(); ++i) row.accuracy.push_back(std::stod(cells[i]));
    } catch (const std::exception&) {
      if (rows.empty()) continue;  // header
      throw Error(ErrorCode::SchemaError, "non-numeric accuracy in row '" + cells[0] + "'");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace locm
