#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locm/analytics.hpp"
#include "locm/interval.hpp"
#include "locm/transition.hpp"

namespace locm::report {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Accuracy-vs-LoCM line chart: shaded critical intervals, dashed baseline.
inline std::string curve_svg(const AccuracyCurve& curve, const std::vector<CriticalInterval>& intervals,
                             const std::string& title) {
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
  const double x0 = curve.bin_edges.front(), x1 = curve.bin_edges.back();
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return T + (1.0 - y) * (H - T - B); };
  auto f = [](double v) { return format_fixed(v, 2); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << f(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << xml_escape(title) << "</text>\n";
  for (const auto& ci : intervals)
    os << "<rect class=\"interval\" x=\"" << f(px(ci.tau_min)) << "\" y=\"" << f(py(1.0)) << "\" width=\""
       << f(px(ci.tau_max) - px(ci.tau_min)) << "\" height=\"" << f(py(0.0) - py(1.0))
       << "\" fill=\"#f4a261\" fill-opacity=\"0.25\"/>\n";

  os << "<line x1=\"" << f(L) << "\" y1=\"" << f(py(0)) << "\" x2=\"" << f(W - R) << "\" y2=\"" << f(py(0))
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << f(L) << "\" y1=\"" << f(py(0)) << "\" x2=\"" << f(L) << "\" y2=\"" << f(py(1))
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double y = i / 5.0;
    os << "<text x=\"" << f(L - 8) << "\" y=\"" << f(py(y) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << f(y) << "</text>\n";
  }
  for (std::size_t i = 0; i < curve.size(); ++i)
    os << "<text x=\"" << f(px(curve.center(i))) << "\" y=\"" << f(py(0) + 16)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << f(curve.center(i))
       << "</text>\n";
  os << "<text x=\"" << f((L + W - R) / 2) << "\" y=\"" << f(H - 10)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">LoCM</text>\n";
  os << "<text x=\"16\" y=\"" << f((T + H - B) / 2) << "\" transform=\"rotate(-90 16 " << f((T + H - B) / 2)
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Accuracy</text>\n";

  os << "<line class=\"baseline\" x1=\"" << f(L) << "\" y1=\"" << f(py(curve.baseline)) << "\" x2=\"" << f(W - R)
     << "\" y2=\"" << f(py(curve.baseline)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";

  std::string points;
  for (auto i : curve.populated()) {
    if (!points.empty()) points += ' ';
    points += f(px(curve.center(i))) + "," + f(py(*curve.bin_accuracy[i]));
  }
  os << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"#1d3557\" stroke-width=\"2\"/>\n";
  for (auto i : curve.populated())
    os << "<circle cx=\"" << f(px(curve.center(i))) << "\" cy=\"" << f(py(*curve.bin_accuracy[i]))
       << "\" r=\"3\" fill=\"#1d3557\"/>\n";
  os << "</svg>\n";
  return os.str();
}

inline std::string range(double lo, double hi, int decimals) {
  return format_fixed(lo, decimals) + "-" + format_fixed(hi, decimals);
}

// -- markdown -------------------------------------------------------------

struct NamedCurve {
  std::string name;
  AccuracyCurve curve;
};

inline std::string curves_markdown(const std::vector<NamedCurve>& curves) {
  if (curves.empty()) return {};
  std::ostringstream os;
  os << "| Model |";
  for (std::size_t i = 0; i < curves.front().curve.size(); ++i) os << " Bin " << i + 1 << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < curves.front().curve.size(); ++i) os << "---:|";
  os << '\n';
  for (const auto& nc : curves) {
    os << "| " << nc.name << " |";
    for (const auto& a : nc.curve.bin_accuracy) os << ' ' << (a ? format_fixed(*a) : std::string("-")) << " |";
    os << '\n';
  }
  return os.str();
}

inline std::string transform_markdown(const TransformSweep& sweep) {
  std::ostringstream os;
  os << "| Transform | Definition | Corr. |\n|---|---|---:|\n";
  for (const auto& row : sweep.rows)
    os << "| " << to_string(row.transform) << " | " << definition_of(row.transform) << " | "
       << (row.result.r >= 0 ? "+" : "") << format_fixed(row.result.r) << " |\n";
  return os.str();
}

inline std::string ablation_markdown(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "| Setting | Operator(s) | Type | Corr. |\n|---|---|---|---:|\n";
  for (const auto& row : rows) {
    os << "| " << row.setting << " | " << (row.family ? symbols_of(*row.family) : "All operators") << " | "
       << (row.family ? to_string(*row.family) : "Complete LoCM") << " | ";
    if (row.result)
      os << format_fixed(row.result->r);
    else
      os << (row.error ? to_string(*row.error) : "-");
    os << " |\n";
  }
  return os.str();
}

inline std::string control_variate_markdown(const std::vector<PremiseStratum>& strata) {
  std::ostringstream os;
  os << "| Premise-count interval | LoCM bin | Accuracy |\n|---|---|---:|\n";
  for (const auto& s : strata)
    for (std::size_t i = 0; i < s.cells.size(); ++i)
      os << "| " << (i == 0 ? "[" + format_fixed(s.lo, 1) + ", " + format_fixed(s.hi, 1) + "]" : std::string())
         << " | " << range(s.cells[i].lo, s.cells[i].hi, 1) << " | " << format_percent(s.cells[i].accuracy)
         << (s.cells[i].accuracy ? "%" : "") << " |\n";
  return os.str();
}

inline std::string effort_markdown(const EffortAnalysis& e) {
  std::ostringstream os;
  os << "| token range | Accuracy |\n|---|---:|\n";
  for (const auto& c : e.length_bins)
    os << "| " << range(c.lo, c.hi, 0) << " | " << format_percent(c.accuracy) << (c.accuracy ? "%" : "") << " |\n";
  os << "\n| Gold label | n | Pearson r (length vs LoCM) |\n|---|---:|---:|\n";
  for (const auto& l : e.per_label)
    os << "| " << to_string(l.label) << " | " << l.n << " | "
       << (l.result ? format_fixed(l.result->r) : std::string(l.error ? to_string(*l.error) : "-")) << " |\n";
  return os.str();
}

// -- csv ------------------------------------------------------------------

inline std::string transform_csv(const TransformSweep& sweep) {
  std::ostringstream os;
  os << "transform,definition,r,n,rank\n";
  for (const auto& row : sweep.rows) {
    auto rank = std::find(sweep.ranking.begin(), sweep.ranking.end(), row.transform) - sweep.ranking.begin() + 1;
    os << to_string(row.transform) << ",\"" << definition_of(row.transform) << "\"," << format_fixed(row.result.r, 6)
       << ',' << row.result.n << ',' << rank << '\n';
  }
  return os.str();
}

inline std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "setting,type,r,n,error";
  for (auto op : kAllOperators) os << ",w_" << fol::name_of(op);
  os << ",gamma\n";
  for (const auto& row : rows) {
    os << row.setting << ',' << (row.family ? to_string(*row.family) : "Complete LoCM") << ','
       << (row.result ? format_fixed(row.result->r, 6) : std::string()) << ','
       << (row.result ? std::to_string(row.result->n) : std::string()) << ','
       << (row.error ? to_string(*row.error) : "");
    for (auto op : kAllOperators) os << ',' << format_fixed(row.weights.weight(op), 2);
    os << ',' << format_fixed(row.weights.gamma, 2) << '\n';
  }
  return os.str();
}

inline std::string control_variate_csv(const std::vector<PremiseStratum>& strata) {
  std::ostringstream os;
  os << "premise_lo,premise_hi,bin,locm_lo,locm_hi,count,correct,accuracy_pct\n";
  for (const auto& s : strata)
    for (std::size_t i = 0; i < s.cells.size(); ++i)
      os << format_fixed(s.lo, 1) << ',' << format_fixed(s.hi, 1) << ',' << i + 1 << ','
         << format_fixed(s.cells[i].lo) << ',' << format_fixed(s.cells[i].hi) << ',' << s.cells[i].count << ','
         << s.cells[i].correct << ',' << (s.cells[i].accuracy ? format_percent(s.cells[i].accuracy) : "") << '\n';
  return os.str();
}

inline std::string effort_csv(const EffortAnalysis& e) {
  std::ostringstream os;
  os << "bin,length_lo,length_hi,count,correct,accuracy_pct\n";
  for (std::size_t i = 0; i < e.length_bins.size(); ++i) {
    const auto& c = e.length_bins[i];
    os << i + 1 << ',' << format_fixed(c.lo, 2) << ',' << format_fixed(c.hi, 2) << ',' << c.count << ','
       << c.correct << ',' << (c.accuracy ? format_percent(c.accuracy) : "") << '\n';
  }
  return os.str();
}

}  // namespace locm::report
