#pragma once

// Shared helpers for the test binaries: fixture access, independent oracles
// and hand-rolled generators.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "locm/locm.hpp"

#ifndef LOCM_DATA_DIR
#error "LOCM_DATA_DIR must point at data/"
#endif

namespace locm::test {

inline std::string data_path(const std::string& rel) { return std::string(LOCM_DATA_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Non-empty lines that are not '#' comments.
inline std::vector<std::string> fixture_lines(const std::string& rel) {
  std::vector<std::string> out;
  std::istringstream in(slurp(data_path(rel)));
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline ReasoningInstance kaizen() {
  auto lines = fixture_lines("fixtures/kaizen.jsonl");
  return instance_from_json(Json::parse(lines.at(0)));
}

// -- formula oracles ------------------------------------------------------

/// Fully parenthesized rendering: every compound subformula is wrapped.
inline std::string fully_parenthesized(const fol::Formula& f) {
  using namespace fol;
  if (auto* q = f.as<Quantified>())
    return "(" + std::string(glyph_of(to_operator(q->quantifier))) + q->variable + " " + fully_parenthesized(*q->body) +
           ")";
  if (auto* n = f.as<Negation>()) return "(¬" + fully_parenthesized(*n->operand) + ")";
  if (auto* b = f.as<Binary>())
    return "(" + fully_parenthesized(*b->left) + " " + std::string(glyph_of(to_operator(b->op))) + " " +
           fully_parenthesized(*b->right) + ")";
  const auto& a = *f.as<Atom>();
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.arguments.size(); ++i) out += (i ? ", " : "") + a.arguments[i].name;
  return out + ")";
}

/// Renames every bound variable with a fresh name from `prefix`, keeping
/// binder structure. Free names are untouched.
inline fol::FormulaPtr alpha_rename(const fol::Formula& f, const std::string& prefix, int& counter,
                                    std::vector<std::pair<std::string, std::string>> scope = {}) {
  using namespace fol;
  if (auto* q = f.as<Quantified>()) {
    std::string fresh = prefix + std::to_string(counter++);
    scope.emplace_back(q->variable, fresh);
    return Formula::quantified(q->quantifier, fresh, alpha_rename(*q->body, prefix, counter, scope));
  }
  if (auto* n = f.as<Negation>()) return Formula::negation(alpha_rename(*n->operand, prefix, counter, scope));
  if (auto* b = f.as<Binary>()) {
    auto l = alpha_rename(*b->left, prefix, counter, scope);
    auto r = alpha_rename(*b->right, prefix, counter, scope);
    return Formula::binary(b->op, l, r);
  }
  const auto& a = *f.as<Atom>();
  std::vector<Term> args;
  for (const auto& t : a.arguments) {
    Term out = t;
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == t.name) {
        out.name = it->second;
        break;
      }
    args.push_back(out);
  }
  return Formula::atom(a.predicate, args);
}

/// Inserts random runs of spaces, tabs and newlines between tokens. Spaces
/// are never placed inside identifiers.
inline std::string inject_whitespace(const std::string& text, synthetic::Rng& rng) {
  static const char* const kRuns[] = {"", " ", "  ", "\t", "\n", " \t "};
  std::string out;
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool boundary = i == 0 || !(is_ident(c) && is_ident(text[i - 1]));
    bool utf8_cont = (static_cast<unsigned char>(c) & 0xC0) == 0x80;
    if (boundary && !utf8_cont && c != ' ') out += kRuns[synthetic::uniform_int(rng, 0, 5)];
    if (c == ' ') {
      out += kRuns[synthetic::uniform_int(rng, 1, 5)];
      continue;
    }
    out += c;
  }
  return out + kRuns[synthetic::uniform_int(rng, 0, 5)];
}

/// Wraps the whole formula in 1..3 redundant parenthesis pairs.
inline std::string wrap_parens(const std::string& text, synthetic::Rng& rng) {
  int k = synthetic::uniform_int(rng, 1, 3);
  return std::string(static_cast<std::size_t>(k), '(') + text + std::string(static_cast<std::size_t>(k), ')');
}

// -- score oracle ---------------------------------------------------------

/// Direct evaluation of the weighted sum over operator counts plus hops.
inline double raw_oracle(const OperatorProfile& p, const OperatorWeights& w) {
  double s = w.gamma * p.hops;
  for (auto op : kAllOperators) s += w.weight(op) * p.count(op);
  return s;
}

// -- published-table fixtures -------------------------------------------------

struct CountRow {
  std::vector<double> key;  // leading numeric columns
  int correct = 0;
  int total = 0;
  std::string published;
};

/// Rows of a "...,correct,total,accuracy_pct" CSV; the header row is skipped.
inline std::vector<CountRow> count_rows(const std::string& rel) {
  std::vector<CountRow> out;
  auto lines = fixture_lines(rel);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    CountRow row;
    for (std::size_t c = 0; c + 3 < cells.size(); ++c) row.key.push_back(std::stod(cells[c]));
    row.correct = std::stoi(cells[cells.size() - 3]);
    row.total = std::stoi(cells[cells.size() - 2]);
    row.published = cells.back();
    out.push_back(row);
  }
  return out;
}

inline EvalRecord count_record(const std::string& id, double locm_value, int premises, int length, bool correct) {
  EvalRecord r;
  r.instance_id = id;
  r.locm_value = locm_value;
  r.raw = locm_value * locm_value;
  r.premise_count = premises;
  r.completion_length = length;
  r.correct = correct;
  r.gold = Label::True;
  r.predicted = correct ? Label::True : Label::False;
  return r;
}

/// Records realizing the control-variate table. Each stratum's first bin has
/// one record at the stratum's LoCM minimum and the last bin one at its
/// maximum, so equal-width binning recovers the published bin edges.
inline std::vector<EvalRecord> control_variate_records() {
  std::vector<EvalRecord> out;
  auto rows = count_rows("fixtures/control_variate.csv");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    double p_lo = r.key[0], p_hi = r.key[1], lo = r.key[2], hi = r.key[3];
    int premises = static_cast<int>(std::ceil(p_lo));
    bool first = i == 0 || rows[i - 1].key[0] != p_lo;
    bool last = i + 1 == rows.size() || rows[i + 1].key[0] != p_lo;
    (void)p_hi;
    for (int k = 0; k < r.total; ++k) {
      double v = 0.5 * (lo + hi);
      if (first && k == 0) v = lo;
      if (last && k == r.total - 1) v = hi;
      out.push_back(count_record("cv" + std::to_string(i) + "-" + std::to_string(k), v, premises, 100,
                                 k < r.correct));
    }
  }
  return out;
}

inline std::vector<EvalRecord> completion_length_records(std::vector<double>& edges) {
  std::vector<EvalRecord> out;
  auto rows = count_rows("fixtures/completion_length.csv");
  edges.clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (edges.empty()) edges.push_back(r.key[0]);
    edges.push_back(r.key[1]);
    int length = static_cast<int>(0.5 * (r.key[0] + r.key[1]));
    for (int k = 0; k < r.total; ++k)
      out.push_back(count_record("len" + std::to_string(i) + "-" + std::to_string(k), 1.0 + 0.01 * k, 5, length,
                                 k < r.correct));
  }
  return out;
}

// -- curriculum landscape -------------------------------------------------

/// Trainer whose state is a scalar lambda-like parameter; evaluation is a
/// concave tent peaking at `peak`. Training does nothing.
struct TentTrainer {
  struct State {
    double x = 0.0;
  };
  double peak = 0.3;
  double right_peak = -1.0;  // a second, equal peak when >= 0

  StepResult<State> train_step(const State& s, const ExampleSet&, double) const { return {s, 0.0}; }
  double evaluate(const State& s, const ExampleSet&) const {
    double v = 1.0 - std::abs(s.x - peak);
    if (right_peak >= 0.0) v = std::max(v, 1.0 - std::abs(s.x - right_peak));
    return v;
  }
  State from_parameters(const ParameterVector& p) const { return {p.values.at(0)}; }
  ParameterVector to_parameters(const State& s) const { return {{s.x}, "tent"}; }
};

}  // namespace locm::test
