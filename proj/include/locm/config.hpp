#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locm/complexity.hpp"
#include "locm/corpus.hpp"
#include "locm/digest.hpp"
#include "locm/error.hpp"
#include "locm/record.hpp"
#include "locm/score.hpp"
#include "locm/transition.hpp"

namespace locm {

struct ConfigKey {
  const char* key;
  const char* default_value;
  const char* help;
};

// Every recognised key with its default. Anything else is rejected.
inline const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"corpus", "", "input corpus (JSONL)"},
      {"out", "out", "run output directory"},
      {"seed", "0", "seed for every sampler"},
      {"strictness", "strict", "ingest mode: strict | lenient"},
      {"transform", "Sqrt", "Linear | Log | Square | Inverse | Sqrt"},
      {"weights.not", "2.0", ""},
      {"weights.and", "1.0", ""},
      {"weights.or", "1.0", ""},
      {"weights.xor", "3.5", ""},
      {"weights.implies", "3.0", ""},
      {"weights.iff", "3.0", ""},
      {"weights.forall", "2.0", ""},
      {"weights.exists", "2.0", ""},
      {"weights.gamma", "2.0", "hop weight"},
      {"binning", "9", "equal-width bin count, or comma-separated explicit edges"},
      {"detector.drop_delta", "0.08", ""},
      {"detector.plateau_eps", "0.03", ""},
      {"detector.baseline_eps", "0.05", ""},
      {"hard_bound", "min", "hard threshold: tau_K min | tau_K max"},
      {"eval.mode", "Naive", "Naive | CoT"},
      {"eval.client", "simulated", "simulated | http (EVAL_BASE_URL, EVAL_API_KEY, EVAL_MODEL)"},
      {"eval.parallelism", "4", ""},
      {"eval.cache_dir", ".locm-cache", "response cache directory"},
      {"eval.max_tokens", "1024", ""},
      {"eval.retries", "5", "attempts per request"},
      {"eval.sim_model", "simulated", "model id reported by the simulated client"},
      {"eval.sim_peak", "0.95", ""},
      {"eval.sim_center", "5.0", ""},
      {"eval.sim_scale", "0.6", ""},
      {"analytics.premise_intervals", "1-5.2;13.6-17.8", "semicolon-separated lo-hi premise-count strata"},
      {"analytics.locm_bins", "4", "LoCM bins per premise stratum"},
      {"analytics.length_bins", "7", "completion-length bin count, or explicit edges"},
      {"curriculum.epsilon", "0.002", ""},
      {"curriculum.eta", "0.1", ""},
      {"curriculum.batch_size", "16", ""},
      {"curriculum.max_steps", "200", "step guard per stage"},
      {"curriculum.lambdas", "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", ""},
      {"curriculum.finetune_steps", "5", ""},
      {"curriculum.eval_fraction", "0.2", "held-out share of every regime"},
      {"curriculum.forgetting", "0.05", "simulator forgetting rate"},
      {"curriculum.noise", "0.1", "simulator gain noise"},
      {"curriculum.theta_nl", "0.70,0.45,0.34", "simulator skills of the NL-trained model"},
      {"curriculum.theta_fol", "0.55,0.60,0.45", "simulator skills of the FOL-trained model"},
  };
  return schema;
}

// Keys that only say where things go; they do not enter the config digest.
inline bool is_location_key(const std::string& key) { return key == "out" || key == "eval.cache_dir"; }

class RunConfig {
 public:
  RunConfig() {
    for (const auto& k : config_schema()) values_[k.key] = k.default_value;
  }

  static std::pair<std::string, std::string> split_assignment(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "expected key=value, got '" + text + "'");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
  }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    values_[key] = value;
  }

  void set_assignment(const std::string& text) {
    auto [k, v] = split_assignment(text);
    set(k, v);
  }

  /// key = value lines; '#' starts a comment line.
  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      try {
        set_assignment(line);
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    const auto& v = get(key);
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "'" + key + "' must be a number, got '" + v + "'");
    }
  }

  int integer(const std::string& key) const {
    double d = number(key);
    if (d != static_cast<double>(static_cast<long long>(d)))
      throw Error(ErrorCode::ConfigError, "'" + key + "' must be an integer");
    return static_cast<int>(d);
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(key));
    for (std::string cell; std::getline(in, cell, ',');) {
      try {
        out.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "'" + key + "' must be a comma-separated list of numbers");
      }
    }
    return out;
  }

  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }

  Strictness strictness() const {
    const auto& v = get("strictness");
    if (v == "strict") return Strictness::Strict;
    if (v == "lenient") return Strictness::Lenient;
    throw Error(ErrorCode::ConfigError, "strictness must be strict or lenient");
  }

  Transform transform() const {
    auto t = transform_from_string(get("transform"));
    if (!t) throw Error(ErrorCode::ConfigError, "unknown transform '" + get("transform") + "'");
    return *t;
  }

  WeightTable weights() const {
    OperatorWeights w;
    for (auto op : kAllOperators) w.weights[fol::index_of(op)] = number("weights." + std::string(fol::name_of(op)));
    w.gamma = number("weights.gamma");
    try {
      return WeightTable::from(w);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }

  Binning binning(const std::string& key = "binning") const {
    const auto& v = get(key);
    if (v.find(',') == std::string::npos) return EqualWidth{integer(key)};
    return Edges{numbers(key)};
  }

  DetectorParams detector() const {
    return {number("detector.plateau_eps"), number("detector.drop_delta"), number("detector.baseline_eps")};
  }

  HardBound hard_bound() const {
    const auto& v = get("hard_bound");
    if (v == "min") return HardBound::Min;
    if (v == "max") return HardBound::Max;
    throw Error(ErrorCode::ConfigError, "hard_bound must be min or max");
  }

  PromptMode mode() const {
    auto m = prompt_mode_from_string(get("eval.mode"));
    if (!m) throw Error(ErrorCode::ConfigError, "eval.mode must be Naive or CoT");
    return *m;
  }

  std::vector<std::pair<double, double>> premise_intervals() const {
    std::vector<std::pair<double, double>> out;
    std::istringstream in(get("analytics.premise_intervals"));
    for (std::string item; std::getline(in, item, ';');) {
      auto dash = item.find('-', 1);
      try {
        if (dash == std::string::npos) throw std::invalid_argument(item);
        out.emplace_back(std::stod(item.substr(0, dash)), std::stod(item.substr(dash + 1)));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "analytics.premise_intervals entries look like lo-hi");
      }
    }
    return out;
  }

  /// Validates every typed key so config errors surface before any work.
  void validate() const {
    seed();
    strictness();
    transform();
    weights();
    binning();
    binning("analytics.length_bins");
    detector();
    hard_bound();
    mode();
    premise_intervals();
    for (const char* k : {"eval.parallelism", "eval.max_tokens", "eval.retries", "analytics.locm_bins",
                          "curriculum.batch_size", "curriculum.max_steps", "curriculum.finetune_steps"})
      integer(k);
    for (const char* k : {"eval.sim_peak", "eval.sim_center", "eval.sim_scale", "curriculum.epsilon",
                          "curriculum.eta", "curriculum.eval_fraction", "curriculum.forgetting", "curriculum.noise"})
      number(k);
    for (const char* k : {"curriculum.lambdas", "curriculum.theta_nl", "curriculum.theta_fol"}) numbers(k);
    const auto& client = get("eval.client");
    if (client != "simulated" && client != "http")
      throw Error(ErrorCode::ConfigError, "eval.client must be simulated or http");
  }

  /// Canonical key=value listing, sorted by key, location keys excluded.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_)
      if (!is_location_key(k)) out += k + "=" + v + "\n";
    return out;
  }

  std::string digest() const { return sha256_hex(canonical()); }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace locm
