#pragma once

#include <vector>

#include "locm/json.hpp"

namespace locm {

// A detected critical interval [tau_min, tau_max] on the LoCM axis.
struct CriticalInterval {
  int k = 1;
  double tau_min = 0.0;
  double tau_max = 0.0;
  double drop = 0.0;

  friend bool operator==(const CriticalInterval&, const CriticalInterval&) = default;
};

inline void to_json(Json& j, const CriticalInterval& c) {
  j = Json{{"k", c.k}, {"tau_min", round3(c.tau_min)}, {"tau_max", round3(c.tau_max)}, {"drop", round3(c.drop)}};
}

inline CriticalInterval interval_from_json(const Json& j) {
  return {j.at("k").get<int>(), j.at("tau_min").get<double>(), j.at("tau_max").get<double>(),
          j.value("drop", 0.0)};
}

inline std::vector<CriticalInterval> intervals_from_json(const Json& j) {
  const Json& list = j.is_object() ? j.at("intervals") : j;
  std::vector<CriticalInterval> out;
  for (const auto& item : list) out.push_back(interval_from_json(item));
  return out;
}

}  // namespace locm
