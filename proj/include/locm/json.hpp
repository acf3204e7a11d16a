#pragma once

#include <cmath>

#include <json.hpp>  // vendored nlohmann/json

namespace locm {

// Insertion-ordered so serialized artifacts keep the documented field order.
using Json = nlohmann::ordered_json;

/// Rounds to three decimals, the precision every serialized score uses.
inline double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace locm
