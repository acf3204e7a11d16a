#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include "locm/json.hpp"

namespace locm {

// Monotone map applied to the raw weighted score.
enum class Transform { Linear, Log, Square, Inverse, Sqrt };

inline constexpr std::array<Transform, 5> kAllTransforms = {
    Transform::Linear, Transform::Log, Transform::Square, Transform::Inverse, Transform::Sqrt};

constexpr std::string_view to_string(Transform t) noexcept {
  switch (t) {
    case Transform::Linear: return "Linear";
    case Transform::Log: return "Log";
    case Transform::Square: return "Square";
    case Transform::Inverse: return "Inverse";
    case Transform::Sqrt: return "Sqrt";
  }
  return "?";
}

constexpr std::string_view definition_of(Transform t) noexcept {
  switch (t) {
    case Transform::Linear: return "f(C) = C";
    case Transform::Log: return "f(C) = log(C+1)";
    case Transform::Square: return "f(C) = C^2";
    case Transform::Inverse: return "f(C) = 1/(C+1)";
    case Transform::Sqrt: return "f(C) = sqrt(C)";
  }
  return "?";
}

inline std::optional<Transform> transform_from_string(std::string_view s) noexcept {
  for (auto t : kAllTransforms)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

/// Inverse is the only decreasing member of the family.
constexpr bool is_increasing(Transform t) noexcept { return t != Transform::Inverse; }

inline double apply(Transform t, double c) noexcept {
  switch (t) {
    case Transform::Linear: return c;
    case Transform::Log: return std::log(c + 1.0);
    case Transform::Square: return c * c;
    case Transform::Inverse: return 1.0 / (c + 1.0);
    case Transform::Sqrt: return std::sqrt(c);
  }
  return c;
}

struct ComplexityScore {
  double raw = 0.0;
  double value = 0.0;
  Transform transform = Transform::Sqrt;

  friend bool operator==(const ComplexityScore&, const ComplexityScore&) = default;
};

inline void to_json(Json& j, const ComplexityScore& s) {
  j = Json{{"raw", s.raw}, {"value", s.value}, {"transform", to_string(s.transform)}};
}

}  // namespace locm
