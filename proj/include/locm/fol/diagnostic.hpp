#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "locm/fol/formula.hpp"
#include "locm/json.hpp"

namespace locm::fol {

enum class DiagnosticCode {
  LexError,
  UnbalancedParens,
  BadPredicateApplication,
  DanglingQuantifier,
  UnknownToken,
  EmptyInput,
};

constexpr std::string_view to_string(DiagnosticCode code) noexcept {
  switch (code) {
    case DiagnosticCode::LexError: return "LexError";
    case DiagnosticCode::UnbalancedParens: return "UnbalancedParens";
    case DiagnosticCode::BadPredicateApplication: return "BadPredicateApplication";
    case DiagnosticCode::DanglingQuantifier: return "DanglingQuantifier";
    case DiagnosticCode::UnknownToken: return "UnknownToken";
    case DiagnosticCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

inline std::optional<DiagnosticCode> diagnostic_code_from_string(std::string_view s) noexcept {
  for (auto c : {DiagnosticCode::LexError, DiagnosticCode::UnbalancedParens,
                 DiagnosticCode::BadPredicateApplication, DiagnosticCode::DanglingQuantifier,
                 DiagnosticCode::UnknownToken, DiagnosticCode::EmptyInput})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

struct ParseDiagnostic {
  DiagnosticCode code;
  std::string message;
  Span span;
};

inline void to_json(Json& j, const ParseDiagnostic& d) {
  j = Json{{"code", to_string(d.code)},
           {"message", d.message},
           {"start", d.span.start},
           {"end", d.span.end}};
}

// Either a value or the diagnostic explaining why there is none.
template <class T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}                // NOLINT(google-explicit-constructor)
  Result(ParseDiagnostic diag) : data_(std::move(diag)) {}    // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return data_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& { return std::get<0>(data_); }
  T&& value() && { return std::get<0>(std::move(data_)); }
  const ParseDiagnostic& diagnostic() const { return std::get<1>(data_); }

 private:
  std::variant<T, ParseDiagnostic> data_;
};

}  // namespace locm::fol
