#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "locm/instance.hpp"
#include "locm/json.hpp"

namespace locm::eval {

inline constexpr std::size_t kTrailingWindow = 200;

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline std::optional<Label> from_letter(char c, const std::vector<Label>& options) {
  auto i = static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(c)) - 'A');
  if (i < options.size()) return options[i];
  return std::nullopt;
}

inline std::optional<Label> from_word(std::string_view word) {
  auto l = label_from_string(word);
  if (l && *l != Label::Unparseable) return l;
  return std::nullopt;
}

// Accepts "C", "c", "(C)", "C)", "C.", "C) Uncertain", "Uncertain", "uncertain.".
inline std::optional<Label> map_answer_text(std::string_view s, const std::vector<Label>& options) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && (is_space(s.front()) || s.front() == '(' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (is_space(s.back()) || s.back() == '"')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (std::isalpha(static_cast<unsigned char>(s[0])) &&
      (s.size() == 1 || !(std::isalnum(static_cast<unsigned char>(s[1])) || s[1] == '_'))) {
    if (auto l = from_letter(s[0], options)) return l;
  }
  std::size_t end = 0;
  while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
  return from_word(s.substr(0, end));
}

inline std::optional<Label> map_answer_value(const Json& v, const std::vector<Label>& options) {
  if (v.is_string()) return map_answer_text(v.get<std::string>(), options);
  if (v.is_boolean()) return v.get<bool>() ? Label::True : Label::False;
  return std::nullopt;
}

// End position (exclusive) of the balanced object starting at text[start],
// skipping braces inside JSON strings.
inline std::optional<std::size_t> balanced_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"')
      in_string = true;
    else if (c == '{')
      ++depth;
    else if (c == '}' && --depth == 0)
      return i + 1;
  }
  return std::nullopt;
}

inline const Json* answer_field(const Json& obj) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (lower(it.key()) == "answer") return &it.value();
  return nullptr;
}

// Step 1: the JSON object with an answer key that ends last; among objects
// ending at the same place, the outermost.
inline std::optional<Label> from_json(std::string_view text, const std::vector<Label>& options) {
  std::optional<std::size_t> best_start, best_end;
  Json best_value;
  for (std::size_t start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
    auto end = balanced_end(text, start);
    if (!end) continue;
    if (best_end && *end < *best_end) continue;
    if (best_end && *end == *best_end && start > *best_start) continue;
    auto parsed = Json::parse(text.substr(start, *end - start), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) continue;
    const Json* answer = answer_field(parsed);
    if (!answer) continue;
    best_start = start;
    best_end = end;
    best_value = *answer;
  }
  if (!best_end) return std::nullopt;
  return map_answer_value(best_value, options);
}

inline std::optional<Label> last_match(const std::string& window, const std::regex& re,
                                       const std::vector<Label>& options) {
  std::optional<Label> found;
  for (auto it = std::sregex_iterator(window.begin(), window.end(), re); it != std::sregex_iterator(); ++it)
    if (auto l = map_answer_text((*it)[1].str(), options)) found = l;
  return found;
}

// Step 2: heuristic patterns over the trailing window, highest priority first.
inline std::optional<Label> from_trailing(std::string_view text, const std::vector<Label>& options) {
  static const std::regex kOptionIs(R"(option\s+is\s*:?\s*\(?([A-Za-z])\b)", std::regex::icase);
  static const std::regex kAnswerIs(R"(answer"?\s*[:=]\s*"?\(?(true|false|uncertain|[A-Za-z])\b)", std::regex::icase);
  static const std::regex kStandalone(R"((?:^|[^A-Za-z0-9_])([A-Z])\))");
  static const std::regex kWord(R"(\b(true|false|uncertain)\b)", std::regex::icase);
  std::string window(text.size() > kTrailingWindow ? text.substr(text.size() - kTrailingWindow) : text);
  for (const auto* re : {&kOptionIs, &kAnswerIs, &kStandalone, &kWord})
    if (auto l = last_match(window, *re, options)) return l;
  return std::nullopt;
}

}  // namespace detail

/// Recovers the predicted label from a completion. Total: anything that
/// cannot be recovered is Label::Unparseable.
inline Label extract_answer(std::string_view raw, const std::vector<Label>& options = default_options()) {
  if (auto l = detail::from_json(raw, options)) return *l;
  if (auto l = detail::from_trailing(raw, options)) return *l;
  return Label::Unparseable;
}

/// Completion length in pseudo-tokens: bytes / 4, rounded up.
constexpr int pseudo_tokens(std::string_view text) noexcept { return static_cast<int>((text.size() + 3) / 4); }

}  // namespace locm::eval
