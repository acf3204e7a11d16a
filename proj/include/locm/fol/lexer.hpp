#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "locm/fol/diagnostic.hpp"

namespace locm::fol {

enum class TokenKind {
  ForAll,
  Exists,
  Not,
  And,
  Or,
  Xor,
  Implies,
  Iff,
  LParen,
  RParen,
  Comma,
  Ident,
  End,
};

constexpr std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::ForAll: return "FORALL";
    case TokenKind::Exists: return "EXISTS";
    case TokenKind::Not: return "NOT";
    case TokenKind::And: return "AND";
    case TokenKind::Or: return "OR";
    case TokenKind::Xor: return "XOR";
    case TokenKind::Implies: return "IMPLIES";
    case TokenKind::Iff: return "IFF";
    case TokenKind::LParen: return "LPAREN";
    case TokenKind::RParen: return "RPAREN";
    case TokenKind::Comma: return "COMMA";
    case TokenKind::Ident: return "IDENT";
    case TokenKind::End: return "END";
  }
  return "?";
}

struct Token {
  TokenKind kind;
  std::string text;  // identifier name; empty for punctuation and operators
  Span span;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

struct Spelling {
  std::string_view text;
  TokenKind kind;
};

// Longest spellings first so "<->" wins over "<" and "->".
inline constexpr std::array<Spelling, 16> kSymbolSpellings = {{
    {"<->", TokenKind::Iff},
    {"->", TokenKind::Implies},
    {"∀", TokenKind::ForAll},
    {"∃", TokenKind::Exists},
    {"¬", TokenKind::Not},
    {"∧", TokenKind::And},
    {"∨", TokenKind::Or},
    {"⊕", TokenKind::Xor},
    {"→", TokenKind::Implies},
    {"↔", TokenKind::Iff},
    {"~", TokenKind::Not},
    {"!", TokenKind::Not},
    {"&", TokenKind::And},
    {"|", TokenKind::Or},
    {"^", TokenKind::Xor},
    {",", TokenKind::Comma},
}};

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr bool is_ident_start(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
constexpr bool is_ident_char(char c) noexcept { return is_ident_start(c) || (c >= '0' && c <= '9'); }

// Length of the UTF-8 sequence starting at s[0], for error spans.
inline std::size_t utf8_length(std::string_view s) noexcept {
  auto b = static_cast<unsigned char>(s[0]);
  std::size_t n = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 1;
  return n <= s.size() ? n : s.size();
}

}  // namespace detail

/// Splits a formula into tokens. Whitespace is dropped; the End sentinel is not included.
inline Result<std::vector<Token>> tokenize(std::string_view input) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < input.size()) {
    char c = input[i];
    if (detail::is_space(c)) {
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      tokens.push_back({c == '(' ? TokenKind::LParen : TokenKind::RParen, {}, {i, i + 1}});
      ++i;
      continue;
    }
    if (detail::is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < input.size() && detail::is_ident_char(input[j])) ++j;
      std::string word(input.substr(i, j - i));
      TokenKind kind = word == "forall"   ? TokenKind::ForAll
                       : word == "exists" ? TokenKind::Exists
                       : word == "xor"    ? TokenKind::Xor
                                          : TokenKind::Ident;
      tokens.push_back({kind, kind == TokenKind::Ident ? std::move(word) : std::string{}, {i, j}});
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& s : detail::kSymbolSpellings) {
      if (input.substr(i, s.text.size()) == s.text) {
        tokens.push_back({s.kind, {}, {i, i + s.text.size()}});
        i += s.text.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    std::size_t len = detail::utf8_length(input.substr(i));
    return ParseDiagnostic{DiagnosticCode::LexError,
                           "unexpected character '" + std::string(input.substr(i, len)) + "'",
                           {i, i + len}};
  }
  if (tokens.empty()) return ParseDiagnostic{DiagnosticCode::EmptyInput, "empty formula", {0, input.size()}};
  return tokens;
}

}  // namespace locm::fol
