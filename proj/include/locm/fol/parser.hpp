#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "locm/fol/diagnostic.hpp"
#include "locm/fol/formula.hpp"
#include "locm/fol/lexer.hpp"

namespace locm::fol {

namespace detail {

// Precedence, loosest first: ↔ (right), → (right), ⊕, ∨, ∧ (left), then the
// prefix forms ¬ and quantifiers. A quantifier's body extends as far right as
// the enclosing group allows.
class Parser {
 public:
  Parser(std::vector<Token> tokens, std::size_t input_size)
      : tokens_(std::move(tokens)), input_size_(input_size) {
    tokens_.push_back({TokenKind::End, {}, {input_size_, input_size_}});
  }

  Result<FormulaPtr> run() {
    if (auto bad = check_parens()) return *bad;
    auto f = parse_iff();
    if (!f) return f;
    if (peek().kind != TokenKind::End)
      return fail(DiagnosticCode::UnknownToken,
                  "unexpected " + describe(peek()) + " after a complete formula");
    return f;
  }

 private:
  static constexpr int kMaxDepth = 1000;

  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }
  bool at(TokenKind k) const { return peek().kind == k; }

  static std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    if (t.kind == TokenKind::Ident) return "identifier '" + t.text + "'";
    return "token " + std::string(to_string(t.kind));
  }

  ParseDiagnostic fail(DiagnosticCode code, std::string message) const {
    return {code, std::move(message), peek().span};
  }

  std::optional<ParseDiagnostic> check_parens() const {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].kind == TokenKind::LParen) {
        open.push_back(i);
      } else if (tokens_[i].kind == TokenKind::RParen) {
        if (open.empty())
          return ParseDiagnostic{DiagnosticCode::UnbalancedParens, "')' without matching '('",
                                 tokens_[i].span};
        open.pop_back();
      }
    }
    if (!open.empty())
      return ParseDiagnostic{DiagnosticCode::UnbalancedParens, "'(' is never closed",
                             tokens_[open.back()].span};
    return std::nullopt;
  }

  static bool starts_formula(TokenKind k) {
    return k == TokenKind::Not || k == TokenKind::ForAll || k == TokenKind::Exists ||
           k == TokenKind::LParen || k == TokenKind::Ident;
  }

  static Span join(const FormulaPtr& a, const FormulaPtr& b) { return {a->span().start, b->span().end}; }

  // Right-associative level: operand (OP level)?
  template <class Next, class Self>
  Result<FormulaPtr> right_assoc(TokenKind tok, Connective op, Next next, Self self) {
    auto left = (this->*next)();
    if (!left || !at(tok)) return left;
    advance();
    auto right = (this->*self)();
    if (!right) return right;
    auto l = std::move(left).value();
    auto r = std::move(right).value();
    return Formula::binary(op, l, r, join(l, r));
  }

  template <class Next>
  Result<FormulaPtr> left_assoc(TokenKind tok, Connective op, Next next) {
    auto left = (this->*next)();
    if (!left) return left;
    auto acc = std::move(left).value();
    while (at(tok)) {
      advance();
      auto right = (this->*next)();
      if (!right) return right;
      auto r = std::move(right).value();
      acc = Formula::binary(op, acc, r, join(acc, r));
    }
    return acc;
  }

  Result<FormulaPtr> parse_iff() {
    if (++depth_ > kMaxDepth) return fail(DiagnosticCode::UnknownToken, "formula nested too deeply");
    auto r = right_assoc(TokenKind::Iff, Connective::Iff, &Parser::parse_implies, &Parser::parse_iff);
    --depth_;
    return r;
  }
  Result<FormulaPtr> parse_implies() {
    return right_assoc(TokenKind::Implies, Connective::Implies, &Parser::parse_xor, &Parser::parse_implies);
  }
  Result<FormulaPtr> parse_xor() { return left_assoc(TokenKind::Xor, Connective::Xor, &Parser::parse_or); }
  Result<FormulaPtr> parse_or() { return left_assoc(TokenKind::Or, Connective::Or, &Parser::parse_and); }
  Result<FormulaPtr> parse_and() { return left_assoc(TokenKind::And, Connective::And, &Parser::parse_unary); }

  Result<FormulaPtr> parse_unary() {
    if (++depth_ > kMaxDepth) return fail(DiagnosticCode::UnknownToken, "formula nested too deeply");
    auto r = parse_unary_inner();
    --depth_;
    return r;
  }

  Result<FormulaPtr> parse_unary_inner() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Not: {
        std::size_t start = advance().span.start;
        auto operand = parse_unary();
        if (!operand) return operand;
        auto o = std::move(operand).value();
        return Formula::negation(o, {start, o->span().end});
      }
      case TokenKind::ForAll:
      case TokenKind::Exists: return parse_quantified();
      case TokenKind::LParen: {
        advance();
        auto inner = parse_iff();
        if (!inner) return inner;
        if (!at(TokenKind::RParen))
          return fail(DiagnosticCode::UnknownToken, "expected ')' but found " + describe(peek()));
        advance();
        return inner;
      }
      case TokenKind::Ident: return parse_atom();
      default:
        return fail(DiagnosticCode::UnknownToken, "expected a formula but found " + describe(t));
    }
  }

  Result<FormulaPtr> parse_quantified() {
    const Token& q = advance();
    auto quantifier = q.kind == TokenKind::ForAll ? Quantifier::ForAll : Quantifier::Exists;
    if (!at(TokenKind::Ident))
      return fail(DiagnosticCode::DanglingQuantifier,
                  "quantifier must be followed by a variable, found " + describe(peek()));
    std::string var = advance().text;
    if (!starts_formula(peek().kind))
      return fail(DiagnosticCode::DanglingQuantifier,
                  "quantifier over '" + var + "' has no subformula, found " + describe(peek()));
    scope_.push_back(var);
    auto body = parse_iff();
    scope_.pop_back();
    if (!body) return body;
    auto b = std::move(body).value();
    return Formula::quantified(quantifier, std::move(var), b, {q.span.start, b->span().end});
  }

  bool is_bound(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (*it == name) return true;
    return false;
  }

  Result<FormulaPtr> parse_atom() {
    const Token& pred = advance();
    if (!at(TokenKind::LParen))
      return fail(DiagnosticCode::BadPredicateApplication,
                  "predicate '" + pred.text + "' must be applied to arguments, found " + describe(peek()));
    advance();
    std::vector<Term> args;
    while (true) {
      if (!at(TokenKind::Ident))
        return fail(DiagnosticCode::BadPredicateApplication,
                    "expected a term in arguments of '" + pred.text + "' but found " + describe(peek()));
      const Token& term = advance();
      if (at(TokenKind::LParen))
        return fail(DiagnosticCode::BadPredicateApplication,
                    "function application '" + term.text + "(...)' is not a valid term");
      args.push_back(is_bound(term.text) ? Term::variable(term.text) : Term::constant(term.text));
      if (at(TokenKind::Comma)) {
        advance();
        continue;
      }
      if (at(TokenKind::RParen)) break;
      return fail(DiagnosticCode::BadPredicateApplication,
                  "expected ',' or ')' in arguments of '" + pred.text + "' but found " + describe(peek()));
    }
    std::size_t end = advance().span.end;
    return Formula::atom(pred.text, std::move(args), {pred.span.start, end});
  }

  std::vector<Token> tokens_;
  std::size_t input_size_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<std::string> scope_;
};

}  // namespace detail

/// Parses one formula. Identifiers bound by an enclosing quantifier become
/// variables; every other term is a constant.
inline Result<FormulaPtr> parse(std::string_view input) {
  auto tokens = tokenize(input);
  if (!tokens) return tokens.diagnostic();
  return detail::Parser(std::move(tokens).value(), input.size()).run();
}

}  // namespace locm::fol
