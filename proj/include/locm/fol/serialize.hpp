#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "locm/fol/formula.hpp"
#include "locm/fol/parser.hpp"
#include "locm/fol/validate.hpp"

namespace locm::fol {

enum class Notation { Unicode, Ascii };

namespace detail {

constexpr int precedence(Connective c) noexcept {
  switch (c) {
    case Connective::Iff: return 1;
    case Connective::Implies: return 2;
    case Connective::Xor: return 3;
    case Connective::Or: return 4;
    case Connective::And: return 5;
  }
  return 0;
}
constexpr bool right_associative(Connective c) noexcept {
  return c == Connective::Implies || c == Connective::Iff;
}
inline constexpr int kPrefixPrecedence = 6;

class Writer {
 public:
  explicit Writer(Notation notation) : notation_(notation) {}

  std::string run(const Formula& f) {
    write(f, 0, true);
    return std::move(out_);
  }

 private:
  std::string_view spell(Operator op) const {
    return notation_ == Notation::Unicode ? glyph_of(op) : ascii_of(op);
  }

  // right_open: nothing follows this subformula inside its group, so a
  // quantifier body can extend to the right without parentheses.
  void write(const Formula& f, int min_prec, bool right_open) {
    if (auto* q = f.as<Quantified>()) {
      bool parens = !right_open;
      if (parens) out_ += '(';
      out_ += spell(to_operator(q->quantifier));
      if (notation_ == Notation::Ascii) out_ += ' ';
      out_ += q->variable;
      out_ += ' ';
      write(*q->body, 0, true);
      if (parens) out_ += ')';
    } else if (auto* n = f.as<Negation>()) {
      out_ += spell(Operator::Not);
      write(*n->operand, kPrefixPrecedence, right_open);
    } else if (auto* b = f.as<Binary>()) {
      int p = precedence(b->op);
      bool parens = p < min_prec;
      bool inner_open = parens || right_open;
      if (parens) out_ += '(';
      bool right = right_associative(b->op);
      write(*b->left, right ? p + 1 : p, false);
      out_ += ' ';
      out_ += spell(to_operator(b->op));
      out_ += ' ';
      write(*b->right, right ? p : p + 1, inner_open);
      if (parens) out_ += ')';
    } else {
      const auto& a = *f.as<Atom>();
      out_ += a.predicate;
      out_ += '(';
      for (std::size_t i = 0; i < a.arguments.size(); ++i) {
        if (i) out_ += ", ";
        out_ += a.arguments[i].name;
      }
      out_ += ')';
    }
  }

  Notation notation_;
  std::string out_;
};

class Renamer {
 public:
  explicit Renamer(std::set<std::string> reserved) : reserved_(std::move(reserved)) {}

  FormulaPtr run(const Formula& f) { return rename(f); }

 private:
  std::string fresh() {
    std::string name;
    do {
      name = "v" + std::to_string(++counter_);
    } while (reserved_.count(name));
    return name;
  }

  const std::string* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  FormulaPtr rename(const Formula& f) {
    if (auto* q = f.as<Quantified>()) {
      std::string name = fresh();
      scope_.emplace_back(q->variable, name);
      auto body = rename(*q->body);
      scope_.pop_back();
      return Formula::quantified(q->quantifier, std::move(name), std::move(body));
    }
    if (auto* n = f.as<Negation>()) return Formula::negation(rename(*n->operand));
    if (auto* b = f.as<Binary>()) {
      auto left = rename(*b->left);
      auto right = rename(*b->right);
      return Formula::binary(b->op, std::move(left), std::move(right));
    }
    const auto& a = *f.as<Atom>();
    std::vector<Term> args;
    args.reserve(a.arguments.size());
    for (const auto& t : a.arguments) {
      if (const auto* renamed = lookup(t.name))
        args.push_back(Term::variable(*renamed));
      else
        args.push_back(Term::constant(t.name));
    }
    return Formula::atom(a.predicate, std::move(args));
  }

  std::set<std::string> reserved_;
  std::vector<std::pair<std::string, std::string>> scope_;
  int counter_ = 0;
};

}  // namespace detail

/// Single-spaced text with the fewest parentheses that reparse to the same AST.
inline std::string serialize(const Formula& f, Notation notation = Notation::Unicode) {
  return detail::Writer(notation).run(f);
}

/// α-renames bound variables to v1, v2, ... in binder order (pre-order,
/// left to right) and reparses the minimal serialization. Names already used
/// as constants are skipped when numbering.
inline FormulaPtr canonicalize(const Formula& f) {
  auto report = validate_wff(f);
  std::set<std::string> reserved(report.constants.begin(), report.constants.end());
  auto renamed = detail::Renamer(std::move(reserved)).run(f);
  auto reparsed = parse(serialize(*renamed));
  return reparsed ? std::move(reparsed).value() : renamed;
}

inline std::string canonical_string(const Formula& f, Notation notation = Notation::Unicode) {
  return serialize(*canonicalize(f), notation);
}

}  // namespace locm::fol
