#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace locm::fol {

// Byte offsets into the UTF-8 source, half-open.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

enum class Quantifier { ForAll, Exists };
enum class Connective { And, Or, Xor, Implies, Iff };
enum class TermKind { Constant, Variable };

// The eight operators the complexity metric counts.
enum class Operator { Not, And, Or, Xor, Implies, Iff, ForAll, Exists };
inline constexpr std::size_t kOperatorCount = 8;
inline constexpr std::array<Operator, kOperatorCount> kAllOperators = {
    Operator::Not, Operator::And, Operator::Or, Operator::Xor,
    Operator::Implies, Operator::Iff, Operator::ForAll, Operator::Exists};

constexpr std::size_t index_of(Operator op) noexcept { return static_cast<std::size_t>(op); }

constexpr Operator to_operator(Connective c) noexcept {
  switch (c) {
    case Connective::And: return Operator::And;
    case Connective::Or: return Operator::Or;
    case Connective::Xor: return Operator::Xor;
    case Connective::Implies: return Operator::Implies;
    case Connective::Iff: return Operator::Iff;
  }
  return Operator::And;
}

constexpr Operator to_operator(Quantifier q) noexcept {
  return q == Quantifier::ForAll ? Operator::ForAll : Operator::Exists;
}

/// Stable lowercase name used as a JSON key / CSV column.
constexpr std::string_view name_of(Operator op) noexcept {
  constexpr std::array<std::string_view, kOperatorCount> names = {
      "not", "and", "or", "xor", "implies", "iff", "forall", "exists"};
  return names[index_of(op)];
}

constexpr std::string_view glyph_of(Operator op) noexcept {
  constexpr std::array<std::string_view, kOperatorCount> glyphs = {
      "¬", "∧", "∨", "⊕", "→", "↔", "∀", "∃"};
  return glyphs[index_of(op)];
}

constexpr std::string_view ascii_of(Operator op) noexcept {
  constexpr std::array<std::string_view, kOperatorCount> spellings = {
      "~", "&", "|", "^", "->", "<->", "forall", "exists"};
  return spellings[index_of(op)];
}

inline std::optional<Operator> operator_from_name(std::string_view name) noexcept {
  for (auto op : kAllOperators)
    if (name_of(op) == name) return op;
  return std::nullopt;
}

struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;

  static Term constant(std::string name) { return {TermKind::Constant, std::move(name)}; }
  static Term variable(std::string name) { return {TermKind::Variable, std::move(name)}; }

  friend bool operator==(const Term&, const Term&) = default;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Quantified {
  Quantifier quantifier;
  std::string variable;
  FormulaPtr body;
};

struct Negation {
  FormulaPtr operand;
};

struct Binary {
  Connective op;
  FormulaPtr left;
  FormulaPtr right;
};

struct Atom {
  std::string predicate;
  std::vector<Term> arguments;
};

// Immutable AST node. Children are shared, so copies are cheap and subtrees
// can be reused between formulas.
class Formula {
 public:
  using Node = std::variant<Quantified, Negation, Binary, Atom>;

  explicit Formula(Node node, Span span = {}) : node_(std::move(node)), span_(span) {}

  const Node& node() const noexcept { return node_; }
  Span span() const noexcept { return span_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&node_);
  }

  /// The counted operator this node carries, or nullopt for atoms.
  std::optional<Operator> op() const noexcept {
    if (auto* q = as<Quantified>()) return to_operator(q->quantifier);
    if (as<Negation>()) return Operator::Not;
    if (auto* b = as<Binary>()) return to_operator(b->op);
    return std::nullopt;
  }

  static FormulaPtr quantified(Quantifier q, std::string var, FormulaPtr body, Span span = {}) {
    return std::make_shared<const Formula>(Quantified{q, std::move(var), std::move(body)}, span);
  }
  static FormulaPtr negation(FormulaPtr operand, Span span = {}) {
    return std::make_shared<const Formula>(Negation{std::move(operand)}, span);
  }
  static FormulaPtr binary(Connective op, FormulaPtr left, FormulaPtr right, Span span = {}) {
    return std::make_shared<const Formula>(Binary{op, std::move(left), std::move(right)}, span);
  }
  static FormulaPtr atom(std::string predicate, std::vector<Term> args, Span span = {}) {
    return std::make_shared<const Formula>(Atom{std::move(predicate), std::move(args)}, span);
  }

 private:
  Node node_;
  Span span_;
};

/// Structural equality: same shape, operators, names and term kinds. Spans are ignored.
inline bool structurally_equal(const Formula* a, const Formula* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node().index() != b->node().index()) return false;
  if (auto* qa = a->as<Quantified>()) {
    auto* qb = b->as<Quantified>();
    return qa->quantifier == qb->quantifier && qa->variable == qb->variable &&
           structurally_equal(qa->body.get(), qb->body.get());
  }
  if (auto* na = a->as<Negation>()) {
    return structurally_equal(na->operand.get(), b->as<Negation>()->operand.get());
  }
  if (auto* ba = a->as<Binary>()) {
    auto* bb = b->as<Binary>();
    return ba->op == bb->op && structurally_equal(ba->left.get(), bb->left.get()) &&
           structurally_equal(ba->right.get(), bb->right.get());
  }
  auto* aa = a->as<Atom>();
  auto* ab = b->as<Atom>();
  return aa->predicate == ab->predicate && aa->arguments == ab->arguments;
}

inline bool operator==(const Formula& a, const Formula& b) { return structurally_equal(&a, &b); }

}  // namespace locm::fol
