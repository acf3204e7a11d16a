#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "locm/fol/formula.hpp"
#include "locm/fol/lexer.hpp"

namespace locm::fol {

enum class ViolationKind {
  ShadowedBinding,
  MissingOperand,
  EmptyArguments,
  InvalidIdentifier,
};

constexpr std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::ShadowedBinding: return "shadowed binding";
    case ViolationKind::MissingOperand: return "missing operand";
    case ViolationKind::EmptyArguments: return "empty argument list";
    case ViolationKind::InvalidIdentifier: return "invalid identifier";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string message;
  Span span;
};

struct ValidationReport {
  std::vector<Violation> violations;
  // Term names not bound by any enclosing quantifier, sorted.
  std::vector<std::string> constants;

  bool ok() const noexcept { return violations.empty(); }
};

inline bool is_identifier(std::string_view s) noexcept {
  if (s.empty() || !detail::is_ident_start(s.front())) return false;
  if (s == "forall" || s == "exists" || s == "xor") return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return detail::is_ident_char(c); });
}

namespace detail {

class WffChecker {
 public:
  ValidationReport run(const Formula* root) {
    visit(root, {});
    report_.constants.assign(constants_.begin(), constants_.end());
    return std::move(report_);
  }

 private:
  void add(ViolationKind kind, std::string message, Span span) {
    report_.violations.push_back({kind, std::move(message), span});
  }

  bool bound(const std::string& name) const {
    return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
  }

  void visit(const Formula* f, Span parent_span) {
    if (!f) {
      add(ViolationKind::MissingOperand, "operator is missing a subformula", parent_span);
      return;
    }
    if (auto* q = f->as<Quantified>()) {
      if (!is_identifier(q->variable))
        add(ViolationKind::InvalidIdentifier, "bad quantified variable '" + q->variable + "'", f->span());
      if (bound(q->variable))
        add(ViolationKind::ShadowedBinding, "'" + q->variable + "' is already bound by an enclosing quantifier",
            f->span());
      scope_.push_back(q->variable);
      visit(q->body.get(), f->span());
      scope_.pop_back();
    } else if (auto* n = f->as<Negation>()) {
      visit(n->operand.get(), f->span());
    } else if (auto* b = f->as<Binary>()) {
      visit(b->left.get(), f->span());
      visit(b->right.get(), f->span());
    } else {
      const auto& atom = *f->as<Atom>();
      if (!is_identifier(atom.predicate))
        add(ViolationKind::InvalidIdentifier, "bad predicate name '" + atom.predicate + "'", f->span());
      if (atom.arguments.empty())
        add(ViolationKind::EmptyArguments, "predicate '" + atom.predicate + "' has no arguments", f->span());
      for (const auto& t : atom.arguments) {
        if (!is_identifier(t.name))
          add(ViolationKind::InvalidIdentifier, "bad term '" + t.name + "' in '" + atom.predicate + "'",
              f->span());
        else if (!bound(t.name))
          constants_.insert(t.name);
      }
    }
  }

  ValidationReport report_;
  std::vector<std::string> scope_;
  std::set<std::string> constants_;
};

}  // namespace detail

/// Checks quantifier scope, predicate-argument form and operator placement.
/// Violations are returned as data. Unbound term names are reported as constants.
inline ValidationReport validate_wff(const Formula& formula) { return detail::WffChecker{}.run(&formula); }

}  // namespace locm::fol
