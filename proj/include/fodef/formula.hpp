#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fodef/structure.hpp"

namespace fodef {

// Maps variable indices (x0, x1, ...) to universe elements.  Partial:
// evaluating a formula with an unbound free variable is an error.
using Assignment = std::map<int, Element>;

// An immutable first-order formula over a relational signature plus the
// built-in equality.  Values share subtrees, so copies are cheap and
// constructions that reuse subformulas heavily (type-describing formulas
// in particular) stay compact in memory.
class Formula {
 public:
  enum class Kind {
    truth,
    falsity,
    atom,      // symbol applied to variables
    equality,  // (xi = xj)
    negation,
    conjunction,
    disjunction,
    implication,
    exists,
    forall,
  };

  // Factories; the only way to build formulas.
  static Formula truth();
  static Formula falsity();
  static Formula atom(std::string symbol, std::vector<int> vars);
  static Formula equality(int lhs_var, int rhs_var);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula exists(int var, Formula body);
  static Formula forall(int var, Formula body);

  Kind kind() const;
  const std::string& symbol() const;        // atom
  const std::vector<int>& vars() const;     // atom / equality
  int bound_var() const;                    // exists / forall
  Formula lhs() const;                      // binary connectives
  Formula rhs() const;
  Formula child() const;                    // negation / quantifiers

  // Free variables, sorted ascending.
  const std::vector<int>& free_variables() const;
  int quantifier_rank() const;

  // Structural equality (sharing-insensitive).
  bool operator==(const Formula& other) const;

  struct Node;  // opaque; exposed for identity-based memoization
  const Node* node() const { return node_.get(); }

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make_binary(Kind kind, Formula lhs, Formula rhs);
  static Formula make_quantifier(Kind kind, int var, Formula body);
  std::shared_ptr<const Node> node_;
};

// Parses the formula grammar:
//
//   f   := "true" | "false" | NAME "(" var ("," var)* ")"
//        | "(" var "=" var ")" | "!" f
//        | "(" f "&" f ")" | "(" f "|" f ")" | "(" f "->" f ")"
//        | "E" var "." f | "A" var "." f | "(" f ")"
//   var := "x" DIGITS
//
// Binary symbols named with operator characters (such as "<") are also
// accepted and rendered in infix form: "(x0 < x1)".  Atoms are checked
// against the signature for existence and arity.
Formula parse_formula(std::string_view text, const Signature& sig);

// Canonical, fully parenthesized rendering;
// parse_formula(render_formula(f), sig) == f.
std::string render_formula(const Formula& f);

// Tarskian evaluation.  Throws EvalError when a free variable is unbound.
bool evaluate(const Structure& s, const Formula& f, const Assignment& assignment);

// The table {t : s |= f when vars are bound to t componentwise}.
// Every free variable of f must appear in vars.
Table relation_table(const Structure& s, const Formula& f,
                     const std::vector<int>& vars);

// Conservative cleanup: flattens nested conjunctions/disjunctions, drops
// duplicate operands, and collapses constants.  Preserves the defined
// table exactly; it never tries to be clever beyond that.
Formula simplify(const Formula& f);

}  // namespace fodef
