#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fodef/formula.hpp"
#include "fodef/structure.hpp"
#include "fodef/symmetry.hpp"

namespace fodef {

// How definable relations of a fixed arity are listed.
//
// orbit_atoms: one item per automorphism-orbit class, in canonical class
// order, with the class's type-describing formula at stable refinement
// depth.  Two tuples agree on every item iff they agree on every
// definable relation of that arity, so the list is a complete basis.
//
// by_rank: all semantically distinct tables of type-class formulas,
// listed stage by stage for increasing quantifier rank up to the stable
// depth; each stage's classes appear in canonical order and a table is
// kept at the first stage where it occurs.
enum class EnumerationMode { orbit_atoms, by_rank };

std::string to_string(EnumerationMode mode);
EnumerationMode parse_enumeration_mode(const std::string& text);

struct DefinableItem {
  Table table;
  Formula formula;  // relation_table over x0..x(k-1) equals `table`
};

struct DefinableEnumeration {
  int arity = 0;
  EnumerationMode mode = EnumerationMode::orbit_atoms;
  std::vector<DefinableItem> items;  // tables pairwise distinct

  int item_count() const { return static_cast<int>(items.size()); }
};

DefinableEnumeration enumerate_definables(const Structure& s, int arity,
                                          EnumerationMode mode,
                                          LimitPolicy policy = LimitPolicy::warn);

// Evidence that the target is not invariant: an automorphism moving a
// target member to a non-member (or vice versa), componentwise.
struct Violation {
  Permutation permutation;
  Tuple from;
  Tuple to;
};

struct DefinabilityResult {
  bool definable = false;
  std::optional<Formula> defining_formula;  // set iff definable
  std::optional<Violation> violation;       // set iff not definable
};

// Decides whether the target relation is first-order definable from the
// signature: equivalently, whether its table is a union of orbit
// classes.  Definable yields a defining formula (a disjunction of the
// member classes' type formulas); otherwise the lexicographically least
// violation (ordered by from-tuple, then to-tuple, then permutation).
DefinabilityResult is_definable(const Structure& s,
                                LimitPolicy policy = LimitPolicy::warn);

// Least pair of target-arity tuples, in lexicographic order over their
// concatenation, whose target membership differs while membership in the
// first `m` enumerated items agrees.  `m` is clamped to the item count.
std::optional<std::pair<Tuple, Tuple>> witness_pair(
    const Structure& s, int m, const DefinableEnumeration& e);

struct SynthesisResult {
  Formula formula;
  int level = 0;  // least item-list prefix length with no witness pair
};

class NotDefinableError : public Error {
 public:
  explicit NotDefinableError(Violation v)
      : Error("target relation is not definable"), violation_(std::move(v)) {}
  const Violation& violation() const { return violation_; }

 private:
  Violation violation_;
};

// Builds a defining formula for the target as a disjunction, over the
// sign patterns of length m* realized by target members, of the signed
// conjunctions of the first m* item formulas, where m* is the least
// prefix length admitting no witness pair.  Throws NotDefinableError
// (carrying the violation) when the target is not definable.
SynthesisResult synthesize(const Structure& s, const DefinableEnumeration& e,
                           LimitPolicy policy = LimitPolicy::warn);

}  // namespace fodef
