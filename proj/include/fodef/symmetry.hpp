#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fodef/formula.hpp"
#include "fodef/structure.hpp"

namespace fodef {

// A bijection on the universe 0..n-1, stored as its image vector.
class Permutation {
 public:
  explicit Permutation(std::vector<Element> image);
  static Permutation identity(int n);

  int size() const { return static_cast<int>(image_.size()); }
  Element operator()(Element x) const { return image_[x]; }
  const std::vector<Element>& image() const { return image_; }

  Tuple apply(const Tuple& t) const;
  Permutation compose(const Permutation& inner) const;  // this after inner
  Permutation inverse() const;

  bool operator==(const Permutation&) const = default;
  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<Element> image_;
};

// A partition of all arity-k tuples into classes.  Classes are ordered by
// their lexicographically least member and members are sorted, so equal
// partitions compare equal structurally.
class Partition {
 public:
  Partition(int universe_size, int arity, const std::vector<int>& class_ids);

  int arity() const { return arity_; }
  int universe_size() const { return n_; }
  const std::vector<std::vector<Tuple>>& classes() const { return classes_; }
  int class_count() const { return static_cast<int>(classes_.size()); }
  int class_of(const Tuple& t) const;

  // True when every class of this partition lies inside one class of the
  // coarser partition.
  bool refines(const Partition& coarser) const;

  bool operator==(const Partition& other) const {
    return n_ == other.n_ && arity_ == other.arity_ && ids_ == other.ids_;
  }

 private:
  int n_ = 0;
  int arity_ = 0;
  std::vector<int> ids_;  // canonical class id per tuple_index
  std::vector<std::vector<Tuple>> classes_;
};

struct PreservationCheck {
  bool preserved = false;
  std::vector<Tuple> violations;  // all tuples whose membership changes
};

// Does componentwise application of p leave membership in the table
// untouched?  The table is read as an arity-k relation over the
// structure's universe.
PreservationCheck preserves_check(const Structure& s, const Permutation& p,
                                  const Table& table, int arity);

// All permutations of the universe preserving every signature relation
// (the target plays no part), in lexicographic image order.  Backtracking
// over partial images, pruned by the atomic one-element types and by
// partial relation checks.
std::vector<Permutation> automorphisms(const Structure& s,
                                       LimitPolicy policy = LimitPolicy::warn);

// Orbits of the automorphism group acting componentwise on arity-k tuples.
Partition orbits(const Structure& s, int k,
                 LimitPolicy policy = LimitPolicy::warn);

struct TypePartitionResult {
  Partition partition;
  // Least depth whose partition already equals the returned one: the
  // depth at which refinement actually stopped mattering.
  int depth = 0;
};

// Partition of arity-k tuples by equivalence under formulas of quantifier
// rank at most q, computed by back-and-forth refinement from the atomic
// types.  Depth "stable" iterates until the partition stops refining
// (cut off at the universe size, which always suffices).
TypePartitionResult type_partition(const Structure& s, int k, int q,
                                   LimitPolicy policy = LimitPolicy::warn);
TypePartitionResult type_partition_stable(const Structure& s, int k,
                                          LimitPolicy policy = LimitPolicy::warn);

// A rank-q formula with free variables x0..x(k-1) whose table is exactly
// the rank-q type class of t.  Conservatively simplified; the contract is
// extensional (the table), not a particular syntax.
Formula hintikka_formula(const Structure& s, const Tuple& t, int q,
                         LimitPolicy policy = LimitPolicy::warn);

// The rank-q partition together with one defining formula per class,
// indexed by class id.  Shared by definability enumeration.
struct ClassFormulas {
  Partition partition;
  std::vector<Formula> formulas;
};
ClassFormulas type_class_formulas(const Structure& s, int k, int q,
                                  LimitPolicy policy = LimitPolicy::warn);

}  // namespace fodef
