#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fodef/definability.hpp"
#include "fodef/formula.hpp"
#include "fodef/structure.hpp"
#include "fodef/symmetry.hpp"

namespace fodef {

// A point of the truncated sequence space A^[0,K): universe elements at
// positions 0..K-1.
using Sequence = std::vector<Element>;

// A set of positions within [0, K).
using IndexSet = std::set<int>;

Sequence constant_sequence(Element v, int length);

struct AlmostEqualResult {
  bool within_budget = false;
  IndexSet differences;
};

// True iff the two sequences differ at no more than `budget` positions;
// always reports the full difference set.
AlmostEqualResult almost_equal(const Sequence& f, const Sequence& g,
                               int budget);

// A finite partial injection on the sequence space: domain entries are
// distinct, images are distinct, all of one shared length.
class SequenceMap {
 public:
  explicit SequenceMap(int length);

  int length() const { return length_; }
  int size() const { return static_cast<int>(domain_.size()); }
  const std::vector<Sequence>& domain() const { return domain_; }
  const std::vector<Sequence>& images() const { return images_; }

  bool contains(const Sequence& f) const;
  const Sequence& image_of(const Sequence& f) const;

  // Appends a mapping; throws when the lengths are wrong, the domain
  // entry is already present, or the image collides with an existing one.
  void insert(Sequence from, Sequence to);

  bool operator==(const SequenceMap&) const = default;

 private:
  int length_;
  std::vector<Sequence> domain_;
  std::vector<Sequence> images_;
};

// Pointwise image of each sequence under the permutation.  When p is an
// automorphism, the resulting map preserves every definable relation
// with empty exception sets.  Duplicate input sequences are kept once.
SequenceMap lift(const Structure& s, const Permutation& p,
                 const std::vector<Sequence>& fs);

// Exception positions for one ordered selection (with repetition) of
// domain sequences: indices where the relation's truth differs between
// the selected sequences and their images.
struct SelectionExceptions {
  std::vector<int> selection;  // positions into the map's domain list
  IndexSet exceptions;
};

struct PreservationReport {
  bool within_budget = false;  // every selection's exception count <= budget
  std::vector<SelectionExceptions> selections;
  IndexSet all_exceptions;     // union over selections
  int max_exceptions = 0;
};

// Checks whether the map almost-preserves a relation: for every ordered
// selection of arity-many domain sequences, the positions where the
// relation disagrees between sources and images number at most `budget`.
PreservationReport check_almost_preserves(const Structure& s,
                                          const SequenceMap& m,
                                          const std::string& relation_name,
                                          int budget);
PreservationReport check_almost_preserves(const Structure& s,
                                          const SequenceMap& m,
                                          const Formula& relation, int budget);

class DefinableError : public Error {
 public:
  explicit DefinableError(Formula f)
      : Error("target relation is definable"), formula_(std::move(f)) {}
  const Formula& defining_formula() const { return formula_; }

 private:
  Formula formula_;
};

struct CounterexampleResult {
  SequenceMap map;
  // Witness pair used at each position i: enumeration prefix min(i, M).
  std::vector<std::pair<Tuple, Tuple>> witnesses;
  // Raw coordinate sequences before deduplication: from_coords[j](i) is
  // coordinate j of the position-i witness source, likewise to_coords.
  std::vector<Sequence> from_coords;
  std::vector<Sequence> to_coords;
  // Positions where item t disagrees between the raw coordinate batch
  // and its image batch; confined to positions < t+1 by construction.
  std::vector<IndexSet> item_exceptions;
  // Positions where the target disagrees: all of [0, K).
  IndexSet target_exceptions;
  // Mappings dropped while building the injection (repeats, collisions).
  std::vector<std::string> notes;
};

// The witness-driven construction: at each position i the least
// target-discrepant tuple pair agreeing on the first min(i, M) items
// supplies one column; its coordinates become the map a_j -> b_j.
// Requires a non-definable target (otherwise throws DefinableError
// carrying the defining formula) and length >= 1.
CounterexampleResult build_counterexample_map(const Structure& s,
                                              const DefinableEnumeration& e,
                                              int length,
                                              LimitPolicy policy = LimitPolicy::warn);

struct ExtensionStep {
  int level = 0;              // realized agreement level m_k <= min(k, M)
  std::vector<int> signs;     // +1/-1 per enumeration item, source side
  Element chosen = 0;         // b(k)
};

struct ExtensionTrace {
  std::vector<ExtensionStep> steps;  // one per position k
  // Last position where some satisfiable sign pattern fails to transfer
  // from sources to images (0 when none does).  For every item j and
  // every position k > max(j, threshold), k is not an exception for j.
  int threshold = 0;
  bool already_present = false;
};

struct ExtensionResult {
  Sequence image;
  ExtensionTrace trace;
};

// Extends the map to one more sequence `a`: at each position k, b(k) is
// the least element whose item memberships alongside the image tuple
// match those of a(k) alongside the source tuple on the longest
// realizable prefix of the enumeration.  The enumeration must have arity
// |domain| + 1.  If `a` is already mapped, returns the existing image
// with the trace flagged.
ExtensionResult extend_map(const Structure& s, const SequenceMap& m,
                           const Sequence& a, const DefinableEnumeration& e);

// The positions where the formula holds when variables range over
// sequences instead of elements: atoms evaluate pointwise, connectives
// act as set operations, quantifiers scan the finite universe pointwise.
IndexSet boolean_valuation(const Structure& s, const Formula& f,
                           const std::map<int, Sequence>& binding, int length);

// Text formats.  Sequences: "v0,v1,...".  Maps: one "from -> to" line
// per mapping.  Bindings: one "xN: sequence" line per variable.  All
// three allow '#' comments and blank lines; lengths are inferred from
// the first entry and enforced on the rest.
Sequence parse_sequence(const std::string& text);
std::string render_sequence(const Sequence& f);
SequenceMap parse_sequence_map(const std::string& text);
std::string render_sequence_map(const SequenceMap& m);
std::map<int, Sequence> parse_sequence_bindings(const std::string& text);

}  // namespace fodef
