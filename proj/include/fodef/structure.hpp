#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fodef/errors.hpp"

namespace fodef {

// Universe elements are the integers 0..n-1.
using Element = int;

// A tuple of universe elements; its arity is its length.
using Tuple = std::vector<Element>;

// A relation table: the set of tuples for which the relation holds.
// std::set keeps members in lexicographic order, which every canonical
// ordering in the toolkit relies on.
using Table = std::set<Tuple>;

struct SymbolDecl {
  std::string name;
  int arity = 0;

  bool operator==(const SymbolDecl&) const = default;
};

// The relation symbols of a structure, in declaration order.  Equality is
// implicit on every structure and "=" is reserved: it can never be
// declared, interpreted, or overridden.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<SymbolDecl> symbols);

  const std::vector<SymbolDecl>& symbols() const { return symbols_; }
  bool has(std::string_view name) const;
  int arity_of(std::string_view name) const;  // throws Error if unknown
  std::size_t size() const { return symbols_.size(); }

  bool operator==(const Signature&) const = default;

 private:
  std::vector<SymbolDecl> symbols_;
};

// A finite relational structure together with one distinguished target
// relation.  The target is stored separately from the signature: symmetry
// and definability computations never treat it as part of the structure;
// only verification operations look it up by name.
class Structure {
 public:
  Structure(int size, Signature sig, std::map<std::string, Table> interp,
            std::string target_name, int target_arity, Table target_table);

  int size() const { return size_; }
  const Signature& signature() const { return sig_; }

  const Table& table(std::string_view name) const;  // signature symbols only
  const std::string& target_name() const { return target_name_; }
  int target_arity() const { return target_arity_; }
  const Table& target_table() const { return target_table_; }

  // Membership test for a signature symbol, the reserved "=", or the
  // target relation.  Throws Error on unknown names or arity mismatch.
  bool eval(std::string_view name, const Tuple& t) const;

  // Arity of any name eval() accepts.
  int arity_of_any(std::string_view name) const;

  bool operator==(const Structure&) const = default;

 private:
  int size_ = 0;
  Signature sig_;
  std::map<std::string, Table> interp_;
  std::string target_name_;
  int target_arity_ = 0;
  Table target_table_;
};

// Exhaustive operations stay tractable only at desk scale; past these
// bounds they warn (default) or abort, at the caller's choice.
struct Limits {
  static constexpr int max_universe = 10;
  static constexpr int max_target_arity = 3;
};

enum class LimitPolicy { warn, strict };

// Emits one warning per call to stderr, or throws LimitError under the
// strict policy, when the structure exceeds the soft limits.
void enforce_limits(const Structure& s, LimitPolicy policy);

// Parses the structure file format:
//
//   universe INT
//   rel NAME arity INT  <rows...>  end
//   target NAME arity INT  <rows...>  end
//
// Tokens are whitespace-separated; '#' starts a comment running to end of
// line; duplicate rows are merged.  Exactly one target block is required.
// Errors carry 1-based line numbers.
Structure parse_structure(std::string_view text);

// Canonical writer; parse_structure(render_structure(s)) == s.
std::string render_structure(const Structure& s);

// Free-function form of Structure::eval.
bool eval_relation(const Structure& s, std::string_view name, const Tuple& t);

// All tuples of the given arity over 0..n-1, in lexicographic order.
std::vector<Tuple> all_tuples(int n, int arity);

// Position of a tuple in all_tuples(n, arity): its base-n value.
std::size_t tuple_index(int n, const Tuple& t);

}  // namespace fodef
