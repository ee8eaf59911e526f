#include "fodef/definability.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fodef {

std::string to_string(EnumerationMode mode) {
  return mode == EnumerationMode::orbit_atoms ? "orbit-atoms" : "by-rank";
}

EnumerationMode parse_enumeration_mode(const std::string& text) {
  if (text == "orbit-atoms" || text == "orbit") return EnumerationMode::orbit_atoms;
  if (text == "by-rank" || text == "rank") return EnumerationMode::by_rank;
  throw Error("unknown enumeration mode '" + text +
              "' (expected orbit-atoms or by-rank)");
}

namespace {

Table class_table(const std::vector<Tuple>& cls) {
  return Table(cls.begin(), cls.end());
}

}  // namespace

DefinableEnumeration enumerate_definables(const Structure& s, int arity,
                                          EnumerationMode mode,
                                          LimitPolicy policy) {
  if (arity < 1) throw Error("enumeration arity must be at least 1");
  enforce_limits(s, policy);
  DefinableEnumeration out;
  out.arity = arity;
  out.mode = mode;

  const TypePartitionResult stable = type_partition_stable(s, arity, policy);
  if (mode == EnumerationMode::orbit_atoms) {
    if (!(stable.partition == orbits(s, arity, policy))) {
      throw Error("internal error: stable type classes differ from orbits");
    }
    const ClassFormulas cf = type_class_formulas(s, arity, stable.depth, policy);
    for (int c = 0; c < cf.partition.class_count(); ++c) {
      out.items.push_back(
          {class_table(cf.partition.classes()[c]), cf.formulas[c]});
    }
    return out;
  }

  // by_rank: classes stage by stage; a table enters at its first stage.
  std::set<Table> seen;
  for (int q = 0; q <= stable.depth; ++q) {
    const ClassFormulas cf = type_class_formulas(s, arity, q, policy);
    for (int c = 0; c < cf.partition.class_count(); ++c) {
      Table t = class_table(cf.partition.classes()[c]);
      if (seen.insert(t).second) {
        out.items.push_back({std::move(t), cf.formulas[c]});
      }
    }
  }
  return out;
}

DefinabilityResult is_definable(const Structure& s, LimitPolicy policy) {
  enforce_limits(s, policy);
  const int k = s.target_arity();
  const Partition orbit_part = orbits(s, k, policy);
  const Table& target = s.target_table();

  bool is_union = true;
  for (const auto& cls : orbit_part.classes()) {
    const bool first_in = target.count(cls.front()) > 0;
    for (const Tuple& t : cls) {
      if ((target.count(t) > 0) != first_in) {
        is_union = false;
        break;
      }
    }
    if (!is_union) break;
  }

  DefinabilityResult out;
  out.definable = is_union;
  if (is_union) {
    const TypePartitionResult stable = type_partition_stable(s, k, policy);
    if (!(stable.partition == orbit_part)) {
      throw Error("internal error: stable type classes differ from orbits");
    }
    const ClassFormulas cf = type_class_formulas(s, k, stable.depth, policy);
    std::optional<Formula> acc;
    for (int c = 0; c < cf.partition.class_count(); ++c) {
      if (target.count(cf.partition.classes()[c].front()) == 0) continue;
      acc = acc ? Formula::disjunction(std::move(*acc), cf.formulas[c])
                : cf.formulas[c];
    }
    out.defining_formula = simplify(acc ? std::move(*acc) : Formula::falsity());
    return out;
  }

  // Least violating triple: scan from-tuples, then to-tuples, then the
  // automorphism list (already in lexicographic image order).
  const std::vector<Permutation> autos = automorphisms(s, policy);
  const std::vector<Tuple> tuples = all_tuples(s.size(), k);
  for (const Tuple& a : tuples) {
    const bool a_in = target.count(a) > 0;
    for (const Tuple& b : tuples) {
      if ((target.count(b) > 0) == a_in) continue;
      for (const Permutation& p : autos) {
        if (p.apply(a) == b) {
          out.violation = Violation{p, a, b};
          return out;
        }
      }
    }
  }
  throw Error("internal error: non-union target without a violating map");
}

std::optional<std::pair<Tuple, Tuple>> witness_pair(
    const Structure& s, int m, const DefinableEnumeration& e) {
  if (m < 0) throw Error("negative enumeration prefix length");
  const int use = std::min(m, e.item_count());
  const Table& target = s.target_table();
  const std::vector<Tuple> tuples = all_tuples(s.size(), e.arity);
  for (const Tuple& a : tuples) {
    const bool a_in = target.count(a) > 0;
    for (const Tuple& b : tuples) {
      if ((target.count(b) > 0) == a_in) continue;
      bool agree = true;
      for (int i = 0; i < use; ++i) {
        const Table& t = e.items[i].table;
        if ((t.count(a) > 0) != (t.count(b) > 0)) {
          agree = false;
          break;
        }
      }
      if (agree) return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

SynthesisResult synthesize(const Structure& s, const DefinableEnumeration& e,
                           LimitPolicy policy) {
  if (e.arity != s.target_arity()) {
    throw Error("enumeration arity does not match the target relation");
  }
  DefinabilityResult check = is_definable(s, policy);
  if (!check.definable) throw NotDefinableError(std::move(*check.violation));

  int level = 0;
  while (witness_pair(s, level, e).has_value()) {
    if (level >= e.item_count()) {
      throw Error("internal error: witness pair survives the full enumeration "
                  "of a definable target");
    }
    ++level;
  }

  // Sign patterns of length `level` realized by target members, in the
  // scan order of the member tuples (set-deduplicated).
  std::set<std::vector<bool>> patterns;
  for (const Tuple& t : s.target_table()) {
    std::vector<bool> sig(level);
    for (int i = 0; i < level; ++i) sig[i] = e.items[i].table.count(t) > 0;
    patterns.insert(std::move(sig));
  }

  std::optional<Formula> dnf;
  for (const std::vector<bool>& sig : patterns) {
    std::optional<Formula> conj;
    for (int i = 0; i < level; ++i) {
      Formula lit = sig[i] ? e.items[i].formula
                           : Formula::negation(e.items[i].formula);
      conj = conj ? Formula::conjunction(std::move(*conj), std::move(lit))
                  : std::move(lit);
    }
    Formula clause = conj ? std::move(*conj) : Formula::truth();
    dnf = dnf ? Formula::disjunction(std::move(*dnf), std::move(clause))
              : std::move(clause);
  }
  Formula result = simplify(dnf ? std::move(*dnf) : Formula::falsity());
  return {std::move(result), level};
}

}  // namespace fodef
