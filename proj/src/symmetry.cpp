#include "fodef/symmetry.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace fodef {

Permutation::Permutation(std::vector<Element> image) : image_(std::move(image)) {
  const int n = static_cast<int>(image_.size());
  if (n == 0) throw Error("empty permutation");
  std::vector<bool> seen(n, false);
  for (Element v : image_) {
    if (v < 0 || v >= n || seen[v]) {
      throw Error("image vector is not a permutation of 0.." +
                  std::to_string(n - 1));
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<Element> img(n);
  std::iota(img.begin(), img.end(), 0);
  return Permutation(std::move(img));
}

Tuple Permutation::apply(const Tuple& t) const {
  Tuple out;
  out.reserve(t.size());
  for (Element v : t) {
    if (v < 0 || v >= size()) {
      throw Error("element " + std::to_string(v) + " outside permutation domain");
    }
    out.push_back(image_[v]);
  }
  return out;
}

Permutation Permutation::compose(const Permutation& inner) const {
  if (size() != inner.size()) throw Error("permutation size mismatch");
  std::vector<Element> img(image_.size());
  for (int i = 0; i < size(); ++i) img[i] = image_[inner.image_[i]];
  return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
  std::vector<Element> img(image_.size());
  for (int i = 0; i < size(); ++i) img[image_[i]] = i;
  return Permutation(std::move(img));
}

Partition::Partition(int universe_size, int arity,
                     const std::vector<int>& class_ids)
    : n_(universe_size), arity_(arity) {
  const std::vector<Tuple> tuples = all_tuples(n_, arity_);
  if (class_ids.size() != tuples.size()) {
    throw Error("class id vector does not cover all tuples");
  }
  // Renumber classes by first occurrence, which in lexicographic tuple
  // order means classes are sorted by their least member.
  std::map<int, int> renumber;
  ids_.resize(class_ids.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    auto [it, inserted] =
        renumber.emplace(class_ids[i], static_cast<int>(renumber.size()));
    ids_[i] = it->second;
    if (inserted) classes_.emplace_back();
    classes_[ids_[i]].push_back(tuples[i]);
  }
}

int Partition::class_of(const Tuple& t) const {
  if (static_cast<int>(t.size()) != arity_) {
    throw Error("tuple arity does not match partition arity");
  }
  for (Element v : t) {
    if (v < 0 || v >= n_) throw Error("tuple element out of range");
  }
  return ids_[tuple_index(n_, t)];
}

bool Partition::refines(const Partition& coarser) const {
  if (n_ != coarser.n_ || arity_ != coarser.arity_) return false;
  std::map<int, int> seen;  // my class id -> their class id
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto [it, inserted] = seen.emplace(ids_[i], coarser.ids_[i]);
    if (!inserted && it->second != coarser.ids_[i]) return false;
  }
  return true;
}

PreservationCheck preserves_check(const Structure& s, const Permutation& p,
                                  const Table& table, int arity) {
  if (p.size() != s.size()) throw Error("permutation size mismatch");
  PreservationCheck out;
  for (const Tuple& t : all_tuples(s.size(), arity)) {
    const bool before = table.count(t) > 0;
    const bool after = table.count(p.apply(t)) > 0;
    if (before != after) out.violations.push_back(t);
  }
  out.preserved = out.violations.empty();
  return out;
}

namespace {

// Atomic type of a single element: truth of P(a,...,a) for each symbol.
std::vector<char> element_atomic_type(const Structure& s, Element a) {
  std::vector<char> out;
  for (const auto& sym : s.signature().symbols()) {
    Tuple t(sym.arity, a);
    out.push_back(s.table(sym.name).count(t) > 0 ? 1 : 0);
  }
  return out;
}

class AutomorphismSearch {
 public:
  explicit AutomorphismSearch(const Structure& s) : s_(s), n_(s.size()) {
    std::map<std::vector<char>, int> type_ids;
    for (Element a = 0; a < n_; ++a) {
      auto [it, _] = type_ids.emplace(element_atomic_type(s_, a),
                                      static_cast<int>(type_ids.size()));
      elem_type_.push_back(it->second);
    }
  }

  std::vector<Permutation> run() {
    image_.assign(n_, -1);
    used_.assign(n_, false);
    extend(0);
    return std::move(found_);
  }

 private:
  void extend(int i) {
    if (i == n_) {
      found_.emplace_back(image_);
      return;
    }
    for (Element v = 0; v < n_; ++v) {
      if (used_[v] || elem_type_[v] != elem_type_[i]) continue;
      if (!consistent(i, v)) continue;
      image_[i] = v;
      used_[v] = true;
      extend(i + 1);
      used_[v] = false;
      image_[i] = -1;
    }
  }

  // Checks every relation row whose entries all lie in 0..i and mention i,
  // assuming rows over 0..i-1 were checked at earlier levels.
  bool consistent(int i, Element v) const {
    image_[i] = v;
    bool ok = true;
    for (const auto& sym : s_.signature().symbols()) {
      const Table& table = s_.table(sym.name);
      Tuple t(sym.arity, 0);
      Tuple img(sym.arity, 0);
      if (!scan(table, t, img, 0, i, false)) {
        ok = false;
        break;
      }
    }
    image_[i] = -1;
    return ok;
  }

  bool scan(const Table& table, Tuple& t, Tuple& img, std::size_t pos, int i,
            bool mentions_i) const {
    if (pos == t.size()) {
      if (!mentions_i) return true;
      return (table.count(t) > 0) == (table.count(img) > 0);
    }
    for (Element e = 0; e <= i; ++e) {
      t[pos] = e;
      img[pos] = image_[e];
      if (!scan(table, t, img, pos + 1, i, mentions_i || e == i)) return false;
    }
    return true;
  }

  const Structure& s_;
  int n_;
  std::vector<int> elem_type_;
  mutable std::vector<Element> image_;
  std::vector<bool> used_;
  std::vector<Permutation> found_;
};

}  // namespace

std::vector<Permutation> automorphisms(const Structure& s, LimitPolicy policy) {
  enforce_limits(s, policy);
  return AutomorphismSearch(s).run();
}

Partition orbits(const Structure& s, int k, LimitPolicy policy) {
  if (k < 1) throw Error("orbit arity must be at least 1");
  enforce_limits(s, policy);
  const std::vector<Permutation> autos = automorphisms(s, policy);
  const std::vector<Tuple> tuples = all_tuples(s.size(), k);

  // Union-find over tuple indices.
  std::vector<int> parent(tuples.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    for (const Permutation& p : autos) {
      const int j = static_cast<int>(tuple_index(s.size(), p.apply(tuples[i])));
      const int a = find(static_cast<int>(i));
      const int b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> ids(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) ids[i] = find(static_cast<int>(i));
  return Partition(s.size(), k, ids);
}

namespace {

// Atomic type of a tuple: equality pattern between positions followed by
// membership of every index-selection in every signature relation.
std::vector<char> tuple_atomic_type(const Structure& s, const Tuple& t) {
  std::vector<char> out;
  const int k = static_cast<int>(t.size());
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) out.push_back(t[i] == t[j] ? 1 : 0);
  }
  for (const auto& sym : s.signature().symbols()) {
    const Table& table = s.table(sym.name);
    for (const Tuple& sel : all_tuples(k, sym.arity)) {
      Tuple args(sym.arity);
      for (int p = 0; p < sym.arity; ++p) args[p] = t[sel[p]];
      out.push_back(table.count(args) > 0 ? 1 : 0);
    }
  }
  return out;
}

// Class ids of the atomic-type partition on arity-j tuples, raw
// (first-occurrence numbering, which Partition re-canonicalizes).
std::vector<int> atomic_ids(const Structure& s, int j) {
  std::map<std::vector<char>, int> type_ids;
  std::vector<int> ids;
  for (const Tuple& t : all_tuples(s.size(), j)) {
    auto [it, _] = type_ids.emplace(tuple_atomic_type(s, t),
                                    static_cast<int>(type_ids.size()));
    ids.push_back(it->second);
  }
  return ids;
}

// One refinement step: class ids one rank up and one arity down.  Two
// tuples land together exactly when their one-element extensions realize
// the same set of child classes; that set also determines the tuples'
// own class one rank down, so successive ranks refine.
std::vector<int> refine_ids(int n, const std::vector<int>& child_ids) {
  const std::size_t count = child_ids.size() / static_cast<std::size_t>(n);
  std::map<std::vector<int>, int> sig_ids;
  std::vector<int> ids(count);
  for (std::size_t e = 0; e < count; ++e) {
    std::vector<int> sig(child_ids.begin() + static_cast<long>(e) * n,
                         child_ids.begin() + static_cast<long>(e + 1) * n);
    std::sort(sig.begin(), sig.end());
    sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
    auto [it, _] = sig_ids.emplace(std::move(sig),
                                   static_cast<int>(sig_ids.size()));
    ids[e] = it->second;
  }
  return ids;
}

// Rank-q class ids at arity k via the diagonal: atomic types at arity
// k+q refined down one arity per rank.
std::vector<int> rank_ids(const Structure& s, int k, int q) {
  std::vector<int> ids = atomic_ids(s, k + q);
  for (int d = 1; d <= q; ++d) {
    ids = refine_ids(s.size(), ids);
  }
  return ids;
}

int stabilization_depth(const Structure& s, int k, int q,
                        const std::vector<int>& final_ids) {
  // Least depth whose partition equals the final one.  Partitions only
  // refine with depth, so equal class counts mean equal partitions.
  const Partition target(s.size(), k, final_ids);
  for (int d = 0; d < q; ++d) {
    if (Partition(s.size(), k, rank_ids(s, k, d)) == target) return d;
  }
  return q;
}

}  // namespace

TypePartitionResult type_partition(const Structure& s, int k, int q,
                                   LimitPolicy policy) {
  if (k < 1) throw Error("type partition arity must be at least 1");
  if (q < 0) throw Error("negative rank");
  if (q > s.size()) {
    throw Error("rank " + std::to_string(q) + " exceeds the universe size; " +
                "refinement is stable by then");
  }
  enforce_limits(s, policy);
  std::vector<int> ids = rank_ids(s, k, q);
  const int depth = stabilization_depth(s, k, q, ids);
  return {Partition(s.size(), k, ids), depth};
}

TypePartitionResult type_partition_stable(const Structure& s, int k,
                                          LimitPolicy policy) {
  if (k < 1) throw Error("type partition arity must be at least 1");
  enforce_limits(s, policy);
  Partition prev(s.size(), k, rank_ids(s, k, 0));
  for (int q = 1; q <= s.size(); ++q) {
    Partition cur(s.size(), k, rank_ids(s, k, q));
    if (cur == prev) return {std::move(prev), q - 1};
    prev = std::move(cur);
  }
  // Rank n equals the orbit partition, which no rank refines further.
  throw Error("internal error: type refinement not stable at depth " +
              std::to_string(s.size()));
}

namespace {

// Atomic description of a tuple: the rank-0 defining formula of its
// atomic class, a signed conjunction over equalities and all atoms.
Formula atomic_description(const Structure& s, const Tuple& t) {
  std::vector<Formula> conjuncts;
  const int k = static_cast<int>(t.size());
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      Formula eq = Formula::equality(i, j);
      conjuncts.push_back(t[i] == t[j] ? eq : Formula::negation(eq));
    }
  }
  for (const auto& sym : s.signature().symbols()) {
    const Table& table = s.table(sym.name);
    for (const Tuple& sel : all_tuples(k, sym.arity)) {
      Tuple args(sym.arity);
      std::vector<int> vars(sym.arity);
      for (int p = 0; p < sym.arity; ++p) {
        args[p] = t[sel[p]];
        vars[p] = sel[p];
      }
      Formula atom = Formula::atom(sym.name, vars);
      conjuncts.push_back(table.count(args) > 0 ? atom
                                                : Formula::negation(atom));
    }
  }
  if (conjuncts.empty()) return Formula::truth();
  Formula acc = conjuncts[0];
  for (std::size_t i = 1; i < conjuncts.size(); ++i) {
    acc = Formula::conjunction(std::move(acc), conjuncts[i]);
  }
  return acc;
}

}  // namespace

ClassFormulas type_class_formulas(const Structure& s, int k, int q,
                                  LimitPolicy policy) {
  if (k < 1) throw Error("type partition arity must be at least 1");
  if (q < 0) throw Error("negative rank");
  enforce_limits(s, policy);
  const int n = s.size();

  // Walk the diagonal: rank d at arity k+q-d, building one formula per
  // class as we go.  Level d+1 formulas quantify over variable x(j) where
  // j is the child arity minus one.
  int arity = k + q;
  std::vector<int> raw_ids = atomic_ids(s, arity);
  Partition part(n, arity, raw_ids);
  std::vector<Formula> formulas;
  {
    const std::vector<Tuple> tuples = all_tuples(n, arity);
    formulas.assign(part.class_count(), Formula::truth());
    std::vector<bool> done(part.class_count(), false);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      const int c = part.class_of(tuples[i]);
      if (!done[c]) {
        formulas[c] = simplify(atomic_description(s, tuples[i]));
        done[c] = true;
      }
    }
  }

  for (int d = 1; d <= q; ++d) {
    const int child_arity = arity;
    arity = k + q - d;
    const std::vector<Tuple> tuples = all_tuples(n, arity);
    std::vector<int> child_ids(all_tuples(n, child_arity).size());
    {
      // Partition stores canonical ids; recover them for extension lookup.
      const std::vector<Tuple> child_tuples = all_tuples(n, child_arity);
      for (std::size_t i = 0; i < child_tuples.size(); ++i) {
        child_ids[i] = part.class_of(child_tuples[i]);
      }
    }
    std::vector<int> ids = refine_ids(n, child_ids);
    Partition next(n, arity, ids);

    std::vector<Formula> next_formulas(next.class_count(), Formula::truth());
    std::vector<bool> done(next.class_count(), false);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      const int c = next.class_of(tuples[i]);
      if (done[c]) continue;
      done[c] = true;
      // Distinct child classes realized by one-element extensions.
      std::vector<int> children;
      Tuple ext = tuples[i];
      ext.push_back(0);
      for (Element a = 0; a < n; ++a) {
        ext[arity] = a;
        children.push_back(child_ids[tuple_index(n, ext)]);
      }
      std::sort(children.begin(), children.end());
      children.erase(std::unique(children.begin(), children.end()),
                     children.end());
      // Every realized child type occurs, and nothing else does.
      Formula acc = Formula::exists(arity, formulas[children[0]]);
      Formula any = formulas[children[0]];
      for (std::size_t ci = 1; ci < children.size(); ++ci) {
        acc = Formula::conjunction(
            std::move(acc), Formula::exists(arity, formulas[children[ci]]));
        any = Formula::disjunction(std::move(any), formulas[children[ci]]);
      }
      acc = Formula::conjunction(std::move(acc),
                                 Formula::forall(arity, std::move(any)));
      next_formulas[c] = simplify(std::move(acc));
    }
    part = std::move(next);
    formulas = std::move(next_formulas);
  }
  return {std::move(part), std::move(formulas)};
}

Formula hintikka_formula(const Structure& s, const Tuple& t, int q,
                         LimitPolicy policy) {
  if (q > s.size()) {
    throw Error("rank " + std::to_string(q) + " exceeds the universe size; " +
                "refinement is stable by then");
  }
  ClassFormulas cf =
      type_class_formulas(s, static_cast<int>(t.size()), q, policy);
  return cf.formulas[cf.partition.class_of(t)];
}

}  // namespace fodef
