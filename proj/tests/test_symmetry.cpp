#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "fodef/symmetry.hpp"
#include "test_helpers.hpp"

using namespace fodef;
using namespace fodef::testing;

namespace {

// Oracle: every permutation of the universe, filtered by direct
// membership comparison on every signature row, no pruning.
std::vector<Permutation> brute_automorphisms(const Structure& s) {
  std::vector<Element> img(s.size());
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do {
    bool ok = true;
    for (const auto& sym : s.signature().symbols()) {
      for (const Tuple& t : all_tuples(s.size(), sym.arity)) {
        Tuple mapped(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) mapped[i] = img[t[i]];
        if ((s.table(sym.name).count(t) > 0) !=
            (s.table(sym.name).count(mapped) > 0)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

// Oracle: tuple equivalence by the q-round back-and-forth game played
// directly from the definition.
bool game_equivalent(const Structure& s, int q, const Tuple& a,
                     const Tuple& b) {
  if (q == 0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        if ((a[i] == a[j]) != (b[i] == b[j])) return false;
      }
    }
    for (const auto& sym : s.signature().symbols()) {
      for (const Tuple& sel :
           all_tuples(static_cast<int>(a.size()), sym.arity)) {
        Tuple ta(sym.arity), tb(sym.arity);
        for (int p = 0; p < sym.arity; ++p) {
          ta[p] = a[sel[p]];
          tb[p] = b[sel[p]];
        }
        if ((s.table(sym.name).count(ta) > 0) !=
            (s.table(sym.name).count(tb) > 0)) {
          return false;
        }
      }
    }
    return true;
  }
  for (int side = 0; side < 2; ++side) {
    const Tuple& from = side == 0 ? a : b;
    const Tuple& to = side == 0 ? b : a;
    for (Element x = 0; x < s.size(); ++x) {
      bool matched = false;
      for (Element y = 0; y < s.size() && !matched; ++y) {
        Tuple fa = from, tb = to;
        fa.push_back(x);
        tb.push_back(y);
        matched = side == 0 ? game_equivalent(s, q - 1, fa, tb)
                            : game_equivalent(s, q - 1, tb, fa);
      }
      if (!matched) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("permutation algebra") {
  const Permutation p({2, 3, 0, 1});
  CHECK(p(0) == 2);
  CHECK(p.apply({0, 1}) == Tuple{2, 3});
  CHECK(p.compose(p.inverse()) == Permutation::identity(4));
  CHECK(p.inverse() == p);
  const Permutation q({1, 0, 2, 3});
  CHECK(p.compose(q).apply({0}) == Tuple{3});  // inner first
  CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
  CHECK_THROWS_AS(Permutation({0, 3}), Error);
  CHECK_THROWS_AS(Permutation(std::vector<Element>{}), Error);
  CHECK_THROWS_AS(p.apply({4}), Error);
}

TEST_CASE("automorphism search matches the all-permutations oracle") {
  for (const Structure& s :
       {make_line3(), make_paired_edges(), make_cycle4()}) {
    const auto got = automorphisms(s);
    const auto want = brute_automorphisms(s);
    CHECK(got == want);
  }
  CHECK(automorphisms(make_line3()).size() == 1);
  CHECK(automorphisms(make_paired_edges()).size() == 8);
  CHECK(automorphisms(make_cycle4()).size() == 8);

  // Frozen list for the paired-edges fixture, in image order.
  const std::vector<std::vector<Element>> images = {
      {0, 1, 2, 3}, {0, 1, 3, 2}, {1, 0, 2, 3}, {1, 0, 3, 2},
      {2, 3, 0, 1}, {2, 3, 1, 0}, {3, 2, 0, 1}, {3, 2, 1, 0}};
  const auto autos = automorphisms(make_paired_edges());
  REQUIRE(autos.size() == images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    CHECK(autos[i].image() == images[i]);
  }
}

TEST_CASE("orbit classes match the oracle closure") {
  const Structure s = make_paired_edges();
  const Partition p1 = orbits(s, 1);
  CHECK(p1.class_count() == 1);
  const Partition p2 = orbits(s, 2);
  REQUIRE(p2.class_count() == 3);
  CHECK(Table(p2.classes()[0].begin(), p2.classes()[0].end()) ==
        Table{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(Table(p2.classes()[1].begin(), p2.classes()[1].end()) ==
        s.table("E"));

  // Oracle: same class iff some brute-force automorphism connects them.
  const auto autos = brute_automorphisms(s);
  for (const Tuple& a : all_tuples(s.size(), 2)) {
    for (const Tuple& b : all_tuples(s.size(), 2)) {
      bool connected = false;
      for (const Permutation& p : autos) {
        if (p.apply(a) == b) {
          connected = true;
          break;
        }
      }
      CHECK((p2.class_of(a) == p2.class_of(b)) == connected);
    }
  }

  CHECK(orbits(make_line3(), 1).class_count() == 3);
}

TEST_CASE("partition refinement and lookups") {
  const Partition fine = orbits(make_line3(), 1);
  const Partition coarse(3, 1, {0, 0, 0});
  CHECK(fine.refines(coarse));
  CHECK_FALSE(coarse.refines(fine));
  CHECK(fine.refines(fine));
  CHECK(coarse.class_of({2}) == 0);
  CHECK_THROWS_AS(coarse.class_of({0, 1}), Error);
  CHECK_THROWS_AS(coarse.class_of({3}), Error);
  CHECK_THROWS_AS(Partition(2, 1, {0}), Error);

  // Class ids are canonical: numbered by least member.
  const Partition p(2, 1, {7, 3});
  CHECK(p.class_of({0}) == 0);
  CHECK(p.class_of({1}) == 1);
}

TEST_CASE("preservation check lists violations in scan order") {
  const Structure s = make_line3();
  const auto bad = preserves_check(s, Permutation({1, 0, 2}), s.table("<"), 2);
  CHECK_FALSE(bad.preserved);
  CHECK(bad.violations.front() == Tuple{0, 1});
  const auto good = preserves_check(make_paired_edges(), Permutation({2, 3, 0, 1}),
                                    make_paired_edges().table("E"), 2);
  CHECK(good.preserved);
  CHECK(good.violations.empty());
}

TEST_CASE("type partitions match the game oracle rank by rank") {
  for (const Structure& s :
       {make_line3(), make_paired_edges(), make_cycle4()}) {
    for (int k = 1; k <= 2; ++k) {
      for (int q = 0; q <= 2; ++q) {
        const TypePartitionResult tp = type_partition(s, k, q);
        for (const Tuple& a : all_tuples(s.size(), k)) {
          for (const Tuple& b : all_tuples(s.size(), k)) {
            CHECK((tp.partition.class_of(a) == tp.partition.class_of(b)) ==
                  game_equivalent(s, q, a, b));
          }
        }
      }
    }
  }
}

TEST_CASE("type partition fixtures and stabilization depths") {
  const auto l1 = type_partition(make_line3(), 1, 1);
  CHECK(l1.partition.class_count() == 3);
  CHECK(l1.depth == 1);
  const auto l0 = type_partition(make_line3(), 1, 0);
  CHECK(l0.partition.class_count() == 1);
  CHECK(l0.depth == 0);
  const auto ks = type_partition_stable(make_paired_edges(), 1);
  CHECK(ks.partition.class_count() == 1);
  CHECK(ks.depth == 0);
  const auto ls = type_partition_stable(make_line3(), 1);
  CHECK(ls.depth == 1);
  CHECK(ls.partition == orbits(make_line3(), 1));

  // A later rank never changes the partition once stable.
  const auto l2 = type_partition(make_line3(), 1, 2);
  CHECK(l2.partition == l1.partition);
  CHECK(l2.depth == 1);

  // Successive ranks refine.
  for (int q = 0; q < 3; ++q) {
    CHECK(type_partition(make_cycle4(), 2, q + 1)
              .partition.refines(type_partition(make_cycle4(), 2, q).partition));
  }

  CHECK_THROWS_AS(type_partition(make_line3(), 0, 1), Error);
  CHECK_THROWS_AS(type_partition(make_line3(), 1, -1), Error);
  CHECK_THROWS_AS(type_partition(make_line3(), 1, 4), Error);
}

TEST_CASE("stable type classes equal orbits on the fixtures") {
  for (const Structure& s :
       {make_line3(), make_paired_edges(), make_cycle4()}) {
    for (int k = 1; k <= 2; ++k) {
      CHECK(type_partition_stable(s, k).partition == orbits(s, k));
    }
  }
}

TEST_CASE("type-describing formulas define exactly their classes") {
  const Structure s = make_paired_edges();
  const auto stable = type_partition_stable(s, 2);
  const ClassFormulas cf = type_class_formulas(s, 2, stable.depth);
  for (int c = 0; c < cf.partition.class_count(); ++c) {
    CHECK(relation_table(s, cf.formulas[c], {0, 1}) ==
          Table(cf.partition.classes()[c].begin(),
                cf.partition.classes()[c].end()));
    CHECK(cf.formulas[c].quantifier_rank() <= stable.depth);
  }

  const Formula mid = hintikka_formula(make_line3(), {1}, 1);
  CHECK(relation_table(make_line3(), mid, {0}) == Table{{1}});
  CHECK(mid.quantifier_rank() <= 1);

  const Formula edge = hintikka_formula(s, {0, 1}, stable.depth);
  CHECK(relation_table(s, edge, {0, 1}) == s.table("E"));

  // Deeper than stable still defines the class.
  const Formula mid2 = hintikka_formula(make_line3(), {1}, 2);
  CHECK(relation_table(make_line3(), mid2, {0}) == Table{{1}});
}
