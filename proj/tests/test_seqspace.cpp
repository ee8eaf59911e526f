#include "doctest.h"

#include <algorithm>

#include "fodef/seqspace.hpp"
#include "test_helpers.hpp"

using namespace fodef;
using namespace fodef::testing;

TEST_CASE("almost_equal counts differing positions against a budget") {
  const auto r1 = almost_equal({0, 0, 0, 0}, {0, 0, 0, 1}, 1);
  CHECK(r1.within_budget);
  CHECK(r1.differences == IndexSet{3});

  const auto r2 = almost_equal({0, 1}, {0, 1}, 0);
  CHECK(r2.within_budget);
  CHECK(r2.differences.empty());

  const auto r3 = almost_equal({0, 1, 0, 1}, {1, 0, 1, 0}, 1);
  CHECK_FALSE(r3.within_budget);
  CHECK(r3.differences == IndexSet{0, 1, 2, 3});

  CHECK_THROWS_AS(almost_equal({0}, {0, 1}, 0), Error);
  CHECK_THROWS_AS(almost_equal({0}, {0}, -1), Error);
}

TEST_CASE("sequence maps stay injective with consistent lengths") {
  SequenceMap m(3);
  m.insert({0, 0, 0}, {1, 1, 1});
  CHECK(m.size() == 1);
  CHECK(m.contains({0, 0, 0}));
  CHECK(m.image_of({0, 0, 0}) == Sequence{1, 1, 1});
  CHECK_THROWS_AS(m.insert({0, 0, 0}, {2, 2, 2}), Error);
  CHECK_THROWS_AS(m.insert({2, 2, 2}, {1, 1, 1}), Error);
  CHECK_THROWS_AS(m.insert({0, 0}, {1, 1, 1}), Error);
  CHECK_THROWS_AS(m.image_of({9, 9, 9}), Error);
  CHECK_THROWS_AS(SequenceMap(0), Error);
}

TEST_CASE("lift applies a permutation pointwise") {
  const Structure k = make_paired_edges();
  const Permutation p({2, 3, 0, 1});
  const auto m = lift(k, p, {{0, 1, 0, 1}});
  CHECK(m.image_of({0, 1, 0, 1}) == Sequence{2, 3, 2, 3});

  const auto ident = lift(k, Permutation::identity(4), {{0, 1, 2, 3}});
  CHECK(ident.image_of({0, 1, 2, 3}) == Sequence{0, 1, 2, 3});

  // Composition: lifting p∘q equals lifting q then p.
  const Permutation q({1, 0, 3, 2});
  const std::vector<Sequence> fs = {{0, 1, 2, 3}, {3, 3, 0, 0}};
  const auto direct = lift(k, p.compose(q), fs);
  const auto staged = lift(k, p, lift(k, q, fs).images());
  CHECK(direct.images() == staged.images());

  // Duplicates collapse; out-of-universe values are rejected.
  CHECK(lift(k, p, {{0, 0, 0, 0}, {0, 0, 0, 0}}).size() == 1);
  CHECK_THROWS_AS(lift(k, p, {{0, 9, 0, 0}}), Error);
  CHECK_THROWS_AS(lift(k, p, {}), Error);
}

TEST_CASE("almost-preservation over all ordered selections") {
  const Structure k = make_paired_edges();

  // A lifted automorphism preserves everything exactly.
  for (const Permutation& p : automorphisms(k)) {
    const auto m = lift(k, p, {{0, 1, 2, 3}, {3, 2, 1, 0}, {0, 0, 1, 1}});
    const auto rep = check_almost_preserves(k, m, std::string("E"), 0);
    CHECK(rep.within_budget);
    CHECK(rep.all_exceptions.empty());
    CHECK(rep.selections.size() == 9);
  }

  // The constant map 0 -> 2 breaks the target at every position.
  SequenceMap cm(4);
  cm.insert(constant_sequence(0, 4), constant_sequence(2, 4));
  const auto bad = check_almost_preserves(k, cm, std::string("R"), 3);
  CHECK_FALSE(bad.within_budget);
  CHECK(bad.all_exceptions == IndexSet{0, 1, 2, 3});
  CHECK(bad.max_exceptions == 4);
  CHECK(check_almost_preserves(k, cm, std::string("R"), 4).within_budget);

  // ...but preserves the edge relation (no self-loops anywhere).
  CHECK(check_almost_preserves(k, cm, std::string("E"), 0).within_budget);

  // Empty-domain maps hold vacuously.
  CHECK(check_almost_preserves(k, SequenceMap(4), std::string("E"), 0)
            .within_budget);

  // Formula form agrees with the name form.
  const Formula fe = parse_formula("E(x0,x1)", k.signature());
  const auto by_name = check_almost_preserves(k, cm, std::string("E"), 0);
  const auto by_formula = check_almost_preserves(k, cm, fe, 0);
  CHECK(by_name.within_budget == by_formula.within_budget);
  CHECK(by_name.all_exceptions == by_formula.all_exceptions);

  CHECK_THROWS_AS(check_almost_preserves(k, cm, std::string("nope"), 0),
                  Error);
}

TEST_CASE("perturbing a lifted automorphism confines exceptions") {
  const Structure k = make_paired_edges();
  const Permutation p({1, 0, 3, 2});
  const std::vector<Sequence> fs = {{0, 1, 2, 3}, {2, 2, 0, 0}};
  const auto clean = lift(k, p, fs);

  // Rebuild by hand with one image value changed at position 2.
  SequenceMap dirty(4);
  for (int i = 0; i < clean.size(); ++i) {
    Sequence img = clean.images()[i];
    if (i == 0) img[2] = (img[2] + 1) % 4;
    dirty.insert(clean.domain()[i], std::move(img));
  }
  for (const std::string& name : {std::string("E"), std::string("R")}) {
    const auto rep = check_almost_preserves(k, dirty, name, 4);
    for (const auto& sel : rep.selections) {
      for (int pos : sel.exceptions) CHECK(pos == 2);
    }
  }
}

TEST_CASE("counterexample construction on the paired-edges fixture") {
  const Structure k = make_paired_edges();
  const auto e = enumerate_definables(k, 1, EnumerationMode::orbit_atoms);
  const auto r = build_counterexample_map(k, e, 4);
  CHECK(r.map.size() == 1);
  CHECK(r.map.domain()[0] == constant_sequence(0, 4));
  CHECK(r.map.images()[0] == constant_sequence(2, 4));
  REQUIRE(r.item_exceptions.size() == 1);
  CHECK(r.item_exceptions[0].empty());
  CHECK(r.target_exceptions == IndexSet{0, 1, 2, 3});
  CHECK(r.witnesses.size() == 4);
  CHECK(r.notes.empty());

  // Exceptions of item t stay below position t (1-based items).
  const auto er = enumerate_definables(k, 1, EnumerationMode::by_rank);
  const auto rr = build_counterexample_map(k, er, 6);
  for (std::size_t t = 0; t < rr.item_exceptions.size(); ++t) {
    for (int pos : rr.item_exceptions[t]) {
      CHECK(pos < static_cast<int>(t) + 1);
    }
  }
  CHECK(rr.target_exceptions.size() == 6);

  CHECK_THROWS_AS(build_counterexample_map(k, e, 0), Error);
}

TEST_CASE("counterexample construction rejects definable targets") {
  const Structure l3 = make_line3();
  const auto e = enumerate_definables(l3, 1, EnumerationMode::orbit_atoms);
  CHECK_THROWS_AS(build_counterexample_map(l3, e, 4), DefinableError);
  try {
    build_counterexample_map(l3, e, 4);
  } catch (const DefinableError& err) {
    CHECK(relation_table(l3, err.defining_formula(), {0}) == Table{{1}});
  }
}

TEST_CASE("extension follows the worked example") {
  const Structure k = make_paired_edges();
  SequenceMap m(4);
  m.insert(constant_sequence(0, 4), constant_sequence(2, 4));
  const auto e2 = enumerate_definables(k, 2, EnumerationMode::orbit_atoms);
  const auto r = extend_map(k, m, constant_sequence(1, 4), e2);
  CHECK(r.image == constant_sequence(3, 4));
  CHECK(r.trace.threshold == 0);
  CHECK_FALSE(r.trace.already_present);
  REQUIRE(r.trace.steps.size() == 4);
  for (int kpos = 0; kpos < 4; ++kpos) {
    const ExtensionStep& st = r.trace.steps[kpos];
    CHECK(st.level == std::min(kpos, 3));
    CHECK(st.signs == std::vector<int>{-1, 1, -1});
    CHECK(st.chosen == 3);
  }

  // The extended map keeps every item's exceptions within the bound.
  SequenceMap extended = m;
  extended.insert(constant_sequence(1, 4), r.image);
  for (int j = 0; j < e2.item_count(); ++j) {
    for (int kpos = 0; kpos < 4; ++kpos) {
      if (kpos <= std::max(j + 1, r.trace.threshold)) continue;
      Tuple src, img;
      for (int c = 0; c < extended.size(); ++c) {
        src.push_back(extended.domain()[c][kpos]);
        img.push_back(extended.images()[c][kpos]);
      }
      CHECK((e2.items[j].table.count(src) > 0) ==
            (e2.items[j].table.count(img) > 0));
    }
  }
}

TEST_CASE("extension edge cases") {
  const Structure k = make_paired_edges();
  const auto e1 = enumerate_definables(k, 1, EnumerationMode::orbit_atoms);

  // Empty domain over a transitive structure: least element wins.
  const auto r0 = extend_map(k, SequenceMap(4), {1, 2, 3, 0}, e1);
  CHECK(r0.image == constant_sequence(0, 4));
  CHECK(r0.trace.threshold == 0);

  // Already-present sequences return their existing image, flagged.
  SequenceMap m(4);
  m.insert(constant_sequence(0, 4), constant_sequence(2, 4));
  const auto rp = extend_map(k, m, constant_sequence(0, 4), e1);
  CHECK(rp.trace.already_present);
  CHECK(rp.image == constant_sequence(2, 4));
  CHECK(rp.trace.steps.empty());

  // Arity mismatches and bad lengths are rejected.
  CHECK_THROWS_AS(extend_map(k, m, constant_sequence(1, 4), e1), Error);
  const auto e2 = enumerate_definables(k, 2, EnumerationMode::orbit_atoms);
  CHECK_THROWS_AS(extend_map(k, m, constant_sequence(1, 3), e2), Error);
  CHECK_THROWS_AS(extend_map(k, m, {9, 9, 9, 9}, e2), Error);
}

TEST_CASE("boolean valuation on the pinned examples") {
  const Structure k = make_paired_edges();
  const std::map<int, Sequence> bind{{0, {0, 1, 2, 3}}, {1, {1, 0, 3, 2}}};
  const Signature& sig = k.signature();

  CHECK(boolean_valuation(k, parse_formula("E(x0,x1)", sig), bind, 4) ==
        IndexSet{0, 1, 2, 3});
  CHECK(boolean_valuation(k, parse_formula("(x0 = x0)", sig), bind, 4) ==
        IndexSet{0, 1, 2, 3});
  CHECK(boolean_valuation(k, parse_formula("(x0 = x1)", sig), bind, 4)
            .empty());

  CHECK_THROWS_AS(
      boolean_valuation(k, parse_formula("P2(x0)", Signature({{"P2", 1}})),
                        bind, 4),
      Error);
  CHECK_THROWS_AS(boolean_valuation(k, parse_formula("E(x0,x2)", sig), bind, 4),
                  EvalError);
  CHECK_THROWS_AS(
      boolean_valuation(k, parse_formula("E(x0,x1)", sig),
                        {{0, {0, 1}}, {1, {1, 0, 3, 2}}}, 4),
      Error);
}

TEST_CASE("valuation respects the set-algebra identities") {
  const Structure k = make_paired_edges();
  const Signature& sig = k.signature();
  const std::map<int, Sequence> bind{{0, {0, 1, 2, 3}}, {1, {1, 1, 0, 2}}};
  const Formula f = parse_formula("E(x0,x1)", sig);
  const Formula g = parse_formula("(x0 = x1)", sig);

  const IndexSet sf = boolean_valuation(k, f, bind, 4);
  const IndexSet sg = boolean_valuation(k, g, bind, 4);

  IndexSet meet, join, comp;
  std::set_intersection(sf.begin(), sf.end(), sg.begin(), sg.end(),
                        std::inserter(meet, meet.begin()));
  join = sf;
  join.insert(sg.begin(), sg.end());
  for (int i = 0; i < 4; ++i) {
    if (sf.find(i) == sf.end()) comp.insert(i);
  }

  CHECK(boolean_valuation(k, Formula::conjunction(f, g), bind, 4) == meet);
  CHECK(boolean_valuation(k, Formula::disjunction(f, g), bind, 4) == join);
  CHECK(boolean_valuation(k, Formula::negation(f), bind, 4) == comp);

  // Existentials are pointwise joins over constant bindings.
  const Formula ex = Formula::exists(1, f);
  IndexSet pointwise;
  for (Element a = 0; a < k.size(); ++a) {
    std::map<int, Sequence> inner = bind;
    inner[1] = constant_sequence(a, 4);
    const IndexSet got = boolean_valuation(k, f, inner, 4);
    pointwise.insert(got.begin(), got.end());
  }
  CHECK(boolean_valuation(k, ex, bind, 4) == pointwise);

  // Constant bindings collapse to ordinary satisfaction.
  for (Element a = 0; a < k.size(); ++a) {
    for (Element b = 0; b < k.size(); ++b) {
      const std::map<int, Sequence> cbind{{0, constant_sequence(a, 4)},
                                          {1, constant_sequence(b, 4)}};
      const IndexSet got = boolean_valuation(k, f, cbind, 4);
      const bool truth = evaluate(k, f, {{0, a}, {1, b}});
      CHECK(got == (truth ? IndexSet{0, 1, 2, 3} : IndexSet{}));
    }
  }
}

TEST_CASE("sequence text formats round-trip and validate") {
  CHECK(parse_sequence("0,1,2") == Sequence{0, 1, 2});
  CHECK(parse_sequence(" 3 , 0 ") == Sequence{3, 0});
  CHECK(render_sequence({0, 1, 2}) == "0,1,2");
  CHECK_THROWS_AS(parse_sequence(""), ParseError);
  CHECK_THROWS_AS(parse_sequence("0,,1"), ParseError);
  CHECK_THROWS_AS(parse_sequence("0,a"), ParseError);
  CHECK_THROWS_AS(parse_sequence("-1,0"), ParseError);

  const std::string text =
      "# demo map\n"
      "0,0,0,0 -> 2,2,2,2\n"
      "\n"
      "1,1,1,1 -> 3,3,3,3\n";
  const SequenceMap m = parse_sequence_map(text);
  CHECK(m.size() == 2);
  CHECK(m.length() == 4);
  CHECK(parse_sequence_map(render_sequence_map(m)) == m);
  CHECK_THROWS_AS(parse_sequence_map("0,0 , 1,1\n"), ParseError);
  CHECK_THROWS_AS(parse_sequence_map("0,0 -> 1\n"), Error);
  CHECK_THROWS_AS(parse_sequence_map("# only comments\n"), ParseError);

  const auto binds = parse_sequence_bindings("x0: 0,1\nx2: 1,1\n");
  CHECK(binds.size() == 2);
  CHECK(binds.at(0) == Sequence{0, 1});
  CHECK(binds.at(2) == Sequence{1, 1});
  CHECK_THROWS_AS(parse_sequence_bindings("y0: 0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_sequence_bindings("x0: 0,1\nx0: 1,0\n"), ParseError);
  CHECK_THROWS_AS(parse_sequence_bindings("x0: 0,1\nx1: 0\n"), ParseError);
  CHECK_THROWS_AS(parse_sequence_bindings(""), ParseError);
}
