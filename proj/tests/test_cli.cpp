#include "doctest.h"

#include <sstream>

#include "json.hpp"

#include "fodef/cli.hpp"
#include "fodef/definability.hpp"
#include "fodef/seqspace.hpp"
#include "test_helpers.hpp"

using namespace fodef;
using namespace fodef::testing;

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("check prints verdicts with certificates and proper codes") {
  const auto yes = run({"check", data_path("L3.struct")});
  CHECK(yes.code == 0);
  CHECK(yes.out.find("DEFINABLE\n") == 0);
  CHECK(yes.out.find("formula: ") != std::string::npos);

  const auto no = run({"check", data_path("2K2.struct")});
  CHECK(no.code == 1);
  CHECK(no.out ==
        "NOT DEFINABLE\npermutation: 2 3 0 1\nfrom: 0\nto: 2\n");
}

TEST_CASE("json outputs parse and their certificates re-verify") {
  const auto yes = run({"check", data_path("L3.struct"), "--json"});
  const auto jy = nlohmann::json::parse(yes.out);
  CHECK(jy.at("verdict") == "definable");
  const Structure l3 = load_fixture("L3.struct");
  const Formula f = parse_formula(
      jy.at("certificate").at("formula").get<std::string>(), l3.signature());
  CHECK(relation_table(l3, f, {0}) == l3.target_table());

  const auto no = run({"check", data_path("2K2.struct"), "--json"});
  const auto jn = nlohmann::json::parse(no.out);
  CHECK(jn.at("verdict") == "not-definable");
  const Structure k = load_fixture("2K2.struct");
  const Permutation p(
      jn.at("certificate").at("permutation").get<std::vector<Element>>());
  const Tuple from = jn.at("certificate").at("from").get<Tuple>();
  const Tuple to = jn.at("certificate").at("to").get<Tuple>();
  CHECK(p.apply(from) == to);
  CHECK(preserves_check(k, p, k.table("E"), 2).preserved);
  CHECK(k.eval("R", from) != k.eval("R", to));

  const auto cx = run({"counterexample", data_path("2K2.struct"), "--length",
                       "4", "--json"});
  CHECK(cx.code == 1);
  const auto jc = nlohmann::json::parse(cx.out);
  CHECK(jc.at("verdict") == "not-definable");
  CHECK(jc.at("exceptions").at("target").size() == 4);
  for (const auto& item : jc.at("exceptions").at("items")) {
    CHECK(item.empty());
  }
}

TEST_CASE("subcommands cover the library surface") {
  const auto orb = run({"orbits", data_path("2K2.struct"), "--arity", "1"});
  CHECK(orb.code == 0);
  CHECK(orb.out == "arity: 1\nclasses: 1\nclass 0: (0) (1) (2) (3)\n");

  const auto aut = run({"aut", data_path("L3.struct")});
  CHECK(aut.code == 0);
  CHECK(aut.out == "automorphisms: 1\n0 1 2\n");

  const auto typ =
      run({"types", data_path("L3.struct"), "--arity", "1", "--stable"});
  CHECK(typ.code == 0);
  CHECK(typ.out.find("depth: 1\nclasses: 3\n") != std::string::npos);

  const auto typ0 =
      run({"types", data_path("L3.struct"), "--arity", "1", "--depth", "0"});
  CHECK(typ0.out.find("classes: 1\n") != std::string::npos);

  const auto wit = run({"witness", data_path("2K2.struct"), "--m", "1"});
  CHECK(wit.code == 1);
  CHECK(wit.out == "witness found at level 1\nfrom: 0\nto: 2\n");

  const auto wit2 = run({"witness", data_path("L3.struct"), "--m", "3"});
  CHECK(wit2.code == 0);
  CHECK(wit2.out == "no witness pair at level 3\n");

  const auto syn = run({"synthesize", data_path("2K2.struct")});
  CHECK(syn.code == 1);
  CHECK(syn.out.find("NOT DEFINABLE\n") == 0);

  const auto ext = run({"extend", data_path("2K2.struct"), "--map",
                        data_path("2K2_map.txt"), "--new", "1,1,1,1"});
  CHECK(ext.code == 0);
  CHECK(ext.out.find("image: 3,3,3,3\nthreshold: 0\n") == 0);

  const auto ver = run({"verify", data_path("2K2.struct"), "--map",
                        data_path("2K2_map.txt"), "--relation", "R",
                        "--budget", "0"});
  CHECK(ver.code == 1);
  CHECK(ver.out.find("VIOLATED (budget 0)\n") == 0);

  const auto ver2 = run({"verify", data_path("2K2.struct"), "--map",
                         data_path("2K2_map.txt"), "--relation", "E",
                         "--budget", "0"});
  CHECK(ver2.code == 0);
  CHECK(ver2.out.find("HOLDS (budget 0)\n") == 0);

  const auto ver3 = run({"verify", data_path("2K2.struct"), "--map",
                         data_path("2K2_map.txt"), "--formula", "E(x0,x0)",
                         "--budget", "0"});
  CHECK(ver3.code == 0);

  const auto bv = run({"bvalue", data_path("2K2.struct"), "--formula",
                       "E(x0,x1)", "--seqs", data_path("2K2_seqs.txt")});
  CHECK(bv.code == 0);
  CHECK(bv.out == "positions: 0 1 2 3\nlength: 4\n");

  const auto cx = run({"counterexample", data_path("L3.struct"), "--length",
                       "4"});
  CHECK(cx.code == 0);
  CHECK(cx.out.find("DEFINABLE\n") == 0);
}

TEST_CASE("verify report re-verifies against the library") {
  const auto ver = run({"verify", data_path("2K2.struct"), "--map",
                        data_path("2K2_map.txt"), "--relation", "R",
                        "--budget", "0", "--json"});
  const auto j = nlohmann::json::parse(ver.out);
  const Structure k = load_fixture("2K2.struct");
  const SequenceMap m = parse_sequence_map(slurp(data_path("2K2_map.txt")));
  const auto rep = check_almost_preserves(k, m, std::string("R"), 0);
  CHECK(j.at("verdict") == (rep.within_budget ? "holds" : "violated"));
  CHECK(j.at("exceptions").at("max").get<int>() == rep.max_exceptions);
  IndexSet uni;
  for (const auto& v : j.at("exceptions").at("union")) {
    uni.insert(v.get<int>());
  }
  CHECK(uni == rep.all_exceptions);
}

TEST_CASE("usage and input errors map to exit codes 2 and 3") {
  const auto none = run({});
  CHECK(none.code == 2);
  const auto unknown = run({"frobnicate"});
  CHECK(unknown.code == 2);
  const auto missing_flag = run({"orbits", data_path("L3.struct")});
  CHECK(missing_flag.code == 2);
  const auto both = run({"types", data_path("L3.struct"), "--arity", "1",
                         "--depth", "1", "--stable"});
  CHECK(both.code == 2);
  const auto neither = run({"verify", data_path("2K2.struct"), "--map",
                            data_path("2K2_map.txt"), "--budget", "0"});
  CHECK(neither.code == 2);

  const auto nofile = run({"check", data_path("absent.struct")});
  CHECK(nofile.code == 3);
  CHECK(nofile.err.find("error: ") == 0);
  const auto badformula = run({"bvalue", data_path("2K2.struct"), "--formula",
                               "Q(x0)", "--seqs", data_path("2K2_seqs.txt")});
  CHECK(badformula.code == 3);

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("check") != std::string::npos);
}

TEST_CASE("repeated in-process runs are byte-identical") {
  const std::vector<std::vector<std::string>> invocations = {
      {"check", data_path("L3.struct")},
      {"check", data_path("2K2.struct"), "--json"},
      {"synthesize", data_path("L3.struct"), "--json"},
      {"orbits", data_path("C4.struct"), "--arity", "2"},
      {"aut", data_path("2K2.struct"), "--json"},
      {"types", data_path("C4.struct"), "--arity", "2", "--stable"},
      {"witness", data_path("2K2.struct"), "--m", "1", "--json"},
      {"counterexample", data_path("2K2.struct"), "--length", "8"},
      {"extend", data_path("2K2.struct"), "--map", data_path("2K2_map.txt"),
       "--new", "1,1,1,1", "--json"},
      {"verify", data_path("2K2.struct"), "--map", data_path("2K2_map.txt"),
       "--relation", "E", "--budget", "0", "--json"},
      {"bvalue", data_path("2K2.struct"), "--formula", "E(x0,x1)", "--seqs",
       data_path("2K2_seqs.txt"), "--json"},
  };
  for (const auto& args : invocations) {
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }
}
