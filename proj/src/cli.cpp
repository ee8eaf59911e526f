#include "fodef/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fodef/definability.hpp"
#include "fodef/seqspace.hpp"
#include "fodef/structure.hpp"
#include "fodef/symmetry.hpp"

namespace fodef {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string join_ints(const std::vector<int>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string show_tuple(const Tuple& t) { return "(" + join_ints(t, ",") + ")"; }

std::string show_index_set(const IndexSet& s) {
  if (s.empty()) return "(none)";
  std::string out;
  for (int i : s) {
    if (!out.empty()) out += " ";
    out += std::to_string(i);
  }
  return out;
}

json json_tuple(const Tuple& t) { return json(t); }

json json_index_set(const IndexSet& s) {
  json out = json::array();
  for (int i : s) out.push_back(i);
  return out;
}

json json_violation(const Violation& v) {
  return {{"kind", "violation"},
          {"permutation", v.permutation.image()},
          {"from", json_tuple(v.from)},
          {"to", json_tuple(v.to)}};
}

json json_partition(const Partition& p) {
  json classes = json::array();
  for (const auto& cls : p.classes()) {
    json c = json::array();
    for (const Tuple& t : cls) c.push_back(json_tuple(t));
    classes.push_back(std::move(c));
  }
  return classes;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

void print_violation(std::ostream& out, const Violation& v) {
  out << "permutation: " << join_ints(v.permutation.image()) << "\n";
  out << "from: " << join_ints(v.from) << "\n";
  out << "to: " << join_ints(v.to) << "\n";
}

struct CommonFlags {
  std::string structure_path;
  bool as_json = false;
  bool strict = false;

  LimitPolicy policy() const {
    return strict ? LimitPolicy::strict : LimitPolicy::warn;
  }
  Structure load() const { return parse_structure(read_file(structure_path)); }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("structure", flags.structure_path, "structure file")
      ->required();
  cmd->add_flag("--json", flags.as_json, "machine-readable output");
  cmd->add_flag("--strict-limits", flags.strict,
                "fail instead of warning past the size limits");
}

int run_check(const CommonFlags& flags, std::ostream& out) {
  const Structure s = flags.load();
  const DefinabilityResult r = is_definable(s, flags.policy());
  if (flags.as_json) {
    json j;
    if (r.definable) {
      j["verdict"] = "definable";
      j["certificate"] = {{"kind", "formula"},
                          {"formula", render_formula(*r.defining_formula)}};
    } else {
      j["verdict"] = "not-definable";
      j["certificate"] = json_violation(*r.violation);
    }
    emit(out, j);
  } else if (r.definable) {
    out << "DEFINABLE\n";
    out << "formula: " << render_formula(*r.defining_formula) << "\n";
  } else {
    out << "NOT DEFINABLE\n";
    print_violation(out, *r.violation);
  }
  return r.definable ? 0 : 1;
}

int run_synthesize(const CommonFlags& flags, const std::string& mode_text,
                   std::ostream& out) {
  const Structure s = flags.load();
  const EnumerationMode mode = parse_enumeration_mode(mode_text);
  const DefinableEnumeration e =
      enumerate_definables(s, s.target_arity(), mode, flags.policy());
  try {
    const SynthesisResult r = synthesize(s, e, flags.policy());
    if (flags.as_json) {
      emit(out, json{{"verdict", "definable"},
                     {"certificate", {{"kind", "formula"},
                                      {"formula", render_formula(r.formula)},
                                      {"level", r.level},
                                      {"mode", to_string(mode)}}}});
    } else {
      out << "DEFINABLE\n";
      out << "level: " << r.level << "\n";
      out << "formula: " << render_formula(r.formula) << "\n";
    }
    return 0;
  } catch (const NotDefinableError& err) {
    if (flags.as_json) {
      emit(out, json{{"verdict", "not-definable"},
                     {"certificate", json_violation(err.violation())}});
    } else {
      out << "NOT DEFINABLE\n";
      print_violation(out, err.violation());
    }
    return 1;
  }
}

int run_orbits(const CommonFlags& flags, int arity, std::ostream& out) {
  const Structure s = flags.load();
  const Partition p = orbits(s, arity, flags.policy());
  if (flags.as_json) {
    emit(out, json{{"arity", arity}, {"classes", json_partition(p)}});
  } else {
    out << "arity: " << arity << "\n";
    out << "classes: " << p.class_count() << "\n";
    for (int c = 0; c < p.class_count(); ++c) {
      out << "class " << c << ":";
      for (const Tuple& t : p.classes()[c]) out << " " << show_tuple(t);
      out << "\n";
    }
  }
  return 0;
}

int run_aut(const CommonFlags& flags, std::ostream& out) {
  const Structure s = flags.load();
  const std::vector<Permutation> autos = automorphisms(s, flags.policy());
  if (flags.as_json) {
    json arr = json::array();
    for (const Permutation& p : autos) arr.push_back(p.image());
    emit(out, json{{"automorphisms", std::move(arr)}});
  } else {
    out << "automorphisms: " << autos.size() << "\n";
    for (const Permutation& p : autos) out << join_ints(p.image()) << "\n";
  }
  return 0;
}

int run_types(const CommonFlags& flags, int arity, int depth, bool stable,
              std::ostream& out) {
  const Structure s = flags.load();
  int use_depth = depth;
  if (stable) {
    use_depth = type_partition_stable(s, arity, flags.policy()).depth;
  }
  const TypePartitionResult tp =
      type_partition(s, arity, use_depth, flags.policy());
  const ClassFormulas cf =
      type_class_formulas(s, arity, use_depth, flags.policy());
  if (!(cf.partition == tp.partition)) {
    throw Error("internal error: formula classes differ from the partition");
  }
  if (flags.as_json) {
    json formulas = json::array();
    for (const Formula& f : cf.formulas) formulas.push_back(render_formula(f));
    emit(out, json{{"arity", arity},
                   {"depth", tp.depth},
                   {"classes", json_partition(tp.partition)},
                   {"formulas", std::move(formulas)}});
  } else {
    out << "arity: " << arity << "\n";
    out << "depth: " << tp.depth << "\n";
    out << "classes: " << tp.partition.class_count() << "\n";
    for (int c = 0; c < tp.partition.class_count(); ++c) {
      out << "class " << c << ":";
      for (const Tuple& t : tp.partition.classes()[c]) {
        out << " " << show_tuple(t);
      }
      out << "\n";
      out << "  formula: " << render_formula(cf.formulas[c]) << "\n";
    }
  }
  return 0;
}

int run_witness(const CommonFlags& flags, int m, const std::string& mode_text,
                std::ostream& out) {
  const Structure s = flags.load();
  const DefinableEnumeration e = enumerate_definables(
      s, s.target_arity(), parse_enumeration_mode(mode_text), flags.policy());
  const auto w = witness_pair(s, m, e);
  if (flags.as_json) {
    json j;
    if (w) {
      j["verdict"] = "found";
      j["certificate"] = {{"kind", "pair"},
                          {"from", json_tuple(w->first)},
                          {"to", json_tuple(w->second)}};
    } else {
      j["verdict"] = "absent";
    }
    emit(out, j);
  } else if (w) {
    out << "witness found at level " << m << "\n";
    out << "from: " << join_ints(w->first) << "\n";
    out << "to: " << join_ints(w->second) << "\n";
  } else {
    out << "no witness pair at level " << m << "\n";
  }
  return w ? 1 : 0;
}

int run_counterexample(const CommonFlags& flags, int length,
                       const std::string& mode_text, std::ostream& out) {
  const Structure s = flags.load();
  const DefinableEnumeration e = enumerate_definables(
      s, s.target_arity(), parse_enumeration_mode(mode_text), flags.policy());
  try {
    const CounterexampleResult r =
        build_counterexample_map(s, e, length, flags.policy());
    if (flags.as_json) {
      json map = json::array();
      for (int i = 0; i < r.map.size(); ++i) {
        map.push_back({{"from", r.map.domain()[i]}, {"to", r.map.images()[i]}});
      }
      json items = json::array();
      for (const IndexSet& ex : r.item_exceptions) {
        items.push_back(json_index_set(ex));
      }
      emit(out, json{{"verdict", "not-definable"},
                     {"map", std::move(map)},
                     {"exceptions", {{"items", std::move(items)},
                                     {"target", json_index_set(r.target_exceptions)}}},
                     {"notes", r.notes}});
    } else {
      out << "NOT DEFINABLE\n";
      out << "map:\n" << render_sequence_map(r.map);
      for (std::size_t t = 0; t < r.item_exceptions.size(); ++t) {
        out << "item " << t + 1
            << " exceptions: " << show_index_set(r.item_exceptions[t]) << "\n";
      }
      out << "target exceptions: " << show_index_set(r.target_exceptions)
          << "\n";
      for (const std::string& note : r.notes) out << "note: " << note << "\n";
    }
    return 1;
  } catch (const DefinableError& err) {
    if (flags.as_json) {
      emit(out,
           json{{"verdict", "definable"},
                {"certificate",
                 {{"kind", "formula"},
                  {"formula", render_formula(err.defining_formula())}}}});
    } else {
      out << "DEFINABLE\n";
      out << "formula: " << render_formula(err.defining_formula()) << "\n";
    }
    return 0;
  }
}

int run_extend(const CommonFlags& flags, const std::string& map_path,
               const std::string& new_seq, const std::string& mode_text,
               std::ostream& out) {
  const Structure s = flags.load();
  const SequenceMap m = parse_sequence_map(read_file(map_path));
  const Sequence a = parse_sequence(new_seq);
  const DefinableEnumeration e = enumerate_definables(
      s, m.size() + 1, parse_enumeration_mode(mode_text), flags.policy());
  const ExtensionResult r = extend_map(s, m, a, e);
  if (flags.as_json) {
    json steps = json::array();
    for (std::size_t k = 0; k < r.trace.steps.size(); ++k) {
      const ExtensionStep& st = r.trace.steps[k];
      steps.push_back({{"position", k},
                       {"level", st.level},
                       {"signs", st.signs},
                       {"chosen", st.chosen}});
    }
    emit(out, json{{"image", render_sequence(r.image)},
                   {"trace", {{"steps", std::move(steps)},
                              {"threshold", r.trace.threshold},
                              {"already_present", r.trace.already_present}}}});
  } else {
    out << "image: " << render_sequence(r.image) << "\n";
    if (r.trace.already_present) {
      out << "already in domain; existing image returned\n";
      return 0;
    }
    out << "threshold: " << r.trace.threshold << "\n";
    for (std::size_t k = 0; k < r.trace.steps.size(); ++k) {
      const ExtensionStep& st = r.trace.steps[k];
      out << "k=" << k << ": level " << st.level << ", signs";
      for (int sgn : st.signs) out << " " << (sgn > 0 ? "+1" : "-1");
      out << ", chosen " << st.chosen << "\n";
    }
  }
  return 0;
}

int run_verify(const CommonFlags& flags, const std::string& map_path,
               const std::string& relation, const std::string& formula_text,
               int budget, std::ostream& out) {
  const Structure s = flags.load();
  const SequenceMap m = parse_sequence_map(read_file(map_path));
  PreservationReport r =
      relation.empty()
          ? check_almost_preserves(
                s, m, parse_formula(formula_text, s.signature()), budget)
          : check_almost_preserves(s, m, relation, budget);
  if (flags.as_json) {
    json sels = json::array();
    for (const SelectionExceptions& se : r.selections) {
      sels.push_back({{"selection", se.selection},
                      {"positions", json_index_set(se.exceptions)}});
    }
    emit(out, json{{"verdict", r.within_budget ? "holds" : "violated"},
                   {"budget", budget},
                   {"exceptions", {{"per_selection", std::move(sels)},
                                   {"union", json_index_set(r.all_exceptions)},
                                   {"max", r.max_exceptions}}}});
  } else {
    out << (r.within_budget ? "HOLDS" : "VIOLATED") << " (budget " << budget
        << ")\n";
    for (const SelectionExceptions& se : r.selections) {
      out << "selection (" << join_ints(se.selection, ",")
          << "): " << show_index_set(se.exceptions) << "\n";
    }
    out << "union: " << show_index_set(r.all_exceptions) << "\n";
    out << "max: " << r.max_exceptions << "\n";
  }
  return r.within_budget ? 0 : 1;
}

int run_bvalue(const CommonFlags& flags, const std::string& formula_text,
               const std::string& seqs_path, std::ostream& out) {
  const Structure s = flags.load();
  const Formula f = parse_formula(formula_text, s.signature());
  const std::map<int, Sequence> binding =
      parse_sequence_bindings(read_file(seqs_path));
  const int length = static_cast<int>(binding.begin()->second.size());
  const IndexSet got = boolean_valuation(s, f, binding, length);
  if (flags.as_json) {
    emit(out, json{{"positions", json_index_set(got)}, {"length", length}});
  } else {
    out << "positions: " << show_index_set(got) << "\n";
    out << "length: " << length << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"first-order definability toolkit for finite relational "
               "structures"};
  app.name("fodef");
  app.require_subcommand(1);

  CommonFlags flags;
  std::string mode = "orbit-atoms";
  int arity = 1;
  int depth = 0;
  bool stable = false;
  int level_m = 0;
  int length = 0;
  int budget = 0;
  std::string map_path, new_seq, relation, formula_text, seqs_path;

  CLI::App* check = app.add_subcommand(
      "check", "decide whether the target relation is definable");
  add_common(check, flags);

  CLI::App* synth = app.add_subcommand(
      "synthesize", "build a defining formula via the witness construction");
  add_common(synth, flags);
  synth->add_option("--mode", mode, "enumeration mode: orbit-atoms or by-rank");

  CLI::App* orb = app.add_subcommand("orbits", "orbit classes of tuples");
  add_common(orb, flags);
  orb->add_option("--arity", arity, "tuple arity")->required();

  CLI::App* aut = app.add_subcommand("aut", "list all automorphisms");
  add_common(aut, flags);

  CLI::App* types = app.add_subcommand(
      "types", "rank-q type classes with their describing formulas");
  add_common(types, flags);
  types->add_option("--arity", arity, "tuple arity")->required();
  CLI::Option* depth_opt =
      types->add_option("--depth", depth, "refinement rank");
  types->add_flag("--stable", stable, "refine until stable")
      ->excludes(depth_opt);

  CLI::App* wit = app.add_subcommand(
      "witness", "least target-discrepant pair agreeing on an item prefix");
  add_common(wit, flags);
  wit->add_option("--m", level_m, "enumeration prefix length")->required();
  wit->add_option("--mode", mode, "enumeration mode: orbit-atoms or by-rank");

  CLI::App* cx = app.add_subcommand(
      "counterexample", "witness-based sequence map for a non-definable target");
  add_common(cx, flags);
  cx->add_option("--length", length, "sequence length")->required();
  cx->add_option("--mode", mode, "enumeration mode: orbit-atoms or by-rank");

  CLI::App* ext = app.add_subcommand(
      "extend", "extend a sequence map to one more sequence");
  add_common(ext, flags);
  ext->add_option("--map", map_path, "sequence map file")->required();
  ext->add_option("--new", new_seq, "sequence to extend by, as v0,v1,...")
      ->required();
  ext->add_option("--mode", mode, "enumeration mode: orbit-atoms or by-rank");

  CLI::App* ver = app.add_subcommand(
      "verify", "check almost-preservation of a relation under a map");
  add_common(ver, flags);
  ver->add_option("--map", map_path, "sequence map file")->required();
  CLI::Option* rel_opt =
      ver->add_option("--relation", relation, "relation name");
  CLI::Option* form_opt =
      ver->add_option("--formula", formula_text, "formula text");
  rel_opt->excludes(form_opt);
  ver->add_option("--budget", budget, "allowed exceptions per selection")
      ->required();

  CLI::App* bval = app.add_subcommand(
      "bvalue", "positions where a formula holds over bound sequences");
  add_common(bval, flags);
  bval->add_option("--formula", formula_text, "formula text")->required();
  bval->add_option("--seqs", seqs_path, "bindings file of xN: sequences")
      ->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (check->parsed()) return run_check(flags, out);
    if (synth->parsed()) return run_synthesize(flags, mode, out);
    if (orb->parsed()) return run_orbits(flags, arity, out);
    if (aut->parsed()) return run_aut(flags, out);
    if (types->parsed()) {
      if (!stable && depth_opt->count() == 0) stable = true;
      return run_types(flags, arity, depth, stable, out);
    }
    if (wit->parsed()) return run_witness(flags, level_m, mode, out);
    if (cx->parsed()) return run_counterexample(flags, length, mode, out);
    if (ext->parsed()) return run_extend(flags, map_path, new_seq, mode, out);
    if (ver->parsed()) {
      if (rel_opt->count() == 0 && form_opt->count() == 0) {
        err << "usage error: verify needs --relation or --formula\n";
        return 2;
      }
      return run_verify(flags, map_path, relation, formula_text, budget, out);
    }
    if (bval->parsed()) return run_bvalue(flags, formula_text, seqs_path, out);
    err << "usage error: no subcommand given\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fodef
