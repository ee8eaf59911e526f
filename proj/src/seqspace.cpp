#include "fodef/seqspace.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace fodef {

Sequence constant_sequence(Element v, int length) {
  if (length < 1) throw Error("sequence length must be at least 1");
  return Sequence(length, v);
}

AlmostEqualResult almost_equal(const Sequence& f, const Sequence& g,
                               int budget) {
  if (f.size() != g.size()) throw Error("sequence length mismatch");
  if (budget < 0) throw Error("negative comparison budget");
  AlmostEqualResult out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] != g[i]) out.differences.insert(static_cast<int>(i));
  }
  out.within_budget =
      static_cast<int>(out.differences.size()) <= budget;
  return out;
}

SequenceMap::SequenceMap(int length) : length_(length) {
  if (length < 1) throw Error("sequence length must be at least 1");
}

bool SequenceMap::contains(const Sequence& f) const {
  return std::find(domain_.begin(), domain_.end(), f) != domain_.end();
}

const Sequence& SequenceMap::image_of(const Sequence& f) const {
  auto it = std::find(domain_.begin(), domain_.end(), f);
  if (it == domain_.end()) throw Error("sequence not in the map's domain");
  return images_[static_cast<std::size_t>(it - domain_.begin())];
}

void SequenceMap::insert(Sequence from, Sequence to) {
  if (static_cast<int>(from.size()) != length_ ||
      static_cast<int>(to.size()) != length_) {
    throw Error("sequence length mismatch");
  }
  if (contains(from)) throw Error("sequence already in the map's domain");
  if (std::find(images_.begin(), images_.end(), to) != images_.end()) {
    throw Error("image sequence already taken; map must stay injective");
  }
  domain_.push_back(std::move(from));
  images_.push_back(std::move(to));
}

namespace {

void validate_sequence(const Structure& s, const Sequence& f) {
  for (Element v : f) {
    if (v < 0 || v >= s.size()) {
      throw Error("sequence value " + std::to_string(v) +
                  " outside the universe [0," + std::to_string(s.size()) + ")");
    }
  }
}

}  // namespace

SequenceMap lift(const Structure& s, const Permutation& p,
                 const std::vector<Sequence>& fs) {
  if (p.size() != s.size()) throw Error("permutation size mismatch");
  if (fs.empty()) throw Error("nothing to lift: no sequences given");
  SequenceMap out(static_cast<int>(fs[0].size()));
  for (const Sequence& f : fs) {
    validate_sequence(s, f);
    if (out.contains(f)) continue;
    Sequence img;
    img.reserve(f.size());
    for (Element v : f) img.push_back(p(v));
    out.insert(f, std::move(img));
  }
  return out;
}

namespace {

PreservationReport check_with(const Structure& s, const SequenceMap& m,
                              int arity,
                              const std::function<bool(const Tuple&)>& holds) {
  for (const Sequence& f : m.domain()) validate_sequence(s, f);
  PreservationReport out;
  out.within_budget = true;
  const int k = m.length();
  for (const Tuple& sel : all_tuples(m.size(), arity)) {
    SelectionExceptions se;
    se.selection.assign(sel.begin(), sel.end());
    Tuple src(arity), img(arity);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < arity; ++j) {
        src[j] = m.domain()[sel[j]][i];
        img[j] = m.images()[sel[j]][i];
      }
      if (holds(src) != holds(img)) se.exceptions.insert(i);
    }
    out.all_exceptions.insert(se.exceptions.begin(), se.exceptions.end());
    out.max_exceptions =
        std::max(out.max_exceptions, static_cast<int>(se.exceptions.size()));
    out.selections.push_back(std::move(se));
  }
  return out;
}

}  // namespace

PreservationReport check_almost_preserves(const Structure& s,
                                          const SequenceMap& m,
                                          const std::string& relation_name,
                                          int budget) {
  if (budget < 0) throw Error("negative comparison budget");
  const int arity = s.arity_of_any(relation_name);
  PreservationReport out = check_with(
      s, m, arity, [&](const Tuple& t) { return s.eval(relation_name, t); });
  out.within_budget = out.max_exceptions <= budget;
  return out;
}

PreservationReport check_almost_preserves(const Structure& s,
                                          const SequenceMap& m,
                                          const Formula& relation, int budget) {
  if (budget < 0) throw Error("negative comparison budget");
  const std::vector<int>& free = relation.free_variables();
  const int arity = free.empty() ? 0 : free.back() + 1;
  std::vector<int> vars(arity);
  for (int i = 0; i < arity; ++i) vars[i] = i;
  const Table table = relation_table(s, relation, vars);
  PreservationReport out = check_with(
      s, m, arity, [&](const Tuple& t) { return table.count(t) > 0; });
  out.within_budget = out.max_exceptions <= budget;
  return out;
}

CounterexampleResult build_counterexample_map(const Structure& s,
                                              const DefinableEnumeration& e,
                                              int length, LimitPolicy policy) {
  if (length < 1) throw Error("map length must be at least 1");
  if (e.arity != s.target_arity()) {
    throw Error("enumeration arity does not match the target relation");
  }
  DefinabilityResult check = is_definable(s, policy);
  if (check.definable) throw DefinableError(std::move(*check.defining_formula));

  const int r = e.arity;
  CounterexampleResult out{SequenceMap(length), {}, {}, {}, {}, {}, {}};
  out.from_coords.assign(r, Sequence(length, 0));
  out.to_coords.assign(r, Sequence(length, 0));
  for (int i = 0; i < length; ++i) {
    auto w = witness_pair(s, std::min(i, e.item_count()), e);
    if (!w) {
      throw Error("internal error: witness pair missing for a target that is "
                  "not definable");
    }
    for (int j = 0; j < r; ++j) {
      out.from_coords[j][i] = w->first[j];
      out.to_coords[j][i] = w->second[j];
    }
    out.witnesses.push_back(std::move(*w));
  }

  for (int j = 0; j < r; ++j) {
    const Sequence& from = out.from_coords[j];
    const Sequence& to = out.to_coords[j];
    if (out.map.contains(from)) {
      if (out.map.image_of(from) == to) {
        out.notes.push_back("coordinate " + std::to_string(j) +
                            " repeats an earlier mapping; kept once");
      } else {
        out.notes.push_back("coordinate " + std::to_string(j) +
                            " conflicts with an earlier mapping; first kept");
      }
      continue;
    }
    if (std::find(out.map.images().begin(), out.map.images().end(), to) !=
        out.map.images().end()) {
      out.notes.push_back("coordinate " + std::to_string(j) +
                          " would reuse an image; first kept");
      continue;
    }
    out.map.insert(from, to);
  }

  for (int t = 0; t < e.item_count(); ++t) {
    IndexSet ex;
    const Table& table = e.items[t].table;
    for (int i = 0; i < length; ++i) {
      if ((table.count(out.witnesses[i].first) > 0) !=
          (table.count(out.witnesses[i].second) > 0)) {
        ex.insert(i);
      }
    }
    out.item_exceptions.push_back(std::move(ex));
  }
  for (int i = 0; i < length; ++i) {
    if ((s.target_table().count(out.witnesses[i].first) > 0) !=
        (s.target_table().count(out.witnesses[i].second) > 0)) {
      out.target_exceptions.insert(i);
    }
  }
  return out;
}

ExtensionResult extend_map(const Structure& s, const SequenceMap& m,
                           const Sequence& a, const DefinableEnumeration& e) {
  if (static_cast<int>(a.size()) != m.length()) {
    throw Error("sequence length mismatch");
  }
  validate_sequence(s, a);
  if (m.contains(a)) {
    ExtensionResult out{m.image_of(a), {}};
    out.trace.already_present = true;
    return out;
  }
  for (const Sequence& f : m.domain()) validate_sequence(s, f);
  const int d = m.size();
  if (e.arity != d + 1) {
    throw Error("enumeration arity must be one more than the domain size");
  }

  const int n = s.size();
  const int items = e.item_count();
  const int k_len = m.length();
  ExtensionResult out{Sequence(k_len, 0), {}};
  out.trace.steps.reserve(k_len);

  // Membership vector of (prefix tuple, y) across all enumeration items.
  const auto profile = [&](const Tuple& prefix, Element y) {
    std::vector<char> sig(items);
    Tuple t = prefix;
    t.push_back(y);
    for (int i = 0; i < items; ++i) {
      sig[i] = e.items[i].table.count(t) > 0 ? 1 : 0;
    }
    return sig;
  };
  const auto common_prefix = [&](const std::vector<char>& u,
                                 const std::vector<char>& v) {
    int len = 0;
    while (len < items && u[len] == v[len]) ++len;
    return len;
  };

  for (int k = 0; k < k_len; ++k) {
    Tuple src(d), img(d);
    for (int j = 0; j < d; ++j) {
      src[j] = m.domain()[j][k];
      img[j] = m.images()[j][k];
    }
    const std::vector<char> want = profile(src, a[k]);
    std::vector<std::vector<char>> image_profiles;
    image_profiles.reserve(n);
    for (Element y = 0; y < n; ++y) image_profiles.push_back(profile(img, y));

    int best_len = -1;
    Element best = 0;
    for (Element y = 0; y < n; ++y) {
      const int len = common_prefix(want, image_profiles[y]);
      if (len > best_len) {
        best_len = len;
        best = y;
      }
    }
    out.image[k] = best;

    ExtensionStep step;
    step.level = std::min(k, best_len);
    step.chosen = best;
    step.signs.reserve(items);
    for (int i = 0; i < items; ++i) step.signs.push_back(want[i] ? 1 : -1);
    out.trace.steps.push_back(std::move(step));

    // A sign pattern is realizable on the source side exactly when it is
    // a prefix of some element's membership vector, so every realizable
    // pattern transfers iff every source vector recurs among the images.
    bool transfers = true;
    for (Element y = 0; y < n && transfers; ++y) {
      const std::vector<char> want_y = profile(src, y);
      bool found = false;
      for (Element z = 0; z < n && !found; ++z) {
        found = want_y == image_profiles[z];
      }
      transfers = found;
    }
    if (!transfers) out.trace.threshold = k;
  }
  return out;
}

IndexSet boolean_valuation(const Structure& s, const Formula& f,
                           const std::map<int, Sequence>& binding, int length) {
  if (length < 1) throw Error("sequence length must be at least 1");
  for (const auto& [var, seq] : binding) {
    if (var < 0) throw Error("negative variable index in binding");
    if (static_cast<int>(seq.size()) != length) {
      throw Error("bound sequence length differs from the given length");
    }
    validate_sequence(s, seq);
  }
  for (int v : f.free_variables()) {
    if (binding.find(v) == binding.end()) {
      throw EvalError("unbound variable x" + std::to_string(v));
    }
  }

  IndexSet full;
  for (int i = 0; i < length; ++i) full.insert(i);

  const auto complement = [&](const IndexSet& a) {
    IndexSet out;
    std::set_difference(full.begin(), full.end(), a.begin(), a.end(),
                        std::inserter(out, out.begin()));
    return out;
  };

  switch (f.kind()) {
    case Formula::Kind::truth:
      return full;
    case Formula::Kind::falsity:
      return {};
    case Formula::Kind::atom:
    case Formula::Kind::equality: {
      IndexSet out;
      const std::vector<int>& vars = f.vars();
      Tuple t(vars.size());
      for (int i = 0; i < length; ++i) {
        for (std::size_t j = 0; j < vars.size(); ++j) {
          t[j] = binding.at(vars[j])[i];
        }
        const bool holds = f.kind() == Formula::Kind::equality
                               ? t[0] == t[1]
                               : s.eval(f.symbol(), t);
        if (holds) out.insert(i);
      }
      return out;
    }
    case Formula::Kind::negation:
      return complement(boolean_valuation(s, f.child(), binding, length));
    case Formula::Kind::conjunction: {
      const IndexSet a = boolean_valuation(s, f.lhs(), binding, length);
      const IndexSet b = boolean_valuation(s, f.rhs(), binding, length);
      IndexSet out;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(out, out.begin()));
      return out;
    }
    case Formula::Kind::disjunction: {
      const IndexSet a = boolean_valuation(s, f.lhs(), binding, length);
      const IndexSet b = boolean_valuation(s, f.rhs(), binding, length);
      IndexSet out = a;
      out.insert(b.begin(), b.end());
      return out;
    }
    case Formula::Kind::implication: {
      const IndexSet a =
          complement(boolean_valuation(s, f.lhs(), binding, length));
      const IndexSet b = boolean_valuation(s, f.rhs(), binding, length);
      IndexSet out = a;
      out.insert(b.begin(), b.end());
      return out;
    }
    case Formula::Kind::exists:
    case Formula::Kind::forall: {
      IndexSet acc =
          f.kind() == Formula::Kind::exists ? IndexSet{} : full;
      for (Element v = 0; v < s.size(); ++v) {
        std::map<int, Sequence> inner = binding;
        inner[f.bound_var()] = constant_sequence(v, length);
        const IndexSet got = boolean_valuation(s, f.child(), inner, length);
        if (f.kind() == Formula::Kind::exists) {
          acc.insert(got.begin(), got.end());
        } else {
          IndexSet meet;
          std::set_intersection(acc.begin(), acc.end(), got.begin(), got.end(),
                                std::inserter(meet, meet.begin()));
          acc = std::move(meet);
        }
      }
      return acc;
    }
  }
  throw Error("internal error: unhandled formula kind");
}

namespace {

// Strips comments and splits into trimmed, non-empty lines.
std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

}  // namespace

Sequence parse_sequence(const std::string& text) {
  Sequence out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    // Trim around each comma-separated value.
    const auto first = item.find_first_not_of(" \t\r");
    const auto last = item.find_last_not_of(" \t\r");
    if (first == std::string::npos) {
      throw ParseError("empty value in sequence '" + text + "'");
    }
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ParseError("bad sequence value '" + item + "'");
    }
    if (used != item.size() || v < 0) {
      throw ParseError("bad sequence value '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty sequence");
  return out;
}

std::string render_sequence(const Sequence& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(f[i]);
  }
  return out;
}

SequenceMap parse_sequence_map(const std::string& text) {
  const std::vector<std::string> lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty map file");
  std::optional<SequenceMap> out;
  for (const std::string& line : lines) {
    const auto arrow = line.find("->");
    if (arrow == std::string::npos) {
      throw ParseError("expected 'from -> to' in line '" + line + "'");
    }
    Sequence from = parse_sequence(line.substr(0, arrow));
    Sequence to = parse_sequence(line.substr(arrow + 2));
    if (!out) out.emplace(static_cast<int>(from.size()));
    out->insert(std::move(from), std::move(to));
  }
  return *out;
}

std::string render_sequence_map(const SequenceMap& m) {
  std::string out;
  for (int i = 0; i < m.size(); ++i) {
    out += render_sequence(m.domain()[i]);
    out += " -> ";
    out += render_sequence(m.images()[i]);
    out += "\n";
  }
  return out;
}

std::map<int, Sequence> parse_sequence_bindings(const std::string& text) {
  std::map<int, Sequence> out;
  std::optional<int> length;
  for (const std::string& line : content_lines(text)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw ParseError("expected 'xN: sequence' in line '" + line + "'");
    }
    std::string name = line.substr(0, colon);
    const auto last = name.find_last_not_of(" \t");
    name = name.substr(0, last == std::string::npos ? 0 : last + 1);
    if (name.size() < 2 || name[0] != 'x') {
      throw ParseError("bad variable name '" + name + "'");
    }
    int var = 0;
    try {
      std::size_t used = 0;
      var = std::stoi(name.substr(1), &used);
      if (used != name.size() - 1) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("bad variable name '" + name + "'");
    }
    Sequence seq = parse_sequence(line.substr(colon + 1));
    if (length && static_cast<int>(seq.size()) != *length) {
      throw ParseError("sequence length differs from earlier lines");
    }
    length = static_cast<int>(seq.size());
    if (!out.emplace(var, std::move(seq)).second) {
      throw ParseError("variable '" + name + "' bound twice");
    }
  }
  if (out.empty()) throw ParseError("empty bindings file");
  return out;
}

}  // namespace fodef
