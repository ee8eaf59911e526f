#include "fodef/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fodef {

struct Formula::Node {
  Kind kind;
  std::string symbol;                       // atom
  std::vector<int> vars;                    // atom arguments / equality pair
  int bound = -1;                           // quantifier variable
  std::shared_ptr<const Node> left, right;  // children
  std::vector<int> free;                    // sorted free variables
  int rank = 0;                             // quantifier rank
  int max_var = -1;                         // highest variable index anywhere
};

namespace {

using Node = Formula::Node;

std::vector<int> merge_sorted(const std::vector<int>& a,
                              const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

Formula Formula::truth() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::truth;
  return Formula(std::move(n));
}

Formula Formula::falsity() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::falsity;
  return Formula(std::move(n));
}

Formula Formula::atom(std::string symbol, std::vector<int> vars) {
  if (vars.empty()) throw Error("atom '" + symbol + "' needs arguments");
  for (int v : vars) {
    if (v < 0) throw Error("negative variable index in atom");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::atom;
  n->symbol = std::move(symbol);
  n->free = sorted_unique(vars);
  n->max_var = n->free.back();
  n->vars = std::move(vars);
  return Formula(std::move(n));
}

Formula Formula::equality(int lhs_var, int rhs_var) {
  if (lhs_var < 0 || rhs_var < 0) {
    throw Error("negative variable index in equality");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::equality;
  n->vars = {lhs_var, rhs_var};
  n->free = sorted_unique(n->vars);
  n->max_var = n->free.back();
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::negation;
  n->free = f.node_->free;
  n->rank = f.node_->rank;
  n->max_var = f.node_->max_var;
  n->left = std::move(f.node_);
  return Formula(std::move(n));
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make_binary(Kind::conjunction, std::move(lhs), std::move(rhs));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make_binary(Kind::disjunction, std::move(lhs), std::move(rhs));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  return make_binary(Kind::implication, std::move(lhs), std::move(rhs));
}

Formula Formula::exists(int var, Formula body) {
  return make_quantifier(Kind::exists, var, std::move(body));
}

Formula Formula::forall(int var, Formula body) {
  return make_quantifier(Kind::forall, var, std::move(body));
}

Formula Formula::make_binary(Kind kind, Formula lhs, Formula rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->free = merge_sorted(lhs.node_->free, rhs.node_->free);
  n->rank = std::max(lhs.node_->rank, rhs.node_->rank);
  n->max_var = std::max(lhs.node_->max_var, rhs.node_->max_var);
  n->left = std::move(lhs.node_);
  n->right = std::move(rhs.node_);
  return Formula(std::move(n));
}

Formula Formula::make_quantifier(Kind kind, int var, Formula body) {
  if (var < 0) throw Error("negative variable index in quantifier");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->bound = var;
  std::vector<int> free = body.node_->free;
  free.erase(std::remove(free.begin(), free.end(), var), free.end());
  n->free = std::move(free);
  n->rank = body.node_->rank + 1;
  n->max_var = std::max(var, body.node_->max_var);
  n->left = std::move(body.node_);
  return Formula(std::move(n));
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::symbol() const { return node_->symbol; }
const std::vector<int>& Formula::vars() const { return node_->vars; }
int Formula::bound_var() const { return node_->bound; }
Formula Formula::lhs() const { return Formula(node_->left); }
Formula Formula::rhs() const { return Formula(node_->right); }
Formula Formula::child() const { return Formula(node_->left); }
const std::vector<int>& Formula::free_variables() const { return node_->free; }
int Formula::quantifier_rank() const { return node_->rank; }

bool Formula::operator==(const Formula& other) const {
  // Shared subtrees compare in O(1); distinct trees recurse structurally.
  const Node* a = node_.get();
  const Node* b = other.node_.get();
  if (a == b) return true;
  if (a->kind != b->kind || a->symbol != b->symbol || a->vars != b->vars ||
      a->bound != b->bound) {
    return false;
  }
  const bool has_left = a->left != nullptr;
  const bool has_right = a->right != nullptr;
  if (has_left != (b->left != nullptr) || has_right != (b->right != nullptr)) {
    return false;
  }
  if (has_left && !(Formula(a->left) == Formula(b->left))) return false;
  if (has_right && !(Formula(a->right) == Formula(b->right))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class TokKind {
  lparen, rparen, comma, dot, bang, amp, pipe, arrow, equals,
  kw_true, kw_false, ident, opname, variable, end,
};

struct FormulaToken {
  TokKind kind;
  std::string text;
  int var = -1;
  std::size_t pos = 0;  // 0-based column in the input
};

constexpr std::string_view kOperatorChars = "<>~+-*/^%?@:$=";

std::vector<FormulaToken> tokenize_formula(std::string_view text) {
  std::vector<FormulaToken> out;
  std::size_t i = 0;
  auto push = [&](TokKind k, std::string t, std::size_t pos) {
    out.push_back({k, std::move(t), -1, pos});
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    switch (c) {
      case '(': push(TokKind::lparen, "(", start); ++i; continue;
      case ')': push(TokKind::rparen, ")", start); ++i; continue;
      case ',': push(TokKind::comma, ",", start); ++i; continue;
      case '.': push(TokKind::dot, ".", start); ++i; continue;
      case '!': push(TokKind::bang, "!", start); ++i; continue;
      case '&': push(TokKind::amp, "&", start); ++i; continue;
      case '|': push(TokKind::pipe, "|", start); ++i; continue;
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_')) {
        ++j;
      }
      std::string word(text.substr(i, j - i));
      i = j;
      if (word == "true") {
        push(TokKind::kw_true, std::move(word), start);
      } else if (word == "false") {
        push(TokKind::kw_false, std::move(word), start);
      } else if (word.size() >= 2 && word[0] == 'x' &&
                 std::all_of(word.begin() + 1, word.end(), [](char d) {
                   return std::isdigit(static_cast<unsigned char>(d));
                 })) {
        FormulaToken t{TokKind::variable, word, 0, start};
        try {
          t.var = std::stoi(word.substr(1));
        } catch (const std::exception&) {
          throw ParseError("column " + std::to_string(start + 1) +
                           ": variable index out of range in '" + word + "'");
        }
        out.push_back(std::move(t));
      } else {
        push(TokKind::ident, std::move(word), start);
      }
      continue;
    }
    if (kOperatorChars.find(c) != std::string_view::npos) {
      std::size_t j = i;
      while (j < text.size() &&
             kOperatorChars.find(text[j]) != std::string_view::npos) {
        ++j;
      }
      std::string run(text.substr(i, j - i));
      i = j;
      if (run == "=") {
        push(TokKind::equals, std::move(run), start);
      } else if (run == "->") {
        push(TokKind::arrow, std::move(run), start);
      } else {
        push(TokKind::opname, std::move(run), start);
      }
      continue;
    }
    throw ParseError("column " + std::to_string(start + 1) +
                     ": unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({TokKind::end, "", -1, text.size()});
  return out;
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature& sig)
      : tokens_(tokenize_formula(text)), sig_(sig) {}

  Formula run() {
    Formula f = parse();
    expect(TokKind::end, "end of input");
    return f;
  }

 private:
  [[noreturn]] void fail(const FormulaToken& t, const std::string& msg) {
    throw ParseError("column " + std::to_string(t.pos + 1) + ": " + msg);
  }

  const FormulaToken& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  const FormulaToken& advance() { return tokens_[pos_++]; }

  const FormulaToken& expect(TokKind k, const std::string& what) {
    const FormulaToken& t = advance();
    if (t.kind != k) fail(t, "expected " + what + ", got '" + t.text + "'");
    return t;
  }

  Formula parse_atom(const FormulaToken& name_tok) {
    if (!sig_.has(name_tok.text)) {
      fail(name_tok, "unknown symbol '" + name_tok.text + "'");
    }
    const int arity = sig_.arity_of(name_tok.text);
    expect(TokKind::lparen, "'('");
    std::vector<int> vars;
    vars.push_back(expect(TokKind::variable, "variable").var);
    while (peek().kind == TokKind::comma) {
      advance();
      vars.push_back(expect(TokKind::variable, "variable").var);
    }
    const FormulaToken& close = expect(TokKind::rparen, "')'");
    if (static_cast<int>(vars.size()) != arity) {
      fail(close, "symbol '" + name_tok.text + "' has arity " +
                      std::to_string(arity) + ", got " +
                      std::to_string(vars.size()) + " arguments");
    }
    return Formula::atom(name_tok.text, std::move(vars));
  }

  // Inside "(...)": either an infix pair on variables or a formula
  // followed by a binary connective or a plain grouping ")".
  Formula parse_parenthesized() {
    if (peek().kind == TokKind::variable &&
        (peek(1).kind == TokKind::equals || peek(1).kind == TokKind::opname)) {
      const FormulaToken& v1 = advance();
      const FormulaToken& op = advance();
      const FormulaToken& v2 = expect(TokKind::variable, "variable");
      expect(TokKind::rparen, "')'");
      if (op.kind == TokKind::equals) {
        return Formula::equality(v1.var, v2.var);
      }
      if (!sig_.has(op.text)) fail(op, "unknown symbol '" + op.text + "'");
      if (sig_.arity_of(op.text) != 2) {
        fail(op, "infix form needs a binary symbol, '" + op.text + "' has arity " +
                     std::to_string(sig_.arity_of(op.text)));
      }
      return Formula::atom(op.text, {v1.var, v2.var});
    }
    Formula first = parse();
    const FormulaToken& t = advance();
    switch (t.kind) {
      case TokKind::rparen:
        return first;  // redundant grouping
      case TokKind::amp: {
        Formula second = parse();
        expect(TokKind::rparen, "')'");
        return Formula::conjunction(std::move(first), std::move(second));
      }
      case TokKind::pipe: {
        Formula second = parse();
        expect(TokKind::rparen, "')'");
        return Formula::disjunction(std::move(first), std::move(second));
      }
      case TokKind::arrow: {
        Formula second = parse();
        expect(TokKind::rparen, "')'");
        return Formula::implication(std::move(first), std::move(second));
      }
      default:
        fail(t, "expected '&', '|', '->' or ')', got '" + t.text + "'");
    }
  }

  Formula parse() {
    const FormulaToken& t = advance();
    switch (t.kind) {
      case TokKind::kw_true:
        return Formula::truth();
      case TokKind::kw_false:
        return Formula::falsity();
      case TokKind::bang:
        return Formula::negation(parse());
      case TokKind::lparen:
        return parse_parenthesized();
      case TokKind::ident:
        // "E x0. f" / "A x0. f" quantify; "E(x0,x1)" is an atom even when
        // the signature has a symbol named E or A.
        if ((t.text == "E" || t.text == "A") &&
            peek().kind == TokKind::variable) {
          const FormulaToken& v = advance();
          expect(TokKind::dot, "'.'");
          Formula body = parse();
          return t.text == "E" ? Formula::exists(v.var, std::move(body))
                               : Formula::forall(v.var, std::move(body));
        }
        return parse_atom(t);
      case TokKind::opname:
        return parse_atom(t);  // prefix form for operator-named symbols
      default:
        fail(t, "expected a formula, got '" + t.text + "'");
    }
  }

  std::vector<FormulaToken> tokens_;
  std::size_t pos_ = 0;
  const Signature& sig_;
};

bool is_operator_run(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return kOperatorChars.find(c) != std::string_view::npos;
  });
}

void render_into(const Formula& f, std::ostream& out) {
  switch (f.kind()) {
    case Formula::Kind::truth:
      out << "true";
      return;
    case Formula::Kind::falsity:
      out << "false";
      return;
    case Formula::Kind::atom: {
      const auto& vs = f.vars();
      if (vs.size() == 2 && is_operator_run(f.symbol())) {
        out << "(x" << vs[0] << " " << f.symbol() << " x" << vs[1] << ")";
        return;
      }
      out << f.symbol() << "(";
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i > 0) out << ",";
        out << "x" << vs[i];
      }
      out << ")";
      return;
    }
    case Formula::Kind::equality:
      out << "(x" << f.vars()[0] << " = x" << f.vars()[1] << ")";
      return;
    case Formula::Kind::negation:
      out << "!(";
      render_into(f.child(), out);
      out << ")";
      return;
    case Formula::Kind::conjunction:
    case Formula::Kind::disjunction:
    case Formula::Kind::implication: {
      const char* op = f.kind() == Formula::Kind::conjunction   ? "&"
                       : f.kind() == Formula::Kind::disjunction ? "|"
                                                                : "->";
      out << "(";
      render_into(f.lhs(), out);
      out << " " << op << " ";
      render_into(f.rhs(), out);
      out << ")";
      return;
    }
    case Formula::Kind::exists:
    case Formula::Kind::forall:
      out << (f.kind() == Formula::Kind::exists ? "E" : "A") << " x"
          << f.bound_var() << ". (";
      render_into(f.child(), out);
      out << ")";
      return;
  }
}

// Evaluation shares one memo across assignments keyed by node identity
// plus the values of the node's free variables, so formulas that reuse
// subtrees heavily evaluate in time proportional to the shared graph.
class EvalContext {
 public:
  explicit EvalContext(const Structure& s) : s_(s) {}

  bool eval(const Formula& f, const Assignment& assignment) {
    env_.assign(static_cast<std::size_t>(f.node()->max_var + 1), -1);
    for (const auto& [var, value] : assignment) {
      if (var < 0) throw EvalError("negative variable index in assignment");
      if (value < 0 || value >= s_.size()) {
        throw EvalError("assignment value " + std::to_string(value) +
                        " out of range [0," + std::to_string(s_.size()) + ")");
      }
      if (var < static_cast<int>(env_.size())) env_[var] = value;
    }
    return run(f);
  }

 private:
  bool run(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::truth:
        return true;
      case Formula::Kind::falsity:
        return false;
      case Formula::Kind::atom: {
        Tuple t;
        t.reserve(f.vars().size());
        for (int v : f.vars()) t.push_back(lookup(v));
        return s_.eval(f.symbol(), t);
      }
      case Formula::Kind::equality:
        return lookup(f.vars()[0]) == lookup(f.vars()[1]);
      default:
        break;
    }
    // Composite node: consult the memo.
    std::pair<const Formula::Node*, std::vector<int>> key;
    key.first = f.node();
    key.second.reserve(f.free_variables().size());
    for (int v : f.free_variables()) key.second.push_back(lookup(v));
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    bool result = false;
    switch (f.kind()) {
      case Formula::Kind::negation:
        result = !run(f.child());
        break;
      case Formula::Kind::conjunction:
        result = run(f.lhs()) && run(f.rhs());
        break;
      case Formula::Kind::disjunction:
        result = run(f.lhs()) || run(f.rhs());
        break;
      case Formula::Kind::implication:
        result = !run(f.lhs()) || run(f.rhs());
        break;
      case Formula::Kind::exists:
      case Formula::Kind::forall: {
        const int var = f.bound_var();
        if (var >= static_cast<int>(env_.size())) {
          env_.resize(var + 1, -1);
        }
        const int saved = env_[var];
        const bool want = f.kind() == Formula::Kind::exists;
        result = !want;
        for (Element a = 0; a < s_.size(); ++a) {
          env_[var] = a;
          if (run(f.child()) == want) {
            result = want;
            break;
          }
        }
        env_[var] = saved;
        break;
      }
      default:
        break;
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  Element lookup(int var) const {
    if (var >= static_cast<int>(env_.size()) || env_[var] < 0) {
      throw EvalError("unbound variable x" + std::to_string(var));
    }
    return env_[var];
  }

  const Structure& s_;
  std::vector<Element> env_;  // -1 marks unbound
  std::map<std::pair<const Formula::Node*, std::vector<int>>, bool> memo_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Signature& sig) {
  return FormulaParser(text, sig).run();
}

std::string render_formula(const Formula& f) {
  std::ostringstream out;
  render_into(f, out);
  return out.str();
}

bool evaluate(const Structure& s, const Formula& f,
              const Assignment& assignment) {
  return EvalContext(s).eval(f, assignment);
}

Table relation_table(const Structure& s, const Formula& f,
                     const std::vector<int>& vars) {
  for (int fv : f.free_variables()) {
    if (std::find(vars.begin(), vars.end(), fv) == vars.end()) {
      throw Error("free variable x" + std::to_string(fv) +
                  " not covered by the variable list");
    }
  }
  EvalContext ctx(s);
  Table out;
  for (const Tuple& t : all_tuples(s.size(), static_cast<int>(vars.size()))) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = t[i];
    if (ctx.eval(f, a)) out.insert(t);
  }
  return out;
}

namespace {

// Collects operands of a same-kind chain (conjunction or disjunction).
void flatten(const Formula& f, Formula::Kind kind, std::vector<Formula>& out) {
  if (f.kind() == kind) {
    flatten(f.lhs(), kind, out);
    flatten(f.rhs(), kind, out);
  } else {
    out.push_back(f);
  }
}

Formula simplify_cached(const Formula& f,
                        std::map<const Formula::Node*, Formula>& cache);

Formula simplify_chain(const Formula& f, bool is_conj,
                       std::map<const Formula::Node*, Formula>& cache) {
  const Formula::Kind kind =
      is_conj ? Formula::Kind::conjunction : Formula::Kind::disjunction;
  const Formula::Kind dominant_kind =
      is_conj ? Formula::Kind::falsity : Formula::Kind::truth;
  const Formula::Kind neutral_kind =
      is_conj ? Formula::Kind::truth : Formula::Kind::falsity;

  std::vector<Formula> raw;
  flatten(f, kind, raw);
  std::vector<Formula> kept;
  for (const Formula& g : raw) {
    Formula sg = simplify_cached(g, cache);
    if (sg.kind() == dominant_kind) {
      return is_conj ? Formula::falsity() : Formula::truth();
    }
    if (sg.kind() == neutral_kind) continue;
    bool dup = false;
    for (const Formula& seen : kept) {
      if (seen == sg) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(sg));
  }
  if (kept.empty()) return is_conj ? Formula::truth() : Formula::falsity();
  Formula acc = kept[0];
  for (std::size_t i = 1; i < kept.size(); ++i) {
    acc = is_conj ? Formula::conjunction(std::move(acc), kept[i])
                  : Formula::disjunction(std::move(acc), kept[i]);
  }
  return acc;
}

Formula simplify_cached(const Formula& f,
                        std::map<const Formula::Node*, Formula>& cache) {
  auto it = cache.find(f.node());
  if (it != cache.end()) return it->second;
  Formula result = Formula::truth();
  switch (f.kind()) {
    case Formula::Kind::truth:
    case Formula::Kind::falsity:
    case Formula::Kind::atom:
    case Formula::Kind::equality:
      result = f;
      break;
    case Formula::Kind::negation: {
      Formula c = simplify_cached(f.child(), cache);
      if (c.kind() == Formula::Kind::truth) {
        result = Formula::falsity();
      } else if (c.kind() == Formula::Kind::falsity) {
        result = Formula::truth();
      } else {
        result = Formula::negation(std::move(c));
      }
      break;
    }
    case Formula::Kind::conjunction:
      result = simplify_chain(f, /*is_conj=*/true, cache);
      break;
    case Formula::Kind::disjunction:
      result = simplify_chain(f, /*is_conj=*/false, cache);
      break;
    case Formula::Kind::implication: {
      Formula a = simplify_cached(f.lhs(), cache);
      Formula b = simplify_cached(f.rhs(), cache);
      if (a.kind() == Formula::Kind::falsity ||
          b.kind() == Formula::Kind::truth) {
        result = Formula::truth();
      } else if (a.kind() == Formula::Kind::truth) {
        result = std::move(b);
      } else {
        result = Formula::implication(std::move(a), std::move(b));
      }
      break;
    }
    case Formula::Kind::exists:
    case Formula::Kind::forall: {
      Formula c = simplify_cached(f.child(), cache);
      if (c.kind() == Formula::Kind::truth ||
          c.kind() == Formula::Kind::falsity) {
        // The universe is never empty, so the quantifier is redundant.
        result = std::move(c);
      } else if (f.kind() == Formula::Kind::exists) {
        result = Formula::exists(f.bound_var(), std::move(c));
      } else {
        result = Formula::forall(f.bound_var(), std::move(c));
      }
      break;
    }
  }
  cache.emplace(f.node(), result);
  return result;
}

}  // namespace

Formula simplify(const Formula& f) {
  std::map<const Formula::Node*, Formula> cache;
  return simplify_cached(f, cache);
}

}  // namespace fodef
