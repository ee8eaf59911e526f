#include "fodef/structure.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>

namespace fodef {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

bool is_operator_name(std::string_view s) {
  static constexpr std::string_view ops = "<>~+-*/^%?@:$=";
  if (s.empty()) return false;
  for (char c : s) {
    if (ops.find(c) == std::string_view::npos) return false;
  }
  return true;
}

bool is_variable_shaped(std::string_view s) {
  if (s.size() < 2 || s[0] != 'x') return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// A relation name must be usable in the formula grammar, so it is either
// an identifier or a run of operator characters, and must avoid the
// tokens the grammars reserve.
void validate_symbol_name(const std::string& name) {
  if (name == "=") throw Error("symbol name '=' is reserved for equality");
  static const char* reserved[] = {"universe", "rel",  "target", "arity",
                                   "end",      "true", "false"};
  for (const char* r : reserved) {
    if (name == r) throw Error("symbol name '" + name + "' is reserved");
  }
  if (is_variable_shaped(name)) {
    throw Error("symbol name '" + name + "' collides with variable syntax");
  }
  if (name == "->") throw Error("symbol name '->' is reserved");
  if (!is_identifier(name) && !is_operator_name(name)) {
    throw Error("invalid symbol name '" + name + "'");
  }
}

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize_structure(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  std::string cur;
  int cur_line = 0;
  bool in_comment = false;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back({cur, cur_line});
      cur.clear();
    }
  };
  for (char c : text) {
    if (c == '\n') {
      flush();
      in_comment = false;
      ++line;
      continue;
    }
    if (in_comment) continue;
    if (c == '#') {
      flush();
      in_comment = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    if (cur.empty()) cur_line = line;
    cur.push_back(c);
  }
  flush();
  return out;
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

class StructureParser {
 public:
  explicit StructureParser(std::string_view text)
      : tokens_(tokenize_structure(text)) {}

  Structure run() {
    expect_keyword("universe");
    int n = expect_int("universe size");
    if (n < 1) fail_at(last_line_, "universe size must be at least 1");

    std::vector<SymbolDecl> symbols;
    std::map<std::string, Table> interp;
    bool have_target = false;
    std::string target_name;
    int target_arity = 0;
    Table target_table;

    while (!at_end()) {
      const Token& head = peek();
      bool is_target = head.text == "target";
      if (!is_target && head.text != "rel") {
        fail_at(head.line, "expected 'rel' or 'target', got '" + head.text + "'");
      }
      advance();
      const Token& name_tok = next("relation name");
      const std::string name = name_tok.text;
      try {
        validate_symbol_name(name);
      } catch (const Error& e) {
        fail_at(name_tok.line, e.what());
      }
      if (interp.count(name) || (have_target && name == target_name)) {
        fail_at(name_tok.line, "duplicate symbol name '" + name + "'");
      }
      expect_keyword("arity");
      int arity = expect_int("arity");
      if (arity < 1) fail_at(last_line_, "arity must be at least 1");

      Table table;
      Tuple row;
      while (true) {
        const Token& t = next("tuple element or 'end'");
        if (t.text == "end") {
          if (!row.empty()) {
            fail_at(t.line, "row has " + std::to_string(row.size()) +
                                " elements, arity is " + std::to_string(arity));
          }
          break;
        }
        int v = parse_int(t, "tuple element");
        if (v < 0 || v >= n) {
          fail_at(t.line, "element " + std::to_string(v) + " out of range [0," +
                              std::to_string(n) + ")");
        }
        row.push_back(v);
        if (static_cast<int>(row.size()) == arity) {
          table.insert(row);
          row.clear();
        }
      }

      if (is_target) {
        if (have_target) fail_at(name_tok.line, "more than one target block");
        have_target = true;
        target_name = name;
        target_arity = arity;
        target_table = std::move(table);
      } else {
        symbols.push_back({name, arity});
        interp.emplace(name, std::move(table));
      }
    }
    if (!have_target) {
      throw ParseError("missing target block");
    }
    return Structure(n, Signature(std::move(symbols)), std::move(interp),
                     std::move(target_name), target_arity,
                     std::move(target_table));
  }

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  void advance() {
    last_line_ = tokens_[pos_].line;
    ++pos_;
  }
  const Token& next(const std::string& what) {
    if (at_end()) {
      fail_at(last_line_, "unexpected end of input, expected " + what);
    }
    const Token& t = tokens_[pos_];
    advance();
    return t;
  }
  void expect_keyword(const std::string& kw) {
    const Token& t = next("'" + kw + "'");
    if (t.text != kw) fail_at(t.line, "expected '" + kw + "', got '" + t.text + "'");
  }
  int parse_int(const Token& t, const std::string& what) {
    for (char c : t.text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        fail_at(t.line, "expected " + what + ", got '" + t.text + "'");
      }
    }
    try {
      return std::stoi(t.text);
    } catch (const std::exception&) {
      fail_at(t.line, what + " '" + t.text + "' out of range");
    }
  }
  int expect_int(const std::string& what) {
    const Token& t = next(what);
    return parse_int(t, what);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
};

void validate_table(const Table& table, int arity, int n, const std::string& name) {
  for (const Tuple& t : table) {
    if (static_cast<int>(t.size()) != arity) {
      throw Error("tuple of arity " + std::to_string(t.size()) + " in " + name +
                  " which has arity " + std::to_string(arity));
    }
    for (Element v : t) {
      if (v < 0 || v >= n) {
        throw Error("element " + std::to_string(v) + " out of range in " + name);
      }
    }
  }
}

}  // namespace

Signature::Signature(std::vector<SymbolDecl> symbols)
    : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    validate_symbol_name(symbols_[i].name);
    if (symbols_[i].arity < 1) {
      throw Error("symbol '" + symbols_[i].name + "' must have arity >= 1");
    }
    for (std::size_t j = i + 1; j < symbols_.size(); ++j) {
      if (symbols_[i].name == symbols_[j].name) {
        throw Error("duplicate symbol name '" + symbols_[i].name + "'");
      }
    }
  }
}

bool Signature::has(std::string_view name) const {
  for (const auto& s : symbols_) {
    if (s.name == name) return true;
  }
  return false;
}

int Signature::arity_of(std::string_view name) const {
  for (const auto& s : symbols_) {
    if (s.name == name) return s.arity;
  }
  throw Error("unknown symbol '" + std::string(name) + "'");
}

Structure::Structure(int size, Signature sig,
                     std::map<std::string, Table> interp,
                     std::string target_name, int target_arity,
                     Table target_table)
    : size_(size),
      sig_(std::move(sig)),
      interp_(std::move(interp)),
      target_name_(std::move(target_name)),
      target_arity_(target_arity),
      target_table_(std::move(target_table)) {
  if (size_ < 1) throw Error("universe size must be at least 1");
  validate_symbol_name(target_name_);
  if (sig_.has(target_name_)) {
    throw Error("target name '" + target_name_ + "' collides with a symbol");
  }
  if (target_arity_ < 1) throw Error("target arity must be at least 1");
  if (interp_.size() != sig_.size()) {
    throw Error("interpretation does not match signature");
  }
  for (const auto& s : sig_.symbols()) {
    auto it = interp_.find(s.name);
    if (it == interp_.end()) {
      throw Error("missing interpretation for '" + s.name + "'");
    }
    validate_table(it->second, s.arity, size_, s.name);
  }
  validate_table(target_table_, target_arity_, size_, target_name_);
}

const Table& Structure::table(std::string_view name) const {
  auto it = interp_.find(std::string(name));
  if (it == interp_.end()) {
    throw Error("unknown symbol '" + std::string(name) + "'");
  }
  return it->second;
}

int Structure::arity_of_any(std::string_view name) const {
  if (name == "=") return 2;
  if (name == target_name_) return target_arity_;
  return sig_.arity_of(name);
}

bool Structure::eval(std::string_view name, const Tuple& t) const {
  const int arity = arity_of_any(name);
  if (static_cast<int>(t.size()) != arity) {
    throw Error("relation '" + std::string(name) + "' has arity " +
                std::to_string(arity) + ", got tuple of arity " +
                std::to_string(t.size()));
  }
  for (Element v : t) {
    if (v < 0 || v >= size_) {
      throw Error("element " + std::to_string(v) + " out of range [0," +
                  std::to_string(size_) + ")");
    }
  }
  if (name == "=") return t[0] == t[1];
  if (name == target_name_) return target_table_.count(t) > 0;
  return table(name).count(t) > 0;
}

void enforce_limits(const Structure& s, LimitPolicy policy) {
  std::string over;
  if (s.size() > Limits::max_universe) {
    over = "universe size " + std::to_string(s.size()) + " exceeds soft limit " +
           std::to_string(Limits::max_universe);
  } else if (s.target_arity() > Limits::max_target_arity) {
    over = "target arity " + std::to_string(s.target_arity()) +
           " exceeds soft limit " + std::to_string(Limits::max_target_arity);
  }
  if (over.empty()) return;
  if (policy == LimitPolicy::strict) throw LimitError(over);
  std::cerr << "warning: " << over << "; exhaustive operations may be slow\n";
}

Structure parse_structure(std::string_view text) {
  return StructureParser(text).run();
}

std::string render_structure(const Structure& s) {
  std::ostringstream out;
  out << "universe " << s.size() << "\n";
  auto write_block = [&](const std::string& kind, const std::string& name,
                         int arity, const Table& table) {
    out << kind << " " << name << " arity " << arity << "\n";
    for (const Tuple& t : table) {
      out << " ";
      for (Element v : t) out << " " << v;
      out << "\n";
    }
    out << "end\n";
  };
  for (const auto& sym : s.signature().symbols()) {
    write_block("rel", sym.name, sym.arity, s.table(sym.name));
  }
  write_block("target", s.target_name(), s.target_arity(), s.target_table());
  return out.str();
}

bool eval_relation(const Structure& s, std::string_view name, const Tuple& t) {
  return s.eval(name, t);
}

std::vector<Tuple> all_tuples(int n, int arity) {
  std::size_t count = 1;
  for (int i = 0; i < arity; ++i) count *= static_cast<std::size_t>(n);
  std::vector<Tuple> out;
  if (count == 0) return out;
  out.reserve(count);
  Tuple t(arity, 0);
  out.push_back(t);
  while (out.size() < count) {
    int pos = arity - 1;
    while (pos >= 0 && t[pos] == n - 1) {
      t[pos] = 0;
      --pos;
    }
    ++t[pos];
    out.push_back(t);
  }
  return out;
}

std::size_t tuple_index(int n, const Tuple& t) {
  std::size_t idx = 0;
  for (Element v : t) idx = idx * static_cast<std::size_t>(n) + v;
  return idx;
}

}  // namespace fodef
