#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mubench/error.hpp"

namespace mubench {

// ---------------------------------------------------------------------------
// Finite types: n (pure type n), a->b, a* (finite sequences of a), <a,b,...>

struct Type {
  enum class Kind { pure, arrow, seq, tuple };
  Kind kind = Kind::pure;
  unsigned level = 0;       ///< pure types only
  std::vector<Type> parts;  ///< arrow: {from, to}; seq: {element}; tuple: members

  static Type pure(unsigned n) { return {Kind::pure, n, {}}; }
  static Type arrow(Type from, Type to) { return {Kind::arrow, 0, {std::move(from), std::move(to)}}; }
  static Type seq(Type element) { return {Kind::seq, 0, {std::move(element)}}; }
  static Type tuple(std::vector<Type> members) {
    if (members.size() == 1) return std::move(members.front());
    return {Kind::tuple, 0, std::move(members)};
  }

  bool is_zero() const { return kind == Kind::pure && level == 0; }

  std::string to_string() const {
    switch (kind) {
      case Kind::pure:
        return std::to_string(level);
      case Kind::arrow: {
        const auto& from = parts[0];
        const std::string left = from.kind == Kind::arrow ? "(" + from.to_string() + ")" : from.to_string();
        return left + "->" + parts[1].to_string();
      }
      case Kind::seq:
        return (parts[0].kind == Kind::arrow ? "(" + parts[0].to_string() + ")" : parts[0].to_string()) + "*";
      case Kind::tuple: {
        std::string out = "<";
        for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i].to_string();
        return out + ">";
      }
    }
    return {};
  }

  bool operator==(const Type&) const = default;

  static Type parse(std::string_view text);
};

namespace detail {

class TypeParser {
 public:
  explicit TypeParser(std::string_view text) : text_(text) {}

  Type parse() {
    Type t = type();
    if (pos_ != text_.size()) fail("trailing characters");
    return t;
  }

 private:
  Type type() {
    Type from = unit();
    if (text_.substr(pos_, 2) == "->") {
      pos_ += 2;
      return Type::arrow(std::move(from), type());
    }
    return from;
  }

  Type unit() {
    Type t;
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      unsigned n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) n = n * 10 + (text_[pos_++] - '0');
      t = Type::pure(n);
    } else if (eat('(')) {
      t = type();
      expect(')');
    } else if (eat('<')) {
      std::vector<Type> members{type()};
      while (eat(',')) members.push_back(type());
      expect('>');
      t = Type::tuple(std::move(members));
    } else {
      fail("expected a type");
    }
    while (eat('*')) t = Type::seq(std::move(t));
    return t;
  }

  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("type '" + std::string(text_) + "': " + why);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Type Type::parse(std::string_view text) { return detail::TypeParser(text).parse(); }

// ---------------------------------------------------------------------------
// Terms and formulas

/// A variable, a numeral, or (app head args...). Heads are not scope-checked.
struct Term {
  std::string head;
  std::vector<Term> args;
  bool application = false;

  static Term name(std::string n) { return {std::move(n), {}, false}; }
  static Term apply(std::string h, std::vector<Term> a) { return {std::move(h), std::move(a), true}; }

  bool is_numeral() const { return !application && !head.empty() && std::isdigit(static_cast<unsigned char>(head[0])); }

  std::string to_string() const {
    if (!application) return head;
    std::string out = "(app " + head;
    for (const auto& a : args) out += " " + a.to_string();
    return out + ")";
  }

  bool operator==(const Term&) const = default;
};

struct Binder {
  std::string name;
  Type type;

  std::string to_string() const { return name + ":" + type.to_string(); }
  bool operator==(const Binder&) const = default;
};

enum class Op { atom, st, negation, conjunction, disjunction, implication, forall, exists, exists_in, free };

struct Formula {
  Op op = Op::atom;
  std::string predicate;        ///< atom
  std::vector<Term> terms;      ///< atom arguments; st: {term}; exists_in: {bound}
  bool standard = false;        ///< forall / exists
  std::vector<Binder> binders;  ///< forall / exists / exists_in / free
  std::vector<Formula> kids;

  static Formula atom(std::string p, std::vector<Term> args) {
    Formula f;
    f.predicate = std::move(p);
    f.terms = std::move(args);
    return f;
  }
  static Formula connective(Op op, std::vector<Formula> kids) {
    Formula f;
    f.op = op;
    f.kids = std::move(kids);
    return f;
  }
  static Formula quantifier(Op op, bool standard, std::vector<Binder> binders, Formula body) {
    Formula f;
    f.op = op;
    f.standard = standard;
    f.binders = std::move(binders);
    f.kids.push_back(std::move(body));
    return f;
  }
  static Formula bounded_exists(std::vector<Binder> binders, Term bound, Formula body) {
    Formula f = quantifier(Op::exists_in, false, std::move(binders), std::move(body));
    f.terms.push_back(std::move(bound));
    return f;
  }

  bool is_quantifier() const { return op == Op::forall || op == Op::exists; }
  bool is_standard(Op kind) const { return op == kind && standard; }
  const Formula& body() const { return kids.front(); }

  std::string to_string() const;

  bool operator==(const Formula&) const = default;
};

namespace detail {

inline std::string binder_block(const std::vector<Binder>& binders) {
  if (binders.size() == 1) return binders.front().to_string();
  std::string out = "(";
  for (std::size_t i = 0; i < binders.size(); ++i) out += (i ? " " : "") + binders[i].to_string();
  return out + ")";
}

inline const char* keyword(Op op) {
  switch (op) {
    case Op::atom: return "atom";
    case Op::st: return "st";
    case Op::negation: return "not";
    case Op::conjunction: return "and";
    case Op::disjunction: return "or";
    case Op::implication: return "imp";
    case Op::forall: return "all";
    case Op::exists: return "ex";
    case Op::exists_in: return "ex-in";
    case Op::free: return "free";
  }
  return "?";
}

}  // namespace detail

inline std::string Formula::to_string() const {
  std::string out = std::string("(") + detail::keyword(op);
  switch (op) {
    case Op::atom:
      out += " " + predicate;
      for (const auto& t : terms) out += " " + t.to_string();
      return out + ")";
    case Op::st:
      return out + " " + terms.front().to_string() + ")";
    case Op::forall:
    case Op::exists:
      return out + (standard ? " st " : " ") + detail::binder_block(binders) + " " + body().to_string() + ")";
    case Op::exists_in:
      return out + " " + detail::binder_block(binders) + " " + terms.front().to_string() + " " + body().to_string() + ")";
    case Op::free: {
      std::string decls = "(";
      for (std::size_t i = 0; i < binders.size(); ++i) decls += (i ? " " : "") + binders[i].to_string();
      return out + " " + decls + ") " + body().to_string() + ")";
    }
    default:
      for (const auto& k : kids) out += " " + k.to_string();
      return out + ")";
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Token {
  std::string text;
  unsigned line;
  unsigned column;
};

/// S-expression reader with scope checking. Comments run from ';' to the end
/// of the line.
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) { tokenize(text); }

  Formula parse() {
    Formula f = formula();
    if (pos_ < tokens_.size()) fail(tokens_[pos_], "unexpected '" + tokens_[pos_].text + "' after formula");
    return f;
  }

 private:
  void tokenize(std::string_view text) {
    unsigned line = 1, column = 1;
    std::size_t i = 0;
    const auto advance = [&] {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    };
    while (i < text.size()) {
      const char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == ';') {
        while (i < text.size() && text[i] != '\n') advance();
      } else if (c == '(' || c == ')') {
        tokens_.push_back({std::string(1, c), line, column});
        advance();
      } else {
        Token t{"", line, column};
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
               text[i] != ')' && text[i] != ';') {
          t.text += text[i];
          advance();
        }
        tokens_.push_back(std::move(t));
      }
    }
    end_ = {"end of input", line, column};
  }

  const Token& peek() const { return pos_ < tokens_.size() ? tokens_[pos_] : end_; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(const Token& at, const std::string& why) {
    throw ParseError("line " + std::to_string(at.line) + ", column " + std::to_string(at.column) + ": " + why);
  }

  void expect(const std::string& text) {
    const Token& t = next();
    if (t.text != text) fail(t, "expected '" + text + "', found '" + t.text + "'");
  }

  std::string symbol() {
    const Token& t = next();
    if (t.text == "(" || t.text == ")" || &t == &end_) fail(t, "expected a symbol, found '" + t.text + "'");
    return t.text;
  }

  bool bound(const std::string& name) const {
    for (const auto& scope : scopes_) {
      if (scope.count(name)) return true;
    }
    return false;
  }

  Binder binder() {
    const Token& t = next();
    const auto colon = t.text.find(':');
    if (colon == std::string::npos || colon == 0) fail(t, "expected name:type, found '" + t.text + "'");
    try {
      return {t.text.substr(0, colon), Type::parse(t.text.substr(colon + 1))};
    } catch (const ParseError& e) {
      fail(t, e.what());
    }
  }

  std::vector<Binder> binder_block() {
    if (peek().text != "(") return {binder()};
    next();
    std::vector<Binder> out;
    while (peek().text != ")") out.push_back(binder());
    next();
    if (out.empty()) fail(peek(), "empty variable block");
    return out;
  }

  Term term() {
    const Token& t = peek();
    if (t.text == "(") {
      next();
      expect("app");
      std::string head = symbol();
      std::vector<Term> args;
      while (peek().text != ")") args.push_back(term());
      next();
      return Term::apply(std::move(head), std::move(args));
    }
    Term out = Term::name(symbol());
    if (!out.is_numeral() && !bound(out.head)) fail(t, "variable '" + out.head + "' is not bound or declared free");
    return out;
  }

  Formula scoped(const std::vector<Binder>& binders) {
    std::set<std::string> scope;
    for (const auto& b : binders) scope.insert(b.name);
    scopes_.push_back(std::move(scope));
    Formula body = formula();
    scopes_.pop_back();
    return body;
  }

  Formula formula() {
    const Token& open = next();
    if (open.text != "(") fail(open, "expected '(', found '" + open.text + "'");
    const Token head = next();
    Formula f;
    if (head.text == "atom") {
      std::string predicate = symbol();
      std::vector<Term> args;
      while (peek().text != ")") args.push_back(term());
      f = Formula::atom(std::move(predicate), std::move(args));
    } else if (head.text == "st") {
      f.op = Op::st;
      f.terms.push_back(term());
    } else if (head.text == "not") {
      f = Formula::connective(Op::negation, {formula()});
    } else if (head.text == "imp") {
      Formula a = formula();
      f = Formula::connective(Op::implication, {std::move(a), formula()});
    } else if (head.text == "and" || head.text == "or") {
      std::vector<Formula> kids;
      while (peek().text != ")") kids.push_back(formula());
      if (kids.size() < 2) fail(head, "'" + head.text + "' needs at least two operands");
      f = Formula::connective(head.text == "and" ? Op::conjunction : Op::disjunction, std::move(kids));
    } else if (head.text == "all" || head.text == "ex") {
      bool standard = false;
      if (peek().text == "st") {
        next();
        standard = true;
      }
      auto binders = binder_block();
      Formula body = scoped(binders);
      f = Formula::quantifier(head.text == "all" ? Op::forall : Op::exists, standard, std::move(binders), std::move(body));
    } else if (head.text == "ex-in") {
      auto binders = binder_block();
      Term bound = term();
      Formula body = scoped(binders);
      f = Formula::bounded_exists(std::move(binders), std::move(bound), std::move(body));
    } else if (head.text == "free") {
      expect("(");
      std::vector<Binder> decls;
      while (peek().text != ")") decls.push_back(binder());
      next();
      Formula body = scoped(decls);
      f = Formula::quantifier(Op::free, false, std::move(decls), std::move(body));
    } else {
      fail(head, "unknown form '" + head.text + "'");
    }
    expect(")");
    return f;
  }

  std::vector<Token> tokens_;
  Token end_;
  std::size_t pos_ = 0;
  std::vector<std::set<std::string>> scopes_;
};

}  // namespace detail

/// Grammar:
///   F ::= (atom P term...) | (st term) | (not F) | (and F F...) | (or F F...)
///       | (imp F F) | (all [st] VARS F) | (ex [st] VARS F)
///       | (ex-in VARS term F) | (free (name:type...) F)
///   VARS ::= name:type | (name:type...)
///   term ::= name | numeral | (app head term...)
inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// ---------------------------------------------------------------------------
// Classification and relativisation

inline bool is_internal(const Formula& f) {
  if (f.op == Op::st || f.standard) return false;
  for (const auto& k : f.kids) {
    if (!is_internal(k)) return false;
  }
  return true;
}

namespace detail {

/// (all n:0 (imp (atom leq n t) ...)) with n not occurring in t.
inline bool bounded_number_quantifier(const Formula& f) {
  if (f.op != Op::forall || f.binders.size() != 1 || !f.binders[0].type.is_zero()) return false;
  const Formula& body = f.body();
  if (body.op != Op::implication) return false;
  const Formula& guard = body.kids[0];
  return guard.op == Op::atom && guard.predicate == "leq" && guard.terms.size() == 2 &&
         guard.terms[0] == Term::name(f.binders[0].name);
}

inline Formula relativize(const Formula& f) {
  Formula out = f;
  if (f.is_quantifier() && !bounded_number_quantifier(f)) out.standard = true;
  for (auto& k : out.kids) k = relativize(k);
  return out;
}

}  // namespace detail

/// Marks every quantifier standard, except bounded number quantifiers and
/// bounded existentials.
inline Formula relativize_st(const Formula& f) {
  if (!is_internal(f)) throw NotInternal(f.to_string());
  return detail::relativize(f);
}

// ---------------------------------------------------------------------------
// Alpha equality

namespace detail {

/// Merges directly nested quantifiers of the same kind and flag into one block.
inline Formula flatten_blocks(const Formula& f) {
  Formula out = f;
  for (auto& k : out.kids) k = flatten_blocks(k);
  if (out.is_quantifier()) {
    while (out.body().op == out.op && out.body().standard == out.standard) {
      Formula inner = out.body();
      out.binders.insert(out.binders.end(), inner.binders.begin(), inner.binders.end());
      out.kids[0] = std::move(inner.kids[0]);
    }
  }
  return out;
}

class AlphaComparator {
 public:
  bool formulas(const Formula& a, const Formula& b) {
    if (a.op != b.op || a.standard != b.standard || a.predicate != b.predicate || a.kids.size() != b.kids.size() ||
        a.binders.size() != b.binders.size() || a.terms.size() != b.terms.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      if (!terms(a.terms[i], b.terms[i])) return false;
    }
    for (std::size_t i = 0; i < a.binders.size(); ++i) {
      if (!(a.binders[i].type == b.binders[i].type)) return false;
    }
    const bool binds = !a.binders.empty() && a.op != Op::free;
    if (binds) {
      ++depth_;
      for (std::size_t i = 0; i < a.binders.size(); ++i) {
        left_[a.binders[i].name].push_back({depth_, i});
        right_[b.binders[i].name].push_back({depth_, i});
      }
    } else if (a.op == Op::free) {
      for (std::size_t i = 0; i < a.binders.size(); ++i) {
        if (a.binders[i].name != b.binders[i].name) return false;
      }
    }
    bool same = true;
    for (std::size_t i = 0; same && i < a.kids.size(); ++i) same = formulas(a.kids[i], b.kids[i]);
    if (binds) {
      for (std::size_t i = 0; i < a.binders.size(); ++i) {
        left_[a.binders[i].name].pop_back();
        right_[b.binders[i].name].pop_back();
      }
      --depth_;
    }
    return same;
  }

 private:
  using Slot = std::pair<unsigned, std::size_t>;

  std::optional<Slot> lookup(std::map<std::string, std::vector<Slot>>& env, const std::string& name) {
    const auto it = env.find(name);
    if (it == env.end() || it->second.empty()) return std::nullopt;
    return it->second.back();
  }

  bool names(const std::string& a, const std::string& b) {
    const auto sa = lookup(left_, a), sb = lookup(right_, b);
    if (sa || sb) return sa == sb;
    return a == b;
  }

  bool terms(const Term& a, const Term& b) {
    if (a.application != b.application || a.args.size() != b.args.size() || !names(a.head, b.head)) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (!terms(a.args[i], b.args[i])) return false;
    }
    return true;
  }

  unsigned depth_ = 0;
  std::map<std::string, std::vector<Slot>> left_, right_;
};

}  // namespace detail

/// Equality up to renaming of bound variables and merging of nested blocks.
inline bool alpha_equal(const Formula& a, const Formula& b) {
  return detail::AlphaComparator().formulas(detail::flatten_blocks(a), detail::flatten_blocks(b));
}

// ---------------------------------------------------------------------------
// Names

namespace detail {

inline void collect_names(const Term& t, std::set<std::string>& out) {
  out.insert(t.head);
  for (const auto& a : t.args) collect_names(a, out);
}

inline void collect_names(const Formula& f, std::set<std::string>& out) {
  for (const auto& t : f.terms) collect_names(t, out);
  for (const auto& b : f.binders) out.insert(b.name);
  for (const auto& k : f.kids) collect_names(k, out);
}

inline bool occurs_free(const Term& t, const std::string& name) {
  if (t.head == name) return true;
  for (const auto& a : t.args) {
    if (occurs_free(a, name)) return true;
  }
  return false;
}

inline bool occurs_free(const Formula& f, const std::string& name) {
  for (const auto& t : f.terms) {
    if (occurs_free(t, name)) return true;
  }
  if (f.op != Op::free) {
    for (const auto& b : f.binders) {
      if (b.name == name) return false;
    }
  }
  for (const auto& k : f.kids) {
    if (occurs_free(k, name)) return true;
  }
  return false;
}

inline Term rename(const Term& t, const std::string& from, const std::string& to) {
  Term out = t;
  if (out.head == from) out.head = to;
  for (auto& a : out.args) a = rename(a, from, to);
  return out;
}

/// Renames free occurrences of `from`; `to` must be fresh.
inline Formula rename_free(const Formula& f, const std::string& from, const std::string& to) {
  Formula out = f;
  if (f.op == Op::exists_in) out.terms[0] = rename(f.terms[0], from, to);
  for (const auto& b : f.binders) {
    if (b.name == from && f.op != Op::free) return out;
  }
  for (auto& t : out.terms) t = rename(t, from, to);
  for (auto& k : out.kids) k = rename_free(k, from, to);
  return out;
}

/// `base` or `base_1`, `base_2`, ... avoiding every name in `taken`.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (unsigned i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken.count(candidate)) return candidate;
  }
}

}  // namespace detail

}  // namespace mubench
