#pragma once

// Expression trees shared by the catalog, the PBW evaluator and the operator
// evaluator. Grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?
//   exponent:= ['-'] INT | '(' ['-'] INT ['/' INT] ')'
//   primary := INT | SYMBOL | SYMBOL '(' expr (',' expr)* ')' | '(' expr ')'
//
// A bare exponent is an integer, so a^2/2 is (a^2)/2.
// INT '/' INT between two bare literals folds into one exact rational literal.

#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "jordan/error.hpp"
#include "jordan/rational.hpp"

namespace jordan {

enum class ExprKind { Number, Symbol, Add, Mul, Neg, Div, Pow, Call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Number;
  Rational value;             // Number literal, or Pow exponent
  std::string name;           // Symbol or Call
  std::vector<ExprPtr> args;  // operands

  static ExprPtr number(Rational v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Number;
    e->value = std::move(v);
    return e;
  }
  static ExprPtr symbol(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Symbol;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr make(ExprKind k, std::vector<ExprPtr> a, std::string n = {}, Rational v = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(a);
    e->name = std::move(n);
    e->value = std::move(v);
    return e;
  }
  static ExprPtr neg(ExprPtr a) {
    if (a->kind == ExprKind::Number) return number(-a->value);
    return make(ExprKind::Neg, {std::move(a)});
  }
  static ExprPtr add(ExprPtr a, ExprPtr b) { return make(ExprKind::Add, {std::move(a), std::move(b)}); }
  static ExprPtr mul(ExprPtr a, ExprPtr b) { return make(ExprKind::Mul, {std::move(a), std::move(b)}); }
  static ExprPtr div(ExprPtr a, ExprPtr b) { return make(ExprKind::Div, {std::move(a), std::move(b)}); }
  static ExprPtr pow(ExprPtr a, Rational e) { return make(ExprKind::Pow, {std::move(a)}, {}, std::move(e)); }
  static ExprPtr call(std::string fn, std::vector<ExprPtr> a) { return make(ExprKind::Call, std::move(a), std::move(fn)); }
};

inline const std::set<std::string>& known_functions() {
  static const std::set<std::string> fns = {"exp", "log", "sinh", "cosh", "tensor"};
  return fns;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse_all() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

  // "[A, B] = rhs"
  std::tuple<std::string, std::string, ExprPtr> parse_bracket() {
    expect('[');
    std::string a = parse_identifier();
    expect(',');
    std::string b = parse_identifier();
    expect(']');
    expect('=');
    auto rhs = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return {a, b, rhs};
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, fmt::format("{} at column {} in '{}'", msg, pos_ + 1, text_),
                fmt::format("column {}", pos_ + 1));
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(fmt::format("expected '{}'", c));
  }
  std::string parse_identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      fail("expected identifier");
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  Integer parse_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  ExprPtr parse_expr() {
    std::vector<ExprPtr> terms{parse_term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(parse_term());
      else if (accept('-'))
        terms.push_back(Expr::neg(parse_term()));
      else
        break;
    }
    return terms.size() == 1 ? terms.front() : Expr::make(ExprKind::Add, std::move(terms));
  }

  ExprPtr parse_term() {
    ExprPtr acc = parse_unary();
    for (;;) {
      if (accept('*')) {
        ExprPtr rhs = parse_unary();
        if (acc->kind == ExprKind::Mul) {
          auto args = acc->args;
          args.push_back(rhs);
          acc = Expr::make(ExprKind::Mul, std::move(args));
        } else {
          acc = Expr::mul(acc, rhs);
        }
      } else if (accept('/')) {
        ExprPtr rhs = parse_unary();
        if (acc->kind == ExprKind::Number && rhs->kind == ExprKind::Number && is_integer(acc->value) &&
            is_integer(rhs->value) && sgn(rhs->value) > 0) {
          acc = Expr::number(acc->value / rhs->value);
        } else {
          acc = Expr::div(acc, rhs);
        }
      } else {
        break;
      }
    }
    return acc;
  }

  ExprPtr parse_unary() {
    if (accept('-')) return Expr::neg(parse_unary());
    return parse_power();
  }

  Rational parse_exponent() {
    bool paren = accept('(');
    bool negative = accept('-');
    Rational r(parse_int());
    if (paren && accept('/')) {
      Integer d = parse_int();
      if (d == 0) fail("zero denominator in exponent");
      r /= Rational(d);
    }
    if (paren) expect(')');
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) return Expr::pow(base, parse_exponent());
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return Expr::number(Rational(parse_int()));
    if (accept('(')) {
      auto e = parse_expr();
      expect(')');
      return e;
    }
    std::string id = parse_identifier();
    if (accept('(')) {
      if (!known_functions().count(id)) fail("unknown function '" + id + "'");
      std::vector<ExprPtr> args{parse_expr()};
      while (accept(',')) args.push_back(parse_expr());
      expect(')');
      return Expr::call(id, std::move(args));
    }
    return Expr::symbol(id);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Add: return 1;
    case ExprKind::Neg: return 2;
    case ExprKind::Mul:
    case ExprKind::Div: return 3;
    case ExprKind::Pow: return 4;
    case ExprKind::Number: return sgn(e.value) < 0 || !is_integer(e.value) ? 3 : 5;
    default: return 5;
  }
}

}  // namespace detail

inline ExprPtr parse_expr(std::string_view text) { return detail::Parser(text).parse_all(); }

struct BracketSpec {
  std::string left;
  std::string right;
  ExprPtr rhs;
};

inline BracketSpec parse_bracket(std::string_view text) {
  auto [a, b, rhs] = detail::Parser(text).parse_bracket();
  return {a, b, rhs};
}

inline std::string to_string(const Expr& e);

namespace detail {

inline std::string wrap(const Expr& e, int min_prec) {
  std::string s = jordan::to_string(e);
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace detail

/// Canonical text form; parse_expr(to_string(e)) prints back identically.
inline std::string to_string(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Number: return jordan::to_string(e.value);
    case ExprKind::Symbol: return e.name;
    case ExprKind::Add: {
      std::string out;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        const Expr& a = *e.args[i];
        if (i == 0) {
          out += detail::wrap(a, 1);
        } else if (a.kind == ExprKind::Neg) {
          out += " - " + detail::wrap(*a.args[0], 2);
        } else if (a.kind == ExprKind::Number && sgn(a.value) < 0) {
          out += " - " + jordan::to_string(Rational(-a.value));
        } else {
          out += " + " + detail::wrap(a, 2);
        }
      }
      return out;
    }
    case ExprKind::Neg: return "-" + detail::wrap(*e.args[0], 4);
    case ExprKind::Mul: {
      std::string out;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += "*";
        // Left operand of a product may itself be a product/quotient; later
        // operands need parentheses to keep left associativity.
        out += detail::wrap(*e.args[i], i == 0 ? 3 : 4);
      }
      return out;
    }
    case ExprKind::Div: return detail::wrap(*e.args[0], 3) + "/" + detail::wrap(*e.args[1], 4);
    case ExprKind::Pow: {
      std::string ex = jordan::to_string(e.value);
      if (sgn(e.value) < 0 || !is_integer(e.value)) ex = "(" + ex + ")";
      return detail::wrap(*e.args[0], 5) + "^" + ex;
    }
    case ExprKind::Call: {
      std::string out = e.name + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += jordan::to_string(*e.args[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

inline std::string to_string(const ExprPtr& e) { return to_string(*e); }

/// Replaces symbols by expressions (one pass, no recursion into replacements).
inline ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst) {
  if (e->kind == ExprKind::Symbol) {
    auto it = subst.find(e->name);
    return it == subst.end() ? e : it->second;
  }
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (const auto& a : e->args) {
    args.push_back(substitute(a, subst));
    changed |= args.back() != a;
  }
  if (!changed) return e;
  // A sum or product spliced into the first slot of the same operation is
  // flattened, matching what the parser builds from the printed form.
  if ((e->kind == ExprKind::Add || e->kind == ExprKind::Mul) && args.front()->kind == e->kind) {
    std::vector<ExprPtr> flat = args.front()->args;
    flat.insert(flat.end(), args.begin() + 1, args.end());
    args = std::move(flat);
  }
  return Expr::make(e->kind, std::move(args), e->name, e->value);
}

/// Structural equality.
inline bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

inline void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Symbol) out.insert(e.name);
  for (const auto& a : e.args) collect_symbols(*a, out);
}

inline std::set<std::string> symbols_of(const ExprPtr& e) {
  std::set<std::string> s;
  collect_symbols(*e, s);
  return s;
}

/// Rational literals in pre-order; Pow exponents are structural and excluded.
inline void collect_literals(const ExprPtr& e, std::vector<const Expr*>& out) {
  if (e->kind == ExprKind::Number) out.push_back(e.get());
  for (const auto& a : e->args) collect_literals(a, out);
}

inline ExprPtr replace_literal(const ExprPtr& e, const Expr* target, const Rational& value) {
  if (e.get() == target) return Expr::number(value);
  if (e->args.empty()) return e;
  std::vector<ExprPtr> args;
  bool changed = false;
  for (const auto& a : e->args) {
    args.push_back(replace_literal(a, target, value));
    changed |= args.back() != a;
  }
  if (!changed) return e;
  return Expr::make(e->kind, std::move(args), e->name, e->value);
}

}  // namespace jordan
