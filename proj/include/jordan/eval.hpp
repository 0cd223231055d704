#pragma once

// Evaluation of expression trees into PBW algebra elements and tensors.
//
// Scalar monomials c·z^k·ε^j stay symbolic until they meet an algebra
// element; a product carrying z^-k evaluates its other factors at order N+k
// and divides afterwards, so every returned value is exact at the requested
// order.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jordan/error.hpp"
#include "jordan/expr.hpp"
#include "jordan/ncalg.hpp"
#include "jordan/series.hpp"

namespace jordan {

inline ScalarMonomial operator*(const ScalarMonomial& a, const ScalarMonomial& b) {
  return {a.coeff * b.coeff, a.z_power + b.z_power, a.eps_power + b.eps_power};
}

inline ScalarMonomial inverse(const ScalarMonomial& m) {
  if (sgn(m.coeff) == 0) throw Error(ErrorCode::DivisionByZero, "division by a zero scalar");
  return {Rational(1 / m.coeff), -m.z_power, -m.eps_power};
}

inline ScalarMonomial power(const ScalarMonomial& m, const Rational& e) {
  if (!is_integer(e))
    throw Error(ErrorCode::TypeMismatch, "fractional power of a scalar monomial is not a monomial");
  long n = e.get_num().get_si();
  if (n < 0) return power(inverse(m), Rational(-n));
  return {rational_pow(m.coeff, n), static_cast<int>(m.z_power * n), static_cast<int>(m.eps_power * n)};
}

/// Symbol environment: parameters resolve to scalar monomials; bindings
/// resolve to expressions evaluated in the base environment, where only the
/// base parameters and the algebra's generators are visible.
struct Scope {
  std::map<std::string, ScalarMonomial> params;
  std::map<std::string, ExprPtr> bindings;
};

/// The deformation parameter named `name` as the series indeterminate.
inline std::map<std::string, ScalarMonomial> indeterminate(const std::string& name) {
  return {{name, ScalarMonomial{1, 1, 0}}};
}

template <class S>
class Evaluator {
 public:
  using NC = NCElement<S>;
  using Tensor = TensorElement<S>;
  using Value = std::variant<ScalarMonomial, NC, Tensor>;

  Evaluator(PbwAlgebra<S>& alg, Scope scope, std::map<std::string, ScalarMonomial> base_params)
      : alg_(alg), scope_(std::move(scope)), base_params_(std::move(base_params)), ring2_(alg, 2), ring3_(alg, 3) {}
  Evaluator(PbwAlgebra<S>& alg, std::map<std::string, ScalarMonomial> params)
      : Evaluator(alg, Scope{params, {}}, params) {}

  PbwAlgebra<S>& algebra() { return alg_; }
  TensorRing<S>& ring(int arity) { return arity == 3 ? ring3_ : ring2_; }
  const Scope& scope() const { return scope_; }

  Value eval(const ExprPtr& e, int order) {
    std::optional<typename PbwAlgebra<S>::FuelScope> fuel;
    if (depth_ == 0) fuel.emplace(alg_);
    ++depth_;
    struct Leave {
      int& d;
      ~Leave() { --d; }
    } leave{depth_};
    return eval_node(*e, order);
  }

  NC element(const ExprPtr& e, int order) { return as_element(eval(e, order), order); }

  Tensor tensor(const ExprPtr& e, int order, int arity = 2) {
    Value v = eval(e, order);
    if (auto* t = std::get_if<Tensor>(&v)) {
      if (t->arity() != arity) throw Error(ErrorCode::ArityMismatch, "tensor expression has the wrong arity");
      return *t;
    }
    NC x = as_element(v, order);
    if (!x.is_scalar()) throw Error(ErrorCode::TypeMismatch, "expected a tensor, got an algebra element");
    return Tensor::scalar(x.scalar_part(), arity);
  }

  /// Image of a bound symbol, evaluated once per order.
  NC binding(const std::string& name, int order) {
    auto key = std::make_pair(name, order);
    if (auto it = binding_cache_.find(key); it != binding_cache_.end()) return it->second;
    auto b = scope_.bindings.find(name);
    if (b == scope_.bindings.end()) throw Error(ErrorCode::UnmappedGenerator, "'" + name + "' has no binding");
    NC value = base().element(b->second, order);
    binding_cache_.emplace(key, value);
    return value;
  }

  NC as_element(const Value& v, int order) {
    if (auto* m = std::get_if<ScalarMonomial>(&v)) return NC::scalar(S::from_monomial(*m, order));
    if (auto* x = std::get_if<NC>(&v)) return *x;
    throw Error(ErrorCode::TypeMismatch, "expected an algebra element, got a tensor");
  }

  /// x^{-1} for x = c(1 + n) with n nilpotent.
  NC invert(const NC& x) {
    NC n = normalized_unit(x, "inverse");
    Rational c0 = x.scalar_part().constant_term();
    return invert_one_plus(alg_, n) * Rational(1 / c0);
  }

 private:
  Evaluator& base() {
    if (!base_) base_ = std::make_unique<Evaluator>(alg_, Scope{base_params_, {}}, base_params_);
    return *base_;
  }

  std::optional<ScalarMonomial> static_monomial(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Number: return ScalarMonomial{e.value, 0, 0};
      case ExprKind::Symbol: {
        if (scope_.bindings.count(e.name)) return std::nullopt;
        auto it = scope_.params.find(e.name);
        if (it == scope_.params.end()) return std::nullopt;
        return it->second;
      }
      case ExprKind::Neg: {
        auto m = static_monomial(*e.args[0]);
        if (m) m->coeff = -m->coeff;
        return m;
      }
      case ExprKind::Mul: {
        ScalarMonomial acc;
        for (const auto& a : e.args) {
          auto m = static_monomial(*a);
          if (!m) return std::nullopt;
          acc = acc * *m;
        }
        return acc;
      }
      case ExprKind::Div: {
        auto a = static_monomial(*e.args[0]);
        auto b = static_monomial(*e.args[1]);
        if (!a || !b) return std::nullopt;
        return *a * inverse(*b);
      }
      case ExprKind::Pow: {
        if (!is_integer(e.value)) return std::nullopt;
        auto m = static_monomial(*e.args[0]);
        if (!m) return std::nullopt;
        return power(*m, e.value);
      }
      default: return std::nullopt;
    }
  }

  Value eval_node(const Expr& e, int order) {
    switch (e.kind) {
      case ExprKind::Number: return ScalarMonomial{e.value, 0, 0};
      case ExprKind::Symbol: return eval_symbol(e.name, order);
      case ExprKind::Neg: return negate(eval_node(*e.args[0], order));
      case ExprKind::Add: {
        Value acc = eval_node(*e.args[0], order);
        for (std::size_t i = 1; i < e.args.size(); ++i) acc = add(acc, eval_node(*e.args[i], order), order);
        return acc;
      }
      case ExprKind::Mul:
      case ExprKind::Div: return eval_product(e, order);
      case ExprKind::Pow: return eval_power(e, order);
      case ExprKind::Call: return eval_call(e, order);
    }
    throw Error(ErrorCode::ParseError, "unsupported expression node");
  }

  Value eval_symbol(const std::string& name, int order) {
    if (scope_.bindings.count(name)) return binding(name, order);
    if (auto it = scope_.params.find(name); it != scope_.params.end()) return it->second;
    if (auto g = alg_.find(name)) return NC::generator(*g, order);
    throw Error(ErrorCode::UnknownGenerator, "unknown symbol '" + name + "' in " + alg_.name());
  }

  static Value negate(Value v) {
    if (auto* m = std::get_if<ScalarMonomial>(&v)) {
      m->coeff = -m->coeff;
      return v;
    }
    if (auto* x = std::get_if<NC>(&v)) return -*x;
    return -std::get<Tensor>(v);
  }

  Value add(const Value& a, const Value& b, int order) {
    const Tensor* ta = std::get_if<Tensor>(&a);
    const Tensor* tb = std::get_if<Tensor>(&b);
    if (ta || tb) {
      int arity = ta ? ta->arity() : tb->arity();
      return to_tensor(a, order, arity) + to_tensor(b, order, arity);
    }
    return as_element(a, order) + as_element(b, order);
  }

  Tensor to_tensor(const Value& v, int order, int arity) {
    if (auto* t = std::get_if<Tensor>(&v)) {
      if (t->arity() != arity) throw Error(ErrorCode::ArityMismatch, "sum of tensors with different arities");
      return *t;
    }
    NC x = as_element(v, order);
    if (!x.is_scalar()) throw Error(ErrorCode::TypeMismatch, "cannot add an algebra element to a tensor");
    return Tensor::scalar(x.scalar_part(), arity);
  }

  struct Factor {
    const Expr* expr;
    bool inverted;
  };

  static void flatten(const Expr& e, bool inverted, std::vector<Factor>& out, Rational& sign) {
    if (e.kind == ExprKind::Mul) {
      if (!inverted) {
        for (const auto& a : e.args) flatten(*a, false, out, sign);
        return;
      }
      for (auto it = e.args.rbegin(); it != e.args.rend(); ++it) flatten(**it, true, out, sign);
      return;
    }
    if (e.kind == ExprKind::Div) {
      if (!inverted) {
        flatten(*e.args[0], false, out, sign);
        flatten(*e.args[1], true, out, sign);
      } else {
        flatten(*e.args[1], false, out, sign);
        flatten(*e.args[0], true, out, sign);
      }
      return;
    }
    if (e.kind == ExprKind::Neg) {
      sign = -sign;
      flatten(*e.args[0], inverted, out, sign);
      return;
    }
    out.push_back({&e, inverted});
  }

  Value eval_product(const Expr& e, int order) {
    std::vector<Factor> factors;
    Rational sign = 1;
    flatten(e, false, factors, sign);
    ScalarMonomial mono{sign, 0, 0};
    std::vector<Factor> rest;
    for (const auto& f : factors) {
      if (auto m = static_monomial(*f.expr))
        mono = mono * (f.inverted ? inverse(*m) : *m);
      else
        rest.push_back(f);
    }
    if (rest.empty()) return mono;
    const int k = mono.z_power < 0 ? -mono.z_power : 0;
    const int inner = order + k;
    std::optional<Value> acc;
    for (const auto& f : rest) {
      Value v = eval_node(*f.expr, inner);
      if (f.inverted) v = invert(as_element(v, inner));
      acc = acc ? multiply(*acc, v, inner) : v;
    }
    return scale(*acc, mono, inner, order);
  }

  Value multiply(const Value& a, const Value& b, int order) {
    const Tensor* ta = std::get_if<Tensor>(&a);
    const Tensor* tb = std::get_if<Tensor>(&b);
    if (ta && tb) return ring(ta->arity()).mul(*ta, *tb);
    if (ta || tb) {
      const Tensor& t = ta ? *ta : *tb;
      NC x = as_element(ta ? b : a, order);
      if (!x.is_scalar()) throw Error(ErrorCode::TypeMismatch, "product of an algebra element and a tensor");
      return t.scaled(x.scalar_part());
    }
    return alg_.mul(as_element(a, order), as_element(b, order));
  }

  Value scale(const Value& v, const ScalarMonomial& mono, int inner, int order) {
    if (sgn(mono.coeff) == 0) {
      if (auto* t = std::get_if<Tensor>(&v)) return Tensor(t->arity(), order);
      return NC(order);
    }
    if (mono.z_power < 0) {
      ScalarMonomial by = inverse(mono);
      if (auto* t = std::get_if<Tensor>(&v)) return t->divided_by(by);
      return as_element(v, inner).divided_by(by);
    }
    S s = S::from_monomial(mono, order);
    if (auto* t = std::get_if<Tensor>(&v)) return t->scaled(s);
    return as_element(v, order).scaled(s);
  }

  Value eval_power(const Expr& e, int order) {
    if (auto m = static_monomial(e)) return *m;
    Value base = eval_node(*e.args[0], order);
    const Rational& ex = e.value;
    if (auto* t = std::get_if<Tensor>(&base)) {
      if (!is_integer(ex) || sgn(ex) < 0)
        throw Error(ErrorCode::TypeMismatch, "only nonnegative integer powers of tensors are supported");
      Tensor r = ring(t->arity()).one(order);
      for (long i = 0; i < ex.get_num().get_si(); ++i) r = ring(t->arity()).mul(r, *t);
      return r;
    }
    NC x = as_element(base, order);
    if (is_integer(ex) && sgn(ex) >= 0) {
      NC r = NC::one(order);
      for (long i = 0; i < ex.get_num().get_si(); ++i) r = alg_.mul(r, x);
      return r;
    }
    NC n = normalized_unit(x, "power");
    Rational c0 = x.scalar_part().constant_term();
    Rational c0_pow;
    if (is_integer(ex)) {
      c0_pow = rational_pow(c0, ex.get_num().get_si());
    } else if (c0 == 1) {
      c0_pow = 1;
    } else {
      throw Error(ErrorCode::NotAUnit, "fractional power needs a unit constant term of 1");
    }
    typename PbwAlgebra<S>::FuelScope fuel(alg_);
    return series_binomial(AlgebraRing<S>{alg_}, n, ex) * c0_pow;
  }

  /// For x = c0 + (nilpotent), returns x/c0 - 1.
  NC normalized_unit(const NC& x, const char* what) {
    const int order = x.order();
    Rational c0 = x.scalar_part().constant_term();
    if (sgn(c0) == 0)
      throw Error(ErrorCode::NotAUnit, std::string(what) + ": element has no invertible constant term");
    NC n = x * Rational(1 / c0) - NC::one(order);
    if (!n.is_zero() && n.z_valuation() < 1)
      throw Error(ErrorCode::NotAUnit, std::string(what) + ": element is not a unit plus a nilpotent part");
    return n;
  }

  Value eval_call(const Expr& e, int order) {
    const std::string& fn = e.name;
    if (fn == "tensor") {
      if (e.args.size() != 2 && e.args.size() != 3)
        throw Error(ErrorCode::ArityMismatch, "tensor() takes 2 or 3 factors");
      std::vector<NC> parts;
      for (const auto& a : e.args) parts.push_back(as_element(eval_node(*a, order), order));
      std::vector<const NC*> ptrs;
      for (const auto& p : parts) ptrs.push_back(&p);
      return Tensor::outer(ptrs);
    }
    if (e.args.size() != 1) throw Error(ErrorCode::ParseError, fn + "() takes one argument");
    Value arg = eval_node(*e.args[0], order);
    if (fn == "exp") return exp_value(arg, order);
    if (fn == "sinh" || fn == "cosh") {
      Value plus = exp_value(arg, order);
      Value minus = exp_value(negate(arg), order);
      Value r = add(plus, fn == "sinh" ? negate(minus) : minus, order);
      return scale(r, ScalarMonomial{Rational(1, 2), 0, 0}, order, order);
    }
    if (fn == "log") {
      if (auto* t = std::get_if<Tensor>(&arg)) {
        Tensor n = *t - ring(t->arity()).one(order);
        if (t->scalar_part().constant_term() != 1)
          throw Error(ErrorCode::NonNilpotentArgument, "log needs an argument of the form 1 + nilpotent");
        typename PbwAlgebra<S>::FuelScope fuel(alg_);
        return series_log_one_plus(TensorRingRef<S>{ring(t->arity())}, n);
      }
      NC x = as_element(arg, order);
      if (x.scalar_part().constant_term() != 1)
        throw Error(ErrorCode::NonNilpotentArgument, "log needs an argument of the form 1 + nilpotent");
      return log_one_plus(alg_, x - NC::one(order));
    }
    throw Error(ErrorCode::ParseError, "unknown function '" + fn + "'");
  }

  Value exp_value(const Value& arg, int order) {
    if (auto* t = std::get_if<Tensor>(&arg)) {
      typename PbwAlgebra<S>::FuelScope fuel(alg_);
      return series_exp(TensorRingRef<S>{ring(t->arity())}, *t);
    }
    return exp_element(alg_, as_element(arg, order));
  }

  PbwAlgebra<S>& alg_;
  Scope scope_;
  std::map<std::string, ScalarMonomial> base_params_;
  TensorRing<S> ring2_;
  TensorRing<S> ring3_;
  std::unique_ptr<Evaluator> base_;
  std::map<std::pair<std::string, int>, NC> binding_cache_;
  int depth_ = 0;
};

/// Commutation relations keyed by ordered generator-name pairs; absent pairs
/// commute.
using BracketTable = std::map<std::pair<std::string, std::string>, ExprPtr>;

/// Table provider evaluating the bracket right-hand sides inside the algebra
/// being built.
template <class S>
typename PbwAlgebra<S>::TableProvider make_table_provider(BracketTable table,
                                                          std::map<std::string, ScalarMonomial> params) {
  return [table = std::move(table), params = std::move(params)](PbwAlgebra<S>& alg, int i, int j, int order) {
    const auto& names = alg.generators();
    const std::string& a = names[static_cast<std::size_t>(i)];
    const std::string& b = names[static_cast<std::size_t>(j)];
    Evaluator<S> ev(alg, params);
    if (auto it = table.find({a, b}); it != table.end()) return ev.element(it->second, order);
    if (auto it = table.find({b, a}); it != table.end()) return -ev.element(it->second, order);
    return NCElement<S>(order);
  };
}

template <class S>
std::unique_ptr<PbwAlgebra<S>> build_algebra(const std::string& name, const std::vector<std::string>& generators,
                                             const BracketTable& table,
                                             const std::map<std::string, ScalarMonomial>& params,
                                             RewriteLimits limits = {}) {
  return std::make_unique<PbwAlgebra<S>>(name, generators, make_table_provider<S>(table, params), limits);
}

}  // namespace jordan
