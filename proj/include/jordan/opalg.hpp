#pragma once

// Exact difference-differential operators on functions of (x, t).
//
// Canonical term: c · x^a t^b · Tx^r Tt^s · dx^p dt^q with multiplication
// operators left, shifts middle, derivatives right. Tx = exp(sigma dx) and
// Tt = exp(tau dt) are primitive symbols obeying Tx·x = (x + sigma)·Tx and
// Tt·t = (t + tau)·Tt, so products are exact with no truncation in the lattice
// steps. Coefficients are Laurent polynomials in (sigma, tau, m).

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "jordan/catalog.hpp"
#include "jordan/error.hpp"
#include "jordan/expr.hpp"
#include "jordan/hopf.hpp"
#include "jordan/rational.hpp"
#include "jordan/report.hpp"

namespace jordan {

// ------------------------------------------------------------ ParamPoly

/// Indices of the coefficient variables.
enum ParamVar : int { kSigma = 0, kTau = 1, kMass = 2 };

inline const std::array<std::string, 3>& param_names() {
  static const std::array<std::string, 3> n{"sigma", "tau", "m"};
  return n;
}

/// Values for some of (sigma, tau, m); unbound entries stay symbolic.
struct ParamValues {
  std::array<std::optional<Rational>, 3> v;

  static ParamValues of(std::optional<Rational> sigma, std::optional<Rational> tau, std::optional<Rational> m) {
    ParamValues p;
    p.v = {std::move(sigma), std::move(tau), std::move(m)};
    return p;
  }
  std::string to_string() const {
    std::string out;
    for (int i = 0; i < 3; ++i)
      if (v[static_cast<std::size_t>(i)]) {
        if (!out.empty()) out += ", ";
        out += param_names()[static_cast<std::size_t>(i)] + "=" + jordan::to_string(*v[static_cast<std::size_t>(i)]);
      }
    return "(" + out + ")";
  }
};

/// Laurent polynomial in (sigma, tau, m) with rational coefficients; no zero
/// coefficients are stored.
class ParamPoly {
 public:
  using Exps = std::array<int, 3>;
  using Map = std::map<Exps, Rational>;

  ParamPoly() = default;
  ParamPoly(const Rational& c) {  // NOLINT(google-explicit-constructor)
    if (sgn(c) != 0) terms_[{0, 0, 0}] = c;
  }
  ParamPoly(int c) : ParamPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static ParamPoly monomial(const Rational& c, Exps e) {
    ParamPoly p;
    if (sgn(c) != 0) p.terms_[e] = c;
    return p;
  }
  static ParamPoly var(int i, int power = 1) {
    Exps e{0, 0, 0};
    e[static_cast<std::size_t>(i)] = power;
    return monomial(1, e);
  }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exps{0, 0, 0}); }
  Rational constant_term() const {
    auto it = terms_.find({0, 0, 0});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  bool is_monomial() const { return terms_.size() == 1; }

  ParamPoly& operator+=(const ParamPoly& o) {
    for (const auto& [e, c] : o.terms_) add(e, c);
    return *this;
  }
  ParamPoly& operator-=(const ParamPoly& o) {
    for (const auto& [e, c] : o.terms_) add(e, -c);
    return *this;
  }
  friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
  friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }
  ParamPoly operator-() const {
    ParamPoly r;
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }
  friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
    ParamPoly r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return r;
  }
  friend bool operator==(const ParamPoly& a, const ParamPoly& b) { return a.terms_ == b.terms_; }

  /// Inverse of a monomial.
  ParamPoly inverse() const {
    if (!is_monomial())
      throw Error(ErrorCode::NotAUnit, "coefficient " + to_string() + " is not an invertible monomial");
    const auto& [e, c] = *terms_.begin();
    return monomial(Rational(1) / c, {-e[0], -e[1], -e[2]});
  }

  int min_power(int var) const {
    int lo = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      lo = first ? e[static_cast<std::size_t>(var)] : std::min(lo, e[static_cast<std::size_t>(var)]);
      first = false;
    }
    return lo;
  }
  int max_power(int var) const {
    int hi = 0;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      hi = first ? e[static_cast<std::size_t>(var)] : std::max(hi, e[static_cast<std::size_t>(var)]);
      first = false;
    }
    return hi;
  }

  /// Coefficient of var^k, as a polynomial in the remaining variables.
  ParamPoly coefficient(int var, int k) const {
    ParamPoly r;
    for (const auto& [e, c] : terms_)
      if (e[static_cast<std::size_t>(var)] == k) {
        Exps f = e;
        f[static_cast<std::size_t>(var)] = 0;
        r.add(f, c);
      }
    return r;
  }
  /// Terms with var-degree at most k.
  ParamPoly truncated(int var, int k) const {
    ParamPoly r;
    for (const auto& [e, c] : terms_)
      if (e[static_cast<std::size_t>(var)] <= k) r.terms_[e] = c;
    return r;
  }

  ParamPoly bind(const ParamValues& pv) const {
    ParamPoly r;
    for (const auto& [e, c] : terms_) {
      Exps f = e;
      Rational k = c;
      for (std::size_t i = 0; i < 3; ++i)
        if (pv.v[i] && f[i] != 0) {
          if (sgn(*pv.v[i]) == 0 && f[i] < 0)
            throw Error(ErrorCode::DivisionByZero, "negative power of " + param_names()[i] + " bound to 0");
          k *= rational_pow(*pv.v[i], f[i]);
          f[i] = 0;
        }
      r.add(f, k);
    }
    return r;
  }
  /// Floating value; every variable with a nonzero exponent must be supplied.
  double value(const std::array<double, 3>& x) const {
    double s = 0;
    for (const auto& [e, c] : terms_) {
      double t = c.get_d();
      for (std::size_t i = 0; i < 3; ++i)
        for (int k = 0; k < std::abs(e[i]); ++k) t = e[i] > 0 ? t * x[i] : t / x[i];
      s += t;
    }
    return s;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      std::string mono;
      for (std::size_t i = 0; i < 3; ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += param_names()[i];
        if (e[i] != 1) mono += e[i] < 0 ? fmt::format("^({})", e[i]) : fmt::format("^{}", e[i]);
      }
      out += detail::term_to_string(c, mono, first);
      first = false;
    }
    return out;
  }

 private:
  void add(const Exps& e, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }
  Map terms_;
};

// ------------------------------------------------------------ DiffOp

/// Exponents of one canonical term.
struct OpKey {
  int x = 0, t = 0;    // multiplication powers (>= 0)
  int sx = 0, st = 0;  // shift powers (any sign)
  int dx = 0, dt = 0;  // derivative orders (>= 0)

  auto tie() const { return std::tie(x, t, sx, st, dx, dt); }
  friend bool operator<(const OpKey& a, const OpKey& b) { return a.tie() < b.tie(); }
  friend bool operator==(const OpKey& a, const OpKey& b) { return a.tie() == b.tie(); }
  bool is_identity() const { return x == 0 && t == 0 && sx == 0 && st == 0 && dx == 0 && dt == 0; }
  bool is_pure_shift() const { return x == 0 && t == 0 && dx == 0 && dt == 0; }
};

/// Bivariate polynomial in (x, t) with ParamPoly coefficients.
using CoordPoly = std::map<std::pair<int, int>, ParamPoly>;

inline void add_to(CoordPoly& f, std::pair<int, int> k, const ParamPoly& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = f.emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) f.erase(it);
  }
}

inline CoordPoly coord_monomial(int a, int b) { return CoordPoly{{{a, b}, ParamPoly(1)}}; }

inline CoordPoly coord_sub(CoordPoly a, const CoordPoly& b) {
  for (const auto& [k, c] : b) add_to(a, k, -c);
  return a;
}

class DiffOp {
 public:
  using Map = std::map<OpKey, ParamPoly>;

  DiffOp() = default;
  static DiffOp constant(const ParamPoly& c) {
    DiffOp d;
    d.add_term(OpKey{}, c);
    return d;
  }
  static DiffOp one() { return constant(1); }
  static DiffOp term(OpKey k, const ParamPoly& c = 1) {
    DiffOp d;
    d.add_term(k, c);
    return d;
  }
  static DiffOp x() { return term({1, 0, 0, 0, 0, 0}); }
  static DiffOp t() { return term({0, 1, 0, 0, 0, 0}); }
  static DiffOp dx() { return term({0, 0, 0, 0, 1, 0}); }
  static DiffOp dt() { return term({0, 0, 0, 0, 0, 1}); }
  static DiffOp shift_x(int r) { return term({0, 0, r, 0, 0, 0}); }
  static DiffOp shift_t(int s) { return term({0, 0, 0, s, 0, 0}); }
  /// (Tx - 1)/sigma.
  static DiffOp delta_x() { return (shift_x(1) - one()).scaled(ParamPoly::var(kSigma, -1)); }
  /// (Tt - 1)/tau.
  static DiffOp delta_t() { return (shift_t(1) - one()).scaled(ParamPoly::var(kTau, -1)); }

  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const OpKey& k, const ParamPoly& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  DiffOp& operator+=(const DiffOp& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  DiffOp& operator-=(const DiffOp& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  DiffOp operator-() const { return scaled(-1); }
  DiffOp scaled(const ParamPoly& c) const {
    DiffOp r;
    for (const auto& [k, v] : terms_) r.add_term(k, v * c);
    return r;
  }
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }

  friend DiffOp operator*(const DiffOp& a, const DiffOp& b) {
    DiffOp r;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        auto xs = reorder(ka.sx, ka.dx, kb.x, kSigma);
        auto ts = reorder(ka.st, ka.dt, kb.t, kTau);
        ParamPoly c = ca * cb;
        for (const auto& px : xs)
          for (const auto& pt : ts) {
            OpKey k{ka.x + px.power, ka.t + pt.power, ka.sx + kb.sx, ka.st + kb.st, px.deriv + kb.dx, pt.deriv + kb.dt};
            r.add_term(k, c * px.coeff * pt.coeff);
          }
      }
    return r;
  }

  DiffOp pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    DiffOp r = one(), b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      n >>= 1;
      if (n > 0) b = b * b;
    }
    return r;
  }

  /// Single shift term with monomial coefficient, e.g. (sigma/2)·Tx^-1.
  bool is_invertible() const {
    return terms_.size() == 1 && terms_.begin()->first.is_pure_shift() && terms_.begin()->second.is_monomial();
  }
  DiffOp inverse() const {
    if (!is_invertible())
      throw Error(ErrorCode::NotAUnit, "operator " + to_string() + " is not a single shift term");
    const auto& [k, c] = *terms_.begin();
    return term({0, 0, -k.sx, -k.st, 0, 0}, c.inverse());
  }

  DiffOp bind(const ParamValues& pv) const {
    DiffOp r;
    for (const auto& [k, c] : terms_) r.add_term(k, c.bind(pv));
    return r;
  }

  /// Action on a polynomial: derivatives, then shifts, then multiplication.
  CoordPoly apply(const CoordPoly& f) const {
    CoordPoly out;
    for (const auto& [k, c] : terms_)
      for (const auto& [ij, fc] : f) {
        auto [i, j] = ij;
        if (k.dx > i || k.dt > j) continue;
        Rational d = falling(i, k.dx) * falling(j, k.dt);
        int ni = i - k.dx, nj = j - k.dt;
        // (x + r sigma)^ni (t + s tau)^nj
        for (int u = 0; u <= ni; ++u) {
          ParamPoly cu = shift_coeff(ni, u, k.sx, kSigma);
          if (cu.is_zero()) continue;
          for (int v = 0; v <= nj; ++v) {
            ParamPoly cv = shift_coeff(nj, v, k.st, kTau);
            if (cv.is_zero()) continue;
            add_to(out, {u + k.x, v + k.t}, c * fc * cu * cv * ParamPoly(d));
          }
        }
      }
    return out;
  }

  /// Replaces Tx^r (var = sigma) or Tt^s (var = tau) by its exponential
  /// series, keeping every term of var-degree at most `order`.
  DiffOp expand_shifts(int var, int order) const {
    DiffOp r;
    for (const auto& [k, c] : terms_) {
      int r_pow = var == kSigma ? k.sx : k.st;
      if (r_pow == 0) {
        r.add_term(k, c.truncated(var, order));
        continue;
      }
      int need = order - c.min_power(var);
      Rational f = 1;
      for (int n = 0; n <= need; ++n) {
        if (n > 0) f = f * Rational(r_pow) / Rational(n);
        OpKey nk = k;
        if (var == kSigma) {
          nk.sx = 0;
          nk.dx += n;
        } else {
          nk.st = 0;
          nk.dt += n;
        }
        r.add_term(nk, (c * ParamPoly::monomial(f, unit_exps(var, n))).truncated(var, order));
      }
    }
    return r;
  }

  /// Lowest power of var over all coefficients (0 for the zero operator).
  int min_power(int var) const {
    int lo = 0;
    for (const auto& [k, c] : terms_) lo = std::min(lo, c.min_power(var));
    return lo;
  }
  /// Coefficient of var^n in every term.
  DiffOp coefficient(int var, int n) const {
    DiffOp r;
    for (const auto& [k, c] : terms_) r.add_term(k, c.coefficient(var, n));
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      std::string mono;
      auto factor = [&](const char* name, int p) {
        if (p == 0) return;
        if (!mono.empty()) mono += "*";
        mono += name;
        if (p != 1) mono += p < 0 ? fmt::format("^({})", p) : fmt::format("^{}", p);
      };
      factor("x", k.x);
      factor("t", k.t);
      factor("Tx", k.sx);
      factor("Tt", k.st);
      factor("dx", k.dx);
      factor("dt", k.dt);
      std::string coeff;
      if (c.is_constant()) {
        out += detail::term_to_string(c.constant_term(), mono, first);
      } else {
        if (!first) out += " + ";
        out += "(" + c.to_string() + ")" + (mono.empty() ? "" : "*" + mono);
      }
      first = false;
    }
    return out;
  }

 private:
  struct Piece {
    int power;
    int deriv;
    ParamPoly coeff;
  };

  static ParamPoly::Exps unit_exps(int var, int n) {
    ParamPoly::Exps e{0, 0, 0};
    e[static_cast<std::size_t>(var)] = n;
    return e;
  }
  static Rational falling(int n, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) r *= n - i;
    return r;
  }
  /// Coefficient of y^u in (y + r·step)^n.
  static ParamPoly shift_coeff(int n, int u, int r, int var) {
    if (r == 0) return u == n ? ParamPoly(1) : ParamPoly();
    return ParamPoly::monomial(binomial(n, u) * rational_pow(Rational(r), n - u), unit_exps(var, n - u));
  }
  /// Moves T^r d^p past y^n: T^r d^p y^n = Σ y^u T^r d^(p-j) with Leibniz
  /// weight C(p,j)·n!/(n-j)! and shift weight C(n-j,u)(r·step)^(n-j-u).
  static std::vector<Piece> reorder(int r, int p, int n, int var) {
    std::vector<Piece> out;
    for (int j = 0; j <= std::min(p, n); ++j) {
      Rational lw = binomial(p, j) * falling(n, j);
      int m = n - j;
      for (int u = 0; u <= m; ++u) {
        ParamPoly s = shift_coeff(m, u, r, var);
        if (s.is_zero()) continue;
        out.push_back({u, p - j, s * ParamPoly(lw)});
      }
    }
    return out;
  }

  Map terms_;
};

inline DiffOp op_commutator(const DiffOp& a, const DiffOp& b) { return a * b - b * a; }

inline std::string to_string(const DiffOp& d) { return d.to_string(); }

inline std::string render(const CoordPoly& f) {
  if (f.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [ij, c] : f) {
    std::string mono;
    if (ij.first) mono += ij.first == 1 ? "x" : fmt::format("x^{}", ij.first);
    if (ij.second) mono += (mono.empty() ? "" : "*") + (ij.second == 1 ? std::string("t") : fmt::format("t^{}", ij.second));
    if (!first) out += " + ";
    out += "(" + c.to_string() + ")" + (mono.empty() ? "" : "*" + mono);
    first = false;
  }
  return out;
}

inline CoordPoly bind(const CoordPoly& f, const ParamValues& pv) {
  CoordPoly out;
  for (const auto& [k, c] : f) add_to(out, k, c.bind(pv));
  return out;
}

// ------------------------------------------------------------ evaluation

/// Evaluates expressions to operators. Built-in symbols: x t dx dt Tx Tt Dx Dt
/// sigma tau m; `aliases` name further lattice steps (a deformation parameter
/// identified with sigma or tau); `bindings` hold lets and generator images.
class OpEvaluator {
 public:
  OpEvaluator() = default;
  OpEvaluator(std::map<std::string, DiffOp> bindings, std::map<std::string, int> aliases)
      : bindings_(std::move(bindings)), aliases_(std::move(aliases)) {}

  void bind(const std::string& name, DiffOp op) { bindings_[name] = std::move(op); }
  const std::map<std::string, DiffOp>& bindings() const { return bindings_; }

  DiffOp eval(const ExprPtr& e) const {
    switch (e->kind) {
      case ExprKind::Number: return DiffOp::constant(e->value);
      case ExprKind::Symbol: return symbol(e->name);
      case ExprKind::Add: {
        DiffOp s;
        for (const auto& a : e->args) s += eval(a);
        return s;
      }
      case ExprKind::Mul: {
        DiffOp p = eval(e->args[0]);
        for (std::size_t i = 1; i < e->args.size(); ++i) p = p * eval(e->args[i]);
        return p;
      }
      case ExprKind::Neg: return -eval(e->args[0]);
      case ExprKind::Div: return eval(e->args[0]) * eval(e->args[1]).inverse();
      case ExprKind::Pow: return power(eval(e->args[0]), e->value);
      case ExprKind::Call: return call(*e);
    }
    throw Error(ErrorCode::TypeMismatch, "unsupported expression");
  }

 private:
  DiffOp symbol(const std::string& s) const {
    if (auto it = bindings_.find(s); it != bindings_.end()) return it->second;
    if (auto it = aliases_.find(s); it != aliases_.end()) return DiffOp::constant(ParamPoly::var(it->second));
    if (s == "x") return DiffOp::x();
    if (s == "t") return DiffOp::t();
    if (s == "dx") return DiffOp::dx();
    if (s == "dt") return DiffOp::dt();
    if (s == "Tx") return DiffOp::shift_x(1);
    if (s == "Tt") return DiffOp::shift_t(1);
    if (s == "Dx") return DiffOp::delta_x();
    if (s == "Dt") return DiffOp::delta_t();
    if (s == "sigma") return DiffOp::constant(ParamPoly::var(kSigma));
    if (s == "tau") return DiffOp::constant(ParamPoly::var(kTau));
    if (s == "m") return DiffOp::constant(ParamPoly::var(kMass));
    throw Error(ErrorCode::UnknownGenerator, "unknown operator symbol '" + s + "'", s);
  }

  static DiffOp power(const DiffOp& b, const Rational& e) {
    if (is_integer(e)) return b.pow(static_cast<int>(e.get_num().get_si()));
    // Fractional powers only of a bare shift with unit coefficient.
    if (b.size() == 1 && b.terms().begin()->first.is_pure_shift() && b.terms().begin()->second == ParamPoly(1)) {
      const OpKey& k = b.terms().begin()->first;
      Rational rx = Rational(k.sx) * e, rt = Rational(k.st) * e;
      if (is_integer(rx) && is_integer(rt))
        return DiffOp::term({0, 0, static_cast<int>(rx.get_num().get_si()), static_cast<int>(rt.get_num().get_si()), 0, 0});
    }
    throw Error(ErrorCode::UnresolvedExponential,
                "power " + jordan::to_string(e) + " of " + b.to_string() + " is not an integer shift power");
  }

  /// exp(c·sigma·dx) = Tx^c and exp(c·tau·dt) = Tt^c for integer c.
  static DiffOp exponential(const DiffOp& a) {
    if (a.is_zero()) return DiffOp::one();
    if (a.size() == 1) {
      const auto& [k, c] = *a.terms().begin();
      bool along_x = k == OpKey{0, 0, 0, 0, 1, 0};
      bool along_t = k == OpKey{0, 0, 0, 0, 0, 1};
      int var = along_x ? kSigma : kTau;
      if ((along_x || along_t) && c.is_monomial() &&
          c.terms().begin()->first == ParamPoly::var(var).terms().begin()->first) {
        Rational n = c.terms().begin()->second;
        if (is_integer(n)) {
          int p = static_cast<int>(n.get_num().get_si());
          return along_x ? DiffOp::shift_x(p) : DiffOp::shift_t(p);
        }
      }
    }
    throw Error(ErrorCode::UnresolvedExponential, "exp(" + a.to_string() + ") is not an integer shift power");
  }

  static DiffOp logarithm(const DiffOp& a) {
    if (a.size() == 1 && a.terms().begin()->first.is_pure_shift() && a.terms().begin()->second == ParamPoly(1)) {
      const OpKey& k = a.terms().begin()->first;
      return DiffOp::dx().scaled(ParamPoly::var(kSigma) * ParamPoly(k.sx)) +
             DiffOp::dt().scaled(ParamPoly::var(kTau) * ParamPoly(k.st));
    }
    throw Error(ErrorCode::UnresolvedExponential, "log(" + a.to_string() + ") is not a shift logarithm");
  }

  DiffOp call(const Expr& e) const {
    if (e.name == "tensor") throw Error(ErrorCode::TypeMismatch, "tensor() has no operator realization");
    if (e.args.size() != 1) throw Error(ErrorCode::ArityMismatch, e.name + " takes one argument");
    DiffOp a = eval(e.args[0]);
    if (e.name == "exp") return exponential(a);
    if (e.name == "log") return logarithm(a);
    DiffOp p = exponential(a), m = exponential(-a);
    if (e.name == "sinh") return (p - m).scaled(Rational(1, 2));
    if (e.name == "cosh") return (p + m).scaled(Rational(1, 2));
    throw Error(ErrorCode::TypeMismatch, "unknown function '" + e.name + "'");
  }

  std::map<std::string, DiffOp> bindings_;
  std::map<std::string, int> aliases_;
};

// ------------------------------------------------------------ realizations

/// Parameter samples (lattice step, mass) used for sampled confirmation.
struct ParamSample {
  Rational step;
  Rational mass;
};

inline std::vector<ParamSample> default_samples() {
  return {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 3), Rational(1)}, {Rational(1, 5), Rational(3, 2)}};
}

/// Variable index of a realization's lattice step.
inline int step_var(const Realization& r) { return r.param == "tau" ? kTau : kSigma; }

inline ParamValues sample_values(const Realization& r, const ParamSample& s) {
  return step_var(r) == kTau ? ParamValues::of(std::nullopt, s.step, s.mass)
                             : ParamValues::of(s.step, std::nullopt, s.mass);
}

/// A realization resolved to operators.
class RealizedAlgebra {
 public:
  RealizedAlgebra(const Catalog& cat, const Realization& r) : RealizedAlgebra(cat.get<Presentation>(r.presentation), r) {}
  RealizedAlgebra(const Presentation& p, const Realization& r) : pres_(p), real_(r) {
    std::map<std::string, int> aliases;
    // The presentation's deformation parameter is the lattice step.
    if (p.param != "sigma" && p.param != "tau" && !p.param.empty()) aliases[p.param] = step_var(r);
    ops_ev_ = OpEvaluator({}, aliases);
    for (const auto& [name, e] : r.lets) ops_ev_.bind(name, with_context(name, e, ops_ev_));
    for (const auto& [name, e] : r.operators) ops_[name] = with_context(name, e, ops_ev_);
    gen_ev_ = OpEvaluator(ops_, aliases);
  }

  const Presentation& presentation() const { return pres_; }
  const Realization& realization() const { return real_; }
  const DiffOp& op(const std::string& g) const {
    auto it = ops_.find(g);
    if (it == ops_.end()) throw Error(ErrorCode::UnmappedGenerator, "no operator for '" + g + "'", real_.id);
    return it->second;
  }
  /// Evaluates an expression in the operator symbols (and lets).
  DiffOp operator_expr(const ExprPtr& e) const { return ops_ev_.eval(e); }
  /// Evaluates an abstract algebra expression with generators realized.
  DiffOp realize(const ExprPtr& e) const { return gen_ev_.eval(e); }

  /// Bracket RHS in the presentation, oriented as [a, b]; null if absent.
  ExprPtr rhs(const std::string& a, const std::string& b) const {
    for (const auto& br : pres_.brackets) {
      if (br.left == a && br.right == b) return br.rhs;
      if (br.left == b && br.right == a) return Expr::neg(br.rhs);
    }
    return nullptr;
  }

 private:
  DiffOp with_context(const std::string& name, const ExprPtr& e, const OpEvaluator& ev) const {
    try {
      return ev.eval(e);
    } catch (const Error& err) {
      throw Error(err.code(), err.message() + " (in " + name + ")", real_.id);
    }
  }

  const Presentation& pres_;
  const Realization& real_;
  OpEvaluator ops_ev_;
  OpEvaluator gen_ev_;
  std::map<std::string, DiffOp> ops_;
};

namespace detail {

inline std::string zero_at_samples(const DiffOp& residual, const Realization& r,
                                   const std::vector<ParamSample>& samples, bool* all_zero) {
  std::string out;
  *all_zero = true;
  for (const auto& s : samples) {
    ParamValues pv = sample_values(r, s);
    bool z = residual.bind(pv).is_zero();
    *all_zero = *all_zero && z;
    out += fmt::format("{}{}: {}", out.empty() ? "" : "; ", pv.to_string(), z ? "zero" : "nonzero");
  }
  return out;
}

/// Exact operator identity record; nonzero residuals are suspected errata.
inline CheckRecord identity_record(std::string id, std::vector<std::string> ids, std::string suite,
                                   const DiffOp& residual, const Realization& r,
                                   const std::vector<ParamSample>& samples, double ms) {
  CheckRecord rec;
  rec.check_id = std::move(id);
  rec.catalog_ids = std::move(ids);
  rec.suite = std::move(suite);
  rec.timing_ms = ms;
  bool zero = false;
  rec.detail = zero_at_samples(residual, r, samples, &zero);
  rec.residual = residual.to_string();
  rec.status = residual.is_zero() && zero ? Status::Pass : Status::ErratumSuspected;
  return rec;
}

inline std::vector<std::pair<std::size_t, std::size_t>> generator_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

}  // namespace detail

/// Residual [A,B] - rhs(A,B) of one bracket under a realization.
inline DiffOp bracket_residual(const RealizedAlgebra& ra, const std::string& a, const std::string& b) {
  DiffOp lhs = op_commutator(ra.op(a), ra.op(b));
  ExprPtr rhs = ra.rhs(a, b);
  return rhs ? lhs - ra.realize(rhs) : lhs;
}

/// Every generator pair as an exact operator identity, confirmed at samples.
inline CheckReport verify_realization(const Catalog& cat, const std::string& real_id,
                                      const std::vector<ParamSample>& samples = default_samples(),
                                      const std::string& suite = "realization") {
  CheckReport rep;
  const auto& r = cat.get<Realization>(real_id);
  std::vector<std::string> ids{real_id, r.presentation};
  std::optional<RealizedAlgebra> ra;
  detail::guarded(rep, suite + "/" + real_id + "/resolve", ids, suite, [&] { ra.emplace(cat, r); });
  if (!ra) return rep;
  const auto& gens = ra->presentation().generators;
  for (auto [i, j] : detail::generator_pairs(gens.size())) {
    std::string id = fmt::format("{}/{}/bracket/{},{}", suite, real_id, gens[i], gens[j]);
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      DiffOp res = bracket_residual(*ra, gens[i], gens[j]);
      rep.add(detail::identity_record(id, ids, suite, res, r, samples, sw.ms()));
    });
  }
  return rep;
}

/// Second route: applies both sides of every bracket to monomials x^a t^b
/// with a + b <= degree and compares with the canonical residual's action.
inline CheckReport spot_check_realization(const Catalog& cat, const std::string& real_id, int degree = 10,
                                          const std::string& suite = "realization") {
  CheckReport rep;
  const auto& r = cat.get<Realization>(real_id);
  std::vector<std::string> ids{real_id, r.presentation};
  std::string id = suite + "/" + real_id + "/spot_check";
  detail::guarded(rep, id, ids, suite, [&] {
    Stopwatch sw;
    RealizedAlgebra ra(cat, r);
    const auto& gens = ra.presentation().generators;
    std::string mismatch;
    std::size_t applications = 0;
    for (auto [i, j] : detail::generator_pairs(gens.size())) {
      const DiffOp& A = ra.op(gens[i]);
      const DiffOp& B = ra.op(gens[j]);
      ExprPtr rhs = ra.rhs(gens[i], gens[j]);
      DiffOp R = rhs ? ra.realize(rhs) : DiffOp();
      DiffOp res = op_commutator(A, B) - R;
      for (int a = 0; a <= degree && mismatch.empty(); ++a)
        for (int b = 0; a + b <= degree && mismatch.empty(); ++b) {
          CoordPoly f = coord_monomial(a, b);
          CoordPoly via_action = coord_sub(coord_sub(A.apply(B.apply(f)), B.apply(A.apply(f))), R.apply(f));
          ++applications;
          if (via_action != res.apply(f))
            mismatch = fmt::format("[{},{}] on x^{} t^{}: action {} vs canonical {}", gens[i], gens[j], a, b,
                                   render(via_action), render(res.apply(f)));
        }
    }
    CheckRecord rec;
    rec.check_id = id;
    rec.catalog_ids = ids;
    rec.suite = suite;
    rec.timing_ms = sw.ms();
    rec.status = mismatch.empty() ? Status::Pass : Status::Fail;
    rec.residual = mismatch.empty() ? "0" : mismatch;
    rec.detail = fmt::format("{} monomial actions up to degree {}", applications, degree);
    rep.add(rec);
  });
  return rep;
}

/// Realized Casimir element.
inline DiffOp casimir(const Catalog& cat, const std::string& real_id, const std::string& casimir_id) {
  const auto& c = cat.get<Casimir>(casimir_id);
  const auto& r = cat.get<Realization>(real_id);
  // The same Lie table may appear under several coproducts and PBW orders.
  auto generator_set = [&](const std::string& pid) {
    const auto& g = cat.get<Presentation>(pid).generators;
    return std::set<std::string>(g.begin(), g.end());
  };
  if (r.presentation != c.presentation && generator_set(r.presentation) != generator_set(c.presentation))
    throw Error(ErrorCode::TypeMismatch,
                fmt::format("casimir '{}' lives in '{}', realization '{}' in '{}'", casimir_id, c.presentation,
                            real_id, r.presentation));
  RealizedAlgebra ra(cat, r);
  return ra.realize(c.element);
}

/// Realized Casimir against its recorded operator form.
/// Chooses the sample list for a realization (σ and τ lattices may differ).
using SampleChooser = std::function<std::vector<ParamSample>(const Realization&)>;

inline CheckReport check_casimir(const Catalog& cat, const std::string& casimir_id, const SampleChooser& samples_for,
                                 const std::string& suite = "realization") {
  CheckReport rep;
  const auto& c = cat.get<Casimir>(casimir_id);
  for (const auto& [rid, expected] : c.realized) {
    std::vector<std::string> ids{casimir_id, rid};
    std::string id = suite + "/" + casimir_id + "/" + rid + "/casimir";
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      RealizedAlgebra ra(cat, cat.get<Realization>(rid));
      DiffOp res = ra.realize(c.element) - ra.operator_expr(expected);
      rep.add(detail::identity_record(id, ids, suite, res, ra.realization(), samples_for(ra.realization()), sw.ms()));
    });
  }
  return rep;
}

inline CheckReport check_casimir(const Catalog& cat, const std::string& casimir_id,
                                 const std::vector<ParamSample>& samples = default_samples(),
                                 const std::string& suite = "realization") {
  return check_casimir(cat, casimir_id, [&](const Realization&) { return samples; }, suite);
}

/// Residual [E, O] - Λ·E for one generator.
inline DiffOp symmetry_residual_op(const RealizedAlgebra& ra, const DiffOp& E, const SymmetryTable& s,
                                   const std::string& g) {
  auto it = s.lambda.find(g);
  DiffOp lambda = it == s.lambda.end() ? DiffOp() : ra.operator_expr(it->second);
  return op_commutator(E, ra.op(g)) - lambda * E;
}

inline CheckReport verify_symmetry_table(const Catalog& cat, const std::string& table_id,
                                         const std::vector<ParamSample>& samples = default_samples(),
                                         const std::string& suite = "symmetry") {
  CheckReport rep;
  const auto& s = cat.get<SymmetryTable>(table_id);
  std::vector<std::string> ids{table_id, s.realization, s.casimir};
  std::optional<RealizedAlgebra> ra;
  DiffOp E;
  detail::guarded(rep, suite + "/" + table_id + "/resolve", ids, suite, [&] {
    ra.emplace(cat, cat.get<Realization>(s.realization));
    E = ra->realize(cat.get<Casimir>(s.casimir).element);
  });
  if (!ra) return rep;
  for (const auto& g : ra->presentation().generators) {
    std::string id = suite + "/" + table_id + "/" + g;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      rep.add(detail::identity_record(id, ids, suite, symmetry_residual_op(*ra, E, s, g), ra->realization(), samples,
                                      sw.ms()));
    });
  }
  return rep;
}

/// Step-0 part of an operator: shifts expanded as exponential series and the
/// coefficient of step^0 kept. Negative powers must cancel.
inline DiffOp continuum_part(const DiffOp& op, int var, DiffOp* singular = nullptr) {
  DiffOp e = op.expand_shifts(var, 0);
  if (singular) {
    *singular = DiffOp();
    for (int n = e.min_power(var); n < 0; ++n) *singular += e.coefficient(var, n);
  }
  return e.coefficient(var, 0);
}

/// Step-0 part of a polynomial; negative powers must cancel.
inline CoordPoly continuum_part(const CoordPoly& f, int var, bool* singular) {
  CoordPoly out;
  *singular = false;
  for (const auto& [k, c] : f) {
    if (c.min_power(var) < 0) {
      for (int n = c.min_power(var); n < 0; ++n) *singular = *singular || !c.coefficient(var, n).is_zero();
    }
    add_to(out, k, c.coefficient(var, 0));
  }
  return out;
}

/// Each realized operator tends to the continuum realization's operator as the
/// lattice step goes to 0, by series expansion and by monomial actions.
inline CheckReport check_continuum_limit(const Catalog& cat, const std::string& real_id, int degree = 8,
                                         const std::string& suite = "classical") {
  CheckReport rep;
  const auto& r = cat.get<Realization>(real_id);
  if (!r.continuum) return rep;
  std::vector<std::string> ids{real_id, *r.continuum};
  std::optional<RealizedAlgebra> ra, target;
  detail::guarded(rep, suite + "/" + real_id + "/continuum/resolve", ids, suite, [&] {
    ra.emplace(cat, r);
    target.emplace(cat, cat.get<Realization>(*r.continuum));
  });
  if (!ra) return rep;
  int var = step_var(r);
  for (const auto& [g, e] : r.operators) {
    std::string tg = r.continuum_rename.count(g) ? r.continuum_rename.at(g) : g;
    std::string id = suite + "/" + real_id + "/continuum/" + g;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      const DiffOp& op = ra->op(g);
      DiffOp singular;
      DiffOp limit = continuum_part(op, var, &singular);
      DiffOp expected = target->op(tg);
      std::string mismatch;
      if (!singular.is_zero()) mismatch = "negative step powers survive: " + singular.to_string();
      if (mismatch.empty() && !(limit == expected))
        mismatch = "series route: " + (limit - expected).to_string();
      for (int a = 0; a <= degree && mismatch.empty(); ++a)
        for (int b = 0; a + b <= degree && mismatch.empty(); ++b) {
          CoordPoly f = coord_monomial(a, b);
          bool sing = false;
          CoordPoly got = continuum_part(op.apply(f), var, &sing);
          CoordPoly want = expected.apply(f);
          if (sing) mismatch = fmt::format("action on x^{} t^{} keeps negative step powers", a, b);
          else if (got != want)
            mismatch = fmt::format("action on x^{} t^{}: {} vs {}", a, b, render(got), render(want));
        }
      CheckRecord rec;
      rec.check_id = id;
      rec.catalog_ids = ids;
      rec.suite = suite;
      rec.timing_ms = sw.ms();
      rec.status = mismatch.empty() ? Status::Pass : Status::Fail;
      rec.residual = mismatch.empty() ? "0" : mismatch;
      rec.detail = fmt::format("{} -> {} ({} at step 0)", g, tg, limit.to_string());
      rep.add(rec);
    });
  }
  return rep;
}

/// Cross-module oracle: the PBW normal form of each bracket RHS, realized
/// word by word, matches the realized operator commutator through the
/// truncation order once shifts are expanded in the lattice step.
inline CheckReport crosscheck_normal_order(const Catalog& cat, const std::string& real_id, int order,
                                           const std::string& suite = "realization") {
  CheckReport rep;
  const auto& r = cat.get<Realization>(real_id);
  std::vector<std::string> ids{real_id, r.presentation};
  std::optional<RealizedAlgebra> ra;
  std::unique_ptr<HopfAlgebra> h;
  detail::guarded(rep, suite + "/" + real_id + "/ncalg/resolve", ids, suite, [&] {
    ra.emplace(cat, r);
    h = std::make_unique<HopfAlgebra>(cat.get<Presentation>(r.presentation), RewriteLimits{});
  });
  if (!ra) return rep;
  int var = step_var(r);
  const auto& names = h->names();
  std::vector<DiffOp> gen_ops;
  for (const auto& n : names) gen_ops.push_back(ra->op(n));
  // Memoized word realizations.
  std::map<Word, DiffOp> words;
  std::function<const DiffOp&(const Word&)> word_op = [&](const Word& w) -> const DiffOp& {
    auto it = words.find(w);
    if (it != words.end()) return it->second;
    DiffOp p = DiffOp::one();
    if (!w.empty()) {
      Word head(w.begin(), w.end() - 1);
      p = word_op(head) * gen_ops[w.back()];
    }
    return words.emplace(w, std::move(p)).first->second;
  };
  for (auto [i, j] : detail::generator_pairs(names.size())) {
    std::string id = fmt::format("{}/{}/ncalg/{},{}", suite, real_id, names[i], names[j]);
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      NC pbw = h->bracket(static_cast<Gen>(i), static_cast<Gen>(j), order);
      DiffOp realized;
      for (const auto& [w, c] : pbw.terms()) {
        ParamPoly coeff;
        for (int k = 0; k <= c.order(); ++k)
          coeff += ParamPoly::monomial(c[k], var == kSigma ? ParamPoly::Exps{k, 0, 0} : ParamPoly::Exps{0, k, 0});
        realized += word_op(w).scaled(coeff);
      }
      DiffOp lhs = op_commutator(gen_ops[i], gen_ops[j]);
      DiffOp diff = (lhs.expand_shifts(var, order) - realized.expand_shifts(var, order));
      CheckRecord rec;
      rec.check_id = id;
      rec.catalog_ids = ids;
      rec.suite = suite;
      rec.timing_ms = sw.ms();
      rec.status = diff.is_zero() ? Status::Pass : Status::Fail;
      // An exact-identity failure for this pair is the same discrepancy seen
      // through the PBW route.
      if (!diff.is_zero() && !bracket_residual(*ra, names[i], names[j]).is_zero())
        rec.status = Status::ErratumSuspected;
      rec.residual = diff.to_string();
      rec.detail = fmt::format("through order {} in {}", order, param_names()[static_cast<std::size_t>(var)]);
      rep.add(rec);
    });
  }
  return rep;
}

// ------------------------------------------------------------ errata search

/// A single-literal change that makes every identity of a realization hold.
struct ErratumCandidate {
  std::string where;  // operator or let name
  Rational from;
  Rational to;
  std::string describe() const {
    return fmt::format("suspected erratum, not applied: literal {} -> {} in {}", jordan::to_string(from),
                       jordan::to_string(to), where);
  }
};

/// Rationals p/q with q <= max_den and |p/q| <= bound, excluding `v`.
inline std::vector<Rational> perturbation_candidates(const Rational& v, int max_den = 8, int bound = 4) {
  std::set<Rational> s;
  for (int q = 1; q <= max_den; ++q)
    for (int p = -bound * q; p <= bound * q; ++p) {
      Rational c(p, q);
      c.canonicalize();
      if (c != v) s.insert(c);
    }
  std::vector<Rational> out(s.begin(), s.end());
  // Closest values first.
  std::stable_sort(out.begin(), out.end(),
                   [&](const Rational& a, const Rational& b) { return abs(a - v) < abs(b - v); });
  return out;
}

/// Identities tied to one realization: brackets, Casimir forms, and symmetry
/// tables. True when all residuals vanish.
inline bool realization_identities_hold(const Catalog& cat, const Realization& r) {
  RealizedAlgebra ra(cat, r);
  const auto& gens = ra.presentation().generators;
  for (auto [i, j] : detail::generator_pairs(gens.size()))
    if (!bracket_residual(ra, gens[i], gens[j]).is_zero()) return false;
  for (const auto& id : cat.list(EntryKind::SymmetryTable)) {
    const auto& s = cat.get<SymmetryTable>(id);
    if (s.realization != r.id) continue;
    DiffOp E = ra.realize(cat.get<Casimir>(s.casimir).element);
    for (const auto& g : gens)
      if (!symmetry_residual_op(ra, E, s, g).is_zero()) return false;
  }
  return true;
}

/// Searches single-literal perturbations of the realization's operators and
/// lets. Results are reported, never applied.
inline std::vector<ErratumCandidate> search_errata(const Catalog& cat, const std::string& real_id, int max_den = 8,
                                                   std::size_t max_hits = 4) {
  const auto& r = cat.get<Realization>(real_id);
  std::vector<ErratumCandidate> hits;
  auto try_list = [&](bool lets) {
    const auto& list = lets ? r.lets : r.operators;
    for (std::size_t idx = 0; idx < list.size() && hits.size() < max_hits; ++idx) {
      std::vector<const Expr*> lits;
      collect_literals(list[idx].second, lits);
      for (const Expr* lit : lits) {
        for (const Rational& cand : perturbation_candidates(lit->value, max_den)) {
          Realization copy = r;
          auto& slot = lets ? copy.lets[idx].second : copy.operators[idx].second;
          slot = replace_literal(slot, lit, cand);
          bool ok = false;
          try {
            ok = realization_identities_hold(cat, copy);
          } catch (const Error&) {
            ok = false;
          }
          if (ok) {
            hits.push_back({list[idx].first, lit->value, cand});
            break;
          }
        }
        if (hits.size() >= max_hits) break;
      }
    }
  };
  try_list(false);
  try_list(true);
  return hits;
}

/// Attaches perturbation-search results to suspected-erratum records.
inline void annotate_errata(const Catalog& cat, CheckReport& rep) {
  std::map<std::string, std::string> notes;
  for (auto& rec : rep.records) {
    if (rec.status != Status::ErratumSuspected) continue;
    for (const auto& id : rec.catalog_ids) {
      if (!cat.contains(id) || cat.load(id).kind != EntryKind::Realization) continue;
      if (!notes.count(id)) {
        auto hits = search_errata(cat, id);
        std::string n;
        for (const auto& h : hits) n += (n.empty() ? "" : "; ") + h.describe();
        notes[id] = n.empty() ? "no single-literal fix with denominator <= 8" : n;
      }
      rec.detail += (rec.detail.empty() ? "" : " | ") + notes[id];
      break;
    }
  }
}

}  // namespace jordan
