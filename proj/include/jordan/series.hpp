#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "jordan/error.hpp"
#include "jordan/rational.hpp"

namespace jordan {

/// c · z^z_power · ε^eps_power: the only scalars the evaluator may divide by
/// without inverting a series.
struct ScalarMonomial {
  Rational coeff = 1;
  int z_power = 0;
  int eps_power = 0;
};

/// Truncated power series Σ_{k≤N} c_k z^k with exact rational coefficients.
/// Operands of binary arithmetic must share the truncation order N.
class Series {
 public:
  Series() : Series(0) {}
  explicit Series(int order) : coeffs_(static_cast<std::size_t>(order) + 1) {
    if (order < 0) throw Error(ErrorCode::OrderMismatch, "negative truncation order");
  }

  static Series zero(int order) { return Series(order); }
  static Series constant(const Rational& c, int order) {
    Series s(order);
    s.coeffs_[0] = c;
    return s;
  }
  static Series one(int order) { return constant(1, order); }
  static Series monomial(const Rational& c, int degree, int order) {
    Series s(order);
    if (degree < 0) throw Error(ErrorCode::NotAUnit, "negative power of the deformation parameter");
    if (degree <= order) s.coeffs_[static_cast<std::size_t>(degree)] = c;
    return s;
  }
  static Series from_monomial(const ScalarMonomial& m, int order) {
    if (m.eps_power != 0)
      throw Error(ErrorCode::TypeMismatch, "contraction parameter used outside a contraction");
    return monomial(m.coeff, m.z_power, order);
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  Rational& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return sgn(q) == 0; });
  }
  /// Lowest nonzero degree; order()+1 for the zero series.
  int valuation() const {
    for (int k = 0; k <= order(); ++k)
      if (sgn(coeffs_[static_cast<std::size_t>(k)]) != 0) return k;
    return order() + 1;
  }
  int z_valuation() const { return valuation(); }
  Rational constant_term() const { return coeffs_[0]; }
  bool is_constant() const {
    for (int k = 1; k <= order(); ++k)
      if (sgn((*this)[k]) != 0) return false;
    return true;
  }

  Series& operator+=(const Series& o) {
    check_order(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }
  Series& operator-=(const Series& o) {
    check_order(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }
  Series& operator*=(const Rational& c) {
    for (auto& q : coeffs_) q *= c;
    return *this;
  }
  Series operator-() const {
    Series r = *this;
    for (auto& q : r.coeffs_) q = -q;
    return r;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Series a, const Rational& c) { return a *= c; }
  friend Series operator*(const Rational& c, Series a) { return a *= c; }

  /// Cauchy product truncated at the common order.
  friend Series operator*(const Series& a, const Series& b) {
    a.check_order(b);
    Series r(a.order());
    const int n = a.order();
    for (int i = 0; i <= n; ++i) {
      if (sgn(a[i]) == 0) continue;
      for (int j = 0; i + j <= n; ++j) {
        if (sgn(b[j]) == 0) continue;
        r[i + j] += a[i] * b[j];
      }
    }
    return r;
  }
  Series& operator*=(const Series& o) { return *this = *this * o; }

  friend bool operator==(const Series& a, const Series& b) {
    return a.order() == b.order() && a.coeffs_ == b.coeffs_;
  }

  /// Divides by z^k; the k lowest coefficients must vanish. The result is
  /// exact to order N-k.
  Series shift_down(int k) const {
    if (k == 0) return *this;
    if (k > order()) throw Error(ErrorCode::NotAUnit, "division by z^k exceeds truncation order");
    for (int i = 0; i < k; ++i)
      if (sgn((*this)[i]) != 0)
        throw Error(ErrorCode::NotAUnit, "division by the deformation parameter of a non-divisible series");
    Series r(order() - k);
    for (int i = k; i <= order(); ++i) r[i - k] = (*this)[i];
    return r;
  }

  Series divided_by(const ScalarMonomial& m) const {
    if (m.eps_power != 0)
      throw Error(ErrorCode::TypeMismatch, "contraction parameter used outside a contraction");
    if (sgn(m.coeff) == 0) throw Error(ErrorCode::DivisionByZero, "division by zero scalar");
    Series r = shift_down(m.z_power);
    r *= Rational(1 / m.coeff);
    return r;
  }

  /// Drops coefficients above new_order; new_order may not exceed order().
  Series truncated(int new_order) const {
    if (new_order > order())
      throw Error(ErrorCode::OrderMismatch, fmt::format("cannot raise truncation order {} to {}", order(), new_order));
    Series r(new_order);
    for (int i = 0; i <= new_order; ++i) r[i] = (*this)[i];
    return r;
  }

  Series inverse() const;

  std::string to_string(const std::string& var = "z") const;

 private:
  void check_order(const Series& o) const {
    if (o.order() != order())
      throw Error(ErrorCode::OrderMismatch,
                  fmt::format("series truncation orders differ ({} vs {})", order(), o.order()));
  }

  std::vector<Rational> coeffs_;
};

inline Series series_add(const Series& a, const Series& b) { return a + b; }
inline Series series_mul(const Series& a, const Series& b) { return a * b; }

inline Series Series::inverse() const {
  const Rational& a0 = (*this)[0];
  if (sgn(a0) == 0) throw Error(ErrorCode::NotAUnit, "series with zero constant term is not invertible");
  Series r(order());
  r[0] = 1 / a0;
  for (int n = 1; n <= order(); ++n) {
    Rational acc = 0;
    for (int k = 1; k <= n; ++k) acc += (*this)[k] * r[n - k];
    r[n] = -acc / a0;
  }
  return r;
}

inline Series series_inverse(const Series& a) { return a.inverse(); }

namespace detail {

inline std::string term_to_string(const Rational& c, const std::string& monomial, bool first) {
  std::string out;
  Rational mag = abs(c);
  if (first)
    out += sgn(c) < 0 ? "-" : "";
  else
    out += sgn(c) < 0 ? " - " : " + ";
  if (monomial.empty())
    out += jordan::to_string(mag);
  else if (mag == 1)
    out += monomial;
  else
    out += jordan::to_string(mag) + "*" + monomial;
  return out;
}

}  // namespace detail

inline std::string Series::to_string(const std::string& var) const {
  std::string out;
  bool first = true;
  for (int k = 0; k <= order(); ++k) {
    if (sgn((*this)[k]) == 0) continue;
    std::string mono = k == 0 ? "" : (k == 1 ? var : var + "^" + std::to_string(k));
    out += detail::term_to_string((*this)[k], mono, first);
    first = false;
  }
  return first ? "0" : out;
}

/// Laurent polynomial in the contraction parameter ε with Series
/// coefficients. Only nonzero ε-degrees are stored; the window [lo, hi] is
/// recomputed from them.
class EpsSeries {
 public:
  EpsSeries() : EpsSeries(0) {}
  explicit EpsSeries(int order) : order_(order) {}

  static EpsSeries zero(int order) { return EpsSeries(order); }
  static EpsSeries constant(const Rational& c, int order) { return from_series(Series::constant(c, order), 0); }
  static EpsSeries one(int order) { return constant(1, order); }
  static EpsSeries from_series(const Series& s, int eps_degree) {
    EpsSeries e(s.order());
    if (!s.is_zero()) e.terms_.emplace(eps_degree, s);
    return e;
  }
  static EpsSeries from_monomial(const ScalarMonomial& m, int order) {
    return from_series(Series::monomial(m.coeff, m.z_power, order), m.eps_power);
  }

  int order() const { return order_; }
  const std::map<int, Series>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int eps_low() const { return terms_.empty() ? 0 : terms_.begin()->first; }
  int eps_high() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  int z_valuation() const {
    int v = order_ + 1;
    for (const auto& [d, s] : terms_) v = std::min(v, s.valuation());
    return v;
  }
  Rational constant_term() const {
    auto it = terms_.find(0);
    return it == terms_.end() ? Rational(0) : it->second[0];
  }
  bool is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_constant();
  }
  Series coefficient(int eps_degree) const {
    auto it = terms_.find(eps_degree);
    return it == terms_.end() ? Series(order_) : it->second;
  }

  EpsSeries& operator+=(const EpsSeries& o) {
    check_order(o);
    for (const auto& [d, s] : o.terms_) accumulate(d, s);
    return *this;
  }
  EpsSeries& operator-=(const EpsSeries& o) {
    check_order(o);
    for (const auto& [d, s] : o.terms_) accumulate(d, -s);
    return *this;
  }
  EpsSeries& operator*=(const Rational& c) {
    if (sgn(c) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [d, s] : terms_) s *= c;
    return *this;
  }
  EpsSeries operator-() const {
    EpsSeries r = *this;
    for (auto& [d, s] : r.terms_) s = -s;
    return r;
  }
  friend EpsSeries operator+(EpsSeries a, const EpsSeries& b) { return a += b; }
  friend EpsSeries operator-(EpsSeries a, const EpsSeries& b) { return a -= b; }
  friend EpsSeries operator*(EpsSeries a, const Rational& c) { return a *= c; }
  friend EpsSeries operator*(const Rational& c, EpsSeries a) { return a *= c; }
  friend EpsSeries operator*(const EpsSeries& a, const EpsSeries& b) {
    a.check_order(b);
    EpsSeries r(a.order_);
    for (const auto& [da, sa] : a.terms_)
      for (const auto& [db, sb] : b.terms_) r.accumulate(da + db, sa * sb);
    return r;
  }
  EpsSeries& operator*=(const EpsSeries& o) { return *this = *this * o; }
  friend bool operator==(const EpsSeries& a, const EpsSeries& b) {
    return a.order_ == b.order_ && a.terms_ == b.terms_;
  }

  EpsSeries shift_down(int k) const {
    EpsSeries r(order_ - k);
    for (const auto& [d, s] : terms_) r.accumulate(d, s.shift_down(k));
    return r;
  }
  EpsSeries divided_by(const ScalarMonomial& m) const {
    if (sgn(m.coeff) == 0) throw Error(ErrorCode::DivisionByZero, "division by zero scalar");
    EpsSeries r(order_ - m.z_power);
    Rational inv = 1 / m.coeff;
    for (const auto& [d, s] : terms_) r.accumulate(d - m.eps_power, s.shift_down(m.z_power) * inv);
    return r;
  }
  EpsSeries truncated(int new_order) const {
    EpsSeries r(new_order);
    for (const auto& [d, s] : terms_) r.accumulate(d, s.truncated(new_order));
    return r;
  }

  std::string to_string(const std::string& var = "z") const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [d, s] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + s.to_string(var) + ")";
      if (d != 0) out += "*eps^" + std::to_string(d);
    }
    return out;
  }

 private:
  void check_order(const EpsSeries& o) const {
    if (o.order_ != order_)
      throw Error(ErrorCode::OrderMismatch,
                  fmt::format("series truncation orders differ ({} vs {})", order_, o.order_));
  }
  void accumulate(int d, const Series& s) {
    if (s.is_zero()) return;
    auto it = terms_.find(d);
    if (it == terms_.end()) {
      terms_.emplace(d, s);
      return;
    }
    it->second += s;
    if (it->second.is_zero()) terms_.erase(it);
  }

  int order_;
  std::map<int, Series> terms_;
};

/// ε → 0 limit: the ε⁰ coefficient, provided no negative ε-degree survives.
inline Series eps_limit(const EpsSeries& a) {
  for (const auto& [d, s] : a.terms())
    if (d < 0)
      throw Error(ErrorCode::DivergentContraction,
                  fmt::format("nonzero coefficient {} at eps^{}", s.to_string(), d), {}, d);
  return a.coefficient(0);
}

}  // namespace jordan
