#pragma once

// Noncommutative PBW algebras over truncated series: elements are finite sums
// of PBW-ordered generator words; products are brought back to normal form by
// adjacent-swap rewriting against a commutation table.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "jordan/error.hpp"
#include "jordan/rational.hpp"
#include "jordan/series.hpp"

namespace jordan {

using Gen = std::uint8_t;
using Word = std::vector<Gen>;

/// Graded lexicographic order: shorter words first.
struct WordLess {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

inline bool is_pbw_ordered(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i - 1] > w[i]) return false;
  return true;
}

template <class S>
class NCElement {
 public:
  using Scalar = S;
  using Map = std::map<Word, S, WordLess>;

  NCElement() : NCElement(0) {}
  explicit NCElement(int order) : order_(order) {}

  static NCElement scalar(const S& s) {
    NCElement e(s.order());
    e.add_term({}, s);
    return e;
  }
  static NCElement scalar(const Rational& c, int order) { return scalar(S::constant(c, order)); }
  static NCElement one(int order) { return scalar(S::one(order)); }
  static NCElement word(const Word& w, int order) {
    NCElement e(order);
    e.add_term(w, S::one(order));
    return e;
  }
  static NCElement generator(Gen g, int order) { return word(Word{g}, order); }

  int order() const { return order_; }
  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Word& w, const S& c) {
    if (c.is_zero()) return;
    check_order(c.order());
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      terms_.emplace(w, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
  void sub_term(const Word& w, const S& c) { add_term(w, -c); }

  NCElement& operator+=(const NCElement& o) {
    check_order(o.order_);
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  NCElement& operator-=(const NCElement& o) {
    check_order(o.order_);
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  NCElement& operator*=(const Rational& q) {
    if (sgn(q) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= q;
    return *this;
  }
  /// Multiplication by a central scalar.
  NCElement scaled(const S& s) const {
    NCElement r(order_);
    for (const auto& [w, c] : terms_) r.add_term(w, c * s);
    return r;
  }
  NCElement operator-() const {
    NCElement r = *this;
    for (auto& [w, c] : r.terms_) c = -c;
    return r;
  }
  friend NCElement operator+(NCElement a, const NCElement& b) { return a += b; }
  friend NCElement operator-(NCElement a, const NCElement& b) { return a -= b; }
  friend NCElement operator*(NCElement a, const Rational& q) { return a *= q; }
  friend bool operator==(const NCElement& a, const NCElement& b) {
    return a.order_ == b.order_ && a.terms_ == b.terms_;
  }

  /// Minimum deformation-parameter valuation over all terms.
  int z_valuation() const {
    int v = order_ + 1;
    for (const auto& [w, c] : terms_) v = std::min(v, c.z_valuation());
    return v;
  }
  bool is_scalar() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  S scalar_part() const {
    auto it = terms_.find(Word{});
    return it == terms_.end() ? S::zero(order_) : it->second;
  }
  int max_degree() const { return terms_.empty() ? 0 : static_cast<int>(terms_.rbegin()->first.size()); }

  NCElement truncated(int new_order) const {
    NCElement r(new_order);
    for (const auto& [w, c] : terms_) r.add_term(w, c.truncated(new_order));
    return r;
  }
  NCElement divided_by(const ScalarMonomial& m) const {
    NCElement r(order_ - m.z_power);
    for (const auto& [w, c] : terms_) r.add_term(w, c.divided_by(m));
    return r;
  }
  template <class F>
  auto map_coefficients(int new_order, F&& f) const {
    using T = decltype(f(std::declval<const S&>()));
    NCElement<T> r(new_order);
    for (const auto& [w, c] : terms_) r.add_term(w, f(c));
    return r;
  }

 private:
  void check_order(int o) const {
    if (o != order_)
      throw Error(ErrorCode::OrderMismatch, fmt::format("element truncation orders differ ({} vs {})", order_, o));
  }

  int order_;
  Map terms_;
};

/// Word tuple of a 2- or 3-fold tensor product; unused slots stay empty.
struct TensorKey {
  std::array<Word, 3> slots;
  friend bool operator==(const TensorKey& a, const TensorKey& b) { return a.slots == b.slots; }
};

struct TensorKeyLess {
  bool operator()(const TensorKey& a, const TensorKey& b) const {
    WordLess less;
    for (std::size_t i = 0; i < 3; ++i) {
      if (less(a.slots[i], b.slots[i])) return true;
      if (less(b.slots[i], a.slots[i])) return false;
    }
    return false;
  }
};

template <class S>
class TensorElement {
 public:
  using Scalar = S;
  using Map = std::map<TensorKey, S, TensorKeyLess>;

  TensorElement() : TensorElement(2, 0) {}
  TensorElement(int arity, int order) : arity_(arity), order_(order) {
    if (arity != 2 && arity != 3) throw Error(ErrorCode::ArityMismatch, "tensor arity must be 2 or 3");
  }

  static TensorElement one(int arity, int order) {
    TensorElement t(arity, order);
    t.add_term(TensorKey{}, S::one(order));
    return t;
  }
  static TensorElement scalar(const S& s, int arity) {
    TensorElement t(arity, s.order());
    t.add_term(TensorKey{}, s);
    return t;
  }
  /// Outer product of NC elements, one per slot.
  static TensorElement outer(const std::vector<const NCElement<S>*>& parts) {
    int arity = static_cast<int>(parts.size());
    int order = parts.front()->order();
    TensorElement t(arity, order);
    std::vector<std::pair<TensorKey, S>> acc{{TensorKey{}, S::one(order)}};
    for (int slot = 0; slot < arity; ++slot) {
      if (parts[static_cast<std::size_t>(slot)]->order() != order)
        throw Error(ErrorCode::OrderMismatch, "tensor factors have different truncation orders");
      std::vector<std::pair<TensorKey, S>> next;
      for (const auto& [key, c] : acc)
        for (const auto& [w, d] : parts[static_cast<std::size_t>(slot)]->terms()) {
          TensorKey k = key;
          k.slots[static_cast<std::size_t>(slot)] = w;
          S cd = c * d;
          if (!cd.is_zero()) next.emplace_back(std::move(k), std::move(cd));
        }
      acc = std::move(next);
    }
    for (const auto& [k, c] : acc) t.add_term(k, c);
    return t;
  }

  int arity() const { return arity_; }
  int order() const { return order_; }
  const Map& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const TensorKey& k, const S& c) {
    if (c.is_zero()) return;
    if (c.order() != order_) throw Error(ErrorCode::OrderMismatch, "tensor coefficient order mismatch");
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  TensorElement& operator+=(const TensorElement& o) {
    check(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  TensorElement& operator-=(const TensorElement& o) {
    check(o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  TensorElement& operator*=(const Rational& q) {
    if (sgn(q) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= q;
    return *this;
  }
  TensorElement scaled(const S& s) const {
    TensorElement r(arity_, order_);
    for (const auto& [k, c] : terms_) r.add_term(k, c * s);
    return r;
  }
  TensorElement operator-() const {
    TensorElement r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
  }
  friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
  friend TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
  friend TensorElement operator*(TensorElement a, const Rational& q) { return a *= q; }
  friend bool operator==(const TensorElement& a, const TensorElement& b) {
    return a.arity_ == b.arity_ && a.order_ == b.order_ && a.terms_ == b.terms_;
  }

  int z_valuation() const {
    int v = order_ + 1;
    for (const auto& [k, c] : terms_) v = std::min(v, c.z_valuation());
    return v;
  }
  bool is_scalar() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == TensorKey{}); }
  S scalar_part() const {
    auto it = terms_.find(TensorKey{});
    return it == terms_.end() ? S::zero(order_) : it->second;
  }

  TensorElement truncated(int new_order) const {
    TensorElement r(arity_, new_order);
    for (const auto& [k, c] : terms_) r.add_term(k, c.truncated(new_order));
    return r;
  }
  TensorElement divided_by(const ScalarMonomial& m) const {
    TensorElement r(arity_, order_ - m.z_power);
    for (const auto& [k, c] : terms_) r.add_term(k, c.divided_by(m));
    return r;
  }

  /// Opposite (slot-swapped) element of a 2-tensor.
  TensorElement swapped() const {
    if (arity_ != 2) throw Error(ErrorCode::ArityMismatch, "slot swap needs a 2-tensor");
    TensorElement r(2, order_);
    for (const auto& [k, c] : terms_) r.add_term(TensorKey{{k.slots[1], k.slots[0], {}}}, c);
    return r;
  }
  /// Places a 2-tensor into slots (a, b) of a 3-tensor.
  TensorElement embedded3(int a, int b) const {
    if (arity_ != 2) throw Error(ErrorCode::ArityMismatch, "leg embedding needs a 2-tensor");
    TensorElement r(3, order_);
    for (const auto& [k, c] : terms_) {
      TensorKey n;
      n.slots[static_cast<std::size_t>(a)] = k.slots[0];
      n.slots[static_cast<std::size_t>(b)] = k.slots[1];
      r.add_term(n, c);
    }
    return r;
  }

 private:
  void check(const TensorElement& o) const {
    if (o.arity_ != arity_) throw Error(ErrorCode::ArityMismatch, "tensor arities differ");
    if (o.order_ != order_) throw Error(ErrorCode::OrderMismatch, "tensor truncation orders differ");
  }

  int arity_;
  int order_;
  Map terms_;
};

struct RewriteLimits {
  int degree_cap = 12;
  long fuel = 1'000'000;
};

/// PBW algebra with lazily evaluated commutation table. The table provider
/// returns [g_i, g_j] for i > j (in PBW rank) already in normal form; it may
/// call back into the algebra, at the same or a higher truncation order.
template <class S>
class PbwAlgebra {
 public:
  using Element = NCElement<S>;
  using Tensor = TensorElement<S>;
  using TableProvider = std::function<Element(PbwAlgebra&, int i, int j, int order)>;

  PbwAlgebra(std::string name, std::vector<std::string> generators, TableProvider provider,
             RewriteLimits limits = {})
      : name_(std::move(name)),
        generators_(std::move(generators)),
        provider_(std::move(provider)),
        limits_(limits),
        fuel_left_(limits.fuel) {
    if (generators_.size() > 250) throw Error(ErrorCode::ValidationFailed, "too many generators");
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      if (!index_.emplace(generators_[i], static_cast<Gen>(i)).second)
        throw Error(ErrorCode::ValidationFailed, "duplicate generator '" + generators_[i] + "'");
    }
  }
  PbwAlgebra(const PbwAlgebra&) = delete;
  PbwAlgebra& operator=(const PbwAlgebra&) = delete;

  const std::string& name() const { return name_; }
  const std::vector<std::string>& generators() const { return generators_; }
  int rank() const { return static_cast<int>(generators_.size()); }
  const RewriteLimits& limits() const { return limits_; }
  std::optional<Gen> find(const std::string& symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Gen index(const std::string& symbol) const {
    auto g = find(symbol);
    if (!g) throw Error(ErrorCode::UnknownGenerator, "'" + symbol + "' is not a generator of " + name_);
    return *g;
  }
  Element generator(const std::string& symbol, int order) { return Element::generator(index(symbol), order); }

  /// [g_a, g_b] in normal form.
  Element bracket(Gen a, Gen b, int order) {
    if (a == b) return Element(order);
    if (a > b) return table_entry(a, b, order);
    return -table_entry(b, a, order);
  }

  Element mul(const Element& x, const Element& y) {
    if (x.order() != y.order()) throw Error(ErrorCode::OrderMismatch, "product of elements with different orders");
    const int n = x.order();
    Element r(n);
    for (const auto& [u, a] : x.terms()) {
      int va = a.z_valuation();
      for (const auto& [v, b] : y.terms()) {
        if (va + b.z_valuation() > n) continue;
        S ab = a * b;
        if (ab.is_zero()) continue;
        const Element& uv = mul_words(u, v, n);
        for (const auto& [w, c] : uv.terms()) r.add_term(w, ab * c);
      }
    }
    return r;
  }

  Element commutator(const Element& x, const Element& y) { return mul(x, y) - mul(y, x); }

  /// Normal form of an arbitrary (not necessarily ordered) word.
  Element normal_order_word(const Word& w, int order) {
    Element r = Element::one(order);
    for (Gen g : w) {
      if (g >= rank()) throw Error(ErrorCode::UnknownGenerator, "generator index out of range");
      r = mul(r, Element::generator(g, order));
    }
    return r;
  }

  /// Normal form of a product of two PBW-ordered words (memoized).
  const Element& mul_words(const Word& u, const Word& v, int order) {
    Context& ctx = context(order);
    auto key = std::make_pair(u, v);
    if (auto it = ctx.word_products.find(key); it != ctx.word_products.end()) return it->second;
    Element r(order);
    if (v.empty()) {
      r.add_term(u, S::one(order));
    } else if (u.empty() || u.back() <= v.front()) {
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      check_degree(w.size());
      r.add_term(w, S::one(order));
    } else {
      Word head(v.begin(), v.end() - 1);
      const Element& left = mul_words(u, head, order);
      Element acc(order);
      for (const auto& [w, c] : left.terms()) {
        const Element& wg = mul_word_gen(w, v.back(), order);
        for (const auto& [w2, c2] : wg.terms()) acc.add_term(w2, c * c2);
      }
      r = std::move(acc);
    }
    return context(order).word_products.emplace(key, std::move(r)).first->second;
  }

  /// Normal form of (ordered word) · generator.
  const Element& mul_word_gen(const Word& u, Gen g, int order) {
    Context& ctx = context(order);
    auto key = std::make_pair(u, g);
    if (auto it = ctx.gen_products.find(key); it != ctx.gen_products.end()) return it->second;
    Element r(order);
    if (u.empty() || u.back() <= g) {
      Word w = u;
      w.push_back(g);
      check_degree(w.size());
      r.add_term(w, S::one(order));
    } else {
      burn_fuel();
      // u' a g = (u' g) a + u' [a, g]
      Gen a = u.back();
      Word prefix(u.begin(), u.end() - 1);
      Element left = mul_word_gen(prefix, g, order);
      for (const auto& [w, c] : left.terms()) {
        const Element& wa = mul_word_gen(w, a, order);
        for (const auto& [w2, c2] : wa.terms()) r.add_term(w2, c * c2);
      }
      Element comm = bracket(a, g, order);
      for (const auto& [v, c] : comm.terms()) {
        if (c.z_valuation() > order) continue;
        const Element& pv = mul_words(prefix, v, order);
        for (const auto& [w2, c2] : pv.terms()) r.add_term(w2, c * c2);
      }
    }
    return context(order).gen_products.emplace(key, std::move(r)).first->second;
  }

  /// Remaining rewrite budget is reset by each FuelScope.
  class FuelScope {
   public:
    explicit FuelScope(PbwAlgebra& alg) : alg_(alg), saved_(alg.fuel_left_) { alg_.fuel_left_ = alg_.limits_.fuel; }
    ~FuelScope() { alg_.fuel_left_ = saved_; }
    FuelScope(const FuelScope&) = delete;
    FuelScope& operator=(const FuelScope&) = delete;

   private:
    PbwAlgebra& alg_;
    long saved_;
  };

  /// Drops all memoized products and table entries.
  void clear_cache() { contexts_.clear(); }

 private:
  struct Context {
    std::vector<std::optional<Element>> table;
    std::vector<char> pending;
    std::map<std::pair<Word, Gen>, Element> gen_products;
    std::map<std::pair<Word, Word>, Element> word_products;
  };

  Context& context(int order) {
    auto it = contexts_.find(order);
    if (it != contexts_.end()) return *it->second;
    if (order > kMaxOrder)
      throw Error(ErrorCode::FuelExhausted,
                  fmt::format("truncation order escalated past {} while normal-ordering in {}", kMaxOrder, name_));
    auto ctx = std::make_unique<Context>();
    std::size_t n = generators_.size();
    ctx->table.resize(n * n);
    ctx->pending.assign(n * n, 0);
    return *contexts_.emplace(order, std::move(ctx)).first->second;
  }

  Element table_entry(Gen i, Gen j, int order) {
    std::size_t idx = static_cast<std::size_t>(i) * generators_.size() + j;
    {
      Context& ctx = context(order);
      if (ctx.table[idx]) return *ctx.table[idx];
      if (ctx.pending[idx])
        throw Error(ErrorCode::FuelExhausted,
                    fmt::format("cyclic dependency while normal-ordering [{}, {}] in {}", generators_[i],
                                generators_[j], name_));
      ctx.pending[idx] = 1;
    }
    Element value(order);
    try {
      value = provider_(*this, i, j, order);
    } catch (...) {
      context(order).pending[idx] = 0;
      throw;
    }
    if (value.order() != order) value = value.truncated(order);
    Context& ctx = context(order);
    ctx.pending[idx] = 0;
    ctx.table[idx] = value;
    return value;
  }

  void check_degree(std::size_t degree) const {
    if (static_cast<int>(degree) > limits_.degree_cap)
      throw Error(ErrorCode::DegreeCapExceeded,
                  fmt::format("word degree {} exceeds cap {} in {}", degree, limits_.degree_cap, name_));
  }
  void burn_fuel() {
    if (--fuel_left_ < 0)
      throw Error(ErrorCode::FuelExhausted,
                  fmt::format("rewriting exceeded {} steps in {}; check the PBW order", limits_.fuel, name_));
  }

  static constexpr int kMaxOrder = 64;

  std::string name_;
  std::vector<std::string> generators_;
  std::map<std::string, Gen> index_;
  TableProvider provider_;
  RewriteLimits limits_;
  long fuel_left_;
  std::map<int, std::unique_ptr<Context>> contexts_;
};

/// Algebra of 2- or 3-fold tensors over one PBW algebra, with
/// componentwise multiplication (a⊗b)(c⊗d) = ac⊗bd.
template <class S>
class TensorRing {
 public:
  using Element = TensorElement<S>;

  TensorRing(PbwAlgebra<S>& alg, int arity) : alg_(alg), arity_(arity) {}

  int arity() const { return arity_; }
  PbwAlgebra<S>& algebra() { return alg_; }
  Element one(int order) const { return Element::one(arity_, order); }

  Element mul(const Element& x, const Element& y) {
    if (x.arity() != y.arity()) throw Error(ErrorCode::ArityMismatch, "tensor arities differ");
    if (x.order() != y.order()) throw Error(ErrorCode::OrderMismatch, "tensor truncation orders differ");
    const int n = x.order();
    const int ar = x.arity();
    Element r(ar, n);
    for (const auto& [ku, a] : x.terms()) {
      int va = a.z_valuation();
      for (const auto& [kv, b] : y.terms()) {
        if (va + b.z_valuation() > n) continue;
        S ab = a * b;
        if (ab.is_zero()) continue;
        // Cartesian product of slotwise normal forms.
        std::vector<std::pair<TensorKey, S>> acc{{TensorKey{}, ab}};
        for (int s = 0; s < ar; ++s) {
          const auto& slot = alg_.mul_words(ku.slots[static_cast<std::size_t>(s)],
                                            kv.slots[static_cast<std::size_t>(s)], n);
          if (slot.terms().size() == 1 && slot.terms().begin()->second == S::one(n)) {
            for (auto& [k, c] : acc) k.slots[static_cast<std::size_t>(s)] = slot.terms().begin()->first;
            continue;
          }
          std::vector<std::pair<TensorKey, S>> next;
          for (const auto& [k, c] : acc) {
            int vc = c.z_valuation();
            for (const auto& [w, d] : slot.terms()) {
              if (vc + d.z_valuation() > n) continue;
              S cd = c * d;
              if (cd.is_zero()) continue;
              TensorKey k2 = k;
              k2.slots[static_cast<std::size_t>(s)] = w;
              next.emplace_back(std::move(k2), std::move(cd));
            }
          }
          acc = std::move(next);
        }
        for (const auto& [k, c] : acc) r.add_term(k, c);
      }
    }
    return r;
  }

  Element commutator(const Element& x, const Element& y) { return mul(x, y) - mul(y, x); }

 private:
  PbwAlgebra<S>& alg_;
  int arity_;
};

/// Ring adaptor so the series functions below work uniformly on algebra
/// elements and tensors.
template <class S>
struct AlgebraRing {
  PbwAlgebra<S>& alg;
  using Element = NCElement<S>;
  Element one(int order) const { return Element::one(order); }
  Element mul(const Element& a, const Element& b) const { return alg.mul(a, b); }
};

template <class S>
struct TensorRingRef {
  TensorRing<S>& ring;
  using Element = TensorElement<S>;
  Element one(int order) const { return ring.one(order); }
  Element mul(const Element& a, const Element& b) const { return ring.mul(a, b); }
};

namespace detail {

template <class Ring, class E>
void require_nilpotent(const E& x, const char* what) {
  if (!x.is_zero() && x.z_valuation() < 1)
    throw Error(ErrorCode::NonNilpotentArgument,
                std::string(what) + ": argument must carry a positive power of the deformation parameter");
}

}  // namespace detail

/// Truncated exp(x); x must have deformation-parameter valuation ≥ 1.
template <class Ring>
typename Ring::Element series_exp(const Ring& ring, const typename Ring::Element& x) {
  detail::require_nilpotent<Ring>(x, "exp");
  const int n = x.order();
  auto result = ring.one(n);
  auto power = ring.one(n);
  for (int k = 1; k <= n; ++k) {
    power = ring.mul(power, x);
    if (power.is_zero()) break;
    result += power * Rational(Rational(1) / factorial(k));
  }
  return result;
}

/// Truncated log(1 + n); n must have valuation ≥ 1.
template <class Ring>
typename Ring::Element series_log_one_plus(const Ring& ring, const typename Ring::Element& x) {
  detail::require_nilpotent<Ring>(x, "log");
  const int n = x.order();
  auto result = x;
  result *= Rational(0);
  auto power = ring.one(n);
  for (int k = 1; k <= n; ++k) {
    power = ring.mul(power, x);
    if (power.is_zero()) break;
    result += power * Rational(k % 2 ? 1 : -1, k);
  }
  return result;
}

/// Truncated (1 + n)^alpha by the binomial series; exact for any rational alpha.
template <class Ring>
typename Ring::Element series_binomial(const Ring& ring, const typename Ring::Element& x, const Rational& alpha) {
  detail::require_nilpotent<Ring>(x, "binomial series");
  const int n = x.order();
  auto result = ring.one(n);
  auto power = ring.one(n);
  for (int k = 1; k <= n; ++k) {
    power = ring.mul(power, x);
    if (power.is_zero()) break;
    Rational c = binomial(alpha, k);
    if (sgn(c) != 0) result += power * c;
  }
  return result;
}

/// (1 + n)^{-1}.
template <class Ring>
typename Ring::Element series_invert_one_plus(const Ring& ring, const typename Ring::Element& x) {
  return series_binomial(ring, x, Rational(-1));
}

template <class S>
NCElement<S> exp_element(PbwAlgebra<S>& alg, const NCElement<S>& x) {
  typename PbwAlgebra<S>::FuelScope fuel(alg);
  return series_exp(AlgebraRing<S>{alg}, x);
}
template <class S>
NCElement<S> log_one_plus(PbwAlgebra<S>& alg, const NCElement<S>& x) {
  typename PbwAlgebra<S>::FuelScope fuel(alg);
  return series_log_one_plus(AlgebraRing<S>{alg}, x);
}
template <class S>
NCElement<S> invert_one_plus(PbwAlgebra<S>& alg, const NCElement<S>& x) {
  typename PbwAlgebra<S>::FuelScope fuel(alg);
  return series_invert_one_plus(AlgebraRing<S>{alg}, x);
}

template <class S>
NCElement<S> commutator(PbwAlgebra<S>& alg, const NCElement<S>& a, const NCElement<S>& b) {
  typename PbwAlgebra<S>::FuelScope fuel(alg);
  return alg.commutator(a, b);
}

/// Normal form of an arbitrary linear combination of (possibly unordered)
/// words.
template <class S>
NCElement<S> normal_order(PbwAlgebra<S>& alg, const std::vector<std::pair<Word, S>>& terms, int order) {
  typename PbwAlgebra<S>::FuelScope fuel(alg);
  NCElement<S> r(order);
  for (const auto& [w, c] : terms) r += alg.normal_order_word(w, order).scaled(c);
  return r;
}

/// Rendering of an element using the algebra's generator names.
template <class S>
std::string render(const NCElement<S>& e, const std::vector<std::string>& names, const std::string& var = "z") {
  if (e.is_zero()) return "0";
  std::string out;
  for (const auto& [w, c] : e.terms()) {
    std::string word;
    for (std::size_t i = 0; i < w.size();) {
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      if (!word.empty()) word += "*";
      word += names[w[i]];
      if (j - i > 1) word += "^" + std::to_string(j - i);
      i = j;
    }
    if (!out.empty()) out += " + ";
    std::string coeff = c.to_string(var);
    if (word.empty())
      out += "(" + coeff + ")";
    else if (coeff == "1")
      out += word;
    else
      out += "(" + coeff + ")*" + word;
  }
  return out;
}

inline std::string render_word(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string word;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!word.empty()) word += "*";
    word += names[w[i]];
    if (j - i > 1) word += "^" + std::to_string(j - i);
    i = j;
  }
  return word;
}

template <class S>
std::string render(const TensorElement<S>& t, const std::vector<std::string>& names, const std::string& var = "z") {
  if (t.is_zero()) return "0";
  std::string out;
  for (const auto& [k, c] : t.terms()) {
    if (!out.empty()) out += " + ";
    std::string coeff = c.to_string(var);
    if (coeff != "1") out += "(" + coeff + ")*";
    out += "[";
    for (int s = 0; s < t.arity(); ++s) {
      if (s) out += " ⊗ ";
      out += render_word(k.slots[static_cast<std::size_t>(s)], names);
    }
    out += "]";
  }
  return out;
}

}  // namespace jordan
