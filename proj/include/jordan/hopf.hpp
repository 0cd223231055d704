#pragma once

// Hopf-structure checks on deformed enveloping algebras: coproduct
// homomorphism, coassociativity, counit, antipode, R-matrix, twist maps,
// contractions and Hopf-subalgebra embeddings. Every check compares exact
// normal forms at a fixed truncation order; residuals are rendered elements.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "jordan/error.hpp"
#include "jordan/eval.hpp"
#include "jordan/ncalg.hpp"
#include "jordan/presentation.hpp"
#include "jordan/report.hpp"
#include "jordan/series.hpp"

namespace jordan {

using NC = NCElement<Series>;
using Tensor = TensorElement<Series>;

/// A presentation instantiated as a rewriting algebra with cached coproducts.
class HopfAlgebra {
 public:
  explicit HopfAlgebra(Presentation p, RewriteLimits limits = {})
      : p_(std::move(p)),
        alg_(build_algebra<Series>(p_.id, p_.generators, p_.table(), p_.params(), limits)),
        ev_(*alg_, p_.params()),
        ring2_(*alg_, 2),
        ring3_(*alg_, 3) {
    for (const auto& b : p_.brackets) {
      alg_->index(b.left);
      alg_->index(b.right);
    }
  }
  HopfAlgebra(const HopfAlgebra&) = delete;
  HopfAlgebra& operator=(const HopfAlgebra&) = delete;

  const Presentation& presentation() const { return p_; }
  const std::string& id() const { return p_.id; }
  PbwAlgebra<Series>& algebra() { return *alg_; }
  Evaluator<Series>& evaluator() { return ev_; }
  TensorRing<Series>& ring(int arity) { return arity == 3 ? ring3_ : ring2_; }
  const std::vector<std::string>& names() const { return alg_->generators(); }

  NC generator(const std::string& name, int order) { return alg_->generator(name, order); }
  NC bracket(Gen a, Gen b, int order) {
    typename PbwAlgebra<Series>::FuelScope fuel(*alg_);
    return alg_->bracket(a, b, order);
  }
  NC mul(const NC& a, const NC& b) {
    typename PbwAlgebra<Series>::FuelScope fuel(*alg_);
    return alg_->mul(a, b);
  }
  NC commutator(const NC& a, const NC& b) { return jordan::commutator(*alg_, a, b); }
  Tensor tmul(const Tensor& a, const Tensor& b) {
    typename PbwAlgebra<Series>::FuelScope fuel(*alg_);
    return ring(a.arity()).mul(a, b);
  }
  Tensor tcommutator(const Tensor& a, const Tensor& b) { return tmul(a, b) - tmul(b, a); }

  /// Δ(g) from the coproduct table.
  const Tensor& coproduct(Gen g, int order) {
    auto key = std::make_pair(g, order);
    if (auto it = delta_gen_.find(key); it != delta_gen_.end()) return it->second;
    const std::string& name = names()[g];
    auto it = p_.coproducts.find(name);
    if (it == p_.coproducts.end())
      throw Error(ErrorCode::ValidationFailed, fmt::format("{} has no coproduct for '{}'", p_.id, name));
    return delta_gen_.emplace(key, ev_.tensor(it->second, order)).first->second;
  }

  /// Multiplicative extension of Δ to a PBW word.
  const Tensor& delta_word(const Word& w, int order) {
    auto key = std::make_pair(w, order);
    if (auto it = delta_word_.find(key); it != delta_word_.end()) return it->second;
    Tensor r = Tensor::one(2, order);
    if (!w.empty()) {
      Word head(w.begin(), w.end() - 1);
      Tensor left = delta_word(head, order);
      r = tmul(left, coproduct(w.back(), order));
    }
    return delta_word_.emplace(key, std::move(r)).first->second;
  }

  /// Δ extended linearly and multiplicatively.
  Tensor delta(const NC& x) {
    Tensor r(2, x.order());
    for (const auto& [w, c] : x.terms()) r += delta_word(w, x.order()).scaled(c);
    return r;
  }

  /// (Δ ⊗ id) applied to a 2-tensor.
  Tensor delta_left(const Tensor& t) {
    Tensor r(3, t.order());
    for (const auto& [k, c] : t.terms())
      for (const auto& [k2, d] : delta_word(k.slots[0], t.order()).terms())
        r.add_term(TensorKey{{k2.slots[0], k2.slots[1], k.slots[1]}}, c * d);
    return r;
  }
  /// (id ⊗ Δ) applied to a 2-tensor.
  Tensor delta_right(const Tensor& t) {
    Tensor r(3, t.order());
    for (const auto& [k, c] : t.terms())
      for (const auto& [k2, d] : delta_word(k.slots[1], t.order()).terms())
        r.add_term(TensorKey{{k.slots[0], k2.slots[0], k2.slots[1]}}, c * d);
    return r;
  }

  /// Expected [a, b] from the table (zero when absent), as an expression.
  NC table_rhs(const std::string& a, const std::string& b, Evaluator<Series>& ev, int order) const {
    for (const auto& br : p_.brackets) {
      if (br.left == a && br.right == b) return ev.element(br.rhs, order);
      if (br.left == b && br.right == a) return -ev.element(br.rhs, order);
    }
    return NC(order);
  }

 private:
  Presentation p_;
  std::unique_ptr<PbwAlgebra<Series>> alg_;
  Evaluator<Series> ev_;
  TensorRing<Series> ring2_;
  TensorRing<Series> ring3_;
  std::map<std::pair<Gen, int>, Tensor> delta_gen_;
  std::map<std::pair<Word, int>, Tensor> delta_word_;
};

namespace detail {

inline std::string pair_label(const std::string& a, const std::string& b) { return a + "," + b; }

template <class E>
CheckRecord compare(std::string id, std::vector<std::string> ids, std::string suite, const E& diff,
                    const std::vector<std::string>& names, const std::string& param, double ms,
                    std::string detail = {}) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.catalog_ids = std::move(ids);
  r.suite = std::move(suite);
  r.status = diff.is_zero() ? Status::Pass : Status::Fail;
  r.residual = render(diff, names, param);
  r.detail = std::move(detail);
  r.timing_ms = ms;
  return r;
}

inline CheckRecord error_record(std::string id, std::vector<std::string> ids, std::string suite, const Error& e,
                                Status status = Status::Fail) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.catalog_ids = std::move(ids);
  r.suite = std::move(suite);
  r.status = status;
  r.residual = "n/a";
  r.detail = e.what();
  return r;
}

/// Runs one check, turning structured errors into failing records.
template <class F>
void guarded(CheckReport& rep, const std::string& id, const std::vector<std::string>& ids, const std::string& suite,
             F&& f) {
  try {
    f();
  } catch (const Error& e) {
    rep.add(error_record(id, ids, suite, e));
  }
}

}  // namespace detail

/// Jacobi identity on all generator triples plus associativity on every
/// overlap c·b·a with c > b > a (the diamond-lemma ambiguities).
inline CheckReport verify_jacobi(HopfAlgebra& h, int order, const std::string& suite = "algebra") {
  CheckReport rep;
  const auto& names = h.names();
  const int g = static_cast<int>(names.size());
  const std::vector<std::string> ids{h.id()};
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b)
      for (int c = b + 1; c < g; ++c) {
        std::string tag = names[a] + "," + names[b] + "," + names[c];
        detail::guarded(rep, suite + "/" + h.id() + "/jacobi/" + tag, ids, suite, [&] {
          Stopwatch sw;
          auto ga = static_cast<Gen>(a), gb = static_cast<Gen>(b), gc = static_cast<Gen>(c);
          NC x = h.generator(names[a], order), y = h.generator(names[b], order), z = h.generator(names[c], order);
          NC j = h.commutator(h.bracket(ga, gb, order), z) + h.commutator(h.bracket(gb, gc, order), x) +
                 h.commutator(h.bracket(gc, ga, order), y);
          rep.add(detail::compare(suite + "/" + h.id() + "/jacobi/" + tag, ids, suite, j, names, h.presentation().param,
                                  sw.ms()));
        });
        detail::guarded(rep, suite + "/" + h.id() + "/overlap/" + tag, ids, suite, [&] {
          Stopwatch sw;
          NC x = h.generator(names[c], order), y = h.generator(names[b], order), z = h.generator(names[a], order);
          NC diff = h.mul(h.mul(x, y), z) - h.mul(x, h.mul(y, z));
          rep.add(detail::compare(suite + "/" + h.id() + "/overlap/" + tag, ids, suite, diff, names,
                                  h.presentation().param, sw.ms()));
        });
      }
  return rep;
}

/// Δ([X,Y]) = [Δ(X), Δ(Y)] for every generator pair.
inline CheckReport check_coproduct_hom(HopfAlgebra& h, int order, const std::string& suite = "hopf") {
  CheckReport rep;
  const auto& names = h.names();
  const std::vector<std::string> ids{h.id()};
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      std::string id = suite + "/" + h.id() + "/coproduct_hom/" + detail::pair_label(names[a], names[b]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        auto ga = static_cast<Gen>(a), gb = static_cast<Gen>(b);
        Tensor lhs = h.delta(h.bracket(ga, gb, order));
        Tensor rhs = h.tcommutator(h.coproduct(ga, order), h.coproduct(gb, order));
        rep.add(detail::compare(id, ids, suite, lhs - rhs, names, h.presentation().param, sw.ms()));
      });
    }
  return rep;
}

/// (Δ⊗id)Δ(X) = (id⊗Δ)Δ(X) for every generator.
inline CheckReport check_coassoc(HopfAlgebra& h, int order, const std::string& suite = "hopf") {
  CheckReport rep;
  const auto& names = h.names();
  const std::vector<std::string> ids{h.id()};
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::string id = suite + "/" + h.id() + "/coassoc/" + names[a];
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      const Tensor& d = h.coproduct(static_cast<Gen>(a), order);
      Tensor diff = h.delta_left(d) - h.delta_right(d);
      rep.add(detail::compare(id, ids, suite, diff, names, h.presentation().param, sw.ms()));
    });
  }
  return rep;
}

/// Counit fixed to 0 on generators: (ε⊗id)Δ = id = (id⊗ε)Δ, and ε kills
/// every bracket.
inline CheckReport check_counit(HopfAlgebra& h, int order, const std::string& suite = "hopf") {
  CheckReport rep;
  const auto& names = h.names();
  const std::vector<std::string> ids{h.id()};
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::string id = suite + "/" + h.id() + "/counit/" + names[a];
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      const Tensor& d = h.coproduct(static_cast<Gen>(a), order);
      NC left(order), right(order);
      for (const auto& [k, c] : d.terms()) {
        if (k.slots[0].empty()) left.add_term(k.slots[1], c);
        if (k.slots[1].empty()) right.add_term(k.slots[0], c);
      }
      NC x = NC::generator(static_cast<Gen>(a), order);
      NC diff = (left - x) + (right - x);
      rep.add(detail::compare(id, ids, suite, diff, names, h.presentation().param, sw.ms()));
    });
  }
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      std::string id = suite + "/" + h.id() + "/counit_bracket/" + detail::pair_label(names[a], names[b]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        NC br = h.bracket(static_cast<Gen>(a), static_cast<Gen>(b), order);
        rep.add(detail::compare(id, ids, suite, NC::scalar(br.scalar_part()), names, h.presentation().param,
                                sw.ms()));
      });
    }
  return rep;
}

/// Antipode as generator images; S is extended as an anti-homomorphism.
class Antipode {
 public:
  Antipode(HopfAlgebra& h, std::map<Gen, NC> images, int order) : h_(h), images_(std::move(images)), order_(order) {}

  const std::map<Gen, NC>& images() const { return images_; }
  const NC& image(Gen g) const { return images_.at(g); }

  NC apply_word(const Word& w) {
    if (auto it = word_cache_.find(w); it != word_cache_.end()) return it->second;
    NC r = NC::one(order_);
    for (auto it = w.rbegin(); it != w.rend(); ++it) r = h_.mul(r, images_.at(*it));
    word_cache_.emplace(w, r);
    return r;
  }
  NC apply(const NC& x) {
    NC r(order_);
    for (const auto& [w, c] : x.terms()) r += apply_word(w).scaled(c);
    return r;
  }

 private:
  HopfAlgebra& h_;
  std::map<Gen, NC> images_;
  int order_;
  std::map<Word, NC> word_cache_;
};

/// Solves m(S⊗id)Δ(X) = 0 generator by generator. Each Δ(X) must read
/// X⊗g + (terms whose left factors only involve already solved generators)
/// with g invertible.
inline Antipode solve_antipode(HopfAlgebra& h, int order) {
  const auto& names = h.names();
  const int n = static_cast<int>(names.size());
  std::map<Gen, NC> solved;
  std::map<Word, NC> word_cache;
  auto s_word = [&](const Word& w) {
    NC r = NC::one(order);
    for (auto it = w.rbegin(); it != w.rend(); ++it) r = h.mul(r, solved.at(*it));
    return r;
  };
  while (static_cast<int>(solved.size()) < n) {
    bool progress = false;
    for (int x = 0; x < n; ++x) {
      auto gx = static_cast<Gen>(x);
      if (solved.count(gx)) continue;
      const Tensor& d = h.coproduct(gx, order);
      bool ready = true;
      NC g(order);
      for (const auto& [k, c] : d.terms()) {
        if (k.slots[0] == Word{gx}) {
          g.add_term(k.slots[1], c);
          continue;
        }
        for (Gen letter : k.slots[0])
          if (!solved.count(letter)) ready = false;
      }
      if (!ready) continue;
      if (g.is_zero())
        throw Error(ErrorCode::NoTriangularOrder, fmt::format("Δ({}) has no {}⊗g term", names[x], names[x]));
      NC acc(order);
      for (const auto& [k, c] : d.terms()) {
        if (k.slots[0] == Word{gx}) continue;
        acc += h.mul(s_word(k.slots[0]), NC::word(k.slots[1], order)).scaled(c);
      }
      NC sx = -h.mul(acc, h.evaluator().invert(g));
      solved.emplace(gx, sx);
      progress = true;
    }
    if (!progress) {
      std::string pending;
      for (int x = 0; x < n; ++x)
        if (!solved.count(static_cast<Gen>(x))) pending += (pending.empty() ? "" : ", ") + names[x];
      throw Error(ErrorCode::NoTriangularOrder, "no dependency order for the antipode of " + pending);
    }
  }
  return Antipode(h, std::move(solved), order);
}

/// Solves the antipode and verifies both antipode axioms and
/// S([X,Y]) = [S(Y), S(X)].
inline CheckReport check_antipode(HopfAlgebra& h, int order, const std::string& suite = "hopf") {
  CheckReport rep;
  const auto& names = h.names();
  const std::vector<std::string> ids{h.id()};
  std::optional<Antipode> s;
  try {
    Stopwatch sw;
    s.emplace(solve_antipode(h, order));
    CheckRecord r;
    r.check_id = suite + "/" + h.id() + "/antipode/solve";
    r.catalog_ids = ids;
    r.suite = suite;
    r.status = Status::Info;
    for (const auto& [g, img] : s->images())
      r.detail += (r.detail.empty() ? "" : "; ") + fmt::format("S({}) = {}", names[g], render(img, names, h.presentation().param));
    r.timing_ms = sw.ms();
    rep.add(r);
  } catch (const Error& e) {
    rep.add(detail::error_record(suite + "/" + h.id() + "/antipode/solve", ids, suite, e));
    return rep;
  }
  for (std::size_t a = 0; a < names.size(); ++a) {
    auto ga = static_cast<Gen>(a);
    for (int side = 0; side < 2; ++side) {
      std::string id = suite + "/" + h.id() + (side ? "/antipode_right/" : "/antipode_left/") + names[a];
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        const Tensor& d = h.coproduct(ga, order);
        NC acc(order);
        for (const auto& [k, c] : d.terms()) {
          NC term = side ? h.mul(NC::word(k.slots[0], order), s->apply_word(k.slots[1]))
                         : h.mul(s->apply_word(k.slots[0]), NC::word(k.slots[1], order));
          acc += term.scaled(c);
        }
        rep.add(detail::compare(id, ids, suite, acc, names, h.presentation().param, sw.ms()));
      });
    }
  }
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      std::string id = suite + "/" + h.id() + "/antipode_antihom/" + detail::pair_label(names[a], names[b]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        auto ga = static_cast<Gen>(a), gb = static_cast<Gen>(b);
        NC lhs = s->apply(h.bracket(ga, gb, order));
        NC rhs = h.commutator(s->image(gb), s->image(ga));
        rep.add(detail::compare(id, ids, suite, lhs - rhs, names, h.presentation().param, sw.ms()));
      });
    }
  return rep;
}

/// Full axiom suite for one presentation.
inline CheckReport check_hopf_axioms(HopfAlgebra& h, int order) {
  CheckReport rep;
  rep.append(verify_jacobi(h, order));
  rep.append(check_coproduct_hom(h, order));
  rep.append(check_coassoc(h, order));
  rep.append(check_counit(h, order));
  rep.append(check_antipode(h, order));
  return rep;
}

/// R-matrix properties of a tensor R living in `host`: intertwining on the
/// given images (required) and on the remaining generators (informational),
/// quantum Yang–Baxter, triangularity, and R = 1⊗1 + r + O(param²).
struct RMatrixTarget {
  std::vector<std::pair<std::string, NC>> required;
  std::vector<std::pair<std::string, NC>> informational;
};

inline CheckReport check_rmatrix_in(HopfAlgebra& host, const Tensor& R, const std::optional<Tensor>& r_order1,
                                    const RMatrixTarget& targets, const std::string& tag,
                                    const std::vector<std::string>& ids, const std::string& suite = "rmatrix") {
  CheckReport rep;
  const auto& names = host.names();
  const std::string& param = host.presentation().param;
  const int order = R.order();
  auto intertwine = [&](const std::string& label, const NC& x, bool required) {
    std::string id = suite + "/" + tag + "/intertwining/" + label;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      Tensor dx = host.delta(x);
      Tensor diff = host.tmul(R, dx) - host.tmul(dx.swapped(), R);
      CheckRecord rec = detail::compare(id, ids, suite, diff, names, param, sw.ms());
      if (!required) {
        rec.detail = rec.status == Status::Pass ? "holds (not required)" : "does not hold (not required)";
        rec.status = Status::Info;
      }
      rep.add(rec);
    });
  };
  for (const auto& [label, x] : targets.required) intertwine(label, x, true);
  for (const auto& [label, x] : targets.informational) intertwine(label, x, false);
  detail::guarded(rep, suite + "/" + tag + "/qybe", ids, suite, [&] {
    Stopwatch sw;
    Tensor r12 = R.embedded3(0, 1), r13 = R.embedded3(0, 2), r23 = R.embedded3(1, 2);
    Tensor lhs = host.tmul(host.tmul(r12, r13), r23);
    Tensor rhs = host.tmul(host.tmul(r23, r13), r12);
    rep.add(detail::compare(suite + "/" + tag + "/qybe", ids, suite, lhs - rhs, names, param, sw.ms()));
  });
  detail::guarded(rep, suite + "/" + tag + "/triangularity", ids, suite, [&] {
    Stopwatch sw;
    Tensor diff = host.tmul(R.swapped(), R) - Tensor::one(2, order);
    rep.add(detail::compare(suite + "/" + tag + "/triangularity", ids, suite, diff, names, param, sw.ms()));
  });
  if (r_order1) {
    detail::guarded(rep, suite + "/" + tag + "/classical_r", ids, suite, [&] {
      Stopwatch sw;
      Tensor first = R.truncated(1) - Tensor::one(2, 1);
      rep.add(
          detail::compare(suite + "/" + tag + "/classical_r", ids, suite, first - *r_order1, names, param, sw.ms()));
    });
  }
  return rep;
}

inline Tensor build_rmatrix(HopfAlgebra& h, int order) {
  if (!h.presentation().rmatrix)
    throw Error(ErrorCode::MissingRMatrixSpec, h.id() + " has no R-matrix specification");
  return h.evaluator().tensor(h.presentation().rmatrix, order);
}

inline CheckReport check_rmatrix(HopfAlgebra& h, int order) {
  const Presentation& p = h.presentation();
  Tensor R = build_rmatrix(h, order);
  std::optional<Tensor> r1;
  if (p.classical_r) r1 = h.evaluator().tensor(p.classical_r, 1);
  RMatrixTarget t;
  std::set<std::string> borel(p.borel.begin(), p.borel.end());
  for (const auto& g : p.generators) {
    auto entry = std::make_pair(g, h.generator(g, order));
    (borel.empty() || borel.count(g) ? t.required : t.informational).push_back(entry);
  }
  return check_rmatrix_in(h, R, r1, t, p.id, {p.id});
}

/// Δ(u^a) = u^a ⊗ u^a for each exponent a.
inline CheckReport check_grouplike_powers(HopfAlgebra& h, const ExprPtr& u, const std::vector<Rational>& exponents,
                                          int order, const std::string& suite = "hopf") {
  CheckReport rep;
  const std::vector<std::string> ids{h.id()};
  for (const auto& a : exponents) {
    std::string id = suite + "/" + h.id() + "/grouplike/" + to_string(a);
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      NC ua = h.evaluator().element(Expr::pow(u, a), order);
      Tensor diff = h.delta(ua) - Tensor::outer({&ua, &ua});
      rep.add(detail::compare(id, ids, suite, diff, h.names(), h.presentation().param, sw.ms(),
                              "u = " + to_string(*u)));
    });
  }
  return rep;
}

/// Degree-0 part of every bracket equals the classical table under the
/// renaming, and the degree-0 part of every coproduct is primitive.
inline CheckReport check_classical_limit(HopfAlgebra& src, HopfAlgebra& classical,
                                         const std::map<std::string, std::string>& rename,
                                         const std::string& suite = "classical") {
  CheckReport rep;
  const auto& names = src.names();
  const std::vector<std::string> ids{src.id(), classical.id()};
  auto to_target = [&](const NC& x) {
    NC r(0);
    for (const auto& [w, c] : x.terms()) {
      Word tw;
      for (Gen g : w) {
        auto it = rename.find(names[g]);
        if (it == rename.end())
          throw Error(ErrorCode::UnmappedGenerator, "classical limit has no image for '" + names[g] + "'");
        tw.push_back(classical.algebra().index(it->second));
      }
      NC w0 = normal_order(classical.algebra(), {{tw, Series::one(0)}}, 0);
      r += w0.scaled(c);
    }
    return r;
  };
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b) {
      std::string id = suite + "/" + src.id() + "/bracket/" + detail::pair_label(names[a], names[b]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        NC lim = to_target(src.bracket(static_cast<Gen>(a), static_cast<Gen>(b), 0));
        Gen ta = classical.algebra().index(rename.at(names[a]));
        Gen tb = classical.algebra().index(rename.at(names[b]));
        NC expect = classical.bracket(ta, tb, 0);
        rep.add(detail::compare(id, ids, suite, lim - expect, classical.names(), classical.presentation().param,
                                sw.ms()));
      });
    }
  for (std::size_t a = 0; a < names.size(); ++a) {
    std::string id = suite + "/" + src.id() + "/primitive/" + names[a];
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      auto ga = static_cast<Gen>(a);
      Tensor d0 = src.coproduct(ga, 0);
      NC x = NC::generator(ga, 0);
      NC one = NC::one(0);
      Tensor prim = Tensor::outer({&one, &x}) + Tensor::outer({&x, &one});
      rep.add(detail::compare(id, {src.id()}, suite, d0 - prim, names, src.presentation().param, sw.ms()));
    });
  }
  return rep;
}

/// Evaluator over the source algebra in which target symbols are bound to
/// their images.
inline Evaluator<Series> twist_evaluator(HopfAlgebra& source, const TwistMap& map) {
  return Evaluator<Series>(source.algebra(), Scope{source.presentation().params(), map.assignments},
                           source.presentation().params());
}

/// Brackets of images equal the target table; Δ of images equals the target
/// coproducts, both read in the source algebra.
inline CheckReport apply_twist(HopfAlgebra& source, const Presentation& target, const TwistMap& map, int order,
                               const std::string& suite = "twist") {
  CheckReport rep;
  const std::vector<std::string> ids{map.id, map.source, map.target};
  const auto& names = source.names();
  const std::string& param = source.presentation().param;
  for (const auto& g : target.generators)
    if (!map.assignments.count(g)) {
      rep.add(detail::error_record(suite + "/" + map.id + "/coverage/" + g, ids, suite,
                                   Error(ErrorCode::UnmappedGenerator, "target generator '" + g + "' has no image")));
      return rep;
    }
  Evaluator<Series> ev = twist_evaluator(source, map);
  const auto& tg = target.generators;
  for (std::size_t a = 0; a < tg.size(); ++a)
    for (std::size_t b = a + 1; b < tg.size(); ++b) {
      std::string id = suite + "/" + map.id + "/bracket/" + detail::pair_label(tg[a], tg[b]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        NC lhs = source.commutator(ev.binding(tg[a], order), ev.binding(tg[b], order));
        NC rhs(order);
        for (const auto& br : target.brackets) {
          if (br.left == tg[a] && br.right == tg[b]) rhs = ev.element(br.rhs, order);
          if (br.left == tg[b] && br.right == tg[a]) rhs = -ev.element(br.rhs, order);
        }
        rep.add(detail::compare(id, ids, suite, lhs - rhs, names, param, sw.ms()));
      });
    }
  for (const auto& g : tg) {
    std::string id = suite + "/" + map.id + "/coproduct/" + g;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      auto it = target.coproducts.find(g);
      if (it == target.coproducts.end())
        throw Error(ErrorCode::ValidationFailed, target.id + " has no coproduct for '" + g + "'");
      Tensor lhs = source.delta(ev.binding(g, order));
      Tensor rhs = ev.tensor(it->second, order);
      rep.add(detail::compare(id, ids, suite, lhs - rhs, names, param, sw.ms()));
    });
  }
  return rep;
}

/// Substituting the images into the inverse map gives back every source
/// generator.
inline CheckReport check_twist_inverse(HopfAlgebra& source, const TwistMap& map, int order,
                                       const std::string& suite = "twist") {
  CheckReport rep;
  const std::vector<std::string> ids{map.id, map.source};
  Evaluator<Series> ev = twist_evaluator(source, map);
  for (const auto& g : source.names()) {
    std::string id = suite + "/" + map.id + "/inverse/" + g;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      auto it = map.inverse.find(g);
      if (it == map.inverse.end())
        throw Error(ErrorCode::UnmappedGenerator, map.id + " inverse has no entry for '" + g + "'");
      NC back = ev.element(it->second, order);
      rep.add(detail::compare(id, ids, suite, back - source.generator(g, order), source.names(),
                              source.presentation().param, sw.ms()));
    });
  }
  return rep;
}

/// Two maps from the same source are equivalent when both reproduce target
/// tables that agree element by element; the maps themselves may differ.
inline CheckReport check_equivalent_twists(HopfAlgebra& source, HopfAlgebra& target_a, HopfAlgebra& target_b,
                                           const TwistMap& a, const TwistMap& b, int order,
                                           const std::string& suite = "twist") {
  CheckReport rep;
  const std::string tag = a.id + "~" + b.id;
  const std::vector<std::string> ids{a.id, b.id};
  if (a.source != b.source) {
    rep.add(detail::error_record(suite + "/" + tag + "/source", ids, suite,
                                 Error(ErrorCode::ValidationFailed, "maps have different sources")));
    return rep;
  }
  CheckReport ra = apply_twist(source, target_a.presentation(), a, order, suite);
  CheckReport rb = apply_twist(source, target_b.presentation(), b, order, suite);
  auto summary = [&](const std::string& what, const CheckReport& r, const TwistMap& m) {
    CheckRecord rec;
    rec.check_id = suite + "/" + tag + "/" + what + "/" + m.id;
    rec.catalog_ids = ids;
    rec.suite = suite;
    rec.status = r.passed() ? Status::Pass : Status::Fail;
    rec.residual = r.passed() ? "0" : fmt::format("{} failing checks", r.failures().size());
    rec.detail = fmt::format("{} reproduces {}", m.id, m.target);
    rep.add(rec);
  };
  summary("reproduces_target", ra, a);
  summary("reproduces_target", rb, b);

  const auto& ga = target_a.presentation().generators;
  for (std::size_t i = 0; i < ga.size(); ++i)
    for (std::size_t j = i + 1; j < ga.size(); ++j) {
      std::string id = suite + "/" + tag + "/bracket/" + detail::pair_label(ga[i], ga[j]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        NC ea = target_a.table_rhs(ga[i], ga[j], target_a.evaluator(), order);
        NC eb_native = target_b.table_rhs(ga[i], ga[j], target_b.evaluator(), order);
        // Compare through generator names so distinct target entries can match.
        NC eb(order);
        for (const auto& [w, c] : eb_native.terms()) {
          Word tw;
          for (Gen g : w) tw.push_back(target_a.algebra().index(target_b.names()[g]));
          eb += normal_order(target_a.algebra(), {{tw, c}}, order);
        }
        rep.add(detail::compare(id, ids, suite, ea - eb, target_a.names(), target_a.presentation().param, sw.ms()));
      });
    }
  for (const auto& g : ga) {
    std::string id = suite + "/" + tag + "/coproduct/" + g;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      Tensor ta = target_a.coproduct(target_a.algebra().index(g), order);
      Tensor tb_native = target_b.coproduct(target_b.algebra().index(g), order);
      Tensor tb(2, order);
      for (const auto& [k, c] : tb_native.terms()) {
        TensorKey key;
        for (int s = 0; s < 2; ++s)
          for (Gen x : k.slots[static_cast<std::size_t>(s)])
            key.slots[static_cast<std::size_t>(s)].push_back(target_a.algebra().index(target_b.names()[x]));
        std::vector<NC> parts;
        for (int s = 0; s < 2; ++s)
          parts.push_back(normal_order(target_a.algebra(), {{key.slots[static_cast<std::size_t>(s)], Series::one(order)}}, order));
        tb += Tensor::outer({&parts[0], &parts[1]}).scaled(c);
      }
      rep.add(detail::compare(id, ids, suite, ta - tb, target_a.names(), target_a.presentation().param, sw.ms()));
    });
  }
  // Images under the two maps, for the record.
  Evaluator<Series> eva = twist_evaluator(source, a);
  Evaluator<Series> evb = twist_evaluator(source, b);
  for (const auto& g : ga) {
    detail::guarded(rep, suite + "/" + tag + "/map_difference/" + g, ids, suite, [&] {
      NC diff = eva.binding(g, order) - evb.binding(g, order);
      CheckRecord rec;
      rec.check_id = suite + "/" + tag + "/map_difference/" + g;
      rec.catalog_ids = ids;
      rec.suite = suite;
      rec.status = Status::Info;
      rec.residual = render(diff, source.names(), source.presentation().param);
      rec.detail = diff.is_zero() ? "images agree" : "images differ";
      rep.add(rec);
    });
  }
  return rep;
}

/// Contracted structure constants: brackets and coproducts over the new
/// generators after the ε → 0 limit.
struct ContractionResult {
  std::vector<std::string> generators;
  std::map<std::pair<Gen, Gen>, NC> brackets;  // (i, j) with i > j
  std::map<Gen, Tensor> coproducts;
};

namespace detail {

inline NC eps_limit(const NCElement<EpsSeries>& x) {
  NC r(x.order());
  for (const auto& [w, c] : x.terms()) r.add_term(w, jordan::eps_limit(c));
  return r;
}

inline Tensor eps_limit(const TensorElement<EpsSeries>& x) {
  Tensor r(x.arity(), x.order());
  for (const auto& [k, c] : x.terms()) r.add_term(k, jordan::eps_limit(c));
  return r;
}

}  // namespace detail

/// Rewrites the source presentation in the scaled generators over
/// Laurent series in ε and takes ε → 0. Throws DivergentContraction naming
/// the offending bracket or coproduct.
inline ContractionResult contract(const Presentation& source, const Contraction& spec,
                                  const std::vector<std::string>& new_generators, int order,
                                  RewriteLimits limits = {}) {
  for (const auto& g : new_generators)
    if (!spec.scaling.count(g))
      throw Error(ErrorCode::UnmappedGenerator, spec.id + " has no scaling for '" + g + "'");
  std::map<std::string, const Scaling*> by_old;
  std::map<std::string, ExprPtr> old_to_new;
  for (const auto& [name, sc] : spec.scaling) {
    by_old[sc.old_generator] = &sc;
    // old = (1/c) ε^{-k} new
    old_to_new[sc.old_generator] =
        Expr::make(ExprKind::Mul, {Expr::number(Rational(1 / sc.coeff)), Expr::pow(Expr::symbol("eps"), Rational(-sc.eps_power)),
                                   Expr::symbol(name)});
  }
  std::map<std::string, ScalarMonomial> base{{source.param, {1, 1, 0}}, {"eps", {0 + 1, 0, 1}}};
  std::map<std::string, ScalarMonomial> outer{{source.param, spec.old_parameter}, {"eps", {1, 0, 1}}};
  const BracketTable table = source.table();
  std::map<std::string, std::string> new_of_old;
  for (const auto& [name, sc] : spec.scaling) new_of_old[sc.old_generator] = name;

  auto provider = [&](PbwAlgebra<EpsSeries>& alg, int i, int j, int ord) {
    const std::string& na = alg.generators()[static_cast<std::size_t>(i)];
    const std::string& nb = alg.generators()[static_cast<std::size_t>(j)];
    const Scaling& sa = spec.scaling.at(na);
    const Scaling& sb = spec.scaling.at(nb);
    Evaluator<EpsSeries> ev(alg, Scope{outer, old_to_new}, base);
    NCElement<EpsSeries> rhs(ord);
    if (auto it = table.find({sa.old_generator, sb.old_generator}); it != table.end())
      rhs = ev.element(it->second, ord);
    else if (auto it2 = table.find({sb.old_generator, sa.old_generator}); it2 != table.end())
      rhs = -ev.element(it2->second, ord);
    ScalarMonomial k{sa.coeff * sb.coeff, 0, sa.eps_power + sb.eps_power};
    return rhs.scaled(EpsSeries::from_monomial(k, ord));
  };
  PbwAlgebra<EpsSeries> alg(spec.id, new_generators, provider, limits);
  Evaluator<EpsSeries> ev(alg, Scope{outer, old_to_new}, base);

  ContractionResult out;
  out.generators = new_generators;
  const int n = static_cast<int>(new_generators.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      typename PbwAlgebra<EpsSeries>::FuelScope fuel(alg);
      auto raw = alg.bracket(static_cast<Gen>(i), static_cast<Gen>(j), order);
      try {
        out.brackets[{static_cast<Gen>(i), static_cast<Gen>(j)}] = detail::eps_limit(raw);
      } catch (const Error& e) {
        throw Error(e.code(),
                    fmt::format("[{}, {}]: {}", new_generators[static_cast<std::size_t>(i)],
                                new_generators[static_cast<std::size_t>(j)], e.message()),
                    spec.id, e.detail());
      }
    }
  for (int i = 0; i < n; ++i) {
    const std::string& name = new_generators[static_cast<std::size_t>(i)];
    const Scaling& sc = spec.scaling.at(name);
    auto it = source.coproducts.find(sc.old_generator);
    if (it == source.coproducts.end())
      throw Error(ErrorCode::ValidationFailed, source.id + " has no coproduct for '" + sc.old_generator + "'");
    auto raw = ev.tensor(it->second, order).scaled(
        EpsSeries::from_monomial(ScalarMonomial{sc.coeff, 0, sc.eps_power}, order));
    try {
      out.coproducts[static_cast<Gen>(i)] = detail::eps_limit(raw);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("Δ({}): {}", name, e.message()), spec.id, e.detail());
    }
  }
  return out;
}

/// Contracts and compares with the target presentation entry by entry.
inline CheckReport check_contraction(const Presentation& source, HopfAlgebra& target, const Contraction& spec,
                                     int order, const std::string& suite = "contraction") {
  CheckReport rep;
  const std::vector<std::string> ids{spec.id, spec.source, spec.target};
  Stopwatch sw;
  ContractionResult res;
  try {
    res = contract(source, spec, target.names(), order, target.algebra().limits());
  } catch (const Error& e) {
    rep.add(detail::error_record(suite + "/" + spec.id + "/limit", ids, suite, e));
    return rep;
  }
  CheckRecord lim;
  lim.check_id = suite + "/" + spec.id + "/limit";
  lim.catalog_ids = ids;
  lim.suite = suite;
  lim.detail = fmt::format("no negative eps powers survive; old parameter = {}*{}*eps", to_string(spec.old_parameter.coeff),
                           source.param);
  lim.timing_ms = sw.ms();
  rep.add(lim);
  const auto& names = target.names();
  for (const auto& [ij, value] : res.brackets) {
    std::string id = suite + "/" + spec.id + "/bracket/" + detail::pair_label(names[ij.first], names[ij.second]);
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch s2;
      NC expect = target.bracket(ij.first, ij.second, order);
      rep.add(detail::compare(id, ids, suite, value - expect, names, target.presentation().param, s2.ms()));
    });
  }
  for (const auto& [g, value] : res.coproducts) {
    std::string id = suite + "/" + spec.id + "/coproduct/" + names[g];
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch s2;
      rep.add(detail::compare(id, ids, suite, value - target.coproduct(g, order), names,
                              target.presentation().param, s2.ms()));
    });
  }
  return rep;
}

/// Evaluator over the big algebra with sub generators and parameter bound.
inline Evaluator<Series> embedding_evaluator(HopfAlgebra& big, const Presentation& sub, const Embedding& emb) {
  auto outer = big.presentation().params();
  outer[sub.param] = emb.parameter;
  return Evaluator<Series>(big.algebra(), Scope{outer, emb.rename}, big.presentation().params());
}

/// Brackets and coproducts of the sub presentation hold for the images in
/// the big one.
inline CheckReport check_subalgebra_embedding(HopfAlgebra& sub, HopfAlgebra& big, const Embedding& emb, int order,
                                              const std::string& suite = "embedding") {
  CheckReport rep;
  const std::vector<std::string> ids{emb.id, emb.sub, emb.big};
  const Presentation& sp = sub.presentation();
  Evaluator<Series> ev = embedding_evaluator(big, sp, emb);
  const auto& names = big.names();
  const std::string& param = big.presentation().param;
  const auto& sg = sp.generators;
  for (const auto& g : sg)
    if (!emb.rename.count(g)) {
      rep.add(detail::error_record(suite + "/" + emb.id + "/coverage/" + g, ids, suite,
                                   Error(ErrorCode::UnmappedGenerator, "sub generator '" + g + "' has no image")));
      return rep;
    }
  for (std::size_t a = 0; a < sg.size(); ++a)
    for (std::size_t b = a + 1; b < sg.size(); ++b) {
      std::string id = suite + "/" + emb.id + "/bracket/" + detail::pair_label(sg[a], sg[b]);
      detail::guarded(rep, id, ids, suite, [&] {
        Stopwatch sw;
        NC lhs = big.commutator(ev.binding(sg[a], order), ev.binding(sg[b], order));
        NC rhs = sub.table_rhs(sg[a], sg[b], ev, order);
        rep.add(detail::compare(id, ids, suite, lhs - rhs, names, param, sw.ms()));
      });
    }
  for (const auto& g : sg) {
    std::string id = suite + "/" + emb.id + "/coproduct/" + g;
    detail::guarded(rep, id, ids, suite, [&] {
      Stopwatch sw;
      Tensor lhs = big.delta(ev.binding(g, order));
      Tensor rhs = ev.tensor(sp.coproducts.at(g), order);
      rep.add(detail::compare(id, ids, suite, lhs - rhs, names, param, sw.ms()));
    });
  }
  return rep;
}

/// The sub presentation's R-matrix transported into the big algebra.
inline CheckReport check_embedded_rmatrix(HopfAlgebra& sub, HopfAlgebra& big, const Embedding& emb, int order,
                                          const std::string& suite = "rmatrix") {
  const Presentation& sp = sub.presentation();
  if (!sp.rmatrix) throw Error(ErrorCode::MissingRMatrixSpec, sp.id + " has no R-matrix specification");
  Evaluator<Series> ev = embedding_evaluator(big, sp, emb);
  Tensor R = ev.tensor(sp.rmatrix, order);
  std::optional<Tensor> r1;
  if (emb.classical_r) r1 = big.evaluator().tensor(emb.classical_r, 1);
  RMatrixTarget t;
  std::set<std::string> borel(emb.borel.begin(), emb.borel.end());
  for (const auto& g : sp.generators)
    if (borel.empty() || borel.count(g)) t.required.emplace_back(g, ev.binding(g, order));
  for (const auto& g : big.presentation().generators) t.informational.emplace_back(g, big.generator(g, order));
  return check_rmatrix_in(big, R, r1, t, emb.id, {emb.id, emb.sub, emb.big}, suite);
}

}  // namespace jordan
