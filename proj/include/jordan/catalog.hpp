#pragma once

// Catalog of algebraic and operator data, loaded from multi-document YAML.
// One document per entry; each carries `id`, `kind`, `paper_label`,
// `source_text` and `definition`. Macros are expanded at load time, so a
// loaded entry never mentions a macro name.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "jordan/error.hpp"
#include "jordan/expr.hpp"
#include "jordan/presentation.hpp"
#include "jordan/rational.hpp"

namespace jordan {

enum class EntryKind { Presentation, Twist, Contraction, Embedding, Realization, Casimir, SymmetryTable };

inline std::string_view to_string(EntryKind k) {
  switch (k) {
    case EntryKind::Presentation: return "presentation";
    case EntryKind::Twist: return "twist";
    case EntryKind::Contraction: return "contraction";
    case EntryKind::Embedding: return "embedding";
    case EntryKind::Realization: return "realization";
    case EntryKind::Casimir: return "casimir";
    case EntryKind::SymmetryTable: return "symmetry_table";
  }
  return "presentation";
}

inline std::optional<EntryKind> parse_kind(std::string_view s) {
  for (auto k : {EntryKind::Presentation, EntryKind::Twist, EntryKind::Contraction, EntryKind::Embedding,
                 EntryKind::Realization, EntryKind::Casimir, EntryKind::SymmetryTable})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Difference-differential realization of a presentation's generators.
/// Operator symbols: x t dx dt Tx Tt Dx Dt plus parameters sigma tau m and
/// any `let` names, which are expanded in place.
struct Realization {
  std::string id;
  std::string presentation;
  std::string param;                            // lattice step: "sigma" or "tau" (empty if none)
  std::vector<std::pair<std::string, ExprPtr>> lets;
  std::vector<std::pair<std::string, ExprPtr>> operators;  // generator order
  std::optional<std::string> continuum;         // classical realization reached at step 0
  std::map<std::string, std::string> continuum_rename;

  const ExprPtr* find(const std::string& g) const {
    for (const auto& [name, e] : operators)
      if (name == g) return &e;
    return nullptr;
  }
};

/// Casimir element with its expected realized forms.
struct Casimir {
  std::string id;
  std::string presentation;
  ExprPtr element;
  std::map<std::string, ExprPtr> realized;  // realization id -> operator
};

/// E·O − O·E = Λ·E for each generator O; absent generators have Λ = 0.
struct SymmetryTable {
  std::string id;
  std::string realization;
  std::string casimir;
  std::map<std::string, ExprPtr> lambda;
};

using Payload = std::variant<Presentation, TwistMap, Contraction, Embedding, Realization, Casimir, SymmetryTable>;

struct CatalogEntry {
  std::string id;
  EntryKind kind = EntryKind::Presentation;
  std::string label;        // reference equation label(s), e.g. "(gb) (gc)"
  std::string source_text;  // transcription kept for audit
  Payload payload;
  std::string location;     // file:line of the document

  template <class T>
  const T& as() const {
    if (auto p = std::get_if<T>(&payload)) return *p;
    throw Error(ErrorCode::TypeMismatch, fmt::format("entry '{}' is a {}", id, to_string(kind)), location);
  }
  /// Individual labels such as "(gb)".
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    static const std::regex re(R"(\([a-z]+\))");
    for (auto it = std::sregex_iterator(label.begin(), label.end(), re); it != std::sregex_iterator(); ++it)
      out.push_back(it->str());
    return out;
  }
};

// ---------------------------------------------------------------- equality

namespace detail {

inline bool equal_maps(const std::map<std::string, ExprPtr>& a, const std::map<std::string, ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first || !equal(ia->second, ib->second)) return false;
  return true;
}

inline bool equal_lists(const std::vector<std::pair<std::string, ExprPtr>>& a,
                        const std::vector<std::pair<std::string, ExprPtr>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].first != b[i].first || !equal(a[i].second, b[i].second)) return false;
  return true;
}

inline bool same(const ScalarMonomial& a, const ScalarMonomial& b) {
  return a.coeff == b.coeff && a.z_power == b.z_power && a.eps_power == b.eps_power;
}

inline bool same(const Presentation& a, const Presentation& b) {
  if (a.id != b.id || a.param != b.param || a.generators != b.generators || a.borel != b.borel) return false;
  if (a.brackets.size() != b.brackets.size()) return false;
  for (std::size_t i = 0; i < a.brackets.size(); ++i)
    if (a.brackets[i].left != b.brackets[i].left || a.brackets[i].right != b.brackets[i].right ||
        !equal(a.brackets[i].rhs, b.brackets[i].rhs))
      return false;
  if (!equal_maps(a.coproducts, b.coproducts) || !equal(a.rmatrix, b.rmatrix) ||
      !equal(a.classical_r, b.classical_r))
    return false;
  if (a.grouplike.has_value() != b.grouplike.has_value()) return false;
  if (a.grouplike && (!equal(a.grouplike->element, b.grouplike->element) ||
                      a.grouplike->exponents != b.grouplike->exponents))
    return false;
  if (a.classical.has_value() != b.classical.has_value()) return false;
  return !a.classical || (a.classical->target == b.classical->target && a.classical->rename == b.classical->rename);
}

inline bool same(const TwistMap& a, const TwistMap& b) {
  return a.id == b.id && a.source == b.source && a.target == b.target && equal_maps(a.assignments, b.assignments) &&
         equal_maps(a.inverse, b.inverse);
}

inline bool same(const Contraction& a, const Contraction& b) {
  if (a.id != b.id || a.source != b.source || a.target != b.target || !same(a.old_parameter, b.old_parameter))
    return false;
  if (a.scaling.size() != b.scaling.size()) return false;
  for (auto ia = a.scaling.begin(), ib = b.scaling.begin(); ia != a.scaling.end(); ++ia, ++ib)
    if (ia->first != ib->first || ia->second.old_generator != ib->second.old_generator ||
        ia->second.coeff != ib->second.coeff || ia->second.eps_power != ib->second.eps_power)
      return false;
  if (a.diagram.has_value() != b.diagram.has_value()) return false;
  return !a.diagram || (a.diagram->contraction == b.diagram->contraction && a.diagram->twist == b.diagram->twist);
}

inline bool same(const Embedding& a, const Embedding& b) {
  return a.id == b.id && a.sub == b.sub && a.big == b.big && equal_maps(a.rename, b.rename) &&
         same(a.parameter, b.parameter) && equal(a.classical_r, b.classical_r) && a.borel == b.borel;
}

inline bool same(const Realization& a, const Realization& b) {
  return a.id == b.id && a.presentation == b.presentation && a.param == b.param && equal_lists(a.lets, b.lets) &&
         equal_lists(a.operators, b.operators) && a.continuum == b.continuum &&
         a.continuum_rename == b.continuum_rename;
}

inline bool same(const Casimir& a, const Casimir& b) {
  return a.id == b.id && a.presentation == b.presentation && equal(a.element, b.element) &&
         equal_maps(a.realized, b.realized);
}

inline bool same(const SymmetryTable& a, const SymmetryTable& b) {
  return a.id == b.id && a.realization == b.realization && a.casimir == b.casimir && equal_maps(a.lambda, b.lambda);
}

}  // namespace detail

inline bool operator==(const CatalogEntry& a, const CatalogEntry& b) {
  if (a.id != b.id || a.kind != b.kind || a.label != b.label || a.source_text != b.source_text ||
      a.payload.index() != b.payload.index())
    return false;
  return std::visit(
      [&](const auto& pa) {
        using T = std::decay_t<decltype(pa)>;
        return detail::same(pa, std::get<T>(b.payload));
      },
      a.payload);
}

// ----------------------------------------------------------------- parsing

namespace detail {

class DocReader {
 public:
  DocReader(std::string file) : file_(std::move(file)) {}

  std::string where(const YAML::Node& n) const {
    return n.Mark().is_null() ? file_ : fmt::format("{}:{}", file_, n.Mark().line + 1);
  }
  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw Error(ErrorCode::ValidationFailed, fmt::format("{}: {}", where(n), msg), where(n));
  }

  YAML::Node need(const YAML::Node& n, const char* key) const {
    if (!n.IsMap()) fail(n, "expected a mapping");
    YAML::Node v = n[key];
    if (!v) fail(n, fmt::format("missing field '{}'", key));
    return v;
  }
  std::string str(const YAML::Node& n) const {
    if (!n.IsScalar()) fail(n, "expected a scalar");
    return n.Scalar();
  }
  std::string str(const YAML::Node& n, const char* key) const { return str(need(n, key)); }
  std::string str_or(const YAML::Node& n, const char* key, std::string fallback) const {
    return n[key] ? str(n[key]) : fallback;
  }
  std::vector<std::string> strings(const YAML::Node& n) const {
    if (!n.IsSequence()) fail(n, "expected a sequence");
    std::vector<std::string> out;
    for (const auto& x : n) out.push_back(str(x));
    return out;
  }
  std::map<std::string, std::string> string_map(const YAML::Node& n) const {
    if (!n.IsMap()) fail(n, "expected a mapping");
    std::map<std::string, std::string> out;
    for (const auto& kv : n) out[str(kv.first)] = str(kv.second);
    return out;
  }
  Rational rational(const YAML::Node& n) const {
    try {
      return parse_rational(str(n));
    } catch (const Error& e) {
      fail(n, e.message());
    }
  }
  int integer(const YAML::Node& n) const {
    Rational q = rational(n);
    if (!is_integer(q)) fail(n, "expected an integer");
    return static_cast<int>(q.get_num().get_si());
  }

  /// Parses an expression and expands macros.
  ExprPtr expr(const YAML::Node& n) const {
    std::string text = str(n);
    try {
      return expand(parse_expr(text));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", where(n), e.message()), where(n));
    }
  }
  ExprPtr expand(const ExprPtr& e) const {
    // Macros may refer to earlier macros; they were expanded when defined.
    return macros_.empty() ? e : substitute(e, macros_);
  }

  void set_macros(const YAML::Node& n) {
    macros_.clear();
    if (!n) return;
    if (!n.IsSequence()) fail(n, "macros must be a sequence of single-key mappings");
    for (const auto& item : n) {
      if (!item.IsMap() || item.size() != 1) fail(item, "macro must be a single-key mapping");
      auto kv = *item.begin();
      macros_[str(kv.first)] = expr(kv.second);
    }
  }
  const std::map<std::string, ExprPtr>& macros() const { return macros_; }

  ScalarMonomial monomial(const YAML::Node& n, const std::string& param) const {
    // coeff * param^k (* eps^j): accepted shapes are c, c*param, c*param*eps.
    ExprPtr e = expr(n);
    ScalarMonomial m{1, 0, 0};
    std::function<void(const ExprPtr&, bool)> walk = [&](const ExprPtr& x, bool inv) {
      switch (x->kind) {
        case ExprKind::Number:
          if (sgn(x->value) == 0) fail(n, "monomial coefficient is zero");
          m.coeff = inv ? Rational(m.coeff / x->value) : Rational(m.coeff * x->value);
          return;
        case ExprKind::Neg: m.coeff = -m.coeff; walk(x->args[0], inv); return;
        case ExprKind::Symbol: {
          int s = inv ? -1 : 1;
          if (x->name == param) m.z_power += s;
          else if (x->name == "eps") m.eps_power += s;
          else fail(n, "unexpected symbol '" + x->name + "' in monomial");
          return;
        }
        case ExprKind::Mul: for (const auto& a : x->args) walk(a, inv); return;
        case ExprKind::Div: walk(x->args[0], inv); walk(x->args[1], !inv); return;
        case ExprKind::Pow:
          if (!is_integer(x->value) || x->args[0]->kind != ExprKind::Symbol) fail(n, "bad power in monomial");
          for (long k = 0; k < std::abs(x->value.get_num().get_si()); ++k)
            walk(x->args[0], inv != (sgn(x->value) < 0));
          return;
        default: fail(n, "not a monomial: " + to_string(*x));
      }
    };
    walk(e, false);
    return m;
  }

 private:
  std::string file_;
  std::map<std::string, ExprPtr> macros_;
};

inline void check_symbols(const DocReader& r, const YAML::Node& n, const ExprPtr& e, const std::set<std::string>& allowed,
                          const std::string& what) {
  for (const auto& s : symbols_of(e))
    if (!allowed.count(s)) r.fail(n, fmt::format("unknown symbol '{}' in {}", s, what));
}

inline std::set<std::string> operator_symbols() {
  return {"x", "t", "dx", "dt", "Tx", "Tt", "Dx", "Dt", "sigma", "tau", "m"};
}

inline Presentation read_presentation(DocReader& r, const std::string& id, const YAML::Node& d) {
  Presentation p;
  p.id = id;
  p.param = r.str_or(d, "param", "z");
  p.generators = r.strings(r.need(d, "generators"));
  std::set<std::string> gens(p.generators.begin(), p.generators.end());
  if (gens.size() != p.generators.size()) r.fail(d["generators"], "duplicate generator");
  if (gens.count(p.param)) r.fail(d["generators"], "generator shadows the parameter");
  r.set_macros(d["macros"]);
  std::set<std::string> allowed = gens;
  allowed.insert(p.param);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& b : r.need(d, "brackets")) {
    auto items = r.strings(b);
    if (items.size() != 3) r.fail(b, "bracket must be [left, right, rhs]");
    if (!gens.count(items[0]) || !gens.count(items[1])) r.fail(b, "bracket references an unknown generator");
    if (items[0] == items[1]) r.fail(b, "bracket of a generator with itself");
    auto key = std::minmax(items[0], items[1]);
    if (!seen.insert({key.first, key.second}).second) r.fail(b, "duplicate bracket");
    ExprPtr rhs = r.expr(b[2]);
    check_symbols(r, b[2], rhs, allowed, "bracket");
    p.brackets.push_back({items[0], items[1], rhs});
  }
  YAML::Node cop = r.need(d, "coproducts");
  for (const auto& kv : cop) {
    std::string g = r.str(kv.first);
    if (!gens.count(g)) r.fail(kv.first, "coproduct of unknown generator '" + g + "'");
    ExprPtr e = r.expr(kv.second);
    check_symbols(r, kv.second, e, allowed, "coproduct");
    p.coproducts[g] = e;
  }
  for (const auto& g : p.generators)
    if (!p.coproducts.count(g)) r.fail(cop, "missing coproduct for '" + g + "'");
  if (d["rmatrix"]) {
    p.rmatrix = r.expr(d["rmatrix"]);
    check_symbols(r, d["rmatrix"], p.rmatrix, allowed, "rmatrix");
  }
  if (d["classical_r"]) {
    p.classical_r = r.expr(d["classical_r"]);
    check_symbols(r, d["classical_r"], p.classical_r, allowed, "classical_r");
  }
  if (d["borel"]) {
    p.borel = r.strings(d["borel"]);
    for (const auto& g : p.borel)
      if (!gens.count(g)) r.fail(d["borel"], "unknown borel generator '" + g + "'");
  }
  if (auto gl = d["grouplike"]) {
    Presentation::Grouplike g;
    g.element = r.expr(r.need(gl, "element"));
    check_symbols(r, gl["element"], g.element, allowed, "grouplike");
    for (const auto& x : r.need(gl, "exponents")) g.exponents.push_back(r.rational(x));
    p.grouplike = g;
  }
  if (auto cl = d["classical"]) {
    Presentation::Classical c;
    c.target = r.str(cl, "target");
    c.rename = r.string_map(r.need(cl, "rename"));
    for (const auto& g : p.generators)
      if (!c.rename.count(g)) r.fail(cl, "classical rename misses '" + g + "'");
    p.classical = c;
  }
  return p;
}

inline std::map<std::string, ExprPtr> read_expr_map(DocReader& r, const YAML::Node& n) {
  if (!n.IsMap()) r.fail(n, "expected a mapping");
  std::map<std::string, ExprPtr> out;
  for (const auto& kv : n) out[r.str(kv.first)] = r.expr(kv.second);
  return out;
}

inline TwistMap read_twist(DocReader& r, const std::string& id, const YAML::Node& d) {
  TwistMap m;
  m.id = id;
  m.source = r.str(d, "source");
  m.target = r.str(d, "target");
  r.set_macros(d["macros"]);
  m.assignments = read_expr_map(r, r.need(d, "images"));
  if (d["inverse"]) m.inverse = read_expr_map(r, d["inverse"]);
  return m;
}

inline Contraction read_contraction(DocReader& r, const std::string& id, const YAML::Node& d) {
  Contraction c;
  c.id = id;
  c.source = r.str(d, "source");
  c.target = r.str(d, "target");
  for (const auto& kv : r.need(d, "scaling")) {
    Scaling s;
    s.old_generator = r.str(kv.second, "old");
    s.coeff = r.rational(r.need(kv.second, "coeff"));
    if (sgn(s.coeff) == 0) r.fail(kv.second, "zero scaling coefficient");
    s.eps_power = r.integer(r.need(kv.second, "eps_power"));
    c.scaling[r.str(kv.first)] = s;
  }
  std::string param = r.str_or(d, "param", "z");
  if (d["old_parameter"]) c.old_parameter = r.monomial(d["old_parameter"], param);
  if (auto dg = d["diagram"]) c.diagram = Contraction::Diagram{r.str(dg, "contraction"), r.str(dg, "twist")};
  return c;
}

inline Embedding read_embedding(DocReader& r, const std::string& id, const YAML::Node& d) {
  Embedding e;
  e.id = id;
  e.sub = r.str(d, "sub");
  e.big = r.str(d, "big");
  r.set_macros(d["macros"]);
  e.rename = read_expr_map(r, r.need(d, "images"));
  e.parameter = r.monomial(r.need(d, "parameter"), r.str(d, "big_param"));
  if (d["classical_r"]) e.classical_r = r.expr(d["classical_r"]);
  if (d["borel"]) e.borel = r.strings(d["borel"]);
  return e;
}

inline std::vector<std::pair<std::string, ExprPtr>> read_expr_list(DocReader& r, const YAML::Node& n) {
  if (!n.IsSequence()) r.fail(n, "expected a sequence of single-key mappings");
  std::vector<std::pair<std::string, ExprPtr>> out;
  for (const auto& item : n) {
    if (!item.IsMap() || item.size() != 1) r.fail(item, "expected a single-key mapping");
    auto kv = *item.begin();
    out.emplace_back(r.str(kv.first), r.expr(kv.second));
  }
  return out;
}

inline Realization read_realization(DocReader& r, const std::string& id, const YAML::Node& d) {
  Realization re;
  re.id = id;
  re.presentation = r.str(d, "presentation");
  re.param = r.str_or(d, "param", "");
  r.set_macros(d["macros"]);
  std::set<std::string> allowed = operator_symbols();
  if (d["let"]) {
    re.lets = read_expr_list(r, d["let"]);
    for (const auto& [name, e] : re.lets) {
      check_symbols(r, d["let"], e, allowed, "let");
      allowed.insert(name);
    }
  }
  re.operators = read_expr_list(r, r.need(d, "operators"));
  std::set<std::string> names;
  for (const auto& [name, e] : re.operators) {
    if (!names.insert(name).second) r.fail(d["operators"], "duplicate operator '" + name + "'");
    check_symbols(r, d["operators"], e, allowed, "operator " + name);
  }
  if (auto c = d["continuum"]) {
    re.continuum = r.str(c, "target");
    if (c["rename"]) re.continuum_rename = r.string_map(c["rename"]);
  }
  return re;
}

inline Casimir read_casimir(DocReader& r, const std::string& id, const YAML::Node& d) {
  Casimir c;
  c.id = id;
  c.presentation = r.str(d, "presentation");
  r.set_macros(d["macros"]);
  c.element = r.expr(r.need(d, "element"));
  if (d["realized"]) {
    c.realized = read_expr_map(r, d["realized"]);
    for (const auto& [rid, e] : c.realized) check_symbols(r, d["realized"], e, operator_symbols(), "realized form");
  }
  return c;
}

inline SymmetryTable read_symmetry(DocReader& r, const std::string& id, const YAML::Node& d) {
  SymmetryTable s;
  s.id = id;
  s.realization = r.str(d, "realization");
  s.casimir = r.str(d, "casimir");
  r.set_macros(d["macros"]);
  if (d["lambda"]) s.lambda = read_expr_map(r, d["lambda"]);
  for (const auto& [g, e] : s.lambda) check_symbols(r, d["lambda"], e, operator_symbols(), "lambda for " + g);
  return s;
}

}  // namespace detail

/// Parses one YAML document into a validated entry.
inline CatalogEntry parse_entry(const YAML::Node& doc, const std::string& file) {
  detail::DocReader r(file);
  CatalogEntry e;
  e.location = r.where(doc);
  e.id = r.str(doc, "id");
  std::string kind = r.str(doc, "kind");
  auto k = parse_kind(kind);
  if (!k) r.fail(doc["kind"], "unknown kind '" + kind + "'");
  e.kind = *k;
  e.label = r.str_or(doc, "paper_label", "");
  e.source_text = r.str_or(doc, "source_text", "");
  YAML::Node d = r.need(doc, "definition");
  switch (e.kind) {
    case EntryKind::Presentation: e.payload = detail::read_presentation(r, e.id, d); break;
    case EntryKind::Twist: e.payload = detail::read_twist(r, e.id, d); break;
    case EntryKind::Contraction: e.payload = detail::read_contraction(r, e.id, d); break;
    case EntryKind::Embedding: e.payload = detail::read_embedding(r, e.id, d); break;
    case EntryKind::Realization: e.payload = detail::read_realization(r, e.id, d); break;
    case EntryKind::Casimir: e.payload = detail::read_casimir(r, e.id, d); break;
    case EntryKind::SymmetryTable: e.payload = detail::read_symmetry(r, e.id, d); break;
  }
  return e;
}

// ------------------------------------------------------------ serializing

namespace detail {

inline std::string monomial_text(const ScalarMonomial& m, const std::string& param) {
  std::string s = to_string(m.coeff);
  if (m.z_power) s += m.z_power == 1 ? "*" + param : fmt::format("*{}^({})", param, m.z_power);
  if (m.eps_power) s += m.eps_power == 1 ? "*eps" : fmt::format("*eps^({})", m.eps_power);
  return s;
}

inline void emit_expr_map(YAML::Emitter& out, const std::map<std::string, ExprPtr>& m) {
  out << YAML::BeginMap;
  for (const auto& [k, v] : m) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << to_string(v);
  out << YAML::EndMap;
}

inline void emit_expr_list(YAML::Emitter& out, const std::vector<std::pair<std::string, ExprPtr>>& l) {
  out << YAML::BeginSeq;
  for (const auto& [k, v] : l)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << to_string(v)
        << YAML::EndMap;
  out << YAML::EndSeq;
}

inline void emit(YAML::Emitter& out, const Presentation& p) {
  out << YAML::Key << "param" << YAML::Value << p.param;
  out << YAML::Key << "generators" << YAML::Value << YAML::Flow << p.generators;
  out << YAML::Key << "brackets" << YAML::Value << YAML::BeginSeq;
  for (const auto& b : p.brackets)
    out << YAML::Flow << YAML::BeginSeq << b.left << b.right << YAML::DoubleQuoted << to_string(b.rhs)
        << YAML::EndSeq;
  out << YAML::EndSeq;
  out << YAML::Key << "coproducts" << YAML::Value;
  emit_expr_map(out, p.coproducts);
  if (p.rmatrix) out << YAML::Key << "rmatrix" << YAML::Value << YAML::DoubleQuoted << to_string(p.rmatrix);
  if (p.classical_r)
    out << YAML::Key << "classical_r" << YAML::Value << YAML::DoubleQuoted << to_string(p.classical_r);
  if (!p.borel.empty()) out << YAML::Key << "borel" << YAML::Value << YAML::Flow << p.borel;
  if (p.grouplike) {
    out << YAML::Key << "grouplike" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "element" << YAML::Value << YAML::DoubleQuoted << to_string(p.grouplike->element);
    out << YAML::Key << "exponents" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& x : p.grouplike->exponents) out << to_string(x);
    out << YAML::EndSeq << YAML::EndMap;
  }
  if (p.classical) {
    out << YAML::Key << "classical" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "target" << YAML::Value << p.classical->target;
    out << YAML::Key << "rename" << YAML::Value << YAML::Flow << p.classical->rename;
    out << YAML::EndMap;
  }
}

inline void emit(YAML::Emitter& out, const TwistMap& m) {
  out << YAML::Key << "source" << YAML::Value << m.source;
  out << YAML::Key << "target" << YAML::Value << m.target;
  out << YAML::Key << "images" << YAML::Value;
  emit_expr_map(out, m.assignments);
  if (!m.inverse.empty()) {
    out << YAML::Key << "inverse" << YAML::Value;
    emit_expr_map(out, m.inverse);
  }
}

inline void emit(YAML::Emitter& out, const Contraction& c) {
  out << YAML::Key << "source" << YAML::Value << c.source;
  out << YAML::Key << "target" << YAML::Value << c.target;
  out << YAML::Key << "scaling" << YAML::Value << YAML::BeginMap;
  for (const auto& [name, s] : c.scaling) {
    out << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "old" << YAML::Value << s.old_generator;
    out << YAML::Key << "coeff" << YAML::Value << to_string(s.coeff);
    out << YAML::Key << "eps_power" << YAML::Value << s.eps_power;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "old_parameter" << YAML::Value << monomial_text(c.old_parameter, "z");
  if (c.diagram) {
    out << YAML::Key << "diagram" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "contraction" << YAML::Value << c.diagram->contraction;
    out << YAML::Key << "twist" << YAML::Value << c.diagram->twist << YAML::EndMap;
  }
}

inline void emit(YAML::Emitter& out, const Embedding& e) {
  out << YAML::Key << "sub" << YAML::Value << e.sub;
  out << YAML::Key << "big" << YAML::Value << e.big;
  out << YAML::Key << "big_param" << YAML::Value << "p";
  out << YAML::Key << "parameter" << YAML::Value << monomial_text(e.parameter, "p");
  out << YAML::Key << "images" << YAML::Value;
  emit_expr_map(out, e.rename);
  if (e.classical_r)
    out << YAML::Key << "classical_r" << YAML::Value << YAML::DoubleQuoted << to_string(e.classical_r);
  if (!e.borel.empty()) out << YAML::Key << "borel" << YAML::Value << YAML::Flow << e.borel;
}

inline void emit(YAML::Emitter& out, const Realization& re) {
  out << YAML::Key << "presentation" << YAML::Value << re.presentation;
  if (!re.param.empty()) out << YAML::Key << "param" << YAML::Value << re.param;
  if (!re.lets.empty()) {
    out << YAML::Key << "let" << YAML::Value;
    emit_expr_list(out, re.lets);
  }
  out << YAML::Key << "operators" << YAML::Value;
  emit_expr_list(out, re.operators);
  if (re.continuum) {
    out << YAML::Key << "continuum" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "target" << YAML::Value << *re.continuum;
    if (!re.continuum_rename.empty())
      out << YAML::Key << "rename" << YAML::Value << YAML::Flow << re.continuum_rename;
    out << YAML::EndMap;
  }
}

inline void emit(YAML::Emitter& out, const Casimir& c) {
  out << YAML::Key << "presentation" << YAML::Value << c.presentation;
  out << YAML::Key << "element" << YAML::Value << YAML::DoubleQuoted << to_string(c.element);
  if (!c.realized.empty()) {
    out << YAML::Key << "realized" << YAML::Value;
    emit_expr_map(out, c.realized);
  }
}

inline void emit(YAML::Emitter& out, const SymmetryTable& s) {
  out << YAML::Key << "realization" << YAML::Value << s.realization;
  out << YAML::Key << "casimir" << YAML::Value << s.casimir;
  out << YAML::Key << "lambda" << YAML::Value;
  emit_expr_map(out, s.lambda);
}

}  // namespace detail

/// Canonical single-document text; parse_entry of it yields an equal entry.
inline std::string serialize(const CatalogEntry& e) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << e.id;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(e.kind));
  out << YAML::Key << "paper_label" << YAML::Value << YAML::DoubleQuoted << e.label;
  out << YAML::Key << "source_text" << YAML::Value << YAML::DoubleQuoted << e.source_text;
  out << YAML::Key << "definition" << YAML::Value << YAML::BeginMap;
  std::visit([&](const auto& p) { detail::emit(out, p); }, e.payload);
  out << YAML::EndMap << YAML::EndMap;
  return out.c_str();
}

// ----------------------------------------------------------------- catalog

/// Immutable after construction; safe to share across threads.
class Catalog {
 public:
  Catalog() = default;

  /// Loads every *.yaml under `dir` in file-name order.
  static Catalog load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
      throw Error(ErrorCode::ValidationFailed, "catalog directory not found: " + dir.string(), dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(dir))
      if (f.is_regular_file() && f.path().extension() == ".yaml") files.push_back(f.path());
    std::sort(files.begin(), files.end());
    Catalog c;
    for (const auto& f : files) {
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      c.add_text(ss.str(), f.filename().string());
    }
    c.validate_references();
    return c;
  }

  static Catalog from_string(const std::string& text, const std::string& file = "<memory>") {
    Catalog c;
    c.add_text(text, file);
    c.validate_references();
    return c;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& id) const { return entries_.count(id) != 0; }

  const CatalogEntry& load(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(ErrorCode::UnknownEntry, "no catalog entry '" + id + "'", id);
    return it->second;
  }
  template <class T>
  const T& get(const std::string& id) const {
    return load(id).as<T>();
  }

  std::vector<std::string> list(std::optional<EntryKind> kind = std::nullopt) const {
    std::vector<std::string> out;
    for (const auto& id : order_)
      if (!kind || entries_.at(id).kind == *kind) out.push_back(id);
    return out;
  }

  /// Labels that must be covered, and those declared out of scope.
  const std::vector<std::string>& required_labels() const { return required_labels_; }
  const std::map<std::string, std::string>& out_of_scope() const { return out_of_scope_; }

  /// Required labels with neither an entry nor an out-of-scope marker.
  std::vector<std::string> uncovered_labels() const {
    std::set<std::string> covered;
    for (const auto& [id, e] : entries_)
      for (const auto& l : e.labels()) covered.insert(l);
    std::vector<std::string> out;
    for (const auto& l : required_labels_)
      if (!covered.count(l) && !out_of_scope_.count(l)) out.push_back(l);
    return out;
  }

  /// Replaces an entry (used to build corrupted copies for negative controls).
  Catalog with_replaced(const std::string& text) const {
    Catalog c = *this;
    auto docs = YAML::LoadAll(text);
    for (const auto& d : docs) {
      CatalogEntry e = parse_entry(d, "<override>");
      if (!c.entries_.count(e.id)) c.order_.push_back(e.id);
      c.entries_[e.id] = std::move(e);
    }
    c.validate_references();
    return c;
  }

 private:
  void add_text(const std::string& text, const std::string& file) {
    std::vector<YAML::Node> docs;
    try {
      docs = YAML::LoadAll(text);
    } catch (const YAML::Exception& ex) {
      std::string loc = fmt::format("{}:{}", file, ex.mark.line + 1);
      throw Error(ErrorCode::ValidationFailed, fmt::format("{}: {}", loc, ex.msg), loc);
    }
    for (const auto& d : docs) {
      if (!d || d.IsNull()) continue;
      if (d["kind"] && d["kind"].IsScalar() && d["kind"].Scalar() == "label_index") {
        add_labels(d, file);
        continue;
      }
      CatalogEntry e = parse_entry(d, file);
      if (entries_.count(e.id))
        throw Error(ErrorCode::ValidationFailed,
                    fmt::format("{}: duplicate id '{}' (first at {})", e.location, e.id, entries_.at(e.id).location),
                    e.location);
      order_.push_back(e.id);
      entries_.emplace(e.id, std::move(e));
    }
  }

  void add_labels(const YAML::Node& d, const std::string& file) {
    detail::DocReader r(file);
    for (const auto& l : r.strings(r.need(d, "labels"))) required_labels_.push_back(l);
    if (d["out_of_scope"]) {
      auto m = r.string_map(d["out_of_scope"]);
      out_of_scope_.insert(m.begin(), m.end());
    }
  }

  [[noreturn]] void bad(const CatalogEntry& e, const std::string& msg) const {
    throw Error(ErrorCode::ValidationFailed, fmt::format("{}: {}: {}", e.location, e.id, msg), e.location);
  }

  const Presentation& presentation_ref(const CatalogEntry& e, const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end() || it->second.kind != EntryKind::Presentation)
      bad(e, "references missing presentation '" + id + "'");
    return it->second.as<Presentation>();
  }
  void need_kind(const CatalogEntry& e, const std::string& id, EntryKind k) const {
    auto it = entries_.find(id);
    if (it == entries_.end() || it->second.kind != k)
      bad(e, fmt::format("references missing {} '{}'", to_string(k), id));
  }

  /// Cross-entry checks: references resolve and expressions use only the
  /// symbols of the algebras they live in.
  void validate_references() const {
    for (const auto& id : order_) {
      const CatalogEntry& e = entries_.at(id);
      switch (e.kind) {
        case EntryKind::Presentation: {
          const auto& p = e.as<Presentation>();
          if (p.classical) {
            const auto& t = presentation_ref(e, p.classical->target);
            std::set<std::string> tg(t.generators.begin(), t.generators.end());
            for (const auto& [from, to] : p.classical->rename)
              if (!tg.count(to)) bad(e, "classical rename target '" + to + "' is not a generator");
          }
          break;
        }
        case EntryKind::Twist: {
          const auto& m = e.as<TwistMap>();
          const auto& s = presentation_ref(e, m.source);
          const auto& t = presentation_ref(e, m.target);
          std::set<std::string> sg(s.generators.begin(), s.generators.end());
          sg.insert(s.param);
          std::set<std::string> tg(t.generators.begin(), t.generators.end());
          for (const auto& [g, x] : m.assignments) {
            if (!tg.count(g)) bad(e, "image for non-generator '" + g + "'");
            for (const auto& sym : symbols_of(x))
              if (!sg.count(sym)) bad(e, "image of '" + g + "' uses unknown symbol '" + sym + "'");
          }
          tg.insert(t.param);
          for (const auto& [g, x] : m.inverse)
            for (const auto& sym : symbols_of(x))
              if (!tg.count(sym)) bad(e, "inverse of '" + g + "' uses unknown symbol '" + sym + "'");
          if (s.param != t.param) bad(e, "source and target parameters differ");
          break;
        }
        case EntryKind::Contraction: {
          const auto& c = e.as<Contraction>();
          const auto& s = presentation_ref(e, c.source);
          const auto& t = presentation_ref(e, c.target);
          std::set<std::string> sg(s.generators.begin(), s.generators.end());
          for (const auto& g : t.generators)
            if (!c.scaling.count(g)) bad(e, "no scaling for target generator '" + g + "'");
          for (const auto& [g, sc] : c.scaling)
            if (!sg.count(sc.old_generator)) bad(e, "scaling uses unknown generator '" + sc.old_generator + "'");
          if (c.diagram) {
            need_kind(e, c.diagram->contraction, EntryKind::Contraction);
            need_kind(e, c.diagram->twist, EntryKind::Twist);
          }
          break;
        }
        case EntryKind::Embedding: {
          const auto& m = e.as<Embedding>();
          const auto& s = presentation_ref(e, m.sub);
          const auto& b = presentation_ref(e, m.big);
          std::set<std::string> bg(b.generators.begin(), b.generators.end());
          bg.insert(b.param);
          for (const auto& [g, x] : m.rename)
            for (const auto& sym : symbols_of(x))
              if (!bg.count(sym)) bad(e, "image of '" + g + "' uses unknown symbol '" + sym + "'");
          for (const auto& g : s.generators)
            if (!m.rename.count(g)) bad(e, "no image for '" + g + "'");
          break;
        }
        case EntryKind::Realization: {
          const auto& r = e.as<Realization>();
          const auto& p = presentation_ref(e, r.presentation);
          for (const auto& g : p.generators)
            if (!r.find(g)) bad(e, "no operator for generator '" + g + "'");
          if (r.continuum) need_kind(e, *r.continuum, EntryKind::Realization);
          break;
        }
        case EntryKind::Casimir: {
          const auto& c = e.as<Casimir>();
          const auto& p = presentation_ref(e, c.presentation);
          std::set<std::string> g(p.generators.begin(), p.generators.end());
          g.insert(p.param);
          for (const auto& sym : symbols_of(c.element))
            if (!g.count(sym)) bad(e, "casimir uses unknown symbol '" + sym + "'");
          for (const auto& [rid, x] : c.realized) need_kind(e, rid, EntryKind::Realization);
          break;
        }
        case EntryKind::SymmetryTable: {
          const auto& s = e.as<SymmetryTable>();
          need_kind(e, s.realization, EntryKind::Realization);
          need_kind(e, s.casimir, EntryKind::Casimir);
          const auto& r = entries_.at(s.realization).as<Realization>();
          for (const auto& [g, x] : s.lambda)
            if (!r.find(g)) bad(e, "lambda for unknown generator '" + g + "'");
          break;
        }
      }
    }
  }

  std::map<std::string, CatalogEntry> entries_;
  std::vector<std::string> order_;
  std::vector<std::string> required_labels_;
  std::map<std::string, std::string> out_of_scope_;
};

}  // namespace jordan
