#pragma once

// Verification driver: runs the selected suites over a catalog and renders
// a deterministic report.

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "jordan/catalog.hpp"
#include "jordan/error.hpp"
#include "jordan/hopf.hpp"
#include "jordan/lattice.hpp"
#include "jordan/opalg.hpp"
#include "jordan/report.hpp"

namespace jordan {

inline constexpr const char* kEngineVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra",     "hopf",      "rmatrix",     "twist",    "contraction",
                                              "embedding",   "realization", "symmetry", "lattice",  "classical"};
  return names;
}

struct SuiteConfig {
  int order = 4;           // truncation order N for Hopf, twist, contraction and embedding suites
  int rmatrix_order = 3;   // R-matrix properties
  int ncalg_order = 3;     // word-by-word realization cross-check
  int degree = 12;         // PBW degree cap
  long fuel = 1'000'000;
  int spot_degree = 10;    // monomial-action route
  int continuum_degree = 8;
  std::vector<Rational> sigma{Rational(1, 2), Rational(1, 3), Rational(1, 5)};
  std::vector<Rational> tau{Rational(1, 2), Rational(1, 3), Rational(1, 5)};
  std::vector<Rational> mass{Rational(1, 2), Rational(1), Rational(3, 2)};
  LatticeConfig lattice;
  std::set<std::string> suites;  // empty selects every suite
  std::vector<std::string> ids;  // empty selects every entry
  bool allow_errata = false;
  bool search_errata = true;
  std::string report_path;

  void validate() const {
    if (order < 1 || rmatrix_order < 1 || ncalg_order < 1) throw Error(ErrorCode::ConfigError, "orders must be >= 1");
    if (degree < 1) throw Error(ErrorCode::ConfigError, "degree cap must be >= 1");
    if (!(lattice.tolerance > 0)) throw Error(ErrorCode::ConfigError, "tolerance must be > 0");
    for (const auto* list : {&sigma, &tau, &mass}) {
      if (list->empty()) throw Error(ErrorCode::ConfigError, "parameter sample lists must be nonempty");
      for (const auto& v : *list)
        if (sgn(v) == 0) throw Error(ErrorCode::ConfigError, "parameter samples must be nonzero");
    }
    for (const auto& s : suites)
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
        throw Error(ErrorCode::ConfigError, fmt::format("unknown suite '{}'", s));
  }
  bool runs(const std::string& suite) const { return suites.empty() || suites.count(suite) != 0; }
  bool selects(const std::string& id) const {
    return ids.empty() || std::find(ids.begin(), ids.end(), id) != ids.end();
  }
  RewriteLimits limits() const { return RewriteLimits{degree, fuel}; }

  /// Explicit σ, τ or m samples also set the lattice grid (first value);
  /// otherwise the grid keeps its own defaults.
  void sync_lattice() {
    const SuiteConfig defaults;
    if (sigma != defaults.sigma) lattice.grid.sigma = sigma.front();
    if (tau != defaults.tau) lattice.grid.tau = tau.front();
    if (mass != defaults.mass) lattice.mass = mass.front();
  }

  /// (step, mass) pairs for a realization; shorter lists cycle.
  std::vector<ParamSample> samples_for(const Realization& r) const {
    const auto& steps = r.param == "tau" ? tau : sigma;
    std::size_t n = std::max(steps.size(), mass.size());
    std::vector<ParamSample> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({steps[i % steps.size()], mass[i % mass.size()]});
    return out;
  }
};

// ------------------------------------------------------------ config file

namespace detail {

inline std::vector<Rational> rational_list(const YAML::Node& n, const std::string& key) {
  std::vector<Rational> out;
  auto one = [&](const YAML::Node& v) {
    try {
      out.push_back(parse_rational(v.as<std::string>()));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, fmt::format("line {}: {}: {}", v.Mark().line + 1, key, e.message()));
    }
  };
  if (n.IsSequence())
    for (const auto& v : n) one(v);
  else
    one(n);
  return out;
}

template <class T>
T scalar(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::ConfigError, fmt::format("line {}: bad value for '{}'", n.Mark().line + 1, key));
  }
}

}  // namespace detail

/// Reads a YAML config document over `cfg`; unknown keys are errors.
inline void apply_config_text(SuiteConfig& cfg, const std::string& text, const std::string& file = "<config>") {
  YAML::Node d;
  try {
    d = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: {}", file, ex.mark.line + 1, ex.msg));
  }
  if (!d || d.IsNull()) return;
  if (!d.IsMap()) throw Error(ErrorCode::ConfigError, file + ": config must be a mapping");
  for (const auto& kv : d) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    auto where = [&] { return fmt::format("{}:{}", file, kv.first.Mark().line + 1); };
    if (key == "order") cfg.order = detail::scalar<int>(v, key);
    else if (key == "rmatrix_order") cfg.rmatrix_order = detail::scalar<int>(v, key);
    else if (key == "ncalg_order") cfg.ncalg_order = detail::scalar<int>(v, key);
    else if (key == "degree") cfg.degree = detail::scalar<int>(v, key);
    else if (key == "sigma") cfg.sigma = detail::rational_list(v, key);
    else if (key == "tau") cfg.tau = detail::rational_list(v, key);
    else if (key == "m") cfg.mass = detail::rational_list(v, key);
    else if (key == "tolerance") cfg.lattice.tolerance = detail::scalar<double>(v, key);
    else if (key == "report") cfg.report_path = detail::scalar<std::string>(v, key);
    else if (key == "allow_errata") cfg.allow_errata = detail::scalar<bool>(v, key);
    else if (key == "suites") {
      cfg.suites.clear();
      for (const auto& s : v) cfg.suites.insert(detail::scalar<std::string>(s, key));
    } else if (key == "ids") {
      cfg.ids.clear();
      for (const auto& s : v) cfg.ids.push_back(detail::scalar<std::string>(s, key));
    } else
      throw Error(ErrorCode::ConfigError, fmt::format("{}: unknown config key '{}'", where(), key));
  }
}

// ------------------------------------------------------------ runner

/// Runs suites over one catalog, caching instantiated algebras.
class SuiteRunner {
 public:
  SuiteRunner(const Catalog& cat, SuiteConfig cfg) : cat_(cat), cfg_(std::move(cfg)) { cfg_.validate(); }

  HopfAlgebra& algebra(const std::string& id) {
    auto it = algebras_.find(id);
    if (it == algebras_.end())
      it = algebras_.emplace(id, std::make_unique<HopfAlgebra>(cat_.get<Presentation>(id), cfg_.limits())).first;
    return *it->second;
  }

  CheckReport run() {
    CheckReport rep;
    if (cat_.empty()) {
      CheckRecord w;
      w.check_id = "catalog/empty";
      w.suite = "catalog";
      w.status = Status::Info;
      w.detail = "warning: empty catalog, nothing to verify";
      rep.add(w);
      return rep;
    }
    for (const auto& s : suite_names())
      if (cfg_.runs(s)) rep.append(run_suite(s));
    if (cfg_.search_errata) annotate_errata(cat_, rep);
    rep.sort();
    return rep;
  }

  CheckReport run_suite(const std::string& s) {
    if (s == "algebra") return algebra_suite();
    if (s == "hopf") return hopf_suite();
    if (s == "rmatrix") return rmatrix_suite();
    if (s == "twist") return twist_suite();
    if (s == "contraction") return contraction_suite();
    if (s == "embedding") return embedding_suite();
    if (s == "realization") return realization_suite();
    if (s == "symmetry") return symmetry_suite();
    if (s == "lattice") return lattice_suite();
    if (s == "classical") return classical_suite();
    throw Error(ErrorCode::ConfigError, "unknown suite '" + s + "'");
  }

  CheckReport algebra_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Presentation))
      guard_entry(rep, "algebra", id, [&] { rep.append(verify_jacobi(algebra(id), cfg_.order)); });
    return rep;
  }

  CheckReport hopf_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Presentation))
      guard_entry(rep, "hopf", id, [&] {
        HopfAlgebra& h = algebra(id);
        rep.append(check_coproduct_hom(h, cfg_.order));
        rep.append(check_coassoc(h, cfg_.order));
        rep.append(check_counit(h, cfg_.order));
        rep.append(check_antipode(h, cfg_.order));
        if (const auto& g = h.presentation().grouplike)
          rep.append(check_grouplike_powers(h, g->element, g->exponents, cfg_.order));
      });
    return rep;
  }

  CheckReport rmatrix_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Presentation))
      if (cat_.get<Presentation>(id).rmatrix)
        guard_entry(rep, "rmatrix", id, [&] { rep.append(check_rmatrix(algebra(id), cfg_.rmatrix_order)); });
    for (const auto& id : selected(EntryKind::Embedding)) {
      const auto& e = cat_.get<Embedding>(id);
      if (cat_.get<Presentation>(e.sub).rmatrix && e.classical_r)
        guard_entry(rep, "rmatrix", id, [&] {
          rep.append(check_embedded_rmatrix(algebra(e.sub), algebra(e.big), e, cfg_.rmatrix_order));
        });
    }
    return rep;
  }

  CheckReport twist_suite() {
    CheckReport rep;
    const auto maps = selected(EntryKind::Twist);
    for (const auto& id : maps) {
      const auto& m = cat_.get<TwistMap>(id);
      guard_entry(rep, "twist", id, [&] {
        rep.append(apply_twist(algebra(m.source), cat_.get<Presentation>(m.target), m, cfg_.order));
        if (!m.inverse.empty()) rep.append(check_twist_inverse(algebra(m.source), m, cfg_.order));
      });
    }
    // Maps sharing source and target must give identical tables.
    for (std::size_t i = 0; i < maps.size(); ++i)
      for (std::size_t j = i + 1; j < maps.size(); ++j) {
        const auto& a = cat_.get<TwistMap>(maps[i]);
        const auto& b = cat_.get<TwistMap>(maps[j]);
        if (a.source != b.source || a.target != b.target) continue;
        guard_entry(rep, "twist", a.id + "~" + b.id, [&] {
          rep.append(check_equivalent_twists(algebra(a.source), algebra(a.target), algebra(b.target), a, b, cfg_.order));
        });
      }
    return rep;
  }

  CheckReport contraction_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Contraction)) {
      const auto& c = cat_.get<Contraction>(id);
      guard_entry(rep, "contraction", id, [&] {
        rep.append(check_contraction(cat_.get<Presentation>(c.source), algebra(c.target), c, cfg_.order));
        if (c.diagram) rep.append(diagram_check(c));
      });
    }
    return rep;
  }

  /// The square source -> target -> twist target equals source -> twisted
  /// source -> contracted target: both routes verify and land on one entry.
  CheckReport diagram_check(const Contraction& c) {
    CheckReport rep;
    const std::string id = "contraction/" + c.id + "/diagram";
    const auto& other = cat_.get<Contraction>(c.diagram->contraction);
    const auto& twist = cat_.get<TwistMap>(c.diagram->twist);
    std::vector<std::string> ids{c.id, other.id, twist.id};
    detail::guarded(rep, id, ids, "contraction", [&] {
      Stopwatch sw;
      std::optional<std::string> first_twist;
      for (const auto& t : cat_.list(EntryKind::Twist)) {
        const auto& m = cat_.get<TwistMap>(t);
        if (m.source == c.source && m.target == other.source) first_twist = t;
      }
      std::vector<std::string> problems;
      if (twist.source != c.target) problems.push_back(twist.id + " does not start at " + c.target);
      if (twist.target != other.target) problems.push_back("routes end at " + twist.target + " and " + other.target);
      if (!first_twist) problems.push_back("no twist from " + c.source + " to " + other.source);
      auto leg = [&](const std::string& name, const CheckReport& r) {
        if (!r.passed()) problems.push_back(fmt::format("{} has {} failing checks", name, r.failures().size()));
      };
      if (problems.empty()) {
        const auto& t1 = cat_.get<TwistMap>(*first_twist);
        leg(t1.id, apply_twist(algebra(t1.source), cat_.get<Presentation>(t1.target), t1, cfg_.order));
        leg(other.id, check_contraction(cat_.get<Presentation>(other.source), algebra(other.target), other, cfg_.order));
        leg(twist.id, apply_twist(algebra(twist.source), cat_.get<Presentation>(twist.target), twist, cfg_.order));
        leg(c.id, check_contraction(cat_.get<Presentation>(c.source), algebra(c.target), c, cfg_.order));
      }
      CheckRecord r;
      r.check_id = id;
      r.catalog_ids = ids;
      r.suite = "contraction";
      r.status = problems.empty() ? Status::Pass : Status::Fail;
      r.residual = problems.empty() ? "0" : fmt::format("{} problems", problems.size());
      r.detail = problems.empty()
                     ? fmt::format("{} then {} and {} then {} both reach {}", c.id, twist.id,
                                   first_twist.value_or("?"), other.id, other.target)
                     : fmt::format("{}", fmt::join(problems, "; "));
      r.timing_ms = sw.ms();
      rep.add(r);
    });
    return rep;
  }

  CheckReport embedding_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Embedding)) {
      const auto& e = cat_.get<Embedding>(id);
      guard_entry(rep, "embedding", id, [&] {
        rep.append(check_subalgebra_embedding(algebra(e.sub), algebra(e.big), e, cfg_.order));
      });
    }
    return rep;
  }

  CheckReport realization_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Realization)) {
      const auto& r = cat_.get<Realization>(id);
      guard_entry(rep, "realization", id, [&] {
        rep.append(verify_realization(cat_, id, cfg_.samples_for(r)));
        rep.append(spot_check_realization(cat_, id, cfg_.spot_degree));
        rep.append(crosscheck_normal_order(cat_, id, cfg_.ncalg_order));
      });
    }
    for (const auto& id : selected(EntryKind::Casimir))
      guard_entry(rep, "realization", id, [&] {
        rep.append(check_casimir(cat_, id, [&](const Realization& r) { return cfg_.samples_for(r); }));
      });
    return rep;
  }

  CheckReport symmetry_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::SymmetryTable)) {
      const auto& s = cat_.get<SymmetryTable>(id);
      guard_entry(rep, "symmetry", id, [&] {
        rep.append(verify_symmetry_table(cat_, id, cfg_.samples_for(cat_.get<Realization>(s.realization))));
      });
    }
    return rep;
  }

  CheckReport lattice_suite() {
    CheckReport rep;
    const bool all = cfg_.ids.empty();
    if (all) {
      rep.append(check_family_residuals(cfg_.lattice));
      rep.append(check_evolution(cfg_.lattice));
    }
    // Restrict the numeric symmetry check to the selected tables.
    if (!all) {
      bool any = false;
      for (const auto& id : cat_.list(EntryKind::SymmetryTable)) any = any || cfg_.selects(id);
      if (!any) return rep;
    }
    CheckReport sym = check_symmetry_numeric(cat_, cfg_.lattice);
    for (auto& r : sym.records)
      if (all || std::any_of(r.catalog_ids.begin(), r.catalog_ids.end(), [&](const auto& c) { return cfg_.selects(c); }))
        rep.add(r);
    return rep;
  }

  CheckReport classical_suite() {
    CheckReport rep;
    for (const auto& id : selected(EntryKind::Presentation)) {
      const auto& p = cat_.get<Presentation>(id);
      if (!p.classical) continue;
      guard_entry(rep, "classical", id, [&] {
        rep.append(check_classical_limit(algebra(id), algebra(p.classical->target), p.classical->rename));
      });
    }
    for (const auto& id : selected(EntryKind::Realization))
      guard_entry(rep, "classical", id, [&] { rep.append(check_continuum_limit(cat_, id, cfg_.continuum_degree)); });
    return rep;
  }

  const SuiteConfig& config() const { return cfg_; }

 private:
  std::vector<std::string> selected(EntryKind k) const {
    std::vector<std::string> out;
    for (const auto& id : cat_.list(k))
      if (cfg_.selects(id)) out.push_back(id);
    return out;
  }

  template <class F>
  void guard_entry(CheckReport& rep, const std::string& suite, const std::string& id, F&& f) {
    detail::guarded(rep, suite + "/" + id + "/setup", {id}, suite, std::forward<F>(f));
  }

  const Catalog& cat_;
  SuiteConfig cfg_;
  std::map<std::string, std::unique_ptr<HopfAlgebra>> algebras_;
};

// ------------------------------------------------------------ crosscheck

/// Regression gate: every presentation passes the algebra and Hopf suites,
/// every reference resolves, every realization, Casimir and symmetry table
/// holds. An empty catalog passes vacuously with a warning.
inline CheckReport crosscheck_catalog(const Catalog& cat, int order = 3) {
  SuiteConfig cfg;
  cfg.order = order;
  cfg.suites = {"algebra", "hopf", "realization", "symmetry"};
  cfg.search_errata = false;
  CheckReport rep = SuiteRunner(cat, cfg).run();
  auto ref = [&](const std::string& owner, const std::string& target, EntryKind kind) {
    CheckRecord r;
    r.check_id = fmt::format("catalog/{}/ref/{}", owner, target);
    r.catalog_ids = {owner, target};
    r.suite = "catalog";
    bool ok = cat.contains(target) && cat.load(target).kind == kind;
    r.status = ok ? Status::Pass : Status::Fail;
    r.residual = ok ? "0" : "missing";
    r.detail = fmt::format("{} must be a {}", target, to_string(kind));
    rep.add(r);
  };
  for (const auto& id : cat.list(EntryKind::Twist)) {
    const auto& m = cat.get<TwistMap>(id);
    ref(id, m.source, EntryKind::Presentation);
    ref(id, m.target, EntryKind::Presentation);
  }
  for (const auto& id : cat.list(EntryKind::SymmetryTable)) {
    const auto& s = cat.get<SymmetryTable>(id);
    ref(id, s.realization, EntryKind::Realization);
    ref(id, s.casimir, EntryKind::Casimir);
  }
  rep.sort();
  return rep;
}

// ------------------------------------------------------------ rendering

inline nlohmann::ordered_json config_json(const SuiteConfig& cfg) {
  auto list = [](const std::vector<Rational>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
  };
  nlohmann::ordered_json j;
  j["order"] = cfg.order;
  j["rmatrix_order"] = cfg.rmatrix_order;
  j["ncalg_order"] = cfg.ncalg_order;
  j["degree"] = cfg.degree;
  j["sigma"] = list(cfg.sigma);
  j["tau"] = list(cfg.tau);
  j["m"] = list(cfg.mass);
  j["tolerance"] = cfg.lattice.tolerance;
  j["suites"] = cfg.suites.empty() ? suite_names() : std::vector<std::string>(cfg.suites.begin(), cfg.suites.end());
  j["ids"] = cfg.ids;
  j["allow_errata"] = cfg.allow_errata;
  return j;
}

/// Machine report; `with_timing` false gives a run-independent document.
inline nlohmann::ordered_json report_json(const CheckReport& rep, const SuiteConfig& cfg, bool with_timing = true) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["engine_version"] = kEngineVersion;
  j["config"] = config_json(cfg);
  nlohmann::ordered_json summary;
  summary["total"] = rep.records.size();
  summary["pass"] = rep.count(Status::Pass);
  summary["fail"] = rep.count(Status::Fail);
  summary["erratum_suspected"] = rep.count(Status::ErratumSuspected);
  summary["info"] = rep.count(Status::Info);
  summary["passed"] = rep.passed(cfg.allow_errata);
  j["summary"] = summary;
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& r : rep.records) {
    nlohmann::ordered_json x;
    x["check_id"] = r.check_id;
    x["catalog_ids"] = r.catalog_ids;
    x["suite"] = r.suite;
    x["status"] = std::string(to_string(r.status));
    x["residual"] = r.residual;
    x["detail"] = r.detail;
    x["timing_ms"] = with_timing ? r.timing_ms : 0.0;
    records.push_back(std::move(x));
  }
  j["records"] = std::move(records);
  return j;
}

/// One line per suite plus failing ids.
inline std::string summary_text(const CheckReport& rep, bool allow_errata) {
  std::map<std::string, std::array<std::size_t, 4>> per;
  for (const auto& r : rep.records) per[r.suite][static_cast<std::size_t>(r.status)]++;
  std::string out;
  for (const auto& [s, c] : per)
    out += fmt::format("{:<12} pass {:>4}  fail {:>3}  erratum {:>3}  info {:>3}\n", s, c[0], c[1], c[2], c[3]);
  for (const auto* f : rep.failures())
    out += fmt::format("{}: {} [{}] {}\n", to_string(f->status), f->check_id, f->residual.substr(0, 200),
                       f->detail.substr(0, 300));
  out += fmt::format("{} checks: {}\n", rep.records.size(), rep.passed(allow_errata) ? "PASS" : "FAIL");
  return out;
}

}  // namespace jordan
