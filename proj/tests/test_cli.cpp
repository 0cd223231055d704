#include <gtest/gtest.h>
#include <json.hpp>

#include "jordan/show.hpp"
#include "jordan/suite.hpp"
#include "support.hpp"

using namespace jordan;
using jordan::test::corrupted_catalog;
using jordan::test::shipped_catalog;
using jordan::test::status_line;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ConfigError;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string value_of(const Rendering& r, const std::string& section, const std::string& name) {
  for (const auto& [s, lines] : r.sections)
    if (s == section)
      for (const auto& [k, v] : lines)
        if (k == name) return v;
  return {};
}

SuiteConfig only(const std::string& suite, std::vector<std::string> ids = {}) {
  SuiteConfig cfg;
  cfg.suites = {suite};
  cfg.ids = std::move(ids);
  return cfg;
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  SuiteConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.order, 4);
  EXPECT_EQ(cfg.degree, 12);
  EXPECT_EQ(cfg.suites.size(), 0u);
}

TEST(Config, InvariantsRejected) {
  SuiteConfig a;
  a.order = 0;
  EXPECT_EQ(code_of([&] { a.validate(); }), ErrorCode::ConfigError);
  SuiteConfig b;
  b.lattice.tolerance = 0;
  EXPECT_EQ(code_of([&] { b.validate(); }), ErrorCode::ConfigError);
  SuiteConfig c;
  c.sigma = {Rational(0)};
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigError);
  SuiteConfig d;
  d.suites = {"nonsense"};
  EXPECT_EQ(code_of([&] { d.validate(); }), ErrorCode::ConfigError);
}

TEST(Config, TextOverridesFields) {
  SuiteConfig cfg;
  apply_config_text(cfg, "order: 3\nsigma: [1/7, 2]\nm: 5/2\ntolerance: 1e-9\nsuites: [twist]\nallow_errata: true\n");
  EXPECT_EQ(cfg.order, 3);
  ASSERT_EQ(cfg.sigma.size(), 2u);
  EXPECT_EQ(cfg.sigma[0], Rational(1, 7));
  EXPECT_EQ(cfg.mass, std::vector<Rational>{Rational(5, 2)});
  EXPECT_DOUBLE_EQ(cfg.lattice.tolerance, 1e-9);
  EXPECT_TRUE(cfg.runs("twist"));
  EXPECT_FALSE(cfg.runs("hopf"));
  EXPECT_TRUE(cfg.allow_errata);
  cfg.sync_lattice();
  EXPECT_EQ(cfg.lattice.grid.sigma, Rational(1, 7));
  EXPECT_EQ(cfg.lattice.mass, Rational(5, 2));
}

TEST(Config, ErrorsCarryLineNumbers) {
  SuiteConfig cfg;
  std::string unknown = message_of([&] { apply_config_text(cfg, "order: 3\ndegree: 10\nwidth: 2\n", "run.yaml"); });
  EXPECT_NE(unknown.find("run.yaml:3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("width"), std::string::npos);
  std::string bad = message_of([&] { apply_config_text(cfg, "order: 3\nsigma: [1/2, x/y]\n"); });
  EXPECT_NE(bad.find("line 2"), std::string::npos) << bad;
  EXPECT_EQ(code_of([&] { apply_config_text(cfg, "order: [\n"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_config_text(cfg, "order: three\n"); }), ErrorCode::ConfigError);
}

TEST(Show, DeformedOscillatorPresentation) {
  Rendering r = render_entry(shipped_catalog(), "uz_h4_fb");
  EXPECT_EQ(r.count("brackets"), 4u);
  EXPECT_EQ(r.count("coproducts"), 4u);
  EXPECT_EQ(value_of(r, "coproducts", "Δ(Ap)"), "[1 ⊗ Ap] + [Ap ⊗ 1]");
  EXPECT_EQ(value_of(r, "brackets", "[N, Am]"), "(-1)*Am");
}

TEST(Show, SpaceRealizationOperators) {
  const Catalog& cat = shipped_catalog();
  Rendering r = render_entry(cat, "real_ib");
  EXPECT_EQ(r.count("operators"), 6u);
  // Boost: -t Δx - m x Tx^{-1} - (m σ / 2) Tx^{-1}.
  ParamPoly m = ParamPoly::var(kMass), sigma = ParamPoly::var(kSigma);
  DiffOp boost = -(DiffOp::t() * DiffOp::delta_x()) - (DiffOp::x() * DiffOp::shift_x(-1)).scaled(m) -
                 DiffOp::shift_x(-1).scaled(m * sigma * ParamPoly(Rational(1, 2)));
  EXPECT_EQ(value_of(r, "operators", "cK"), boost.to_string());
}

TEST(Show, UnknownEntry) {
  EXPECT_EQ(code_of([] { (void)render_entry(shipped_catalog(), "nope"); }), ErrorCode::UnknownEntry);
}

TEST(Show, EveryEntryRendersInEveryFormat) {
  const Catalog& cat = shipped_catalog();
  for (const auto& id : cat.list()) {
    Rendering r = render_entry(cat, id, 2);
    EXPECT_FALSE(r.sections.empty()) << id;
    auto j = nlohmann::json::parse(format_rendering(r, ShowFormat::Json));
    EXPECT_EQ(j["id"], id);
    EXPECT_EQ(format_rendering(r, ShowFormat::Text).rfind(id, 0), 0u);
  }
  std::string tex = format_rendering(render_entry(cat, "uz_h4_fb"), ShowFormat::Latex);
  EXPECT_NE(tex.find("\\Delta"), std::string::npos);
  EXPECT_NE(tex.find("\\otimes"), std::string::npos);
  EXPECT_EQ(parse_show_format("latex-ish"), ShowFormat::Latex);
  EXPECT_EQ(code_of([] { (void)parse_show_format("html"); }), ErrorCode::ConfigError);
}

TEST(Run, TwistMapWithZeroResiduals) {
  SuiteConfig cfg = only("twist", {"map_bh"});
  CheckReport rep = SuiteRunner(shipped_catalog(), cfg).run();
  EXPECT_TRUE(rep.passed()) << status_line(rep);
  EXPECT_GT(rep.records.size(), 0u);
  for (const auto& r : rep.records) {
    EXPECT_EQ(r.residual, "0") << r.check_id;
    EXPECT_EQ(r.check_id.rfind("twist/map_bh/", 0), 0u) << r.check_id;
  }
}

TEST(Run, CorruptedCatalogFailsWithIds) {
  std::string dir = corrupted_catalog("cli_coproduct", "10_sl2.yaml", "tensor(J3, exp(2*z*Jp))", "tensor(J3, exp(z*Jp))");
  Catalog cat = Catalog::load_directory(dir);
  CheckReport rep = SuiteRunner(cat, only("hopf")).run();
  EXPECT_FALSE(rep.passed());
  ASSERT_FALSE(rep.failures().empty());
  std::string text = summary_text(rep, false);
  EXPECT_NE(text.find(rep.failures().front()->check_id), std::string::npos);
  EXPECT_NE(text.find("checks: FAIL"), std::string::npos);
}

TEST(Report, DeterministicWithoutTiming) {
  SuiteConfig cfg = only("hopf", {"uz_sl2_bc"});
  auto a = report_json(SuiteRunner(shipped_catalog(), cfg).run(), cfg, false).dump();
  auto b = report_json(SuiteRunner(shipped_catalog(), cfg).run(), cfg, false).dump();
  EXPECT_EQ(a, b);
}

TEST(Report, ShapeAndCounts) {
  SuiteConfig cfg = only("contraction");
  CheckReport rep = SuiteRunner(shipped_catalog(), cfg).run();
  auto j = report_json(rep, cfg);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["engine_version"], kEngineVersion);
  EXPECT_EQ(j["config"]["order"], 4);
  EXPECT_EQ(j["summary"]["total"], rep.records.size());
  EXPECT_EQ(j["summary"]["pass"].get<std::size_t>() + j["summary"]["fail"].get<std::size_t>() +
                j["summary"]["erratum_suspected"].get<std::size_t>() + j["summary"]["info"].get<std::size_t>(),
            rep.records.size());
  EXPECT_TRUE(j["summary"]["passed"].get<bool>());
  EXPECT_EQ(j["records"].size(), rep.records.size());
}

TEST(Report, ErratumStatusOnlyFromRealizationChecks) {
  std::string dir = corrupted_catalog("cli_errata", "50_schr_space.yaml", "1 - 3*exp(sigma*dx)", "1 - 2*exp(sigma*dx)");
  CheckReport rep = SuiteRunner(Catalog::load_directory(dir), SuiteConfig{}).run();
  std::size_t suspected = 0;
  for (const auto& r : rep.records)
    if (r.status == Status::ErratumSuspected) {
      ++suspected;
      EXPECT_TRUE(r.suite == "realization" || r.suite == "symmetry") << r.check_id;
    }
  EXPECT_GT(suspected, 0u);
  EXPECT_FALSE(rep.passed(false));
}
