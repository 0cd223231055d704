#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "jordan/lattice.hpp"
#include "support.hpp"

using namespace jordan;
using jordan::test::shipped_catalog;
using jordan::test::status_line;

namespace {

constexpr double kTolerance = 1e-10;
constexpr double kAgreement = 1e-12;

const Rational kMassSample(1, 2);
const Rational kStepSample(1, 10);

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ConfigError;
}

DiffOp realized_casimir(const std::string& real_id, const std::string& cas_id, DiffOp* op = nullptr,
                        const std::string& gen = {}) {
  const auto& cat = shipped_catalog();
  RealizedAlgebra ra(cat, cat.get<Realization>(real_id));
  if (op) *op = ra.op(gen);
  return ra.realize(cat.get<Casimir>(cas_id).element);
}

std::vector<SolutionFamily> all_families() {
  return {SolutionFamily::space_geometric(1, kMassSample, kStepSample), SolutionFamily::time_geometric(1, kMassSample, kStepSample),
          SolutionFamily::heat_polynomial(kMassSample), SolutionFamily::constant(1, kMassSample)};
}

}  // namespace

TEST(Residual, SpaceGeometricFamilyIsExactSolution) {
  auto f = SolutionFamily::space_geometric(1, kMassSample, kStepSample);
  Residual r = residual(Equation::SpaceLattice, f, GridSpec{}, Backend::Exact);
  ASSERT_TRUE(r.exact_max.has_value());
  EXPECT_EQ(*r.exact_max, 0);
  EXPECT_LE(residual(Equation::SpaceLattice, f, GridSpec{}, Backend::Float).max_abs, kTolerance);
}

TEST(Residual, TimeGeometricFamilyIsExactSolution) {
  auto f = SolutionFamily::time_geometric(1, kMassSample, kStepSample);
  Residual r = residual(Equation::TimeLattice, f, GridSpec{}, Backend::Exact);
  ASSERT_TRUE(r.exact_max.has_value());
  EXPECT_EQ(*r.exact_max, 0);
  EXPECT_LE(residual(Equation::TimeLattice, f, GridSpec{}, Backend::Float).max_abs, kTolerance);
}

TEST(Residual, ConstantSolvesBoth) {
  auto f = SolutionFamily::constant(3, kMassSample);
  for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice}) {
    EXPECT_EQ(*residual(e, f, GridSpec{}, Backend::Exact).exact_max, 0);
    EXPECT_EQ(residual(e, f, GridSpec{}, Backend::Float).max_abs, 0.0);
  }
}

TEST(Residual, FamilyOnWrongEquationIsNonzero) {
  auto f = SolutionFamily::space_geometric(1, kMassSample, kStepSample);
  EXPECT_GT(residual(Equation::TimeLattice, f, GridSpec{}, Backend::Float).max_abs, 1e-3);
}

TEST(Residual, GridSamplesLackDerivatives) {
  GridSamples s = apply_symmetry_numeric(DiffOp::one(), SolutionFamily::constant(1, kMassSample), GridSpec{});
  EXPECT_EQ(code_of([&] { (void)residual(Equation::SpaceLattice, s, kMassSample); }), ErrorCode::MissingDerivative);
  EXPECT_EQ(code_of([&] { (void)residual(Equation::TimeLattice, s, kMassSample); }), ErrorCode::MissingDerivative);
}

TEST(Residual, IrrationalEigenvalueHasNoExactMode) {
  auto f = SolutionFamily::space_geometric(1, kMassSample, kStepSample);
  EXPECT_EQ(code_of([&] { (void)operator_residual(DiffOp::dx(), f, GridSpec{}, Backend::Exact); }),
            ErrorCode::MissingDerivative);
}

TEST(Residual, InvalidGridRejected) {
  GridSpec g;
  g.nx = 0;
  EXPECT_EQ(code_of([&] { g.validate(); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] { (void)SolutionFamily::space_geometric(-20, kMassSample, kStepSample); }), ErrorCode::ConfigError);
}

TEST(Symmetry, SpaceBoostMapsSolutions) {
  DiffOp k;
  DiffOp E = realized_casimir("real_hf", "cas_hg", &k, "cK");
  auto f = SolutionFamily::space_geometric(1, kMassSample, kStepSample);
  EXPECT_LE(symmetry_residual(E, k, f, GridSpec{}, Backend::Float).max_abs, kTolerance);
  EXPECT_EQ(*symmetry_residual(E, k, f, GridSpec{}, Backend::Exact).exact_max, 0);
}

TEST(Symmetry, TimeDilationMapsSolutions) {
  DiffOp d;
  DiffOp E = realized_casimir("real_lb", "cas_hg", &d, "cD");
  auto f = SolutionFamily::time_geometric(1, kMassSample, kStepSample);
  EXPECT_LE(symmetry_residual(E, d, f, GridSpec{}, Backend::Float).max_abs, kTolerance);
}

TEST(Symmetry, ZeroOperatorGivesZero) {
  DiffOp E = realized_casimir("real_hf", "cas_hg");
  for (const auto& f : all_families()) {
    EXPECT_EQ(symmetry_residual(E, DiffOp(), f, GridSpec{}, Backend::Float).max_abs, 0.0) << f.id();
    EXPECT_EQ(operator_residual(DiffOp(), f, GridSpec{}, Backend::Float).max_abs, 0.0) << f.id();
  }
}

TEST(Symmetry, EquationRecognition) {
  EXPECT_EQ(equation_of(realized_casimir("real_gd", "cas_ge")), Equation::SpaceLattice);
  EXPECT_EQ(equation_of(realized_casimir("real_ke", "cas_hg")), Equation::TimeLattice);
  EXPECT_FALSE(equation_of(realized_casimir("real_classical", "cas_hg")).has_value());
}

TEST(Evolve, SingleModeMatchesCirculantExponential) {
  const int n = 8, steps = 5;
  GridSpec g;
  std::vector<double> init(n);
  for (int i = 0; i < n; ++i) init[static_cast<std::size_t>(i)] = std::sin(2 * M_PI * 2 * i / n);
  GridSamples s = evolve_space(init, g, kMassSample, steps);
  // Independent eigenvalue: ((ω - 1)/σ)² / (2m) with ω = e^{±iπ/2}.
  const double sigma = 0.1, m = 0.5;
  for (int step = 0; step <= steps; ++step) {
    double t = 0.1 * step;
    for (int i = 0; i < n; ++i) {
      std::complex<double> w = std::polar(1.0, 2 * M_PI * 2 / n), d = (w - 1.0) / sigma;
      std::complex<double> lam = d * d / (2 * m);
      std::complex<double> phase = std::polar(1.0, 2 * M_PI * 2 * i / n);
      double expect = (phase * std::exp(lam * t) - std::conj(phase) * std::exp(std::conj(lam) * t)).imag() / 2;
      EXPECT_NEAR(s.at(i, step), expect, kAgreement) << "site " << i << " step " << step;
    }
  }
}

TEST(Evolve, ZeroDataStaysZero) {
  std::vector<double> zero(8, 0.0);
  for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice})
    for (double v : evolve(e, zero, GridSpec{}, kMassSample, 5).values) EXPECT_EQ(v, 0.0);
}

TEST(Evolve, TimeSeriesMatchesFamily) {
  // e^{kx} Taylor coefficients advanced by (1 + τk²/2m) per step; compared to 1e-8.
  const double k = 0.5;
  const int degree = 12, steps = 5;
  std::vector<double> c(degree + 1);
  for (int j = 0; j <= degree; ++j) c[static_cast<std::size_t>(j)] = std::pow(k, j) / std::tgamma(j + 1.0);
  auto hist = evolve_time_series(c, kStepSample, kMassSample, steps);
  auto fam = SolutionFamily::time_geometric(Rational(1, 2), kMassSample, kStepSample);
  for (int s = 0; s <= steps; ++s)
    for (double x : {-0.5, 0.0, 0.7}) {
      double series = 0;
      for (int j = degree; j >= 0; --j) series = series * x + hist[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
      EXPECT_NEAR(series, fam.value(x, 0.1 * s), 1e-8) << "x " << x << " step " << s;
    }
}

TEST(Evolve, OverflowGuardRaises) {
  std::vector<double> init{1, -1, 1, -1, 1, -1, 1, -1};
  EXPECT_EQ(code_of([&] { (void)evolve_space(init, GridSpec{}, kMassSample, 5, 10.0); }), ErrorCode::InstabilityDetected);
}

TEST(Properties, TranslationInvariance) {
  for (const auto& f : all_families())
    for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice}) {
      if (!f.solves(e)) continue;
      for (int cells : {1, 3}) {
        GridSpec moved = GridSpec{}.translated_x(cells);
        EXPECT_EQ(*residual(e, f, GridSpec{}, Backend::Exact).exact_max, *residual(e, f, moved, Backend::Exact).exact_max)
            << f.id();
      }
    }
}

TEST(Properties, FloatAgreesWithExact) {
  for (const auto& f : all_families())
    for (Equation e : {Equation::SpaceLattice, Equation::TimeLattice}) {
      if (!f.solves(e)) continue;
      Residual ex = residual(e, f, GridSpec{}, Backend::Exact);
      Residual fl = residual(e, f, GridSpec{}, Backend::Float);
      EXPECT_LE(std::abs(fl.max_abs - ex.exact_max->get_d()), kAgreement) << f.id();
    }
}

TEST(Properties, VerifiedOperatorsMapEveryFamily) {
  LatticeConfig cfg;
  CheckReport rep = check_symmetry_numeric(shipped_catalog(), cfg);
  EXPECT_TRUE(rep.passed()) << status_line(rep);
  for (const char* id : {"lattice/sym_hk_hf/cK", "lattice/sym_lc/cD", "lattice/sym_gg/C", "lattice/sym_jg/C"})
    EXPECT_NE(rep.find(id), nullptr) << id;
}

TEST(Suite, DefaultLatticeSuitePasses) {
  CheckReport rep = run_lattice_suite(shipped_catalog());
  EXPECT_TRUE(rep.passed()) << status_line(rep);
  EXPECT_NE(rep.find("lattice/evolve/space_mode"), nullptr);
}

TEST(Export, CsvHasHeaderAndOneRowPerPoint) {
  GridSpec g;
  g.nx = 3;
  g.nt = 2;
  GridSamples s = apply_symmetry_numeric(DiffOp::one(), SolutionFamily::heat_polynomial(kMassSample), g);
  std::ostringstream os;
  write_csv(os, s);
  std::string text = os.str();
  EXPECT_EQ(text.rfind("x,t,value\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}
