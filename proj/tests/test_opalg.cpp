#include <gtest/gtest.h>

#include "jordan/opalg.hpp"
#include "support.hpp"

using namespace jordan;
using jordan::test::shipped_catalog;
using jordan::test::status_line;

namespace jordan {
inline void PrintTo(const DiffOp& d, std::ostream* os) { *os << d.to_string(); }
}  // namespace jordan

namespace {

ParamPoly sigma(int p = 1) { return ParamPoly::var(kSigma, p); }
ParamPoly tau(int p = 1) { return ParamPoly::var(kTau, p); }
ParamPoly mass(int p = 1) { return ParamPoly::var(kMass, p); }

const RealizedAlgebra& realized(const std::string& id) {
  static std::map<std::string, std::unique_ptr<RealizedAlgebra>> cache;
  auto& slot = cache[id];
  if (!slot) slot = std::make_unique<RealizedAlgebra>(shipped_catalog(), shipped_catalog().get<Realization>(id));
  return *slot;
}

DiffOp space_casimir() { return DiffOp::delta_x().pow(2) - DiffOp::dt().scaled(mass() * ParamPoly(2)); }
DiffOp time_casimir() { return DiffOp::dx().pow(2) - DiffOp::delta_t().scaled(mass() * ParamPoly(2)); }

CoordPoly poly(std::initializer_list<std::pair<std::pair<int, int>, Rational>> terms) {
  CoordPoly f;
  for (const auto& [k, c] : terms) add_to(f, k, ParamPoly(c));
  return f;
}

}  // namespace

TEST(OpAlgebra, HeisenbergRelation) { EXPECT_EQ(op_commutator(DiffOp::dx(), DiffOp::x()), DiffOp::one()); }

TEST(OpAlgebra, ShiftConjugatesCoordinate) {
  EXPECT_EQ(op_commutator(DiffOp::shift_x(1), DiffOp::x()), DiffOp::shift_x(1).scaled(sigma()));
  EXPECT_EQ(op_commutator(DiffOp::shift_t(-1), DiffOp::t()), DiffOp::shift_t(-1).scaled(-tau()));
}

TEST(OpAlgebra, SquaredForwardDifference) {
  DiffOp expected = (DiffOp::shift_x(2) - DiffOp::shift_x(1).scaled(2) + DiffOp::one()).scaled(sigma(-2));
  EXPECT_EQ(DiffOp::delta_x() * DiffOp::delta_x(), expected);
}

TEST(OpAlgebra, ShiftInverse) {
  EXPECT_EQ(DiffOp::shift_x(3) * DiffOp::shift_x(-3), DiffOp::one());
  EXPECT_EQ(DiffOp::shift_t(2).inverse(), DiffOp::shift_t(-2));
}

TEST(ApplyOperator, ForwardDifferenceOfSquare) {
  ParamValues pv = ParamValues::of(Rational(1, 2), std::nullopt, std::nullopt);
  CoordPoly out = jordan::bind(DiffOp::delta_x().apply(coord_monomial(2, 0)), pv);
  EXPECT_EQ(out, poly({{{1, 0}, 2}, {{0, 0}, Rational(1, 2)}}));
}

TEST(ApplyOperator, LatticeDilationOnProduct) {
  // 2t d_t(xt) = 2xt, x Delta_x T_x^{-1}(xt) = xt, plus xt/2.
  ParamValues pv = ParamValues::of(Rational(1, 3), std::nullopt, Rational(1, 2));
  CoordPoly out = jordan::bind(realized("real_hf").op("cD").apply(coord_monomial(1, 1)), pv);
  EXPECT_EQ(out, poly({{{1, 1}, Rational(7, 2)}}));
}

TEST(ApplyOperator, MomentumKillsConstants) {
  EXPECT_TRUE(realized("real_hf").op("cP").apply(coord_monomial(0, 0)).empty());
}

TEST(Realization, BoostAgainstHamiltonianGivesMomentum) {
  const auto& ra = realized("real_hf");
  EXPECT_EQ(op_commutator(ra.op("cK"), ra.op("cH")), ra.op("cP"));
  EXPECT_EQ(ra.op("cP"), DiffOp::delta_x());
  EXPECT_TRUE(bracket_residual(ra, "cK", "cH").is_zero());
}

TEST(Realization, SpaceBoostMomentumIsBackwardShift) {
  const auto& ra = realized("real_gd");
  EXPECT_EQ(op_commutator(ra.op("K"), ra.op("P")), DiffOp::shift_x(-1).scaled(mass()));
}

TEST(Realization, FullTablesAtAllSamples) {
  for (const auto& id : shipped_catalog().list(EntryKind::Realization)) {
    CheckReport rep = verify_realization(shipped_catalog(), id);
    const auto n = realized(id).presentation().generators.size();
    EXPECT_EQ(rep.records.size(), n * (n - 1) / 2) << id;
    EXPECT_TRUE(rep.passed()) << id << "\n" << status_line(rep);
  }
}

TEST(Realization, SpotCheckAgreesWithCanonicalForm) {
  for (const auto& id : shipped_catalog().list(EntryKind::Realization)) {
    CheckReport rep = spot_check_realization(shipped_catalog(), id, 10);
    EXPECT_TRUE(rep.passed()) << id << "\n" << status_line(rep);
  }
}

TEST(Realization, AbstractNormalOrderingAgrees) {
  for (const auto& id : shipped_catalog().list(EntryKind::Realization)) {
    CheckReport rep = crosscheck_normal_order(shipped_catalog(), id, 3);
    EXPECT_TRUE(rep.passed()) << id << "\n" << status_line(rep);
  }
}

TEST(Realization, HalfStepExponentialUnresolved) {
  const auto& ra = realized("real_gd");
  try {
    (void)ra.realize(parse_expr("exp(sigma*P/2)"));
    FAIL() << "expected UnresolvedExponential";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnresolvedExponential);
  }
}

TEST(Casimir, SpaceCasimirs) {
  const auto& cat = shipped_catalog();
  EXPECT_EQ(casimir(cat, "real_gd", "cas_ge"), space_casimir());
  EXPECT_EQ(casimir(cat, "real_hf", "cas_hg"), space_casimir());
  EXPECT_EQ(casimir(cat, "real_ib", "cas_hg"), space_casimir());
}

TEST(Casimir, TimeCasimirs) {
  const auto& cat = shipped_catalog();
  EXPECT_EQ(casimir(cat, "real_ke", "cas_hg"), time_casimir());
  EXPECT_EQ(casimir(cat, "real_jd", "cas_je"), time_casimir());
  EXPECT_EQ(casimir(cat, "real_lb", "cas_hg"), time_casimir());
}

TEST(Casimir, MismatchedAlgebraRejected) {
  try {
    (void)casimir(shipped_catalog(), "real_sl2_bc", "cas_hg");
    FAIL() << "expected TypeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeMismatch);
  }
}

TEST(Casimir, CatalogChecksPass) {
  for (const auto& id : shipped_catalog().list(EntryKind::Casimir)) {
    CheckReport rep = check_casimir(shipped_catalog(), id);
    EXPECT_FALSE(rep.records.empty()) << id;
    EXPECT_TRUE(rep.passed()) << id << "\n" << status_line(rep);
  }
}

TEST(Symmetry, DilationRescalesCasimir) {
  const auto& ra = realized("real_hf");
  DiffOp e = space_casimir();
  EXPECT_EQ(op_commutator(e, ra.op("cD")), e.scaled(2));
}

TEST(Symmetry, TimeConformalFactor) {
  const auto& ra = realized("real_lb");
  DiffOp e = time_casimir();
  DiffOp lambda = (DiffOp::t() * DiffOp::shift_t(-1)).scaled(2);
  EXPECT_EQ(op_commutator(e, ra.op("cC")), lambda * e);
}

TEST(Symmetry, SpaceConformalFactor) {
  // {t(T_x + 1) + sigma m x T_x^{-1}} E.
  const auto& ra = realized("real_gd");
  DiffOp e = space_casimir();
  DiffOp lambda = DiffOp::t() * (DiffOp::shift_x(1) + DiffOp::one()) +
                  (DiffOp::x() * DiffOp::shift_x(-1)).scaled(sigma() * mass());
  EXPECT_EQ(op_commutator(e, ra.op("C")), lambda * e);
}

TEST(Symmetry, EveryTableHolds) {
  for (const auto& id : shipped_catalog().list(EntryKind::SymmetryTable)) {
    CheckReport rep = verify_symmetry_table(shipped_catalog(), id);
    EXPECT_EQ(rep.records.size(), 6u) << id;
    EXPECT_TRUE(rep.passed()) << id << "\n" << status_line(rep);
  }
}

TEST(Continuum, ForwardDifferenceTendsToDerivative) {
  EXPECT_EQ(continuum_part(realized("real_hf").op("cP"), kSigma), DiffOp::dx());
}

TEST(Continuum, SpaceBoost) {
  DiffOp expected = -(DiffOp::t() * DiffOp::dx()) - DiffOp::x().scaled(mass());
  EXPECT_EQ(continuum_part(realized("real_gd").op("K"), kSigma), expected);
}

TEST(Continuum, TimeConformal) {
  DiffOp expected = DiffOp::t().pow(2) * DiffOp::dt() + DiffOp::t() * DiffOp::x() * DiffOp::dx() +
                    DiffOp::t().scaled(Rational(1, 2)) + DiffOp::x().pow(2).scaled(mass() * ParamPoly(Rational(1, 2)));
  EXPECT_EQ(continuum_part(realized("real_jd").op("C"), kTau), expected);
}

TEST(Continuum, EveryRealizationRecoversVectorFields) {
  for (const auto& id : shipped_catalog().list(EntryKind::Realization)) {
    CheckReport rep = check_continuum_limit(shipped_catalog(), id, 8);
    EXPECT_TRUE(rep.passed()) << id << "\n" << status_line(rep);
  }
}

TEST(Errata, CorruptedRealizationIsSuspectedWithResidual) {
  const auto& cat = shipped_catalog();
  std::string text = serialize(cat.load("real_gd"));
  auto pos = text.find("3*exp");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 5, "2*exp");
  Catalog bad = cat.with_replaced(text);
  CheckReport rep = verify_realization(bad, "real_gd");
  annotate_errata(bad, rep);
  ASSERT_FALSE(rep.failures().empty());
  for (const auto* f : rep.failures()) {
    EXPECT_EQ(f->status, Status::ErratumSuspected);
    EXPECT_NE(f->residual, "0");
  }
  bool located = false;
  for (const auto* f : rep.failures())
    located = located || f->detail.find("not applied: literal 2 -> 3") != std::string::npos;
  EXPECT_TRUE(located) << status_line(rep);
  EXPECT_FALSE(rep.passed());
  EXPECT_TRUE(rep.passed(true));
}
