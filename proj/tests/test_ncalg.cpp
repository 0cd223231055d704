#include <gtest/gtest.h>

#include "jordan/hopf.hpp"
#include "support.hpp"

using namespace jordan;
using jordan::test::shipped_catalog;
using jordan::test::tensor_term;
using jordan::test::term;
using jordan::test::zpow;

namespace jordan {
inline void PrintTo(const NC& e, std::ostream* os) { *os << "element of order " << e.order() << " with " << e.terms().size() << " terms"; }
}  // namespace jordan

namespace {

HopfAlgebra& algebra(const std::string& id) {
  static std::map<std::string, std::unique_ptr<HopfAlgebra>> cache;
  auto& slot = cache[id];
  if (!slot) slot = std::make_unique<HopfAlgebra>(shipped_catalog().get<Presentation>(id));
  return *slot;
}

NC eval(HopfAlgebra& h, const std::string& text, int order) { return h.evaluator().element(parse_expr(text), order); }

std::string show(HopfAlgebra& h, const NC& e) { return render(e, h.names(), h.presentation().param); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(NormalOrder, ReordersAgainstExponentialBracket) {
  // J+J3 = J3J+ - [J3,J+] and [J3,J+] = (e^{2zJ+} - 1)/z = 2J+ + 2zJ+^2 + (4/3)z^2 J+^3 + ...
  HopfAlgebra& h = algebra("uz_sl2_bc");
  auto& a = h.algebra();
  const int n = 2;
  NC expected = term(a, {"J3", "Jp"}, zpow(1, 0, n)) - term(a, {"Jp"}, zpow(2, 0, n)) -
                term(a, {"Jp", "Jp"}, zpow(2, 1, n)) - term(a, {"Jp", "Jp", "Jp"}, zpow(Rational(4, 3), 2, n));
  NC got = eval(h, "Jp*J3", n);
  EXPECT_EQ(got, expected) << show(h, got);
}

TEST(NormalOrder, OrderedWordUnchanged) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  EXPECT_EQ(eval(h, "Jp*Jp", 4), term(h.algebra(), {"Jp", "Jp"}, zpow(1, 0, 4)));
}

TEST(NormalOrder, SinhPresentationCommutator) {
  HopfAlgebra& h = algebra("uz_sl2_ba");
  EXPECT_EQ(eval(h, "X*Y - Y*X", 4), h.generator("H", 4));
}

TEST(NormalOrder, UnknownGeneratorRejected) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  EXPECT_EQ(code_of([&] { (void)h.algebra().index("Q"); }), ErrorCode::UnknownGenerator);
}

TEST(NormalOrder, FuelExhaustionIsAnError) {
  HopfAlgebra h(shipped_catalog().get<Presentation>("uz_sl2_bc"), RewriteLimits{12, 3});
  EXPECT_EQ(code_of([&] { (void)h.evaluator().element(parse_expr("Jp^3*J3^3*Jm^2"), 4); }),
            ErrorCode::FuelExhausted);
}

TEST(NormalOrder, DegreeCapIsAnError) {
  HopfAlgebra h(shipped_catalog().get<Presentation>("uz_sl2_bc"), RewriteLimits{3, 1'000'000});
  EXPECT_EQ(code_of([&] { (void)h.evaluator().element(parse_expr("Jp^5"), 2); }), ErrorCode::DegreeCapExceeded);
}

TEST(Commutator, BorelPairClosesOnCartan) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  EXPECT_EQ(h.commutator(h.generator("Jp", 4), h.generator("Jm", 4)), h.generator("J3", 4));
}

TEST(Commutator, MassIsCentral) {
  HopfAlgebra& h = algebra("us_schr_gb_gc");
  for (const auto& g : h.names()) EXPECT_TRUE(h.commutator(h.generator("M", 4), h.generator(g, 4)).is_zero()) << g;
}

TEST(Commutator, BoostMomentumExpandsShift) {
  HopfAlgebra& h = algebra("us_schr_gb_gc");
  auto& a = h.algebra();
  const int n = 2;
  NC expected = term(a, {"M"}, zpow(1, 0, n)) - term(a, {"M", "P"}, zpow(1, 1, n)) +
                term(a, {"M", "P", "P"}, zpow(Rational(1, 2), 2, n));
  EXPECT_EQ(h.commutator(h.generator("K", n), h.generator("P", n)), expected);
}

TEST(ElementFunctions, InvertOnePlusIsGeometric) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  auto& a = h.algebra();
  const int n = 3;
  NC x = term(a, {"Jp"}, zpow(-2, 1, n));
  NC expected = NC::one(n);
  for (int k = 1; k <= n; ++k)
    expected += term(a, std::vector<std::string>(static_cast<std::size_t>(k), "Jp"), zpow(rational_pow(2, k), k, n));
  EXPECT_EQ(invert_one_plus(a, x), expected);
  EXPECT_EQ(h.mul(NC::one(n) + x, invert_one_plus(a, x)), NC::one(n));
}

TEST(ElementFunctions, ExpOfZeroIsOne) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  EXPECT_EQ(exp_element(h.algebra(), NC(4)), NC::one(4));
}

TEST(ElementFunctions, MercatorInverseOfMap) {
  HopfAlgebra& h = algebra("uz_sl2_be_bf");
  auto& a = h.algebra();
  const int n = 2;
  NC expected = term(a, {"cJp"}, zpow(1, 0, n)) + term(a, {"cJp", "cJp"}, zpow(1, 1, n)) +
                term(a, {"cJp", "cJp", "cJp"}, zpow(Rational(4, 3), 2, n));
  // log(1 - 2z J) carries one power of z, which the division by 2z removes.
  NC log_part = log_one_plus(a, term(a, {"cJp"}, zpow(-2, 1, n + 1)));
  NC quotient = (log_part.divided_by(ScalarMonomial{Rational(-2), 1})).truncated(n);
  EXPECT_EQ(quotient, expected);
  EXPECT_EQ(eval(h, "-log(1 - 2*z*cJp)/(2*z)", n), expected);
}

TEST(ElementFunctions, ExpLogRoundTrip) {
  HopfAlgebra& h = algebra("us_schr_gb_gc");
  auto& a = h.algebra();
  const int n = 4;
  NC x = term(a, {"K", "P"}, zpow(1, 1, n)) + term(a, {"D"}, zpow(Rational(-1, 3), 2, n));
  EXPECT_EQ(exp_element(a, log_one_plus(a, x)), NC::one(n) + x);
  EXPECT_EQ(log_one_plus(a, exp_element(a, x) - NC::one(n)), x);
}

TEST(ElementFunctions, NonNilpotentArgumentRejected) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  EXPECT_EQ(code_of([&] { (void)exp_element(h.algebra(), h.generator("Jp", 3)); }), ErrorCode::NonNilpotentArgument);
  EXPECT_EQ(code_of([&] { (void)invert_one_plus(h.algebra(), h.generator("J3", 3)); }),
            ErrorCode::NonNilpotentArgument);
}

TEST(Substitute, ShiftMapSendsRaisingToX) {
  const auto& cat = shipped_catalog();
  HopfAlgebra& src = algebra("uz_sl2_ba");
  Evaluator<Series> ev = twist_evaluator(src, cat.get<TwistMap>("map_bb"));
  EXPECT_EQ(ev.binding("Jp", 4), src.generator("X", 4));
}

TEST(Substitute, BoostIsUnchanged) {
  const auto& cat = shipped_catalog();
  HopfAlgebra& src = algebra("us_schr_gb_gc");
  Evaluator<Series> ev = twist_evaluator(src, cat.get<TwistMap>("map_hb_hc"));
  EXPECT_EQ(ev.binding("cK", 4), src.generator("K", 4));
}

TEST(Substitute, ConformalImageExpandsShiftedDilation) {
  // C - (tau/4)(D + M/2)^2 = C - (tau/4)D^2 - (tau/4)MD - (tau/16)M^2 with M central.
  const auto& cat = shipped_catalog();
  HopfAlgebra& src = algebra("ut_schr_jb_jc");
  auto& a = src.algebra();
  const int n = 3;
  Evaluator<Series> ev = twist_evaluator(src, cat.get<TwistMap>("map_kb_kc"));
  NC expected = term(a, {"C"}, zpow(1, 0, n)) - term(a, {"D", "D"}, zpow(Rational(1, 4), 1, n)) -
                term(a, {"M", "D"}, zpow(Rational(1, 4), 1, n)) - term(a, {"M", "M"}, zpow(Rational(1, 16), 1, n));
  EXPECT_EQ(ev.binding("cC", n), expected);
}

TEST(Substitute, UnmappedGeneratorRejected) {
  const auto& cat = shipped_catalog();
  HopfAlgebra& src = algebra("uz_sl2_bc");
  Evaluator<Series> ev = twist_evaluator(src, cat.get<TwistMap>("map_bd"));
  EXPECT_EQ(code_of([&] { (void)ev.binding("cQ", 2); }), ErrorCode::UnmappedGenerator);
}

TEST(Tensor, ComponentwiseProduct) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  auto& a = h.algebra();
  Tensor left = tensor_term(a, {}, {"Jp"}, zpow(1, 0, 3));
  Tensor right = tensor_term(a, {"Jp"}, {}, zpow(1, 0, 3));
  EXPECT_EQ(h.tmul(left, right), tensor_term(a, {"Jp"}, {"Jp"}, zpow(1, 0, 3)));
}

TEST(Tensor, ExtensionIsMultiplicative) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  const int n = 3;
  Tensor extended = h.delta(eval(h, "Jp*J3", n));
  Tensor product = h.tmul(h.coproduct(h.algebra().index("Jp"), n), h.coproduct(h.algebra().index("J3"), n));
  EXPECT_EQ(extended, product);
}

TEST(Tensor, CentralChargeIsPrimitive) {
  HopfAlgebra& h = algebra("us_schr_gb_gc");
  auto& a = h.algebra();
  Tensor expected = tensor_term(a, {}, {"M"}, zpow(1, 0, 4)) + tensor_term(a, {"M"}, {}, zpow(1, 0, 4));
  EXPECT_EQ(h.delta(h.generator("M", 4)), expected);
}

TEST(Tensor, ArityMismatchRejected) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  Tensor two = Tensor::one(2, 2), three = Tensor::one(3, 2);
  EXPECT_EQ(code_of([&] { (void)(two + three); }), ErrorCode::ArityMismatch);
}

TEST(Jacobi, DeformedSl2Passes) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  CheckReport rep = verify_jacobi(h, 4);
  EXPECT_TRUE(rep.passed()) << jordan::test::status_line(rep);
  EXPECT_EQ(rep.count(Status::Pass), 2u);
}

TEST(Jacobi, ClassicalSchrodingerPasses) {
  HopfAlgebra& h = algebra("us_schr_hd_he");
  CheckReport rep = verify_jacobi(h, 4);
  EXPECT_TRUE(rep.passed()) << jordan::test::status_line(rep);
  EXPECT_EQ(rep.count(Status::Pass), 40u);
}

TEST(Jacobi, CorruptedOscillatorTableFails) {
  // [N, A-] = -A- corrupted to -2A- breaks the (N, A-, A+) triple.
  Presentation p = shipped_catalog().get<Presentation>("uz_h4_fe_fg");
  for (auto& b : p.brackets)
    if (b.left == "cN" && b.right == "cAm") b.rhs = parse_expr("-2*cAm");
  HopfAlgebra h(p);
  CheckReport rep = verify_jacobi(h, 4);
  const CheckRecord* r = rep.find("algebra/uz_h4_fe_fg/jacobi/cAm,cN,cAp");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->status, Status::Fail);
  EXPECT_NE(r->residual, "0");
}

class NormalOrderProperties : public ::testing::TestWithParam<std::string> {};

TEST_P(NormalOrderProperties, IdempotentAndMultiplicative) {
  HopfAlgebra& h = algebra(GetParam());
  auto& a = h.algebra();
  const int n = 3;
  const auto gens = static_cast<int>(h.names().size());
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> pick(0, gens - 1), len(1, 3);
  auto random_word = [&] {
    Word w;
    for (int i = len(rng); i > 0; --i) w.push_back(static_cast<Gen>(pick(rng)));
    return w;
  };
  for (int trial = 0; trial < 20; ++trial) {
    Word u = random_word(), v = random_word();
    NC nu = normal_order(a, {{u, Series::one(n)}}, n);
    NC nv = normal_order(a, {{v, Series::one(n)}}, n);
    std::vector<std::pair<Word, Series>> again;
    for (const auto& [w, c] : nu.terms()) again.emplace_back(w, c);
    EXPECT_EQ(normal_order(a, again, n), nu);
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    EXPECT_EQ(normal_order(a, {{uv, Series::one(n)}}, n), h.mul(nu, nv));
  }
}

INSTANTIATE_TEST_SUITE_P(Catalog, NormalOrderProperties,
                         ::testing::Values("uz_sl2_ba", "uz_sl2_bc", "uz_gl2_ca", "uz_h4_fb", "us_schr_gb_gc",
                                           "ut_schr_jb_jc"));

TEST(ClassicalProjection, DegreeZeroTableIsSl2) {
  HopfAlgebra& h = algebra("uz_sl2_bc");
  const int n = 0;
  auto g = [&](const char* s) { return h.generator(s, n); };
  EXPECT_EQ(h.commutator(g("J3"), g("Jp")), g("Jp") * Rational(2));
  EXPECT_EQ(h.commutator(g("J3"), g("Jm")), g("Jm") * Rational(-2));
  EXPECT_EQ(h.commutator(g("Jp"), g("Jm")), g("J3"));
}
