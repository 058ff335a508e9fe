#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "densc/debruijn.hpp"
#include "densc/error.hpp"
#include "densc/quadrature.hpp"
#include "densc/target_eval.hpp"
#include "support.hpp"

using namespace densc;
using namespace testsupport;

namespace {

// A one-dimensional integrand on variable 0 with its exact integral.
struct Piece {
  CExpr body;
  double integral;
};

Piece random_piece(Gen& g, const PdfType& t) {
  CExpr x = CExpr::var(0);
  if (t.kind() == TypeKind::Int) {
    // exp(-r |k|) summed over the integers.
    double r = g.uniform(0.3, 2.0);
    CExpr k = cx::cast_real(x);
    CExpr absk = cx::ite(cx::less(k, cx::real(0.0)), cx::neg(k), k);
    double q = std::exp(-r);
    return {cx::unary(OpKind::Exp, cx::mul(cx::real(-r), absk)), (1 + q) / (1 - q)};
  }
  if (g.coin()) {
    double a = g.uniform(-5.0, 5.0);
    double b = a + g.uniform(0.1, 4.0);
    double c = g.uniform(0.5, 3.0);
    return {cx::ite(cx::land(cx::le(cx::real(a), x), cx::le(x, cx::real(b))), cx::real(c), cx::real(0.0)), c * (b - a)};
  }
  double m = g.uniform(-3.0, 3.0);
  double s = g.uniform(0.2, 2.0);
  CExpr d = cx::sub(x, cx::real(m));
  return {cx::unary(OpKind::Exp, cx::mul(cx::real(-s), cx::mul(d, d))), std::sqrt(M_PI / s)};
}

// Rebinds variable 0 of a piece to a projection of a pair-valued variable 0.
CExpr on(const CExpr& body, OpKind proj) { return cexpr_subst(0, cx::unary(proj, CExpr::var(0)), body); }

}  // namespace

TEST_CASE("evaluator examples") {
  QuadConfig q;
  CHECK(eval_cexpr(State(), cx::integer(4), q) == Val::integer(4LL));
  CExpr v0 = CExpr::var(0);
  CExpr bsum = cx::add(cx::mul(cx::indicator(cx::eq(v0, cx::boolean(true))), cx::real(0.3)),
                       cx::mul(cx::indicator(cx::eq(v0, cx::boolean(false))), cx::real(0.7)));
  CHECK(eval_real(State(), CExpr::integral(bsum, PdfType::boolean()), q) == doctest::Approx(1.0).epsilon(1e-15));
  CExpr box = cx::indicator(cx::land(cx::le(cx::real(0.0), v0), cx::le(v0, cx::real(1.0))));
  CHECK(std::abs(eval_real(State(), CExpr::integral(box, PdfType::real()), q) - 1.0) < 1e-6);
}

TEST_CASE("stock measure normalizations") {
  QuadConfig q;
  CHECK(integrate_stock([](const Val&) { return 1.0; }, PdfType::unit(), q).value == 1.0);
  CHECK(integrate_stock([](const Val&) { return 1.0; }, PdfType::prod(PdfType::boolean(), PdfType::boolean()), q)
            .value == 4.0);
  auto gauss = [](const Val& x) { return std::exp(-x.as_real() * x.as_real() / 2) / std::sqrt(2 * M_PI); };
  QuadResult r = integrate_stock(gauss, PdfType::real(), q);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0) < 1e-6);
  auto pois = [](const Val& k) {
    double n = k.as_int().convert_to<double>();
    return n < 0 ? 0.0 : std::exp(-2.0 + n * std::log(2.0) - std::lgamma(n + 1));
  };
  QuadResult p = integrate_stock(pois, PdfType::integer(), q);
  CHECK(std::abs(p.value - 1.0) < 1e-6);
}

TEST_CASE("divergent integrals evaluate to zero with a flag") {
  QuadConfig q;
  q.max_window_doublings = 4;
  EvalDiagnostics d;
  CHECK(eval_real(State(), CExpr::integral(cx::real(1.0), PdfType::real()), q, &d) == 0.0);
  CHECK(d.divergent_integrals == 1);
}

TEST_CASE("integrand is clamped at zero") {
  QuadConfig q;
  CExpr v0 = CExpr::var(0);
  CExpr e = CExpr::integral(cx::ite(cx::eq(v0, cx::boolean(true)), cx::real(-5.0), cx::real(2.0)), PdfType::boolean());
  CHECK(eval_real(State(), e, q) == 2.0);
}

TEST_CASE("nesting cap") {
  QuadConfig q;
  q.max_real_nesting = 1;
  CExpr inner = CExpr::integral(cx::real(0.0), PdfType::real());
  CHECK_THROWS_AS(eval_real(State(), CExpr::integral(inner, PdfType::real()), q), EvalError);
}

TEST_CASE("oracle equivalence on integral-free terms") {
  Gen g(17);
  QuadConfig q;
  for (int i = 0; i < 500; ++i) {
    std::vector<PdfType> env{random_type(g), random_type(g), random_type(g)};
    CExpr e = random_cexpr(g, env, random_type(g), 5);
    std::vector<Val> st = random_state(g, env);
    CHECK(same_val(eval_cexpr(State(st), e, q), ref_eval(st, e)));
  }
}

TEST_CASE("iterated integrals agree in either order") {
  Gen g(23);
  QuadConfig q;
  const PdfType kinds[] = {PdfType::real(), PdfType::integer()};
  for (int i = 0; i < 50; ++i) {
    PdfType a = kinds[g.pick(0, 1)], b = kinds[g.pick(0, 1)];
    Piece f = random_piece(g, a), h = random_piece(g, b);
    CExpr ab = cx::mul(on(f.body, OpKind::Fst), on(h.body, OpKind::Snd));
    CExpr ba = cx::mul(on(h.body, OpKind::Fst), on(f.body, OpKind::Snd));
    double v1 = eval_real(State(), CExpr::integral(ab, PdfType::prod(a, b)), q);
    double v2 = eval_real(State(), CExpr::integral(ba, PdfType::prod(b, a)), q);
    double exact = f.integral * h.integral;
    CHECK(std::abs(v1 - v2) <= 10 * q.rel_tol * std::abs(exact));
    CHECK(std::abs(v1 - exact) <= 10 * q.rel_tol * std::abs(exact));
  }
}

TEST_CASE("linearity") {
  Gen g(29);
  QuadConfig q;
  for (int i = 0; i < 30; ++i) {
    PdfType t = g.coin() ? PdfType::real() : PdfType::integer();
    Piece f = random_piece(g, t), h = random_piece(g, t);
    double a = g.uniform(0.1, 3.0), b = g.uniform(0.1, 3.0);
    CExpr sum = cx::add(cx::mul(cx::real(a), f.body), cx::mul(cx::real(b), h.body));
    double lhs = eval_real(State(), CExpr::integral(sum, t), q);
    double fi = eval_real(State(), CExpr::integral(f.body, t), q);
    double hi = eval_real(State(), CExpr::integral(h.body, t), q);
    double exact = a * f.integral + b * h.integral;
    CHECK(std::abs(lhs - (a * fi + b * hi)) <= 10 * q.rel_tol * exact);
    CHECK(std::abs(lhs - exact) <= 10 * q.rel_tol * exact);
  }
}

TEST_CASE("indicator calibration") {
  Gen g(31);
  QuadConfig q;
  for (int i = 0; i < 100; ++i) {
    double a = g.uniform(-100.0, 100.0), b = g.uniform(-100.0, 100.0);
    if (a > b) std::swap(a, b);
    CExpr v0 = CExpr::var(0);
    CExpr box = cx::indicator(cx::land(cx::le(cx::real(a), v0), cx::le(v0, cx::real(b))));
    double got = eval_real(State(), CExpr::integral(box, PdfType::real()), q);
    CHECK(std::abs(got - (b - a)) <= q.rel_tol * std::max(1.0, b - a));
  }
}

TEST_CASE("integrate_density uses the argument type") {
  QuadConfig q;
  CExpr f = cx::ite(cx::fst(CExpr::var(0)), cx::real(0.25), cx::real(0.75));
  QuadResult r = integrate_density(f, PdfType::prod(PdfType::boolean(), PdfType::unit()), q);
  CHECK(r.value == 1.0);
}
