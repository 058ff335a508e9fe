#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "densc/compiler.hpp"
#include "densc/debruijn.hpp"
#include "densc/sampler.hpp"
#include "densc/syntax.hpp"
#include "densc/target_eval.hpp"
#include "support.hpp"

using namespace densc;
using namespace testsupport;

namespace {

const char* kWorked =
    "let x = random uniform_real((0.0, 1.0)) in let y = random bernoulli(x) in if y then x + 1.0 else x";

Val rpair(double a, double b) { return Val::pair(Val::real(a), Val::real(b)); }

CExpr uniform01(const CExpr& x) { return dist_dens_cexpr(Dist::UniformReal, CExpr::val(rpair(0, 1)), x); }

// Worked example density: triangle on [0, 2].
double triangle(double x) {
  if (x >= 1.0 && x <= 2.0) return x - 1.0;
  if (x >= 0.0 && x <= 1.0) return 1.0 - x;
  return 0.0;
}

}  // namespace

TEST_CASE("fail compiles to the zero density") {
  DensityCtxt c;
  auto fs = compile_all(c, Expr::fail(PdfType::real()));
  REQUIRE(fs.size() == 1);
  CHECK(fs[0] == cx::real(0.0));
}

TEST_CASE("no rule for scaling by zero") {
  DensityCtxt c;
  Expr e = Expr::op(Operator(OpKind::Mult), Expr::pair(Expr::random(Dist::Gaussian, Expr::val(rpair(0, 1))),
                                                       Expr::val(Val::real(0.0))));
  CHECK(compile_all(c, e).empty());
}

TEST_CASE("no rule for a product of two random terms") {
  Expr e = parse_program("random gaussian((0.0, 1.0)) * random uniform_real((0.0, 1.0))");
  CHECK_THROWS_WITH_AS(compile_program(e), doctest::Contains("no compilation rule applies"), NoRuleError);
}

TEST_CASE("constant-parameter bernoulli") {
  CompiledProgram p = compile_program(Expr::random(Dist::Bernoulli, Expr::val(Val::real(0.5))));
  QuadConfig q;
  CHECK(p.type == PdfType::boolean());
  CHECK(eval_density_at(p.density, Val::boolean(true), q) == doctest::Approx(0.5));
}

TEST_CASE("values compile to a point mass") {
  CompiledProgram p = compile_program(Expr::val(Val::integer(3LL)));
  QuadConfig q;
  CHECK(p.type == PdfType::integer());
  CHECK(eval_density_at(p.density, Val::integer(3LL), q) == 1.0);
  CHECK(eval_density_at(p.density, Val::integer(4LL), q) == 0.0);
}

TEST_CASE("compile_program errors") {
  CHECK_THROWS_WITH_AS(compile_program(Expr::var(0)), doctest::Contains("not closed"), CompileError);
  Expr bad = Expr::op(Operator(OpKind::Not), Expr::val(Val::real(1.0)));
  CHECK_THROWS_WITH_AS(compile_program(bad), doctest::Contains("ill-typed"), TypeError);
}

TEST_CASE("worked example yields a single density") {
  Expr e = parse_program(kWorked);
  auto all = compile_program_all(e);
  CHECK(all.size() == 1);
  CompiledProgram p = compile_program(e);
  CHECK(p.type == PdfType::real());
  CHECK(free_vars(p.density) == std::set<std::size_t>{0});
  CHECK(typecheck_cexpr(TypeEnv().insert(PdfType::real()), p.density) == PdfType::real());
  QuadConfig q;
  for (double x = -0.5; x <= 2.5; x += 0.0625)
    CHECK(std::abs(eval_density_at(p.density, Val::real(x), q) - triangle(x)) < 1e-9);
}

TEST_CASE("expr_rf_to_cexpr") {
  Val v = Val::pair(Val::boolean(true), Val::real(2.0));
  CHECK(expr_rf_to_cexpr(Expr::val(v)) == CExpr::val(v));
  Expr add = Expr::op(Operator(OpKind::Add), Expr::pair(Expr::var(0), Expr::val(Val::integer(1LL))));
  CHECK(expr_rf_to_cexpr(add) == cx::add(CExpr::var(0), cx::integer(1)));
  Expr let = Expr::let_in(Expr::val(Val::integer(2LL)),
                          Expr::op(Operator(OpKind::Add), Expr::pair(Expr::var(0), Expr::var(0))));
  CHECK(expr_rf_to_cexpr(let) == cx::add(cx::integer(2), cx::integer(2)));
  CHECK_THROWS_AS(expr_rf_to_cexpr(Expr::fail(PdfType::unit())), CompileError);
}

TEST_CASE("expr_rf_to_cexpr agrees with the deterministic semantics") {
  Gen g(41);
  QuadConfig q;
  for (int i = 0; i < 500; ++i) {
    std::vector<PdfType> env{random_type(g), random_type(g)};
    Expr e = random_det_expr(g, env, random_type(g), 5);
    std::vector<Val> st = random_state(g, env);
    Val want = ref_eval(st, e);
    CHECK(same_val(eval_cexpr(State(st), expr_rf_to_cexpr(e), q), want));
    CHECK(same_val(expr_sem_rf(State(st), e), want));
  }
}

TEST_CASE("integrate_vars") {
  TypeEnv b({PdfType::boolean()});
  CExpr e = cx::indicator(cx::eq(CExpr::var(0), cx::boolean(true)));
  CHECK(integrate_vars(b, {}, e) == e);
  CExpr once = integrate_vars(b, {0}, e);
  CHECK(once == CExpr::integral(e, PdfType::boolean()));
  QuadConfig q;
  CHECK(eval_real(State(), once, q) == 1.0);

  // Product of a uniform on [0, 1] in variable 0 and a Poisson(2) in variable 1.
  TypeEnv env({PdfType::real(), PdfType::integer()});
  CExpr delta = cx::mul(uniform01(CExpr::var(0)),
                        dist_dens_cexpr(Dist::Poisson, cx::real(2.0), CExpr::var(1)));
  double xy = eval_real(State(), integrate_vars(env, {0, 1}, delta), q);
  double yx = eval_real(State(), integrate_vars(env, {1, 0}, delta), q);
  CHECK(std::abs(xy - 1.0) < 1e-6);
  CHECK(std::abs(xy - yx) < 1e-6);
}

TEST_CASE("branch probability") {
  QuadConfig q;
  CHECK(eval_real(State(), branch_prob_cexpr(DensityCtxt{}), q) == 1.0);
  DensityCtxt c;
  c.vs = {0};
  c.env = TypeEnv({PdfType::real()});
  c.delta = uniform01(CExpr::var(0));
  CHECK(std::abs(eval_real(State(), branch_prob_cexpr(c), q) - 1.0) < 1e-6);
  c.delta = cx::mul(c.delta, cx::indicator(cx::le(CExpr::var(0), cx::real(0.0))));
  CHECK(std::abs(eval_real(State(), branch_prob_cexpr(c), q)) < 1e-6);
}

TEST_CASE("marginal densities of a product") {
  QuadConfig q;
  TypeEnv env({PdfType::real(), PdfType::integer()});
  // Variable 1 carries half a Poisson(2), so its mass is 0.5.
  CExpr dy = cx::mul(cx::real(0.5), dist_dens_cexpr(Dist::Poisson, cx::real(2.0), CExpr::var(1)));
  CExpr delta = cx::mul(dist_dens_cexpr(Dist::Gaussian, CExpr::val(rpair(1, 2)), CExpr::var(0)), dy);

  CExpr only = marg_dens_cexpr(TypeEnv({PdfType::real()}), {0}, 0, uniform01(CExpr::var(0)));
  CHECK(only == uniform01(CExpr::var(0)));

  CExpr mx = marg_dens_cexpr(env, {0, 1}, 0, delta);
  CExpr my = marg_dens_cexpr(env, {0, 1}, 1, delta);
  CExpr mxy = marg_dens2_cexpr(env, {0, 1}, 0, 1, delta);
  Gen g(8);
  for (int i = 0; i < 20; ++i) {
    double a = g.uniform(-4, 6);
    long long k = g.pick(-1, 6);
    double dx = dist_dens(Dist::Gaussian, rpair(1, 2), Val::real(a));
    double pk = 0.5 * dist_dens(Dist::Poisson, Val::real(2.0), Val::integer(k));
    CHECK(std::abs(eval_density_at(mx, Val::real(a), q) - 0.5 * dx) < 1e-6);
    CHECK(std::abs(eval_density_at(my, Val::integer(k), q) - pk) < 1e-6);
    CHECK(std::abs(eval_density_at(mxy, Val::pair(Val::real(a), Val::integer(k)), q) - dx * pk) < 1e-12);
  }
  CHECK_THROWS_AS(marg_dens_cexpr(env, {0}, 1, delta), CompileError);
  CHECK_THROWS_AS(marg_dens2_cexpr(env, {0, 1}, 1, 1, delta), CompileError);
}

TEST_CASE("dist_dens_cexpr") {
  CExpr ep = CExpr::var(1), ex = CExpr::var(0);
  CExpr zero = cx::real(0.0), one = cx::real(1.0);
  CHECK(dist_dens_cexpr(Dist::Bernoulli, ep, ex) ==
        cx::ite(cx::land(cx::le(zero, ep), cx::le(ep, one)), cx::ite(ex, ep, cx::sub(one, ep)), zero));
  QuadConfig q;
  double g0 = eval_real(State(), dist_dens_cexpr(Dist::Gaussian, CExpr::val(rpair(0, 1)), cx::real(0.0)), q);
  CHECK(std::abs(g0 - 0.398942280401432678) < 1e-9);
  CExpr die = dist_dens_cexpr(Dist::UniformInt, CExpr::val(Val::pair(Val::integer(1LL), Val::integer(6LL))), cx::integer(0));
  CHECK(eval_real(State(), die, q) == 0.0);
}

TEST_CASE("dist_dens_cexpr matches dist_dens on random points") {
  Gen g(12);
  QuadConfig q;
  for (Dist d : {Dist::Bernoulli, Dist::UniformInt, Dist::UniformReal, Dist::Gaussian, Dist::Poisson}) {
    for (int i = 0; i < 200; ++i) {
      Val p = random_val(g, dist_param_type(d));
      Val x = random_val(g, dist_result_type(d));
      double want = dist_dens(d, p, x);
      double got = eval_real(State(), dist_dens_cexpr(d, CExpr::val(p), CExpr::val(x)), q);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, want));
    }
  }
}

TEST_CASE("deterministic fast paths agree with the general rules") {
  QuadConfig q;
  // VAL only covers countable literals, so RAND needs a discrete parameter.
  const char* progs[] = {
      "random uniform_int((-2, 3))",
      "if true then random bernoulli(0.2) else random bernoulli(0.9)",
      "let x = random uniform_real((0.0, 1.0)) in if true then x else x + 1.0",
      "let b = random bernoulli(0.25) in if false then b else !b",
  };
  Gen g(77);
  for (const char* src : progs) {
    Expr e = parse_program(src);
    CompiledProgram p = compile_program(e);
    auto all = compile_program_all(e);
    CHECK(all.size() >= 2);
    for (int i = 0; i < 100; ++i) {
      Val x = random_val(g, p.type);
      double ref = eval_density_at(all[0], x, q);
      for (std::size_t k = 1; k < all.size(); ++k) CHECK(std::abs(eval_density_at(all[k], x, q) - ref) < 1e-6);
    }
  }
}

TEST_CASE("compiled densities are closed and well-typed") {
  const char* progs[] = {
      "let p = random uniform_real((0.2, 0.9)) in random bernoulli(p)",
      "let n = random uniform_int((1, 4)) in let k = random uniform_int((0, n)) in k",
      "let m = random gaussian((0.0, 1.0)) in let x = random gaussian((m, 0.5)) in (x, m)",
      "-(random gaussian((1.0, 2.0)) * -3.0 + 1.0)",
      "inverse(exp(random uniform_real((0.0, 1.0))))",
      "let a = random poisson(2.0) in let b = random bernoulli(0.5) in snd((a, b))",
      "if random bernoulli(0.3) then fail : real else random gaussian((0.0, 1.0))",
  };
  for (const char* src : progs) {
    CAPTURE(src);
    CompiledProgram p = compile_program(parse_program(src));
    auto fv = free_vars(p.density);
    CHECK(fv.size() <= 1);
    if (!fv.empty()) CHECK(*fv.begin() == 0);
    CHECK(typecheck_cexpr(TypeEnv().insert(p.type), p.density) == PdfType::real());
  }
}

TEST_CASE("stream order and deduplication") {
  // VAL gives the only density for a literal; the stream has no duplicates.
  auto all = compile_program_all(Expr::val(Val::boolean(true)));
  CHECK(all.size() == 1);
  auto some = compile_program_all(parse_program("random bernoulli(0.3)"), 1);
  CHECK(some.size() == 1);
  CHECK(some[0] == compile_program(parse_program("random bernoulli(0.3)")).density);
}
