#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "densc/compiler.hpp"
#include "densc/error.hpp"
#include "densc/syntax.hpp"
#include "densc/target_eval.hpp"
#include "densc/verify.hpp"

using namespace densc;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

VerifyReport run(const std::string& src, std::uint64_t n = 100000, std::uint64_t seed = 1) {
  Expr e = parse_program(src);
  CompiledProgram p = compile_program(e);
  VerifyConfig cfg;
  cfg.n_samples = n;
  cfg.seed = seed;
  return verify_program(e, p.density, p.type, cfg);
}

}  // namespace

TEST_CASE("thresholds") {
  CHECK(ks_threshold(1, 0.01) == doctest::Approx(1.628).epsilon(1e-3));
  CHECK(ks_threshold(10000, 0.01) == doctest::Approx(0.01628).epsilon(1e-3));
  CHECK(chi_square_threshold(1, 0.05) == doctest::Approx(3.841459).epsilon(1e-6));
  CHECK(chi_square_threshold(10, 0.01) == doctest::Approx(23.209251).epsilon(1e-6));
}

TEST_CASE("ks statistic") {
  const int n = 999;
  std::vector<double> q;
  for (int i = 1; i <= n; ++i) q.push_back(i / double(n + 1));
  CHECK(ks_statistic(q, [](double x) { return x; }) <= 1.0 / (n + 1) + 1e-12);

  std::mt19937_64 eng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(100000);
  for (double& x : s) x = u(eng);
  std::sort(s.begin(), s.end());
  double thr = ks_threshold(s.size(), 0.01);
  CHECK(ks_statistic(s, [](double x) { return std::clamp(x, 0.0, 1.0); }) < thr);
  CHECK(ks_statistic(s, normal_cdf) > thr);
}

TEST_CASE("chi-square statistic") {
  auto die = [](const Val& v) {
    long long k = v.as_int().convert_to<long long>();
    return (k >= 1 && k <= 6) ? 1.0 / 6.0 : 0.0;
  };
  std::map<Val, std::uint64_t> exact;
  for (long long k = 1; k <= 6; ++k) exact[Val::integer(k)] = 10000;
  ChiSquare c = chi_square_statistic(exact, die, 60000);
  CHECK(c.statistic == doctest::Approx(0.0));

  std::mt19937_64 eng(6);
  std::uniform_int_distribution<int> face(1, 6);
  std::map<Val, std::uint64_t> rolled;
  for (int i = 0; i < 60000; ++i) ++rolled[Val::integer(static_cast<long long>(face(eng)))];
  ChiSquare r = chi_square_statistic(rolled, die, 60000);
  CHECK(r.statistic <= chi_square_threshold(r.dof, 0.01));

  std::bernoulli_distribution coin(0.5);
  std::map<Val, std::uint64_t> flips;
  for (int i = 0; i < 100000; ++i) ++flips[Val::boolean(coin(eng))];
  auto p07 = [](const Val& v) { return v.as_bool() ? 0.7 : 0.3; };
  ChiSquare b = chi_square_statistic(flips, p07, 100000);
  CHECK(b.statistic > chi_square_threshold(b.dof, 0.01));

  // An observation where the model puts no mass.
  std::map<Val, std::uint64_t> stray{{Val::integer(0LL), 1}, {Val::integer(1LL), 99}};
  auto only1 = [](const Val& v) { return v == Val::integer(1LL) ? 1.0 : 0.0; };
  CHECK(std::isinf(chi_square_statistic(stray, only1, 100).statistic));
}

TEST_CASE("tabulated cdf") {
  QuadConfig q;
  auto dens = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI); };
  TabulatedCdf cdf(dens, q);
  CHECK(cdf.converged());
  CHECK(std::abs(cdf.total() - 1.0) < 1e-6);
  for (double x : {-3.0, -1.0, -0.2, 0.0, 0.7, 2.5})
    CHECK(std::abs(cdf(x) - normal_cdf(x)) < 1e-5);
  CHECK(std::abs(cdf.quantile(0.975) - 1.959964) < 1e-3);

  // A jump at a breakpoint.
  auto box = [](double x) { return (x >= 0.0 && x <= 3.0) ? 0.2 : (x >= -1.0 && x < 0.0 ? 0.4 : 0.0); };
  TabulatedCdf bc(box, q, {-1.0, 0.0, 3.0});
  CHECK(std::abs(bc(0.0) - 0.4) < 1e-6);
  CHECK(std::abs(bc(1.5) - 0.7) < 1e-6);
  CHECK(std::abs(bc(3.0) - 1.0) < 1e-6);
}

TEST_CASE("configuration is checked") {
  Expr e = parse_program("random bernoulli(0.5)");
  CompiledProgram p = compile_program(e);
  VerifyConfig cfg;
  cfg.n_samples = 50;
  CHECK_THROWS_AS(verify_program(e, p.density, p.type, cfg), Error);
  cfg.n_samples = 1000;
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(verify_program(e, p.density, p.type, cfg), Error);
  Expr r = parse_program("random gaussian((0.0, 1.0))");
  CompiledProgram pr = compile_program(r);
  VerifyConfig small;
  small.n_samples = 500;
  CHECK_THROWS_AS(verify_program(r, pr.density, pr.type, small), Error);
}

TEST_CASE("fail is a vacuous pass") {
  VerifyReport r = run("fail : real", 1000);
  CHECK(r.branch_prob_empirical == 0.0);
  CHECK(r.branch_prob_density == 0.0);
  CHECK(r.passed);
}

TEST_CASE("bernoulli passes chi-square") {
  VerifyReport r = run("random bernoulli(0.5)");
  CHECK(r.test_name == "chi-square");
  CHECK(r.passed);
}

TEST_CASE("worked example passes and integrates to one") {
  VerifyReport r = run(
      "let x = random uniform_real((0.0, 1.0)) in let y = random bernoulli(x) in if y then x + 1.0 else x");
  CHECK(r.test_name == "KS");
  CHECK(std::abs(r.branch_prob_density - 1.0) < 1e-3);
  CHECK(r.passed);
  Json j = r.to_json();
  CHECK(j.contains("branch_prob_empirical"));
  CHECK(j["passed"].get<bool>());
  CHECK(r.to_text().find("PASSED") != std::string::npos);
}

TEST_CASE("sub-probability mass is compared") {
  VerifyReport r = run("if random bernoulli(0.25) then fail : int else random poisson(3.0)");
  CHECK(r.passed);
  CHECK(std::abs(r.branch_prob_density - 0.75) < 1e-6);
  CHECK(std::abs(r.branch_prob_empirical - 0.75) < 0.01);
}

TEST_CASE("pairs with a real component test each marginal") {
  VerifyReport r = run("let a = random gaussian((0.0, 1.0)) in let b = random bernoulli(0.3) in (a, b)", 20000);
  CHECK(r.tests.size() == 2);
  CHECK(r.passed);
}

TEST_CASE("marginals of a product density") {
  QuadConfig q;
  PdfType t = PdfType::prod(PdfType::real(), PdfType::boolean());
  CExpr f = cx::mul(dist_dens_cexpr(Dist::Gaussian, CExpr::val(Val::pair(Val::real(0.0), Val::real(1.0))),
                                    cx::fst(CExpr::var(0))),
                    cx::ite(cx::snd(CExpr::var(0)), cx::real(0.3), cx::real(0.7)));
  CHECK(eval_density_at(snd_marginal(f, t), Val::boolean(true), q) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(eval_density_at(fst_marginal(f, t), Val::real(0.0), q) == doctest::Approx(0.398942).epsilon(1e-5));
}

TEST_CASE("mutated densities are rejected") {
  for (const char* src : {"random bernoulli(0.4)", "random poisson(4.0)",
                          "let x = random uniform_real((0.0, 1.0)) in let y = random bernoulli(x) in "
                          "if y then x + 1.0 else x"}) {
    CAPTURE(src);
    Expr e = parse_program(src);
    CompiledProgram p = compile_program(e);
    Rng rng(3);
    std::vector<Val> draws;
    for (int i = 0; i < 1001; ++i) draws.push_back(*sample_expr(State(), e, rng));
    CExpr bad = mutate_density(p.density, p.type, draws);
    VerifyConfig cfg;
    CHECK_FALSE(verify_program(e, bad, p.type, cfg).passed);
  }
}

TEST_CASE("calibration") {
  int fails = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) fails += !run("random bernoulli(0.3)", 2000, seed).passed;
  CHECK(fails <= 3);
  fails = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    fails += !run("random uniform_real((-1.0, 2.0))", 2000, seed).passed;
  CHECK(fails <= 3);
}
