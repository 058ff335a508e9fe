#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "densc/error.hpp"
#include "densc/sampler.hpp"
#include "support.hpp"

using namespace densc;
using namespace testsupport;

namespace {

Val rpair(double a, double b) { return Val::pair(Val::real(a), Val::real(b)); }
Val ipair(long long a, long long b) { return Val::pair(Val::integer(a), Val::integer(b)); }

}  // namespace

TEST_CASE("state insertion") {
  State s({Val::integer(1LL), Val::boolean(false)});
  State t = s.insert(Val::real(2.0));
  CHECK(t(0) == Val::real(2.0));
  CHECK(t(1) == Val::integer(1LL));
  CHECK(t(2) == Val::boolean(false));
  CHECK_THROWS_AS(t(3), EvalError);
}

TEST_CASE("sampler base cases") {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    CHECK_FALSE(sample_expr(State(), Expr::fail(PdfType::real()), rng).has_value());
    CHECK(*sample_expr(State(), Expr::val(Val::integer(7LL)), rng) == Val::integer(7LL));
    CHECK_FALSE(sample_expr(State(), Expr::random(Dist::UniformReal, Expr::val(rpair(3, 2))), rng).has_value());
    CHECK_FALSE(sample_dist(Dist::Gaussian, rpair(0, 0), rng).has_value());
    CHECK(*sample_dist(Dist::Bernoulli, Val::real(1.0), rng) == Val::boolean(true));
  }
}

TEST_CASE("bottom propagates through binders") {
  Rng rng(2);
  Expr e = Expr::let_in(Expr::fail(PdfType::integer()), Expr::val(Val::unit()));
  CHECK_FALSE(sample_expr(State(), e, rng).has_value());
  Expr p = Expr::pair(Expr::val(Val::unit()), Expr::random(Dist::Poisson, Expr::val(Val::real(-1.0))));
  CHECK_FALSE(sample_expr(State(), p, rng).has_value());
}

TEST_CASE("bernoulli mean") {
  Rng rng(42);
  Expr e = Expr::random(Dist::Bernoulli, Expr::val(Val::real(0.5)));
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += sample_expr(State(), e, rng)->as_bool();
  CHECK(std::abs(hits / double(n) - 0.5) < 0.01);
}

TEST_CASE("fair die frequencies") {
  Rng rng(7);
  std::map<long long, int> freq;
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++freq[sample_dist(Dist::UniformInt, ipair(1, 6), rng)->as_int().convert_to<long long>()];
  CHECK(freq.size() == 6);
  for (auto [k, c] : freq) {
    CHECK(k >= 1);
    CHECK(k <= 6);
    CHECK(std::abs(c / double(n) - 1.0 / 6.0) < 0.01);
  }
}

TEST_CASE("moments of continuous and poisson draws") {
  Rng rng(3);
  const int n = 100000;
  double s = 0, s2 = 0, p = 0, p2 = 0, big = 0, u = 0;
  for (int i = 0; i < n; ++i) {
    double x = sample_dist(Dist::Gaussian, rpair(1.0, 2.0), rng)->as_real();
    s += x;
    s2 += x * x;
    double k = sample_dist(Dist::Poisson, Val::real(3.5), rng)->as_int().convert_to<double>();
    p += k;
    p2 += k * k;
    big += sample_dist(Dist::Poisson, Val::real(80.0), rng)->as_int().convert_to<double>();
    double v = sample_dist(Dist::UniformReal, rpair(-1.0, 3.0), rng)->as_real();
    CHECK(v >= -1.0);
    CHECK(v < 3.0);
    u += v;
  }
  CHECK(std::abs(s / n - 1.0) < 0.03);
  CHECK(std::abs(s2 / n - (s / n) * (s / n) - 4.0) < 0.1);
  CHECK(std::abs(p / n - 3.5) < 0.03);
  CHECK(std::abs(p2 / n - (p / n) * (p / n) - 3.5) < 0.1);
  CHECK(std::abs(big / n - 80.0) < 0.15);
  CHECK(std::abs(u / n - 1.0) < 0.02);
}

TEST_CASE("parameter domains") {
  CHECK(dist_param_valid(Dist::Bernoulli, Val::real(0.0)));
  CHECK_FALSE(dist_param_valid(Dist::Bernoulli, Val::real(1.5)));
  CHECK_FALSE(dist_param_valid(Dist::UniformReal, rpair(1, 1)));
  CHECK(dist_param_valid(Dist::UniformInt, ipair(2, 2)));
  CHECK_FALSE(dist_param_valid(Dist::UniformInt, ipair(3, 2)));
  CHECK_FALSE(dist_param_valid(Dist::Gaussian, rpair(0, -1)));
  CHECK(dist_param_valid(Dist::Poisson, Val::real(0.0)));
  CHECK_FALSE(dist_param_valid(Dist::Poisson, Val::real(-0.1)));
}

TEST_CASE("dist_dens values") {
  CHECK(dist_dens(Dist::Bernoulli, Val::real(0.3), Val::boolean(true)) == doctest::Approx(0.3));
  CHECK(dist_dens(Dist::Bernoulli, Val::real(0.3), Val::boolean(false)) == doctest::Approx(0.7));
  CHECK(dist_dens(Dist::UniformReal, rpair(0, 2), Val::real(1.0)) == doctest::Approx(0.5));
  CHECK(dist_dens(Dist::UniformReal, rpair(0, 2), Val::real(2.5)) == 0.0);
  CHECK(dist_dens(Dist::Gaussian, rpair(0, 1), Val::real(0.0)) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)).epsilon(1e-12));
  CHECK(dist_dens(Dist::Poisson, Val::real(2.0), Val::integer(-1LL)) == 0.0);
  CHECK(dist_dens(Dist::Poisson, Val::real(2.0), Val::integer(3LL)) ==
        doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-12));
  CHECK(dist_dens(Dist::UniformInt, ipair(1, 6), Val::integer(6LL)) == doctest::Approx(1.0 / 6.0));
  CHECK(dist_dens(Dist::UniformInt, ipair(1, 6), Val::integer(0LL)) == 0.0);
  CHECK(dist_dens(Dist::Gaussian, rpair(0, 0), Val::real(0.0)) == 0.0);
}

TEST_CASE("deterministic expressions sample as a point mass") {
  Gen g(21);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<PdfType> env{random_type(g), random_type(g)};
    Expr e = random_det_expr(g, env, random_type(g), 5);
    std::vector<Val> st = random_state(g, env);
    Val want = ref_eval(st, e);
    CHECK(same_val(expr_sem_rf(State(st), e), want));
    for (int k = 0; k < 5; ++k) {
      auto o = sample_expr(State(st), e, rng);
      REQUIRE(o.has_value());
      CHECK(same_val(*o, want));
    }
  }
}

TEST_CASE("expr_sem_rf examples") {
  CHECK(expr_sem_rf(State(), Expr::val(Val::boolean(true))) == Val::boolean(true));
  Expr e = Expr::op(Operator(OpKind::Exp), Expr::var(0));
  CHECK(expr_sem_rf(State({Val::real(2.0)}), e).as_real() == doctest::Approx(7.389056).epsilon(1e-7));
  Expr f = Expr::op(Operator(OpKind::Fst), Expr::pair(Expr::val(Val::integer(4LL)), Expr::val(Val::unit())));
  CHECK(expr_sem_rf(State(), f) == Val::integer(4LL));
  CHECK_THROWS_AS(expr_sem_rf(State(), Expr::fail(PdfType::real())), EvalError);
}

TEST_CASE("same seed, same draws") {
  Expr e = Expr::let_in(Expr::random(Dist::UniformReal, Expr::val(rpair(0, 1))),
                        Expr::random(Dist::Gaussian, Expr::pair(Expr::var(0), Expr::val(Val::real(1.0)))));
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(*sample_expr(State(), e, a) == *sample_expr(State(), e, b));
}
