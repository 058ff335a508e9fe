#include "densc/sampler.hpp"

#include <cmath>
#include <numbers>

#include "densc/error.hpp"
#include "densc/ops.hpp"

namespace densc {

const Val& State::operator()(std::size_t i) const {
  if (i >= vals_.size()) throw EvalError("undefined variable " + std::to_string(i));
  return vals_[i];
}

State State::insert(Val v) const {
  std::vector<Val> vals;
  vals.reserve(vals_.size() + 1);
  vals.push_back(std::move(v));
  vals.insert(vals.end(), vals_.begin(), vals_.end());
  return State(std::move(vals));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Plain rejection of the incomplete top block.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t r = engine_();
    if (r < limit) return r % bound;
  }
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

SampleOutcome sample_expr(const State& s, const Expr& e, Rng& rng) {
  switch (e.kind()) {
    case ExprKind::Var: return s(e.index());
    case ExprKind::Val: return e.value();
    case ExprKind::Let: {
      auto v = sample_expr(s, e.bound(), rng);
      if (!v) return std::nullopt;
      return sample_expr(s.insert(std::move(*v)), e.body(), rng);
    }
    case ExprKind::Op: {
      auto v = sample_expr(s, e.arg(), rng);
      if (!v) return std::nullopt;
      return op_sem(e.oper(), *v);
    }
    case ExprKind::Pair: {
      auto a = sample_expr(s, e.fst(), rng);
      if (!a) return std::nullopt;
      auto b = sample_expr(s, e.snd(), rng);
      if (!b) return std::nullopt;
      return Val::pair(std::move(*a), std::move(*b));
    }
    case ExprKind::Random: {
      auto p = sample_expr(s, e.param(), rng);
      if (!p) return std::nullopt;
      return sample_dist(e.dist(), *p, rng);
    }
    case ExprKind::If: {
      auto c = sample_expr(s, e.cond(), rng);
      if (!c) return std::nullopt;
      return sample_expr(s, c->as_bool() ? e.then_branch() : e.else_branch(), rng);
    }
    case ExprKind::Fail: return std::nullopt;
  }
  return std::nullopt;
}

Val expr_sem_rf(const State& s, const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Var: return s(e.index());
    case ExprKind::Val: return e.value();
    case ExprKind::Let: return expr_sem_rf(s.insert(expr_sem_rf(s, e.bound())), e.body());
    case ExprKind::Op: return op_sem(e.oper(), expr_sem_rf(s, e.arg()));
    case ExprKind::Pair: return Val::pair(expr_sem_rf(s, e.fst()), expr_sem_rf(s, e.snd()));
    case ExprKind::If:
      return expr_sem_rf(s, expr_sem_rf(s, e.cond()).as_bool() ? e.then_branch() : e.else_branch());
    case ExprKind::Random:
    case ExprKind::Fail: throw EvalError("expr_sem_rf: expression is not deterministic");
  }
  throw EvalError("expr_sem_rf: unknown node");
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

bool dist_param_valid(Dist d, const Val& p) {
  switch (d) {
    case Dist::Bernoulli: return p.as_real() >= 0.0 && p.as_real() <= 1.0;
    case Dist::UniformInt: return p.fst().as_int() <= p.snd().as_int();
    case Dist::UniformReal: {
      double a = p.fst().as_real();
      double b = p.snd().as_real();
      return std::isfinite(a) && std::isfinite(b) && a < b;
    }
    case Dist::Gaussian:
      return std::isfinite(p.fst().as_real()) && std::isfinite(p.snd().as_real()) &&
             p.snd().as_real() > 0.0;
    case Dist::Poisson: return std::isfinite(p.as_real()) && p.as_real() >= 0.0;
  }
  return false;
}

namespace {

BigInt uniform_bigint_below(const BigInt& bound, Rng& rng) {
  if (bound <= BigInt(std::numeric_limits<std::uint64_t>::max()))
    return BigInt(rng.below(bound.convert_to<std::uint64_t>()));
  const unsigned bits = boost::multiprecision::msb(bound) + 1;
  for (;;) {
    BigInt r = 0;
    unsigned have = 0;
    while (have < bits) {
      r <<= 64;
      r += rng.next_u64();
      have += 64;
    }
    r >>= (have - bits);
    if (r < bound) return r;
  }
}

double gaussian01(Rng& rng) {
  for (;;) {
    double u = 2.0 * rng.uniform01() - 1.0;
    double v = 2.0 * rng.uniform01() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

long long poisson_inversion(double lam, Rng& rng) {
  double p = std::exp(-lam);
  double cdf = p;
  double u = rng.uniform01();
  long long x = 0;
  while (u > cdf && x < 10000) {
    ++x;
    p *= lam / static_cast<double>(x);
    cdf += p;
  }
  return x;
}

// Transformed rejection with squeeze (Hoermann 1993).
long long poisson_ptrs(double lam, Rng& rng) {
  const double slam = std::sqrt(lam);
  const double loglam = std::log(lam);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform01() - 0.5;
    double v = rng.uniform01();
    double us = 0.5 - std::fabs(u);
    auto k = static_cast<long long>(std::floor((2.0 * a / us + b) * u + lam + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    double kd = static_cast<double>(k);
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lam + kd * loglam - std::lgamma(kd + 1.0))
      return k;
  }
}

}  // namespace

SampleOutcome sample_dist(Dist d, const Val& p, Rng& rng) {
  if (!dist_param_valid(d, p)) return std::nullopt;
  switch (d) {
    case Dist::Bernoulli: return Val::boolean(rng.uniform01() < p.as_real());
    case Dist::UniformInt: {
      const BigInt& lo = p.fst().as_int();
      BigInt range = p.snd().as_int() - lo + 1;
      return Val::integer(lo + uniform_bigint_below(range, rng));
    }
    case Dist::UniformReal: {
      double a = p.fst().as_real();
      double b = p.snd().as_real();
      double u = rng.uniform01();
      double x = a * (1.0 - u) + b * u;
      if (x >= b || x < a) x = a;
      return Val::real(x);
    }
    case Dist::Gaussian: return Val::real(p.fst().as_real() + p.snd().as_real() * gaussian01(rng));
    case Dist::Poisson: {
      double lam = p.as_real();
      if (lam == 0.0) return Val::integer(0LL);
      return Val::integer(lam <= 30.0 ? poisson_inversion(lam, rng) : poisson_ptrs(lam, rng));
    }
  }
  return std::nullopt;
}

double dist_dens(Dist d, const Val& p, const Val& x) {
  if (!dist_param_valid(d, p)) return 0.0;
  switch (d) {
    case Dist::Bernoulli: return x.as_bool() ? p.as_real() : 1.0 - p.as_real();
    case Dist::UniformInt: {
      const BigInt& a = p.fst().as_int();
      const BigInt& b = p.snd().as_int();
      const BigInt& k = x.as_int();
      if (k < a || k > b) return 0.0;
      return 1.0 / BigInt(b - a + 1).convert_to<double>();
    }
    case Dist::UniformReal: {
      double a = p.fst().as_real();
      double b = p.snd().as_real();
      double r = x.as_real();
      return (r >= a && r <= b) ? 1.0 / (b - a) : 0.0;
    }
    case Dist::Gaussian: {
      double m = p.fst().as_real();
      double s = p.snd().as_real();
      double z = (x.as_real() - m) / s;
      return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    }
    case Dist::Poisson: {
      double lam = p.as_real();
      const BigInt& k = x.as_int();
      if (k < 0) return 0.0;
      if (lam == 0.0) return k == 0 ? 1.0 : 0.0;
      double kd = k.convert_to<double>();
      return std::exp(-lam + kd * std::log(lam) - std::lgamma(kd + 1.0));
    }
  }
  return 0.0;
}

}  // namespace densc
