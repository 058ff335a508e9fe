// Random term generators and a reference evaluator shared by the tests.
#ifndef DENSC_TESTS_SUPPORT_HPP
#define DENSC_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "densc/expr.hpp"
#include "densc/types.hpp"

namespace testsupport {

using namespace densc;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline PdfType random_type(Gen& g, int depth = 2) {
  int k = g.pick(0, depth > 0 ? 4 : 3);
  switch (k) {
    case 0: return PdfType::unit();
    case 1: return PdfType::boolean();
    case 2: return PdfType::integer();
    case 3: return PdfType::real();
    default: return PdfType::prod(random_type(g, depth - 1), random_type(g, depth - 1));
  }
}

inline Val random_val(Gen& g, const PdfType& t) {
  switch (t.kind()) {
    case TypeKind::Unit: return Val::unit();
    case TypeKind::Bool: return Val::boolean(g.coin());
    case TypeKind::Int: return Val::integer(static_cast<long long>(g.pick(-5, 5)));
    case TypeKind::Real: return Val::real(std::round(g.uniform(-4.0, 4.0) * 8.0) / 8.0);
    case TypeKind::Prod: return Val::pair(random_val(g, t.left()), random_val(g, t.right()));
  }
  return Val::unit();
}

// Variables of env whose type is t.
inline std::vector<std::size_t> vars_of(const std::vector<PdfType>& env, const PdfType& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < env.size(); ++i)
    if (env[i] == t) out.push_back(i);
  return out;
}

inline std::vector<PdfType> push(const std::vector<PdfType>& env, const PdfType& t) {
  std::vector<PdfType> out{t};
  out.insert(out.end(), env.begin(), env.end());
  return out;
}

// Deterministic source expression of type t; env[i] is the type of Var i.
inline Expr random_det_expr(Gen& g, const std::vector<PdfType>& env, const PdfType& t, int depth) {
  auto vars = vars_of(env, t);
  if (depth <= 0 || g.coin(0.2)) {
    if (!vars.empty() && g.coin(0.6)) return Expr::var(vars[g.pick(0, static_cast<int>(vars.size()) - 1)]);
    return Expr::val(random_val(g, t));
  }
  auto sub = [&](const PdfType& s) { return random_det_expr(g, env, s, depth - 1); };
  auto bin = [&](OpKind k, const PdfType& s) { return Expr::op(Operator(k), Expr::pair(sub(s), sub(s))); };
  switch (g.pick(0, 5)) {
    case 0: {
      PdfType b = random_type(g, 1);
      return Expr::let_in(sub(b), random_det_expr(g, push(env, b), t, depth - 1));
    }
    case 1: return Expr::if_then_else(sub(PdfType::boolean()), sub(t), sub(t));
    case 2: {
      PdfType other = random_type(g, 1);
      if (g.coin()) return Expr::op(Operator(OpKind::Fst), Expr::pair(sub(t), sub(other)));
      return Expr::op(Operator(OpKind::Snd), Expr::pair(sub(other), sub(t)));
    }
    default: break;
  }
  switch (t.kind()) {
    case TypeKind::Unit: return Expr::val(Val::unit());
    case TypeKind::Bool:
      switch (g.pick(0, 4)) {
        case 0: return Expr::op(Operator(OpKind::Not), sub(t));
        case 1: return bin(g.coin() ? OpKind::And : OpKind::Or, t);
        case 2: return bin(OpKind::Less, g.coin() ? PdfType::integer() : PdfType::real());
        default: return bin(OpKind::Equals, random_type(g, 1));
      }
    case TypeKind::Int:
      switch (g.pick(0, 3)) {
        case 0: return Expr::op(Operator(OpKind::Minus), sub(t));
        case 1: return Expr::op(Operator::cast(PdfType::integer()), sub(PdfType::real()));
        default: return bin(g.coin() ? OpKind::Add : OpKind::Mult, t);
      }
    case TypeKind::Real:
      switch (g.pick(0, 5)) {
        case 0: return Expr::op(Operator(OpKind::Minus), sub(t));
        case 1: return Expr::op(Operator::cast(PdfType::real()), sub(PdfType::integer()));
        case 2: {
          OpKind ks[] = {OpKind::Exp, OpKind::Inverse, OpKind::Sqrt, OpKind::Ln};
          return Expr::op(Operator(ks[g.pick(0, 3)]), sub(t));
        }
        case 3: return Expr::op(Operator(OpKind::Pi), Expr::val(Val::unit()));
        default: return bin(g.coin() ? OpKind::Add : OpKind::Mult, t);
      }
    case TypeKind::Prod: return Expr::pair(sub(t.left()), sub(t.right()));
  }
  return Expr::val(random_val(g, t));
}

// Target expression of type t. With `integrals`, CInt nodes over finite types
// and over bounded pieces of REAL may appear.
inline CExpr random_cexpr(Gen& g, const std::vector<PdfType>& env, const PdfType& t, int depth,
                          bool integrals = false) {
  auto vars = vars_of(env, t);
  if (depth <= 0 || g.coin(0.2)) {
    if (!vars.empty() && g.coin(0.6)) return CExpr::var(vars[g.pick(0, static_cast<int>(vars.size()) - 1)]);
    return CExpr::val(random_val(g, t));
  }
  auto sub = [&](const PdfType& s) { return random_cexpr(g, env, s, depth - 1, integrals); };
  auto bin = [&](OpKind k, const PdfType& s) { return CExpr::op(Operator(k), CExpr::pair(sub(s), sub(s))); };
  switch (g.pick(0, 4)) {
    case 0: return CExpr::if_then_else(sub(PdfType::boolean()), sub(t), sub(t));
    case 1: {
      PdfType other = random_type(g, 1);
      if (g.coin()) return CExpr::op(Operator(OpKind::Fst), CExpr::pair(sub(t), sub(other)));
      return CExpr::op(Operator(OpKind::Snd), CExpr::pair(sub(other), sub(t)));
    }
    default: break;
  }
  if (integrals && t.kind() == TypeKind::Real && g.coin(0.25)) {
    if (g.coin(0.7)) {
      PdfType over = g.coin(0.7) ? PdfType::boolean() : PdfType::prod(PdfType::boolean(), PdfType::unit());
      return CExpr::integral(random_cexpr(g, push(env, over), t, depth - 1, false), over);
    }
    double lo = std::round(g.uniform(-2.0, 1.0) * 4.0) / 4.0;
    double hi = lo + 0.25 + std::round(g.uniform(0.0, 2.0) * 4.0) / 4.0;
    auto inner = push(env, PdfType::real());
    CExpr guard = cx::land(cx::lnot(cx::less(CExpr::var(0), cx::real(lo))), cx::lnot(cx::less(cx::real(hi), CExpr::var(0))));
    CExpr body = cx::mul(random_cexpr(g, inner, t, depth - 1, false), CExpr::var(0));
    return CExpr::integral(cx::ite(guard, body, cx::real(0.0)), PdfType::real());
  }
  switch (t.kind()) {
    case TypeKind::Unit: return CExpr::val(Val::unit());
    case TypeKind::Bool:
      switch (g.pick(0, 4)) {
        case 0: return CExpr::op(Operator(OpKind::Not), sub(t));
        case 1: return bin(g.coin() ? OpKind::And : OpKind::Or, t);
        case 2: return bin(OpKind::Less, g.coin() ? PdfType::integer() : PdfType::real());
        default: return bin(OpKind::Equals, random_type(g, 1));
      }
    case TypeKind::Int:
      switch (g.pick(0, 3)) {
        case 0: return CExpr::op(Operator(OpKind::Minus), sub(t));
        case 1: return CExpr::op(Operator::cast(PdfType::integer()), sub(PdfType::real()));
        default: return bin(g.coin() ? OpKind::Add : OpKind::Mult, t);
      }
    case TypeKind::Real:
      switch (g.pick(0, 5)) {
        case 0: return CExpr::op(Operator(OpKind::Minus), sub(t));
        case 1: return CExpr::op(Operator::cast(PdfType::real()), sub(PdfType::integer()));
        case 2: {
          OpKind ks[] = {OpKind::Exp, OpKind::Inverse, OpKind::Sqrt, OpKind::Ln};
          return CExpr::op(Operator(ks[g.pick(0, 3)]), sub(t));
        }
        case 3: return CExpr::op(Operator(OpKind::Pi), CExpr::val(Val::unit()));
        default: return bin(g.coin() ? OpKind::Add : OpKind::Mult, t);
      }
    case TypeKind::Prod: return CExpr::pair(sub(t.left()), sub(t.right()));
  }
  return CExpr::val(random_val(g, t));
}

// Reference semantics for the operators the generators emit, written
// directly against the operator table rather than through op_sem.
inline bool ref_equal(const Val& a, const Val& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TypeKind::Unit: return true;
    case TypeKind::Bool: return a.as_bool() == b.as_bool();
    case TypeKind::Int: return a.as_int() == b.as_int();
    case TypeKind::Real: return a.as_real() == b.as_real();
    case TypeKind::Prod: return ref_equal(a.fst(), b.fst()) && ref_equal(a.snd(), b.snd());
  }
  return false;
}

inline Val ref_op(const Operator& op, const Val& v) {
  auto real_pair = [&] { return v.fst().kind() == TypeKind::Real; };
  switch (op.kind()) {
    case OpKind::Fst: return v.fst();
    case OpKind::Snd: return v.snd();
    case OpKind::Add:
      if (real_pair()) return Val::real(v.fst().as_real() + v.snd().as_real());
      return Val::integer(BigInt(v.fst().as_int() + v.snd().as_int()));
    case OpKind::Mult:
      if (real_pair()) return Val::real(v.fst().as_real() * v.snd().as_real());
      return Val::integer(BigInt(v.fst().as_int() * v.snd().as_int()));
    case OpKind::Minus:
      if (v.kind() == TypeKind::Real) return Val::real(-v.as_real());
      return Val::integer(BigInt(-v.as_int()));
    case OpKind::Less:
      if (real_pair()) return Val::boolean(v.fst().as_real() < v.snd().as_real());
      return Val::boolean(v.fst().as_int() < v.snd().as_int());
    case OpKind::Equals: return Val::boolean(ref_equal(v.fst(), v.snd()));
    case OpKind::And: return Val::boolean(v.fst().as_bool() && v.snd().as_bool());
    case OpKind::Or: return Val::boolean(v.fst().as_bool() || v.snd().as_bool());
    case OpKind::Not: return Val::boolean(!v.as_bool());
    case OpKind::Exp: return Val::real(std::exp(v.as_real()));
    case OpKind::Inverse: return Val::real(v.as_real() == 0.0 ? 0.0 : 1.0 / v.as_real());
    case OpKind::Sqrt: return Val::real(v.as_real() < 0.0 ? 0.0 : std::sqrt(v.as_real()));
    case OpKind::Ln: return Val::real(v.as_real() <= 0.0 ? 0.0 : std::log(v.as_real()));
    case OpKind::Pi: return Val::real(3.141592653589793);
    case OpKind::Cast:
      if (op.cast_target().kind() == TypeKind::Real) {
        if (v.kind() == TypeKind::Bool) return Val::real(v.as_bool() ? 1.0 : 0.0);
        return Val::real(v.as_int().convert_to<double>());
      }
      if (v.kind() == TypeKind::Bool) return Val::integer(v.as_bool() ? 1LL : 0LL);
      if (!std::isfinite(v.as_real())) return Val::integer(0LL);
      return Val::integer(BigInt(std::floor(v.as_real())));
    default: throw std::logic_error("ref_op: operator not generated");
  }
}

// env[0] is variable 0.
inline Val ref_eval(const std::vector<Val>& env, const CExpr& e) {
  switch (e.kind()) {
    case CExprKind::Var: return env.at(e.index());
    case CExprKind::Val: return e.value();
    case CExprKind::Op: return ref_op(e.oper(), ref_eval(env, e.arg()));
    case CExprKind::Pair: return Val::pair(ref_eval(env, e.fst()), ref_eval(env, e.snd()));
    case CExprKind::If:
      return ref_eval(env, e.cond()).as_bool() ? ref_eval(env, e.then_branch()) : ref_eval(env, e.else_branch());
    case CExprKind::Int: throw std::logic_error("ref_eval: integral");
  }
  return Val::unit();
}

inline Val ref_eval(const std::vector<Val>& env, const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Var: return env.at(e.index());
    case ExprKind::Val: return e.value();
    case ExprKind::Let: {
      std::vector<Val> inner{ref_eval(env, e.bound())};
      inner.insert(inner.end(), env.begin(), env.end());
      return ref_eval(inner, e.body());
    }
    case ExprKind::Op: return ref_op(e.oper(), ref_eval(env, e.arg()));
    case ExprKind::Pair: return Val::pair(ref_eval(env, e.fst()), ref_eval(env, e.snd()));
    case ExprKind::If:
      return ref_eval(env, e.cond()).as_bool() ? ref_eval(env, e.then_branch()) : ref_eval(env, e.else_branch());
    default: throw std::logic_error("ref_eval: not deterministic");
  }
}

// Exact equality that also identifies NaN with NaN.
inline bool same_val(const Val& a, const Val& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TypeKind::Real: {
      double x = a.as_real(), y = b.as_real();
      return (std::isnan(x) && std::isnan(y)) || x == y;
    }
    case TypeKind::Prod: return same_val(a.fst(), b.fst()) && same_val(a.snd(), b.snd());
    default: return a == b;
  }
}

inline std::vector<Val> random_state(Gen& g, const std::vector<PdfType>& env) {
  std::vector<Val> out;
  for (const PdfType& t : env) out.push_back(random_val(g, t));
  return out;
}

}  // namespace testsupport

#endif  // DENSC_TESTS_SUPPORT_HPP
