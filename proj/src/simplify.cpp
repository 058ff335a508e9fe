#include "densc/simplify.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "densc/debruijn.hpp"
#include "densc/error.hpp"
#include "densc/ops.hpp"

namespace densc {

namespace {

using Facts = std::vector<std::pair<CExpr, CExpr>>;  // lo <= hi

bool finite_val(const Val& v) {
  switch (v.kind()) {
    case TypeKind::Real: return std::isfinite(v.as_real());
    case TypeKind::Prod: return finite_val(v.fst()) && finite_val(v.snd());
    default: return true;
  }
}

bool is_num(const CExpr& e, int n) {
  if (e.kind() != CExprKind::Val) return false;
  const Val& v = e.value();
  if (v.kind() == TypeKind::Real) return v.as_real() == n;
  if (v.kind() == TypeKind::Int) return v.as_int() == n;
  return false;
}

bool is_bool(const CExpr& e, bool b) {
  return e.kind() == CExprKind::Val && e.value().kind() == TypeKind::Bool && e.value().as_bool() == b;
}

std::optional<std::pair<CExpr, CExpr>> binary(const CExpr& e, OpKind k) {
  if (e.kind() != CExprKind::Op || e.oper().kind() != k || e.arg().kind() != CExprKind::Pair) return std::nullopt;
  return std::make_pair(e.arg().fst(), e.arg().snd());
}

bool is_op(const CExpr& e, OpKind k) { return e.kind() == CExprKind::Op && e.oper().kind() == k; }

// No operator that turns finite inputs into inf or NaN.
bool safe(const CExpr& e) {
  switch (e.kind()) {
    case CExprKind::Var: return true;
    case CExprKind::Val: return finite_val(e.value());
    case CExprKind::Pair: return safe(e.fst()) && safe(e.snd());
    case CExprKind::If: return safe(e.cond()) && safe(e.then_branch()) && safe(e.else_branch());
    case CExprKind::Int: return false;
    case CExprKind::Op:
      switch (e.oper().kind()) {
        case OpKind::Fst:
        case OpKind::Snd:
        case OpKind::Add:
        case OpKind::Mult:
        case OpKind::Minus:
        case OpKind::Less:
        case OpKind::Equals:
        case OpKind::And:
        case OpKind::Or:
        case OpKind::Not:
        case OpKind::Cast:
        case OpKind::Pi: return safe(e.arg());
        default: return false;
      }
  }
  return false;
}

// IF c THEN 1 ELSE 0
bool is_indicator(const CExpr& e) {
  return e.kind() == CExprKind::If && is_num(e.then_branch(), 1) && is_num(e.else_branch(), 0);
}

void guard_facts(const CExpr& c, bool holds, Facts& out) {
  if (is_op(c, OpKind::Not)) return guard_facts(c.arg(), !holds, out);
  if (auto p = binary(c, holds ? OpKind::And : OpKind::Or)) {
    guard_facts(p->first, holds, out);
    guard_facts(p->second, holds, out);
    return;
  }
  if (auto p = binary(c, OpKind::Less)) {
    if (holds)
      out.emplace_back(p->first, p->second);
    else
      out.emplace_back(p->second, p->first);
  }
}

bool nonneg(const CExpr& e, const Facts& facts) {
  for (const auto& [lo, hi] : facts) {
    if (hi == e && lo.kind() == CExprKind::Val && nonneg(lo, {})) return true;
    if (auto d = binary(e, OpKind::Add); d && d->first == hi && is_op(d->second, OpKind::Minus) &&
                                         d->second.arg() == lo)
      return true;
  }
  switch (e.kind()) {
    case CExprKind::Val: {
      const Val& v = e.value();
      if (v.kind() == TypeKind::Real) return v.as_real() >= 0.0;
      if (v.kind() == TypeKind::Int) return v.as_int() >= 0;
      return false;
    }
    case CExprKind::Int: return true;
    case CExprKind::If: {
      Facts yes = facts;
      Facts no = facts;
      guard_facts(e.cond(), true, yes);
      guard_facts(e.cond(), false, no);
      return nonneg(e.then_branch(), yes) && nonneg(e.else_branch(), no);
    }
    case CExprKind::Op: {
      if (auto p = binary(e, OpKind::Add)) return nonneg(p->first, facts) && nonneg(p->second, facts);
      if (auto p = binary(e, OpKind::Mult)) return nonneg(p->first, facts) && nonneg(p->second, facts);
      if (is_op(e, OpKind::Pi)) return true;
      if (is_op(e, OpKind::Cast)) return nonneg(e.arg(), facts);
      return false;
    }
    default: return false;
  }
}

bool finite_type(const PdfType& t) {
  switch (t.kind()) {
    case TypeKind::Unit:
    case TypeKind::Bool: return true;
    case TypeKind::Prod: return finite_type(t.left()) && finite_type(t.right());
    default: return false;
  }
}

CExpr rewrite(const CExpr& e);

CExpr expand(const CExpr& body, const PdfType& t) {
  std::optional<CExpr> sum;
  const std::uint64_t n = *universe_size(t);
  for (std::uint64_t k = 0; k < n; ++k) {
    CExpr term = rewrite(cexpr_subst_val(body, *universe_element(t, k)));
    // The evaluator integrates max(0, body) and drops non-finite values.
    if (!nonneg(term, {}) || !safe(term)) {
      CExpr in_range = cx::land(cx::less(cx::real(0.0), term),
                                cx::lnot(cx::less(cx::real(std::numeric_limits<double>::max()), term)));
      term = cx::ite(in_range, term, cx::real(0.0));
    }
    sum = sum ? cx::add(*sum, term) : term;
  }
  return *sum;
}

std::optional<CExpr> local(const CExpr& e) {
  switch (e.kind()) {
    case CExprKind::Var:
    case CExprKind::Val: return std::nullopt;
    case CExprKind::Pair:
      if (e.fst().kind() == CExprKind::Val && e.snd().kind() == CExprKind::Val)
        return CExpr::val(Val::pair(e.fst().value(), e.snd().value()));
      return std::nullopt;
    case CExprKind::If: {
      const CExpr& c = e.cond();
      if (c.kind() == CExprKind::Val) return c.value().as_bool() ? e.then_branch() : e.else_branch();
      if (e.then_branch() == e.else_branch()) return e.then_branch();
      if (e.then_branch().kind() == CExprKind::If && e.then_branch().cond() == c)
        return CExpr::if_then_else(c, e.then_branch().then_branch(), e.else_branch());
      if (e.else_branch().kind() == CExprKind::If && e.else_branch().cond() == c)
        return CExpr::if_then_else(c, e.then_branch(), e.else_branch().else_branch());
      return std::nullopt;
    }
    case CExprKind::Int:
      if (finite_type(e.over())) return expand(e.body(), e.over());
      return std::nullopt;
    case CExprKind::Op: break;
  }

  const CExpr& arg = e.arg();
  const OpKind k = e.oper().kind();
  if (arg.kind() == CExprKind::Val) {
    try {
      Val v = op_sem(e.oper(), arg.value());
      if (finite_val(v)) return CExpr::val(std::move(v));
    } catch (const EvalError&) {
    }
    return std::nullopt;
  }
  if ((k == OpKind::Fst || k == OpKind::Snd) && arg.kind() == CExprKind::Pair)
    return k == OpKind::Fst ? arg.fst() : arg.snd();
  if ((k == OpKind::Not || k == OpKind::Minus) && is_op(arg, k)) return arg.arg();

  auto p = binary(e, k);
  if (!p) return std::nullopt;
  const auto& [a, b] = *p;
  switch (k) {
    case OpKind::Add:
      if (is_num(b, 0)) return a;
      if (is_num(a, 0)) return b;
      break;
    case OpKind::Mult:
      if (is_num(a, 1)) return b;
      if (is_num(b, 1)) return a;
      if (is_num(a, 0) && safe(b)) return a;
      if (is_num(b, 0) && safe(a)) return b;
      if (is_indicator(a) && b.kind() == CExprKind::If && is_num(b.else_branch(), 0) && b.cond() == a.cond())
        return b;
      if (is_indicator(b) && a.kind() == CExprKind::If && is_num(a.else_branch(), 0) && a.cond() == b.cond())
        return a;
      break;
    case OpKind::And:
      if (is_bool(a, true)) return b;
      if (is_bool(b, true)) return a;
      if (is_bool(a, false)) return a;
      if (is_bool(b, false)) return b;
      break;
    case OpKind::Or:
      if (is_bool(a, false)) return b;
      if (is_bool(b, false)) return a;
      if (is_bool(a, true)) return a;
      if (is_bool(b, true)) return b;
      break;
    default: break;
  }
  return std::nullopt;
}

CExpr rewrite_children(const CExpr& e) {
  switch (e.kind()) {
    case CExprKind::Var:
    case CExprKind::Val: return e;
    case CExprKind::Op: return CExpr::op(e.oper(), rewrite(e.arg()));
    case CExprKind::Pair: return CExpr::pair(rewrite(e.fst()), rewrite(e.snd()));
    case CExprKind::If:
      return CExpr::if_then_else(rewrite(e.cond()), rewrite(e.then_branch()), rewrite(e.else_branch()));
    case CExprKind::Int: return CExpr::integral(rewrite(e.body()), e.over());
  }
  return e;
}

CExpr rewrite(const CExpr& e) {
  CExpr cur = rewrite_children(e);
  if (auto r = local(cur)) return rewrite(*r);
  return cur;
}

}  // namespace

CExpr simplify(const CExpr& ce) {
  CExpr cur = ce;
  for (;;) {
    CExpr next = rewrite(cur);
    if (next == cur) return next;
    cur = std::move(next);
  }
}

Expr commute_constants(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Var:
    case ExprKind::Val:
    case ExprKind::Fail: return e;
    case ExprKind::Let: return Expr::let_in(commute_constants(e.bound()), commute_constants(e.body()));
    case ExprKind::Pair: return Expr::pair(commute_constants(e.fst()), commute_constants(e.snd()));
    case ExprKind::Random: return Expr::random(e.dist(), commute_constants(e.param()));
    case ExprKind::If:
      return Expr::if_then_else(commute_constants(e.cond()), commute_constants(e.then_branch()),
                                commute_constants(e.else_branch()));
    case ExprKind::Op: {
      Expr arg = commute_constants(e.arg());
      const OpKind k = e.oper().kind();
      if ((k == OpKind::Add || k == OpKind::Mult) && arg.kind() == ExprKind::Pair && is_deterministic(arg.fst()) &&
          !is_deterministic(arg.snd()))
        arg = Expr::pair(arg.snd(), arg.fst());
      return Expr::op(e.oper(), arg);
    }
  }
  return e;
}

}  // namespace densc
