#include "densc/debruijn.hpp"

#include "densc/error.hpp"

namespace densc {

namespace {

CExpr map_vars_at(const VarMap& h, const CExpr& e, std::size_t depth) {
  switch (e.kind()) {
    case CExprKind::Var:
      if (e.index() < depth) return e;
      return CExpr::var(h(e.index() - depth) + depth);
    case CExprKind::Val: return e;
    case CExprKind::Op: return CExpr::op(e.oper(), map_vars_at(h, e.arg(), depth));
    case CExprKind::Pair:
      return CExpr::pair(map_vars_at(h, e.fst(), depth), map_vars_at(h, e.snd(), depth));
    case CExprKind::If:
      return CExpr::if_then_else(map_vars_at(h, e.cond(), depth),
                                 map_vars_at(h, e.then_branch(), depth),
                                 map_vars_at(h, e.else_branch(), depth));
    case CExprKind::Int: return CExpr::integral(map_vars_at(h, e.body(), depth + 1), e.over());
  }
  return e;
}

// Replaces free variable `x` (relative to depth) by the result of `make`,
// which receives the current binder depth.
template <class Make, class Other>
CExpr replace_at(const CExpr& e, std::size_t depth, std::size_t x, const Make& make,
                 const Other& other) {
  switch (e.kind()) {
    case CExprKind::Var:
      if (e.index() < depth) return e;
      if (e.index() - depth == x) return make(depth);
      return CExpr::var(other(e.index() - depth) + depth);
    case CExprKind::Val: return e;
    case CExprKind::Op: return CExpr::op(e.oper(), replace_at(e.arg(), depth, x, make, other));
    case CExprKind::Pair:
      return CExpr::pair(replace_at(e.fst(), depth, x, make, other),
                         replace_at(e.snd(), depth, x, make, other));
    case CExprKind::If:
      return CExpr::if_then_else(replace_at(e.cond(), depth, x, make, other),
                                 replace_at(e.then_branch(), depth, x, make, other),
                                 replace_at(e.else_branch(), depth, x, make, other));
    case CExprKind::Int:
      return CExpr::integral(replace_at(e.body(), depth + 1, x, make, other), e.over());
  }
  return e;
}

}  // namespace

CExpr map_vars(const VarMap& h, const CExpr& e) { return map_vars_at(h, e, 0); }

CExpr ins_var0(const CExpr& e) {
  return map_vars([](std::size_t x) { return x + 1; }, e);
}

CExpr ins_var1(const CExpr& f) {
  return map_vars([](std::size_t x) { return x == 0 ? 0 : x + 1; }, f);
}

CExpr del_var0(const CExpr& e) {
  if (free_vars(e).contains(0)) throw CompileError("del_var0: variable 0 is free in " + e.to_string());
  return map_vars([](std::size_t x) { return x - 1; }, e);
}

CExpr del_var1(const CExpr& e) {
  if (free_vars(e).contains(1)) throw CompileError("del_var1: variable 1 is free in " + e.to_string());
  return map_vars([](std::size_t x) { return x == 0 ? 0 : x - 1; }, e);
}

CExpr cexpr_subst(std::size_t x, const CExpr& replacement, const CExpr& target) {
  auto make = [&](std::size_t depth) {
    return depth == 0 ? replacement
                      : map_vars([depth](std::size_t y) { return y + depth; }, replacement);
  };
  return replace_at(target, 0, x, make, [](std::size_t y) { return y; });
}

CExpr cexpr_subst0(const CExpr& e, const CExpr& replacement) {
  auto make = [&](std::size_t depth) {
    return depth == 0 ? replacement
                      : map_vars([depth](std::size_t y) { return y + depth; }, replacement);
  };
  return replace_at(e, 0, 0, make, [](std::size_t y) { return y - 1; });
}

CExpr cexpr_subst_val(const CExpr& e, const Val& v) { return cexpr_subst0(e, CExpr::val(v)); }

CExpr cexpr_comp(const CExpr& f, const CExpr& g) { return cexpr_subst(0, g, f); }

namespace {

template <class OnVar>
Expr rebuild(const Expr& e, std::size_t depth, const OnVar& on_var) {
  switch (e.kind()) {
    case ExprKind::Var: return on_var(e.index(), depth);
    case ExprKind::Val:
    case ExprKind::Fail: return e;
    case ExprKind::Let:
      return Expr::let_in(rebuild(e.bound(), depth, on_var), rebuild(e.body(), depth + 1, on_var));
    case ExprKind::Op: return Expr::op(e.oper(), rebuild(e.arg(), depth, on_var));
    case ExprKind::Pair:
      return Expr::pair(rebuild(e.fst(), depth, on_var), rebuild(e.snd(), depth, on_var));
    case ExprKind::Random: return Expr::random(e.dist(), rebuild(e.param(), depth, on_var));
    case ExprKind::If:
      return Expr::if_then_else(rebuild(e.cond(), depth, on_var),
                                rebuild(e.then_branch(), depth, on_var),
                                rebuild(e.else_branch(), depth, on_var));
  }
  return e;
}

}  // namespace

Expr shift_expr(const Expr& e, std::size_t amount, std::size_t cutoff) {
  if (amount == 0) return e;
  return rebuild(e, cutoff, [amount](std::size_t i, std::size_t depth) {
    return i < depth ? Expr::var(i) : Expr::var(i + amount);
  });
}

Expr expr_subst0(const Expr& e, const Expr& replacement) {
  return rebuild(e, 0, [&](std::size_t i, std::size_t depth) {
    if (i < depth) return Expr::var(i);
    if (i == depth) return shift_expr(replacement, depth);
    return Expr::var(i - 1);
  });
}

}  // namespace densc
