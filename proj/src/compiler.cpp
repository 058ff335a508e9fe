#include "densc/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "densc/debruijn.hpp"
#include "densc/ops.hpp"

namespace densc {

using namespace cx;

namespace {

bool contains(const std::vector<std::size_t>& xs, std::size_t x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::vector<std::size_t> without(const std::vector<std::size_t>& xs, std::size_t a, std::size_t b) {
  std::vector<std::size_t> out;
  for (auto x : xs)
    if (x != a && x != b) out.push_back(x);
  return out;
}

bool vars_within(const Expr& e, const std::vector<std::size_t>& xs) {
  for (auto v : free_vars(e))
    if (!contains(xs, v)) return false;
  return true;
}

std::vector<std::size_t> shifted(const std::vector<std::size_t>& xs) {
  std::vector<std::size_t> out;
  out.reserve(xs.size());
  for (auto x : xs) out.push_back(x + 1);
  return out;
}

CExpr one() { return real(1.0); }
CExpr zero() { return real(0.0); }

// Operands of Op(k, Pair(a, b)), if e has that shape.
std::optional<std::pair<Expr, Expr>> binary(const Expr& e, OpKind k) {
  if (e.kind() != ExprKind::Op || e.oper().kind() != k || e.arg().kind() != ExprKind::Pair)
    return std::nullopt;
  return std::make_pair(e.arg().fst(), e.arg().snd());
}

bool is_unary(const Expr& e, OpKind k) { return e.kind() == ExprKind::Op && e.oper().kind() == k; }

class Compiler {
 public:
  std::optional<Expr> blame;

  bool run(const DensityCtxt& c, const Expr& e, const DensitySink& sink) {
    std::optional<Expr> saved = std::move(blame);
    blame.reset();
    std::unordered_set<CExpr, CExprHash> seen;
    bool any = false;
    bool stopped = false;
    auto emit = [&](const CExpr& f) {
      any = true;
      if (!seen.insert(f).second) return true;
      if (!sink(f)) {
        stopped = true;
        return false;
      }
      return true;
    };
    rules(c, e, emit);
    if (any) {
      blame = std::move(saved);
    } else if (!blame) {
      blame = e;
    }
    return !stopped;
  }

 private:
  // Each rule returns false once the sink has asked to stop.
  bool rules(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    return edc_val(c, e, emit) && edc_var(c, e, emit) && edc_pair(c, e, emit) && edc_fail(c, e, emit) &&
           edc_let(c, e, emit) && edc_rand_det(c, e, emit) && edc_rand(c, e, emit) &&
           edc_if_det(c, e, emit) && edc_if(c, e, emit) && edc_op_discr(c, e, emit) &&
           edc_fst(c, e, emit) && edc_snd(c, e, emit) && edc_neg(c, e, emit) && edc_addc(c, e, emit) &&
           edc_add(c, e, emit) && edc_multc(c, e, emit) && edc_inv(c, e, emit) && edc_exp(c, e, emit);
  }

  // Feeds every density of e under c to k.
  bool each(const DensityCtxt& c, const Expr& e, const DensitySink& k) { return run(c, e, k); }

  static DensityCtxt param_ctxt(const DensityCtxt& c) {
    DensityCtxt p;
    p.params = c.vs;
    p.params.insert(p.params.end(), c.params.begin(), c.params.end());
    p.env = c.env;
    p.delta = one();
    return p;
  }

  static DensityCtxt with_delta(const DensityCtxt& c, CExpr delta) {
    DensityCtxt n = c;
    n.delta = std::move(delta);
    return n;
  }

  bool edc_val(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Val || !countable_type(val_type(e.value()))) return true;
    return emit(mul(ins_var0(branch_prob_cexpr(c)), indicator(eq(CExpr::var(0), CExpr::val(e.value())))));
  }

  bool edc_var(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Var || !contains(c.vs, e.index())) return true;
    return emit(marg_dens_cexpr(c.env, c.vs, e.index(), c.delta));
  }

  bool edc_pair(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Pair || e.fst().kind() != ExprKind::Var || e.snd().kind() != ExprKind::Var)
      return true;
    std::size_t x = e.fst().index();
    std::size_t y = e.snd().index();
    if (x == y || !contains(c.vs, x) || !contains(c.vs, y)) return true;
    return emit(marg_dens2_cexpr(c.env, c.vs, x, y, c.delta));
  }

  bool edc_fail(const DensityCtxt&, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Fail) return true;
    return emit(zero());
  }

  bool edc_let(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Let) return true;
    const PdfType t = typecheck_expr(c.env, e.bound());
    return each(param_ctxt(c), e.bound(), [&](const CExpr& f) {
      DensityCtxt inner;
      inner.vs.push_back(0);
      for (auto x : shifted(c.vs)) inner.vs.push_back(x);
      inner.params = shifted(c.params);
      inner.env = c.env.insert(t);
      inner.delta = mul(ins_var0(c.delta), f);
      return each(inner, e.body(), [&](const CExpr& g) { return emit(del_var1(g)); });
    });
  }

  bool edc_rand_det(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Random || !is_deterministic(e.param()) || !vars_within(e.param(), c.params))
      return true;
    return emit(mul(ins_var0(branch_prob_cexpr(c)),
                    dist_dens_cexpr(e.dist(), ins_var0(expr_rf_to_cexpr(e.param())), CExpr::var(0))));
  }

  bool edc_rand(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Random) return true;
    const Dist d = e.dist();
    return each(c, e.param(), [&](const CExpr& f) {
      return emit(CExpr::integral(mul(ins_var1(f), dist_dens_cexpr(d, CExpr::var(0), CExpr::var(1))),
                                  dist_param_type(d)));
    });
  }

  bool edc_if_det(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::If || !is_deterministic(e.cond())) return true;
    CExpr b = expr_rf_to_cexpr(e.cond());
    DensityCtxt c1 = with_delta(c, mul(c.delta, indicator(b)));
    DensityCtxt c2 = with_delta(c, mul(c.delta, indicator(lnot(b))));
    return each(c1, e.then_branch(), [&](const CExpr& f1) {
      return each(c2, e.else_branch(), [&](const CExpr& f2) { return emit(add(f1, f2)); });
    });
  }

  bool edc_if(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::If) return true;
    return each(param_ctxt(c), e.cond(), [&](const CExpr& f) {
      DensityCtxt c1 = with_delta(c, mul(c.delta, cexpr_subst_val(f, Val::boolean(true))));
      DensityCtxt c2 = with_delta(c, mul(c.delta, cexpr_subst_val(f, Val::boolean(false))));
      return each(c1, e.then_branch(), [&](const CExpr& f1) {
        return each(c2, e.else_branch(), [&](const CExpr& f2) { return emit(add(f1, f2)); });
      });
    });
  }

  bool edc_op_discr(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (e.kind() != ExprKind::Op) return true;
    const PdfType t = typecheck_expr(c.env, e.arg());
    auto r = op_type(e.oper(), t);
    if (!r || !countable_type(*r)) return true;
    const Operator op = e.oper();
    return each(c, e.arg(), [&](const CExpr& f) {
      CExpr hit = indicator(eq(CExpr::op(op, CExpr::var(0)), CExpr::var(1)));
      return emit(CExpr::integral(mul(hit, ins_var1(f)), t));
    });
  }

  bool edc_fst(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (!is_unary(e, OpKind::Fst)) return true;
    const PdfType t = typecheck_expr(c.env, e.arg());
    if (!t.is_prod()) return true;
    return each(c, e.arg(), [&](const CExpr& f) {
      return emit(CExpr::integral(cexpr_comp(ins_var1(f), CExpr::pair(CExpr::var(1), CExpr::var(0))), t.right()));
    });
  }

  bool edc_snd(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (!is_unary(e, OpKind::Snd)) return true;
    const PdfType t = typecheck_expr(c.env, e.arg());
    if (!t.is_prod()) return true;
    return each(c, e.arg(), [&](const CExpr& f) {
      return emit(CExpr::integral(cexpr_comp(ins_var1(f), CExpr::pair(CExpr::var(0), CExpr::var(1))), t.left()));
    });
  }

  bool edc_neg(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (!is_unary(e, OpKind::Minus)) return true;
    return each(c, e.arg(), [&](const CExpr& f) { return emit(cexpr_comp(f, neg(CExpr::var(0)))); });
  }

  bool edc_addc(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    auto ops = binary(e, OpKind::Add);
    if (!ops) return true;
    const Expr& rhs = ops->second;
    if (!is_deterministic(rhs) || !vars_within(rhs, c.params)) return true;
    CExpr shift = ins_var0(expr_rf_to_cexpr(rhs));
    return each(c, ops->first, [&](const CExpr& f) { return emit(cexpr_comp(f, sub(CExpr::var(0), shift))); });
  }

  bool edc_add(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    auto ops = binary(e, OpKind::Add);
    if (!ops) return true;
    const PdfType t = typecheck_expr(c.env, e.arg());
    if (t.left() != t.right()) return true;
    return each(c, e.arg(), [&](const CExpr& f) {
      CExpr split = CExpr::pair(CExpr::var(0), sub(CExpr::var(1), CExpr::var(0)));
      return emit(CExpr::integral(cexpr_comp(ins_var1(f), split), t.left()));
    });
  }

  bool edc_multc(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    auto ops = binary(e, OpKind::Mult);
    if (!ops) return true;
    const Expr& rhs = ops->second;
    if (rhs.kind() != ExprKind::Val || rhs.value().kind() != TypeKind::Real) return true;
    const double k = rhs.value().as_real();
    if (k == 0.0) return true;
    return each(c, ops->first, [&](const CExpr& f) {
      return emit(div(cexpr_comp(f, div(CExpr::var(0), real(k))), real(std::fabs(k))));
    });
  }

  bool edc_inv(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (!is_unary(e, OpKind::Inverse)) return true;
    return each(c, e.arg(), [&](const CExpr& f) {
      return emit(div(cexpr_comp(f, inverse(CExpr::var(0))), pow(CExpr::var(0), integer(2))));
    });
  }

  bool edc_exp(const DensityCtxt& c, const Expr& e, const DensitySink& emit) {
    if (!is_unary(e, OpKind::Exp)) return true;
    return each(c, e.arg(), [&](const CExpr& f) {
      CExpr body = div(cexpr_comp(f, unary(OpKind::Ln, CExpr::var(0))), CExpr::var(0));
      return emit(ite(less(zero(), CExpr::var(0)), body, zero()));
    });
  }
};

}  // namespace

bool compile(const DensityCtxt& ctxt, const Expr& e, const DensitySink& sink) {
  Compiler comp;
  return comp.run(ctxt, e, sink);
}

std::vector<CExpr> compile_all(const DensityCtxt& ctxt, const Expr& e, std::size_t limit) {
  std::vector<CExpr> out;
  if (limit == 0) return out;
  compile(ctxt, e, [&](const CExpr& f) {
    out.push_back(f);
    return out.size() < limit;
  });
  return out;
}

namespace {

PdfType check_program(const Expr& e) {
  auto fv = free_vars(e);
  if (!fv.empty()) throw CompileError("not closed: free variable " + std::to_string(*fv.begin()));
  try {
    return typecheck_expr(TypeEnv(), e);
  } catch (const TypeError& err) {
    throw TypeError(std::string("ill-typed: ") + err.what());
  }
}

}  // namespace

CompiledProgram compile_program(const Expr& e) {
  PdfType t = check_program(e);
  Compiler comp;
  std::optional<CExpr> first;
  comp.run(DensityCtxt{}, e, [&](const CExpr& f) {
    first = f;
    return false;
  });
  if (!first) {
    Expr culprit = comp.blame.value_or(e);
    throw NoRuleError("no compilation rule applies to " + culprit.to_string(), culprit);
  }
  return {t, *first};
}

std::vector<CExpr> compile_program_all(const Expr& e, std::size_t limit) {
  check_program(e);
  auto all = compile_all(DensityCtxt{}, e, limit);
  if (all.empty()) {
    Compiler comp;
    comp.run(DensityCtxt{}, e, [](const CExpr&) { return false; });
    Expr culprit = comp.blame.value_or(e);
    throw NoRuleError("no compilation rule applies to " + culprit.to_string(), culprit);
  }
  return all;
}

CExpr expr_rf_to_cexpr(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Var: return CExpr::var(e.index());
    case ExprKind::Val: return CExpr::val(e.value());
    case ExprKind::Let: return cexpr_subst0(expr_rf_to_cexpr(e.body()), expr_rf_to_cexpr(e.bound()));
    case ExprKind::Op: return CExpr::op(e.oper(), expr_rf_to_cexpr(e.arg()));
    case ExprKind::Pair: return CExpr::pair(expr_rf_to_cexpr(e.fst()), expr_rf_to_cexpr(e.snd()));
    case ExprKind::If:
      return CExpr::if_then_else(expr_rf_to_cexpr(e.cond()), expr_rf_to_cexpr(e.then_branch()),
                                 expr_rf_to_cexpr(e.else_branch()));
    case ExprKind::Random:
    case ExprKind::Fail: break;
  }
  throw CompileError("expr_rf_to_cexpr: expression is not deterministic");
}

CExpr integrate_var(const TypeEnv& env, std::size_t x, const CExpr& e) {
  return CExpr::integral(map_vars([x](std::size_t y) { return y == x ? 0 : y + 1; }, e), env(x));
}

CExpr integrate_vars(const TypeEnv& env, const std::vector<std::size_t>& xs, const CExpr& e) {
  CExpr out = e;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) out = integrate_var(env, *it, out);
  return out;
}

CExpr branch_prob_cexpr(const DensityCtxt& ctxt) { return integrate_vars(ctxt.env, ctxt.vs, ctxt.delta); }

CExpr marg_dens_cexpr(const TypeEnv& env, const std::vector<std::size_t>& vs, std::size_t x, const CExpr& delta) {
  if (!contains(vs, x)) throw CompileError("marg_dens_cexpr: variable not among the random variables");
  CExpr rest = integrate_vars(env, without(vs, x, x), delta);
  return map_vars([x](std::size_t y) { return y == x ? 0 : y + 1; }, rest);
}

CExpr marg_dens2_cexpr(const TypeEnv& env, const std::vector<std::size_t>& vs, std::size_t x, std::size_t y,
                       const CExpr& delta) {
  if (x == y) throw CompileError("marg_dens2_cexpr: variables must differ");
  if (!contains(vs, x) || !contains(vs, y))
    throw CompileError("marg_dens2_cexpr: variable not among the random variables");
  CExpr rest = ins_var0(integrate_vars(env, without(vs, x, y), delta));
  rest = cexpr_subst(x + 1, fst(CExpr::var(0)), rest);
  return cexpr_subst(y + 1, snd(CExpr::var(0)), rest);
}

CExpr dist_dens_cexpr(Dist d, const CExpr& ep, const CExpr& ex) {
  switch (d) {
    case Dist::Bernoulli:
      return ite(land(le(zero(), ep), le(ep, one())), ite(ex, ep, sub(one(), ep)), zero());
    case Dist::UniformInt: {
      CExpr lo = fst(ep);
      CExpr hi = snd(ep);
      CExpr width = cast_real(add(sub(hi, lo), integer(1)));
      return ite(le(lo, hi), ite(land(le(lo, ex), le(ex, hi)), inverse(width), zero()), zero());
    }
    case Dist::UniformReal: {
      CExpr lo = fst(ep);
      CExpr hi = snd(ep);
      return ite(less(lo, hi), ite(land(le(lo, ex), le(ex, hi)), inverse(sub(hi, lo)), zero()), zero());
    }
    case Dist::Gaussian: {
      CExpr mu = fst(ep);
      CExpr sigma = snd(ep);
      CExpr var2 = mul(real(2.0), mul(sigma, sigma));
      CExpr dev = sub(ex, mu);
      CExpr norm = inverse(unary(OpKind::Sqrt, mul(pi(), var2)));
      CExpr kernel = unary(OpKind::Exp, neg(div(mul(dev, dev), var2)));
      return ite(less(zero(), sigma), mul(norm, kernel), zero());
    }
    case Dist::Poisson: {
      // exp(-p) p^x / x!, taken in log space; x! overflows a double past 170.
      CExpr x_real = cast_real(ex);
      CExpr log_fact = unary(OpKind::Ln, cast_real(unary(OpKind::Fact, ex)));
      CExpr positive = unary(OpKind::Exp, sub(sub(mul(x_real, unary(OpKind::Ln, ep)), ep), log_fact));
      CExpr at_zero = unary(OpKind::Exp, neg(ep));
      CExpr tail = ite(land(less(zero(), ep), le(ex, integer(170))), positive, zero());
      return ite(le(zero(), ep), ite(less(ex, integer(0)), zero(), ite(eq(ex, integer(0)), at_zero, tail)), zero());
    }
  }
  return zero();
}

}  // namespace densc
