#include "densc/target_eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "densc/error.hpp"
#include "densc/ops.hpp"

namespace densc {

namespace {

int real_components(const PdfType& t) {
  if (t.kind() == TypeKind::Real) return 1;
  if (t.is_prod()) return real_components(t.left()) + real_components(t.right());
  return 0;
}

class Evaluator {
 public:
  Evaluator(const State& s, const QuadConfig& cfg, EvalDiagnostics* diag) : cfg_(cfg), diag_(diag) {
    for (std::size_t i = s.size(); i > 0; --i) stack_.push_back(s(i - 1));
  }

  Val eval(const CExpr& e) {
    switch (e.kind()) {
      case CExprKind::Var: {
        if (e.index() >= stack_.size()) throw EvalError("undefined variable " + std::to_string(e.index()));
        return stack_[stack_.size() - 1 - e.index()];
      }
      case CExprKind::Val: return e.value();
      case CExprKind::Op: return op_sem(e.oper(), eval(e.arg()));
      case CExprKind::Pair: return Val::pair(eval(e.fst()), eval(e.snd()));
      case CExprKind::If: return eval(eval(e.cond()).as_bool() ? e.then_branch() : e.else_branch());
      case CExprKind::Int: {
        QuadResult r = integrate(e.body(), e.over());
        return Val::real(r.converged ? r.value : 0.0);
      }
    }
    throw EvalError("unknown target node");
  }

  QuadResult integrate(const CExpr& body, const PdfType& over) {
    int depth = real_depth_ + real_components(over);
    if (depth > cfg_.max_real_nesting)
      throw EvalError("REAL integrals nested deeper than " + std::to_string(cfg_.max_real_nesting));
    int saved = real_depth_;
    real_depth_ = depth;
    auto integrand = [&](const Val& x) {
      stack_.push_back(x);
      double v = eval(body).as_real();
      stack_.pop_back();
      return std::isfinite(v) ? std::max(0.0, v) : 0.0;
    };
    QuadResult r = integrate_part(body, over, [](const Val& v) { return v; }, integrand);
    real_depth_ = saved;
    if (diag_) {
      if (!r.converged) ++diag_->divergent_integrals;
      if (!r.accurate) ++diag_->inaccurate_integrals;
    }
    return r;
  }

  // Points where a guard of `body` changes value as variable 0 runs over
  // embed(t): every REAL comparison whose sides are affine in t contributes
  // its root. Comparisons under a nested integral are not inspected.
  std::vector<double> breakpoints(const CExpr& body, const std::function<Val(double)>& embed) {
    std::vector<const CExpr*> guards;
    collect_guards(body, guards);
    std::vector<double> out;
    for (const CExpr* g : guards) {
      double h[3];
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i) {
        const std::size_t height = stack_.size();
        stack_.push_back(embed(static_cast<double>(i - 1)));
        Val l, r;
        try {
          l = eval(g->arg().fst());
          r = eval(g->arg().snd());
        } catch (const EvalError&) {
          ok = false;
        }
        stack_.resize(height);
        ok = ok && l.kind() == TypeKind::Real && r.kind() == TypeKind::Real;
        if (ok) h[i] = l.as_real() - r.as_real();
        ok = ok && std::isfinite(h[i]);
      }
      if (!ok) continue;
      double slope = h[2] - h[1];
      double scale = std::fabs(h[0]) + std::fabs(h[1]) + std::fabs(h[2]);
      if (slope == 0.0 || std::fabs(h[2] - 2.0 * h[1] + h[0]) > 1e-12 * scale) continue;
      out.push_back(-h[1] / slope);
    }
    return out;
  }

 private:
  static bool has_integral(const CExpr& e) {
    switch (e.kind()) {
      case CExprKind::Var:
      case CExprKind::Val: return false;
      case CExprKind::Int: return true;
      case CExprKind::Op: return has_integral(e.arg());
      case CExprKind::Pair: return has_integral(e.fst()) || has_integral(e.snd());
      case CExprKind::If:
        return has_integral(e.cond()) || has_integral(e.then_branch()) || has_integral(e.else_branch());
    }
    return true;
  }

  static void collect_guards(const CExpr& e, std::vector<const CExpr*>& out) {
    switch (e.kind()) {
      case CExprKind::Var:
      case CExprKind::Val:
      case CExprKind::Int: return;
      case CExprKind::Op:
        if (e.oper().kind() == OpKind::Less && e.arg().kind() == CExprKind::Pair && !has_integral(e.arg()) &&
            free_vars(e.arg()).count(0))
          out.push_back(&e);
        collect_guards(e.arg(), out);
        return;
      case CExprKind::Pair:
        collect_guards(e.fst(), out);
        collect_guards(e.snd(), out);
        return;
      case CExprKind::If:
        collect_guards(e.cond(), out);
        collect_guards(e.then_branch(), out);
        collect_guards(e.else_branch(), out);
        return;
    }
  }

  // Integral of g over the stock measure of t, where g sees embed(x) for x
  // in t. Breakpoints are used for the innermost REAL component only.
  QuadResult integrate_part(const CExpr& body, const PdfType& t, const std::function<Val(const Val&)>& embed,
                            const ValFn& g, bool innermost = true) {
    switch (t.kind()) {
      case TypeKind::Real: {
        std::vector<double> cuts;
        if (innermost) cuts = breakpoints(body, [&](double x) { return embed(Val::real(x)); });
        return integrate_real([&](double x) { return g(embed(Val::real(x))); }, cfg_, nullptr, cuts);
      }
      case TypeKind::Prod: {
        bool inner_ok = true;
        bool inner_accurate = true;
        auto outer = [&](const Val& a) {
          QuadResult r = integrate_part(
              body, t.right(), [&](const Val& b) { return embed(Val::pair(a, b)); }, g, innermost);
          inner_ok = inner_ok && r.converged;
          inner_accurate = inner_accurate && r.accurate;
          return r.value;
        };
        QuadResult r = integrate_part(body, t.left(), [](const Val& v) { return v; }, outer, false);
        r.converged = r.converged && inner_ok;
        r.accurate = r.accurate && inner_accurate;
        return r;
      }
      default: return integrate_stock([&](const Val& x) { return g(embed(x)); }, t, cfg_);
    }
  }

  const QuadConfig& cfg_;
  EvalDiagnostics* diag_;
  std::vector<Val> stack_;
  int real_depth_ = 0;
};

}  // namespace

std::vector<double> real_breakpoints(const CExpr& f, const QuadConfig& cfg, const State& s) {
  Evaluator ev(s, cfg, nullptr);
  return ev.breakpoints(f, [](double x) { return Val::real(x); });
}

Val eval_cexpr(const State& s, const CExpr& ce, const QuadConfig& cfg, EvalDiagnostics* diag) {
  Evaluator ev(s, cfg, diag);
  return ev.eval(ce);
}

double eval_real(const State& s, const CExpr& ce, const QuadConfig& cfg, EvalDiagnostics* diag) {
  return eval_cexpr(s, ce, cfg, diag).as_real();
}

double eval_density_at(const CExpr& f, const Val& x, const QuadConfig& cfg, const State& s,
                       EvalDiagnostics* diag) {
  return eval_real(s.insert(x), f, cfg, diag);
}

QuadResult integrate_density(const CExpr& f, const PdfType& t, const QuadConfig& cfg, const State& s,
                             EvalDiagnostics* diag) {
  Evaluator ev(s, cfg, diag);
  return ev.integrate(f, t);
}

}  // namespace densc
