#include "densc/typing.hpp"

#include "densc/error.hpp"
#include "densc/ops.hpp"

namespace densc {

const PdfType& TypeEnv::operator()(std::size_t i) const {
  static const PdfType unit = PdfType::unit();
  return i < types_.size() ? types_[i] : unit;
}

TypeEnv TypeEnv::insert(PdfType t) const {
  std::vector<PdfType> types;
  types.reserve(types_.size() + 1);
  types.push_back(std::move(t));
  types.insert(types.end(), types_.begin(), types_.end());
  return TypeEnv(std::move(types));
}

namespace {

[[noreturn]] void fail(const char* rule, const std::string& path, const std::string& msg) {
  throw TypeError(std::string(rule) + " at " + (path.empty() ? "<root>" : path) + ": " + msg);
}

std::string sub(const std::string& path, const char* step) {
  return path.empty() ? step : path + "." + step;
}

PdfType check(const TypeEnv& env, const Expr& e, const std::string& path) {
  switch (e.kind()) {
    case ExprKind::Var: return env(e.index());
    case ExprKind::Val: return val_type(e.value());
    case ExprKind::Let: {
      PdfType t = check(env, e.bound(), sub(path, "bound"));
      return check(env.insert(t), e.body(), sub(path, "body"));
    }
    case ExprKind::Op: {
      PdfType t = check(env, e.arg(), sub(path, "arg"));
      auto r = op_type(e.oper(), t);
      if (!r) fail("ET_OP", path, "operator " + e.oper().name() + " not defined on " + t.to_string());
      return *r;
    }
    case ExprKind::Pair:
      return PdfType::prod(check(env, e.fst(), sub(path, "fst")),
                           check(env, e.snd(), sub(path, "snd")));
    case ExprKind::Random: {
      PdfType t = check(env, e.param(), sub(path, "param"));
      if (t != dist_param_type(e.dist()))
        fail("ET_RAND", path,
             dist_name(e.dist()) + " expects parameter of type " +
                 dist_param_type(e.dist()).to_string() + ", got " + t.to_string());
      return dist_result_type(e.dist());
    }
    case ExprKind::If: {
      PdfType c = check(env, e.cond(), sub(path, "cond"));
      if (c.kind() != TypeKind::Bool) fail("ET_IF", path, "condition has type " + c.to_string());
      PdfType a = check(env, e.then_branch(), sub(path, "then"));
      PdfType b = check(env, e.else_branch(), sub(path, "else"));
      if (a != b) fail("ET_IF", path, "branch type mismatch: " + a.to_string() + " vs " + b.to_string());
      return a;
    }
    case ExprKind::Fail: return e.fail_type();
  }
  fail("?", path, "unknown node");
}

PdfType check(const TypeEnv& env, const CExpr& e, const std::string& path) {
  switch (e.kind()) {
    case CExprKind::Var: return env(e.index());
    case CExprKind::Val: return val_type(e.value());
    case CExprKind::Op: {
      PdfType t = check(env, e.arg(), sub(path, "arg"));
      auto r = op_type(e.oper(), t);
      if (!r) fail("CET_OP", path, "operator " + e.oper().name() + " not defined on " + t.to_string());
      return *r;
    }
    case CExprKind::Pair:
      return PdfType::prod(check(env, e.fst(), sub(path, "fst")),
                           check(env, e.snd(), sub(path, "snd")));
    case CExprKind::If: {
      PdfType c = check(env, e.cond(), sub(path, "cond"));
      if (c.kind() != TypeKind::Bool) fail("CET_IF", path, "condition has type " + c.to_string());
      PdfType a = check(env, e.then_branch(), sub(path, "then"));
      PdfType b = check(env, e.else_branch(), sub(path, "else"));
      if (a != b) fail("CET_IF", path, "branch type mismatch: " + a.to_string() + " vs " + b.to_string());
      return a;
    }
    case CExprKind::Int: {
      PdfType t = check(env.insert(e.over()), e.body(), sub(path, "body"));
      if (t.kind() != TypeKind::Real) fail("CET_INT", path, "integrand not REAL (got " + t.to_string() + ")");
      return PdfType::real();
    }
  }
  fail("?", path, "unknown node");
}

}  // namespace

PdfType typecheck_expr(const TypeEnv& env, const Expr& e) { return check(env, e, ""); }

PdfType typecheck_cexpr(const TypeEnv& env, const CExpr& ce) { return check(env, ce, ""); }

}  // namespace densc
