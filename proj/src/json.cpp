#include "densc/json.hpp"

#include <cmath>

#include "densc/error.hpp"

namespace densc {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

Json real_to_json(double r) {
  if (std::isnan(r)) return "nan";
  if (std::isinf(r)) return r > 0 ? "inf" : "-inf";
  return r;
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "nan") return std::nan("");
  if (j == "inf") return HUGE_VAL;
  if (j == "-inf") return -HUGE_VAL;
  throw Error("json: bad real " + j.dump());
}

Operator op_from_json(const Json& j) {
  const std::string name = field(j, "op").get<std::string>();
  if (name == "Cast") return Operator::cast(type_from_json(field(j, "target")));
  for (int k = 0; k <= static_cast<int>(OpKind::Pi); ++k) {
    Operator op(static_cast<OpKind>(k));
    if (op.name() == name) return op;
  }
  throw Error("json: unknown operator " + name);
}

void op_to_json(const Operator& op, Json& j) {
  j["op"] = op.name();
  if (op.kind() == OpKind::Cast) j["target"] = type_to_json(op.cast_target());
}

}  // namespace

Json val_to_json(const Val& v) {
  switch (v.kind()) {
    case TypeKind::Unit: return {{"type", "unit"}};
    case TypeKind::Bool: return {{"type", "bool"}, {"value", v.as_bool()}};
    case TypeKind::Int: return {{"type", "int"}, {"value", v.as_int().str()}};
    case TypeKind::Real: return {{"type", "real"}, {"value", real_to_json(v.as_real())}};
    case TypeKind::Prod: return {{"type", "pair"}, {"fst", val_to_json(v.fst())}, {"snd", val_to_json(v.snd())}};
  }
  return nullptr;
}

Val val_from_json(const Json& j) {
  const std::string t = field(j, "type").get<std::string>();
  if (t == "unit") return Val::unit();
  if (t == "bool") return Val::boolean(field(j, "value").get<bool>());
  if (t == "int") {
    const std::string s = field(j, "value").get<std::string>();
    try {
      return Val::integer(BigInt(s));
    } catch (const std::exception&) {
      throw Error("json: bad integer " + s);
    }
  }
  if (t == "real") return Val::real(real_from_json(field(j, "value")));
  if (t == "pair") return Val::pair(val_from_json(field(j, "fst")), val_from_json(field(j, "snd")));
  throw Error("json: unknown value type " + t);
}

Json type_to_json(const PdfType& t) {
  if (t.is_prod()) return {{"prod", Json::array({type_to_json(t.left()), type_to_json(t.right())})}};
  return t.to_string();
}

PdfType type_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "unit") return PdfType::unit();
    if (s == "bool") return PdfType::boolean();
    if (s == "int") return PdfType::integer();
    if (s == "real") return PdfType::real();
    throw Error("json: unknown type " + s);
  }
  const Json& parts = field(j, "prod");
  if (!parts.is_array() || parts.size() != 2) throw Error("json: prod needs two components");
  return PdfType::prod(type_from_json(parts[0]), type_from_json(parts[1]));
}

Json expr_to_json(const Expr& e) {
  Json j;
  switch (e.kind()) {
    case ExprKind::Var:
      j["node"] = "Var";
      j["index"] = e.index();
      break;
    case ExprKind::Val:
      j["node"] = "Val";
      j["value"] = val_to_json(e.value());
      break;
    case ExprKind::Let:
      j["node"] = "Let";
      j["bound"] = expr_to_json(e.bound());
      j["body"] = expr_to_json(e.body());
      break;
    case ExprKind::Op:
      j["node"] = "Op";
      op_to_json(e.oper(), j);
      j["arg"] = expr_to_json(e.arg());
      break;
    case ExprKind::Pair:
      j["node"] = "Pair";
      j["fst"] = expr_to_json(e.fst());
      j["snd"] = expr_to_json(e.snd());
      break;
    case ExprKind::Random:
      j["node"] = "Random";
      j["dist"] = dist_name(e.dist());
      j["param"] = expr_to_json(e.param());
      break;
    case ExprKind::If:
      j["node"] = "If";
      j["cond"] = expr_to_json(e.cond());
      j["then"] = expr_to_json(e.then_branch());
      j["else"] = expr_to_json(e.else_branch());
      break;
    case ExprKind::Fail:
      j["node"] = "Fail";
      j["type"] = type_to_json(e.fail_type());
      break;
  }
  return j;
}

Expr expr_from_json(const Json& j) {
  const std::string n = field(j, "node").get<std::string>();
  if (n == "Var") return Expr::var(field(j, "index").get<std::size_t>());
  if (n == "Val") return Expr::val(val_from_json(field(j, "value")));
  if (n == "Let") return Expr::let_in(expr_from_json(field(j, "bound")), expr_from_json(field(j, "body")));
  if (n == "Op") return Expr::op(op_from_json(j), expr_from_json(field(j, "arg")));
  if (n == "Pair") return Expr::pair(expr_from_json(field(j, "fst")), expr_from_json(field(j, "snd")));
  if (n == "Random") {
    const std::string d = field(j, "dist").get<std::string>();
    auto dist = dist_from_name(d);
    if (!dist) throw Error("json: unknown distribution " + d);
    return Expr::random(*dist, expr_from_json(field(j, "param")));
  }
  if (n == "If")
    return Expr::if_then_else(expr_from_json(field(j, "cond")), expr_from_json(field(j, "then")),
                              expr_from_json(field(j, "else")));
  if (n == "Fail") return Expr::fail(type_from_json(field(j, "type")));
  throw Error("json: unknown expression node " + n);
}

Json cexpr_to_json(const CExpr& e) {
  Json j;
  switch (e.kind()) {
    case CExprKind::Var:
      j["node"] = "Var";
      j["index"] = e.index();
      break;
    case CExprKind::Val:
      j["node"] = "Val";
      j["value"] = val_to_json(e.value());
      break;
    case CExprKind::Op:
      j["node"] = "Op";
      op_to_json(e.oper(), j);
      j["arg"] = cexpr_to_json(e.arg());
      break;
    case CExprKind::Pair:
      j["node"] = "Pair";
      j["fst"] = cexpr_to_json(e.fst());
      j["snd"] = cexpr_to_json(e.snd());
      break;
    case CExprKind::If:
      j["node"] = "If";
      j["cond"] = cexpr_to_json(e.cond());
      j["then"] = cexpr_to_json(e.then_branch());
      j["else"] = cexpr_to_json(e.else_branch());
      break;
    case CExprKind::Int:
      j["node"] = "Int";
      j["over"] = type_to_json(e.over());
      j["body"] = cexpr_to_json(e.body());
      break;
  }
  return j;
}

CExpr cexpr_from_json(const Json& j) {
  const std::string n = field(j, "node").get<std::string>();
  if (n == "Var") return CExpr::var(field(j, "index").get<std::size_t>());
  if (n == "Val") return CExpr::val(val_from_json(field(j, "value")));
  if (n == "Op") return CExpr::op(op_from_json(j), cexpr_from_json(field(j, "arg")));
  if (n == "Pair") return CExpr::pair(cexpr_from_json(field(j, "fst")), cexpr_from_json(field(j, "snd")));
  if (n == "If")
    return CExpr::if_then_else(cexpr_from_json(field(j, "cond")), cexpr_from_json(field(j, "then")),
                               cexpr_from_json(field(j, "else")));
  if (n == "Int") return CExpr::integral(cexpr_from_json(field(j, "body")), type_from_json(field(j, "over")));
  throw Error("json: unknown target node " + n);
}

}  // namespace densc
