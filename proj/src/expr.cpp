#include "densc/expr.hpp"

#include <sstream>

#include "densc/error.hpp"

namespace densc {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t op_hash(const Operator& op) {
  std::size_t h = static_cast<std::size_t>(op.kind());
  if (op.kind() == OpKind::Cast) h = mix(h, op.cast_target().hash());
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

struct Expr::Node {
  ExprKind kind = ExprKind::Var;
  std::size_t index = 0;
  Val value;
  Operator op{OpKind::Fst};
  Dist dist = Dist::Bernoulli;
  PdfType type;
  std::vector<Expr> kids;
  std::size_t hash = 0;
  std::size_t size = 1;

  void finish() {
    hash = static_cast<std::size_t>(kind) + 0x51ed;
    switch (kind) {
      case ExprKind::Var: hash = mix(hash, index); break;
      case ExprKind::Val: hash = mix(hash, value.hash()); break;
      case ExprKind::Op: hash = mix(hash, op_hash(op)); break;
      case ExprKind::Random: hash = mix(hash, static_cast<std::size_t>(dist)); break;
      case ExprKind::Fail: hash = mix(hash, type.hash()); break;
      default: break;
    }
    for (const auto& k : kids) {
      hash = mix(hash, k.node_->hash);
      size += k.node_->size;
    }
  }
};

namespace {

template <class NodeT>
std::shared_ptr<NodeT> fresh(auto kind) {
  auto n = std::make_shared<NodeT>();
  n->kind = kind;
  return n;
}

}  // namespace

Expr Expr::var(std::size_t index) {
  auto n = fresh<Node>(ExprKind::Var);
  n->index = index;
  n->finish();
  return Expr(n);
}

Expr Expr::val(Val v) {
  auto n = fresh<Node>(ExprKind::Val);
  n->value = std::move(v);
  n->finish();
  return Expr(n);
}

Expr Expr::let_in(Expr bound, Expr body) {
  auto n = fresh<Node>(ExprKind::Let);
  n->kids = {std::move(bound), std::move(body)};
  n->finish();
  return Expr(n);
}

Expr Expr::op(Operator op, Expr arg) {
  auto n = fresh<Node>(ExprKind::Op);
  n->op = std::move(op);
  n->kids = {std::move(arg)};
  n->finish();
  return Expr(n);
}

Expr Expr::pair(Expr fst, Expr snd) {
  auto n = fresh<Node>(ExprKind::Pair);
  n->kids = {std::move(fst), std::move(snd)};
  n->finish();
  return Expr(n);
}

Expr Expr::random(Dist dist, Expr param) {
  auto n = fresh<Node>(ExprKind::Random);
  n->dist = dist;
  n->kids = {std::move(param)};
  n->finish();
  return Expr(n);
}

Expr Expr::if_then_else(Expr cond, Expr then_branch, Expr else_branch) {
  auto n = fresh<Node>(ExprKind::If);
  n->kids = {std::move(cond), std::move(then_branch), std::move(else_branch)};
  n->finish();
  return Expr(n);
}

Expr Expr::fail(PdfType t) {
  auto n = fresh<Node>(ExprKind::Fail);
  n->type = std::move(t);
  n->finish();
  return Expr(n);
}

ExprKind Expr::kind() const { return node_->kind; }
std::size_t Expr::index() const { return node_->index; }
const Val& Expr::value() const { return node_->value; }
const Operator& Expr::oper() const { return node_->op; }
Dist Expr::dist() const { return node_->dist; }
const PdfType& Expr::fail_type() const { return node_->type; }

const Expr& Expr::child(std::size_t i) const {
  if (i >= node_->kids.size()) throw Error("Expr: accessor does not match node kind");
  return node_->kids[i];
}

const Expr& Expr::bound() const { return child(0); }
const Expr& Expr::body() const { return child(1); }
const Expr& Expr::arg() const { return child(0); }
const Expr& Expr::fst() const { return child(0); }
const Expr& Expr::snd() const { return child(1); }
const Expr& Expr::param() const { return child(0); }
const Expr& Expr::cond() const { return child(0); }
const Expr& Expr::then_branch() const { return child(1); }
const Expr& Expr::else_branch() const { return child(2); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.size != y.size) return false;
  switch (x.kind) {
    case ExprKind::Var:
      if (x.index != y.index) return false;
      break;
    case ExprKind::Val:
      if (x.value != y.value) return false;
      break;
    case ExprKind::Op:
      if (x.op != y.op) return false;
      break;
    case ExprKind::Random:
      if (x.dist != y.dist) return false;
      break;
    case ExprKind::Fail:
      if (x.type != y.type) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (x.kids[i] != y.kids[i]) return false;
  return true;
}

std::size_t Expr::size() const { return node_->size; }
std::size_t Expr::hash() const { return node_->hash; }

std::string Expr::to_string() const {
  std::ostringstream os;
  switch (kind()) {
    case ExprKind::Var: os << "Var " << index(); break;
    case ExprKind::Val: os << "Val " << value().to_string(); break;
    case ExprKind::Let: os << "LET " << bound().to_string() << " IN " << body().to_string(); break;
    case ExprKind::Op: os << oper().name() << "(" << arg().to_string() << ")"; break;
    case ExprKind::Pair: os << "<" << fst().to_string() << ", " << snd().to_string() << ">"; break;
    case ExprKind::Random: os << "Random " << dist_name(dist()) << " (" << param().to_string() << ")"; break;
    case ExprKind::If:
      os << "IF " << cond().to_string() << " THEN " << then_branch().to_string() << " ELSE "
         << else_branch().to_string();
      break;
    case ExprKind::Fail: os << "Fail " << fail_type().to_string(); break;
  }
  return os.str();
}

namespace {

void collect_free(const Expr& e, std::size_t depth, std::set<std::size_t>& out) {
  switch (e.kind()) {
    case ExprKind::Var:
      if (e.index() >= depth) out.insert(e.index() - depth);
      return;
    case ExprKind::Val:
    case ExprKind::Fail: return;
    case ExprKind::Let:
      collect_free(e.bound(), depth, out);
      collect_free(e.body(), depth + 1, out);
      return;
    case ExprKind::Op: collect_free(e.arg(), depth, out); return;
    case ExprKind::Pair:
      collect_free(e.fst(), depth, out);
      collect_free(e.snd(), depth, out);
      return;
    case ExprKind::Random: collect_free(e.param(), depth, out); return;
    case ExprKind::If:
      collect_free(e.cond(), depth, out);
      collect_free(e.then_branch(), depth, out);
      collect_free(e.else_branch(), depth, out);
      return;
  }
}

}  // namespace

std::set<std::size_t> free_vars(const Expr& e) {
  std::set<std::size_t> out;
  collect_free(e, 0, out);
  return out;
}

bool is_deterministic(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Var:
    case ExprKind::Val: return true;
    case ExprKind::Random:
    case ExprKind::Fail: return false;
    case ExprKind::Let: return is_deterministic(e.bound()) && is_deterministic(e.body());
    case ExprKind::Op: return is_deterministic(e.arg());
    case ExprKind::Pair: return is_deterministic(e.fst()) && is_deterministic(e.snd());
    case ExprKind::If:
      return is_deterministic(e.cond()) && is_deterministic(e.then_branch()) &&
             is_deterministic(e.else_branch());
  }
  return false;
}

// ---------------------------------------------------------------------------
// CExpr
// ---------------------------------------------------------------------------

struct CExpr::Node {
  CExprKind kind = CExprKind::Var;
  std::size_t index = 0;
  Val value;
  Operator op{OpKind::Fst};
  PdfType type;
  std::vector<CExpr> kids;
  std::size_t hash = 0;
  std::size_t size = 1;

  void finish() {
    hash = static_cast<std::size_t>(kind) + 0xc3a5;
    switch (kind) {
      case CExprKind::Var: hash = mix(hash, index); break;
      case CExprKind::Val: hash = mix(hash, value.hash()); break;
      case CExprKind::Op: hash = mix(hash, op_hash(op)); break;
      case CExprKind::Int: hash = mix(hash, type.hash()); break;
      default: break;
    }
    for (const auto& k : kids) {
      hash = mix(hash, k.node_->hash);
      size += k.node_->size;
    }
  }
};

CExpr CExpr::var(std::size_t index) {
  auto n = fresh<Node>(CExprKind::Var);
  n->index = index;
  n->finish();
  return CExpr(n);
}

CExpr CExpr::val(Val v) {
  auto n = fresh<Node>(CExprKind::Val);
  n->value = std::move(v);
  n->finish();
  return CExpr(n);
}

CExpr CExpr::op(Operator op, CExpr arg) {
  auto n = fresh<Node>(CExprKind::Op);
  n->op = std::move(op);
  n->kids = {std::move(arg)};
  n->finish();
  return CExpr(n);
}

CExpr CExpr::pair(CExpr fst, CExpr snd) {
  auto n = fresh<Node>(CExprKind::Pair);
  n->kids = {std::move(fst), std::move(snd)};
  n->finish();
  return CExpr(n);
}

CExpr CExpr::if_then_else(CExpr cond, CExpr then_branch, CExpr else_branch) {
  auto n = fresh<Node>(CExprKind::If);
  n->kids = {std::move(cond), std::move(then_branch), std::move(else_branch)};
  n->finish();
  return CExpr(n);
}

CExpr CExpr::integral(CExpr body, PdfType over) {
  auto n = fresh<Node>(CExprKind::Int);
  n->type = std::move(over);
  n->kids = {std::move(body)};
  n->finish();
  return CExpr(n);
}

CExprKind CExpr::kind() const { return node_->kind; }
std::size_t CExpr::index() const { return node_->index; }
const Val& CExpr::value() const { return node_->value; }
const Operator& CExpr::oper() const { return node_->op; }
const PdfType& CExpr::over() const { return node_->type; }

const CExpr& CExpr::child(std::size_t i) const {
  if (i >= node_->kids.size()) throw Error("CExpr: accessor does not match node kind");
  return node_->kids[i];
}

const CExpr& CExpr::arg() const { return child(0); }
const CExpr& CExpr::fst() const { return child(0); }
const CExpr& CExpr::snd() const { return child(1); }
const CExpr& CExpr::cond() const { return child(0); }
const CExpr& CExpr::then_branch() const { return child(1); }
const CExpr& CExpr::else_branch() const { return child(2); }
const CExpr& CExpr::body() const { return child(0); }

bool operator==(const CExpr& a, const CExpr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.size != y.size) return false;
  switch (x.kind) {
    case CExprKind::Var:
      if (x.index != y.index) return false;
      break;
    case CExprKind::Val:
      if (x.value != y.value) return false;
      break;
    case CExprKind::Op:
      if (x.op != y.op) return false;
      break;
    case CExprKind::Int:
      if (x.type != y.type) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (x.kids[i] != y.kids[i]) return false;
  return true;
}

std::size_t CExpr::size() const { return node_->size; }
std::size_t CExpr::hash() const { return node_->hash; }

std::string CExpr::to_string() const {
  std::ostringstream os;
  switch (kind()) {
    case CExprKind::Var: os << "CVar " << index(); break;
    case CExprKind::Val: os << "CVal " << value().to_string(); break;
    case CExprKind::Op: os << oper().name() << "(" << arg().to_string() << ")"; break;
    case CExprKind::Pair: os << "<" << fst().to_string() << ", " << snd().to_string() << ">"; break;
    case CExprKind::If:
      os << "IF " << cond().to_string() << " THEN " << then_branch().to_string() << " ELSE "
         << else_branch().to_string();
      break;
    case CExprKind::Int: os << "INT[" << over().to_string() << "](" << body().to_string() << ")"; break;
  }
  return os.str();
}

namespace {

void collect_free(const CExpr& e, std::size_t depth, std::set<std::size_t>& out) {
  switch (e.kind()) {
    case CExprKind::Var:
      if (e.index() >= depth) out.insert(e.index() - depth);
      return;
    case CExprKind::Val: return;
    case CExprKind::Op: collect_free(e.arg(), depth, out); return;
    case CExprKind::Pair:
      collect_free(e.fst(), depth, out);
      collect_free(e.snd(), depth, out);
      return;
    case CExprKind::If:
      collect_free(e.cond(), depth, out);
      collect_free(e.then_branch(), depth, out);
      collect_free(e.else_branch(), depth, out);
      return;
    case CExprKind::Int: collect_free(e.body(), depth + 1, out); return;
  }
}

}  // namespace

std::set<std::size_t> free_vars(const CExpr& e) {
  std::set<std::size_t> out;
  collect_free(e, 0, out);
  return out;
}

namespace cx {

CExpr real(double r) { return CExpr::val(Val::real(r)); }
CExpr integer(long long n) { return CExpr::val(Val::integer(n)); }
CExpr boolean(bool b) { return CExpr::val(Val::boolean(b)); }

CExpr add(CExpr a, CExpr b) {
  return CExpr::op(Operator(OpKind::Add), CExpr::pair(std::move(a), std::move(b)));
}
CExpr sub(CExpr a, CExpr b) { return add(std::move(a), neg(std::move(b))); }
CExpr mul(CExpr a, CExpr b) {
  return CExpr::op(Operator(OpKind::Mult), CExpr::pair(std::move(a), std::move(b)));
}
CExpr div(CExpr a, CExpr b) { return mul(std::move(a), inverse(std::move(b))); }
CExpr neg(CExpr a) { return CExpr::op(Operator(OpKind::Minus), std::move(a)); }
CExpr inverse(CExpr a) { return CExpr::op(Operator(OpKind::Inverse), std::move(a)); }
CExpr less(CExpr a, CExpr b) {
  return CExpr::op(Operator(OpKind::Less), CExpr::pair(std::move(a), std::move(b)));
}
CExpr le(CExpr a, CExpr b) { return lnot(less(std::move(b), std::move(a))); }
CExpr eq(CExpr a, CExpr b) {
  return CExpr::op(Operator(OpKind::Equals), CExpr::pair(std::move(a), std::move(b)));
}
CExpr land(CExpr a, CExpr b) {
  return CExpr::op(Operator(OpKind::And), CExpr::pair(std::move(a), std::move(b)));
}
CExpr lnot(CExpr a) { return CExpr::op(Operator(OpKind::Not), std::move(a)); }
CExpr fst(CExpr a) { return CExpr::op(Operator(OpKind::Fst), std::move(a)); }
CExpr snd(CExpr a) { return CExpr::op(Operator(OpKind::Snd), std::move(a)); }
CExpr unary(OpKind k, CExpr a) { return CExpr::op(Operator(k), std::move(a)); }
CExpr pi() { return CExpr::op(Operator(OpKind::Pi), CExpr::val(Val::unit())); }
CExpr pow(CExpr a, CExpr b) {
  return CExpr::op(Operator(OpKind::Pow), CExpr::pair(std::move(a), std::move(b)));
}
CExpr cast_real(CExpr a) { return CExpr::op(Operator::cast(PdfType::real()), std::move(a)); }
CExpr indicator(CExpr cond) { return ite(std::move(cond), real(1.0), real(0.0)); }
CExpr ite(CExpr c, CExpr a, CExpr b) {
  return CExpr::if_then_else(std::move(c), std::move(a), std::move(b));
}

}  // namespace cx

}  // namespace densc
