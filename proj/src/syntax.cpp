#include "densc/syntax.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "densc/debruijn.hpp"
#include "densc/error.hpp"

namespace densc {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { Id, Int, Real, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

const std::set<std::string> kKeywords = {
    "let", "in", "if", "then", "else", "random", "fail", "true", "false", "unit", "pi", "integral", "fun",
    "bool", "int", "real", "fst", "snd", "sqrt", "exp", "ln", "inverse", "fact", "not", "add", "mult",
    "less", "equals", "and", "or", "pow", "minus"};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Tok::Id;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool is_real = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        is_real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = is_real ? Tok::Real : Tok::Int;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else {
      static const char* two[] = {"&&", "||", "=>"};
      t.kind = Tok::Sym;
      for (const char* s : two) {
        if (src.compare(i, 2, s) == 0) t.text = s;
      }
      if (t.text.empty()) {
        if (std::string("(),:=<+-*/^!{}").find(c) == std::string::npos)
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Surface tree
// ---------------------------------------------------------------------------

struct Syn;
using SynP = std::shared_ptr<const Syn>;

struct Syn {
  enum class K { Name, Lit, Let, If, Random, Fail, Integral, Op, Pair } k = K::Lit;
  std::string name;
  Val lit;
  Operator op{OpKind::Fst};
  Dist dist = Dist::Bernoulli;
  PdfType type;
  std::vector<SynP> kids;
  // Pair written as "(a, b)" rather than produced by an infix operator.
  bool explicit_pair = false;
  std::size_t line = 0;
  std::size_t col = 0;
};

SynP make(Syn s) { return std::make_shared<const Syn>(std::move(s)); }

SynP syn_op(Operator op, SynP arg, std::size_t line = 0, std::size_t col = 0) {
  Syn s;
  s.k = Syn::K::Op;
  s.op = std::move(op);
  s.kids = {std::move(arg)};
  s.line = line;
  s.col = col;
  return make(std::move(s));
}

SynP syn_pair(SynP a, SynP b, bool explicit_pair) {
  Syn s;
  s.k = Syn::K::Pair;
  s.line = a->line;
  s.col = a->col;
  s.kids = {std::move(a), std::move(b)};
  s.explicit_pair = explicit_pair;
  return make(std::move(s));
}

SynP syn_binary(OpKind k, SynP a, SynP b) { return syn_op(Operator(k), syn_pair(std::move(a), std::move(b), false)); }

SynP syn_lit(Val v) {
  Syn s;
  s.k = Syn::K::Lit;
  s.lit = std::move(v);
  return make(std::move(s));
}

SynP syn_name(std::string n) {
  Syn s;
  s.k = Syn::K::Name;
  s.name = std::move(n);
  return make(std::move(s));
}

const std::map<std::string, OpKind> kFunctions = {
    {"fst", OpKind::Fst},       {"snd", OpKind::Snd},   {"sqrt", OpKind::Sqrt},   {"exp", OpKind::Exp},
    {"ln", OpKind::Ln},         {"inverse", OpKind::Inverse}, {"fact", OpKind::Fact}, {"not", OpKind::Not},
    {"add", OpKind::Add},       {"mult", OpKind::Mult}, {"less", OpKind::Less},   {"equals", OpKind::Equals},
    {"and", OpKind::And},       {"or", OpKind::Or},     {"pow", OpKind::Pow},     {"minus", OpKind::Minus}};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  SynP program() {
    SynP e = expr();
    expect_end();
    return e;
  }

  // fun NAME : TYPE => EXPR
  std::tuple<std::string, PdfType, SynP> density() {
    expect_kw("fun");
    std::string name = ident();
    expect(":");
    PdfType t = type();
    expect("=>");
    SynP body = expr();
    expect_end();
    return {name, t, body};
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void error(const std::string& msg, const Token& t) const {
    throw ParseError(msg, t.line, t.col);
  }

  static std::string describe(const Token& t) {
    return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  }

  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool is_kw(const char* s) const { return peek().kind == Tok::Id && peek().text == s; }

  void expect(const char* s) {
    if (!is_sym(s)) error(std::string("expected '") + s + "', found " + describe(peek()), peek());
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) error(std::string("expected '") + s + "', found " + describe(peek()), peek());
    next();
  }
  void expect_end() {
    if (peek().kind != Tok::End) error("unexpected " + describe(peek()) + " after expression", peek());
  }

  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::Id || kKeywords.contains(t.text)) error("expected identifier, found " + describe(t), t);
    return next().text;
  }

  PdfType type() {
    PdfType t = type_atom();
    while (is_sym("*")) {
      next();
      t = PdfType::prod(t, type_atom());
    }
    return t;
  }

  PdfType type_atom() {
    const Token& t = peek();
    if (is_sym("(")) {
      next();
      PdfType inner = type();
      expect(")");
      return inner;
    }
    if (t.kind == Tok::Id) {
      if (t.text == "unit") return next(), PdfType::unit();
      if (t.text == "bool") return next(), PdfType::boolean();
      if (t.text == "int") return next(), PdfType::integer();
      if (t.text == "real") return next(), PdfType::real();
    }
    error("expected a type, found " + describe(t), t);
  }

  SynP expr() {
    const Token start = peek();
    if (is_kw("let")) {
      next();
      std::string name = ident();
      expect("=");
      SynP bound = expr();
      expect_kw("in");
      SynP body = expr();
      Syn s;
      s.k = Syn::K::Let;
      s.name = name;
      s.kids = {bound, body};
      s.line = start.line;
      s.col = start.col;
      return make(std::move(s));
    }
    if (is_kw("if")) {
      next();
      SynP c = expr();
      expect_kw("then");
      SynP a = expr();
      expect_kw("else");
      SynP b = expr();
      Syn s;
      s.k = Syn::K::If;
      s.kids = {c, a, b};
      s.line = start.line;
      s.col = start.col;
      return make(std::move(s));
    }
    if (is_kw("fail")) {
      next();
      expect(":");
      Syn s;
      s.k = Syn::K::Fail;
      s.type = type();
      s.line = start.line;
      s.col = start.col;
      return make(std::move(s));
    }
    return disj();
  }

  SynP disj() {
    SynP l = conj();
    while (is_sym("||")) {
      next();
      l = syn_binary(OpKind::Or, l, conj());
    }
    return l;
  }

  SynP conj() {
    SynP l = cmp();
    while (is_sym("&&")) {
      next();
      l = syn_binary(OpKind::And, l, cmp());
    }
    return l;
  }

  SynP cmp() {
    SynP l = arith();
    if (is_sym("<")) {
      next();
      return syn_binary(OpKind::Less, l, arith());
    }
    if (is_sym("=")) {
      next();
      return syn_binary(OpKind::Equals, l, arith());
    }
    return l;
  }

  SynP arith() {
    SynP l = term();
    for (;;) {
      if (is_sym("+")) {
        next();
        l = syn_binary(OpKind::Add, l, term());
      } else if (is_sym("-")) {
        next();
        l = syn_binary(OpKind::Add, l, syn_op(Operator(OpKind::Minus), term()));
      } else {
        return l;
      }
    }
  }

  SynP term() {
    SynP l = factor();
    for (;;) {
      if (is_sym("*")) {
        next();
        l = syn_binary(OpKind::Mult, l, factor());
      } else if (is_sym("/")) {
        next();
        l = syn_binary(OpKind::Mult, l, syn_op(Operator(OpKind::Inverse), factor()));
      } else {
        return l;
      }
    }
  }

  SynP factor() {
    const Token start = peek();
    if (is_sym("-")) {
      // A minus directly on a numeric literal is part of the literal.
      if ((peek(1).kind == Tok::Int || peek(1).kind == Tok::Real) && !is_sym("^", 2)) {
        next();
        return number(next(), true);
      }
      next();
      return syn_op(Operator(OpKind::Minus), power(), start.line, start.col);
    }
    if (is_sym("!")) {
      next();
      return syn_op(Operator(OpKind::Not), power(), start.line, start.col);
    }
    return power();
  }

  SynP power() {
    SynP base = atom();
    if (is_sym("^")) {
      next();
      return syn_binary(OpKind::Pow, base, atom());
    }
    return base;
  }

  SynP number(const Token& t, bool negative) {
    std::string text = negative ? "-" + t.text : t.text;
    if (t.kind == Tok::Int) return syn_lit(Val::integer(BigInt(text)));
    double r = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), r);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(r))
      error("real literal out of range: " + text, t);
    return syn_lit(Val::real(r));
  }

  SynP parenthesized() {
    expect("(");
    SynP e = expr();
    expect(")");
    return e;
  }

  SynP atom() {
    const Token t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::Real) return number(next(), false);
    if (is_sym("(")) {
      next();
      SynP a = expr();
      if (is_sym(",")) {
        next();
        SynP b = expr();
        expect(")");
        return syn_pair(a, b, true);
      }
      expect(")");
      return a;
    }
    if (t.kind != Tok::Id) error("expected expression, found " + describe(t), t);
    const std::string& w = t.text;
    if (w == "true" || w == "false") return next(), syn_lit(Val::boolean(w == "true"));
    if (w == "unit") return next(), syn_lit(Val::unit());
    if (w == "let" || w == "if" || w == "fail") return expr();
    if (w == "pi") {
      next();
      SynP arg = is_sym("(") ? parenthesized() : syn_lit(Val::unit());
      return syn_op(Operator(OpKind::Pi), arg, t.line, t.col);
    }
    if (w == "random") {
      next();
      const Token dt = peek();
      auto d = dt.kind == Tok::Id ? dist_from_surface_name(dt.text) : std::nullopt;
      if (!d) error("unknown distribution " + describe(dt), dt);
      next();
      Syn s;
      s.k = Syn::K::Random;
      s.dist = *d;
      s.kids = {parenthesized()};
      s.line = t.line;
      s.col = t.col;
      return make(std::move(s));
    }
    if (w == "integral") {
      next();
      expect("(");
      std::string name = ident();
      expect(":");
      PdfType ty = type();
      expect(")");
      expect("{");
      SynP body = expr();
      expect("}");
      Syn s;
      s.k = Syn::K::Integral;
      s.name = name;
      s.type = ty;
      s.kids = {body};
      s.line = t.line;
      s.col = t.col;
      return make(std::move(s));
    }
    if (w == "real" || w == "int") {
      next();
      return syn_op(Operator::cast(w == "real" ? PdfType::real() : PdfType::integer()), parenthesized(), t.line,
                    t.col);
    }
    if (auto it = kFunctions.find(w); it != kFunctions.end()) {
      next();
      return syn_op(Operator(it->second), parenthesized(), t.line, t.col);
    }
    std::string name = ident();
    Syn s;
    s.k = Syn::K::Name;
    s.name = name;
    s.line = t.line;
    s.col = t.col;
    return make(std::move(s));
  }
};

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

// `_n` outside every binder of that name is free variable n.
std::optional<std::size_t> free_index(const std::string& name) {
  if (name.size() < 2 || name[0] != '_') return std::nullopt;
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), n);
  if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
  return n;
}

class Scope {
 public:
  std::size_t lookup(const Syn& s) const {
    for (std::size_t i = names_.size(); i > 0; --i)
      if (names_[i - 1] == s.name) return names_.size() - i;
    if (auto n = free_index(s.name)) return names_.size() + *n;
    throw ParseError("unbound variable '" + s.name + "'", s.line, s.col);
  }
  void push(std::string n) { names_.push_back(std::move(n)); }
  void pop() { names_.pop_back(); }

 private:
  std::vector<std::string> names_;
};

Expr lower_expr(const Syn& s, Scope& scope) {
  switch (s.k) {
    case Syn::K::Name: return Expr::var(scope.lookup(s));
    case Syn::K::Lit: return Expr::val(s.lit);
    case Syn::K::Let: {
      Expr bound = lower_expr(*s.kids[0], scope);
      scope.push(s.name);
      Expr body = lower_expr(*s.kids[1], scope);
      scope.pop();
      return Expr::let_in(bound, body);
    }
    case Syn::K::If:
      return Expr::if_then_else(lower_expr(*s.kids[0], scope), lower_expr(*s.kids[1], scope),
                                lower_expr(*s.kids[2], scope));
    case Syn::K::Random: return Expr::random(s.dist, lower_expr(*s.kids[0], scope));
    case Syn::K::Fail: return Expr::fail(s.type);
    case Syn::K::Integral: throw ParseError("integral is only allowed in densities", s.line, s.col);
    case Syn::K::Op: return Expr::op(s.op, lower_expr(*s.kids[0], scope));
    case Syn::K::Pair: {
      Expr a = lower_expr(*s.kids[0], scope);
      Expr b = lower_expr(*s.kids[1], scope);
      if (s.explicit_pair && a.kind() == ExprKind::Val && b.kind() == ExprKind::Val)
        return Expr::val(Val::pair(a.value(), b.value()));
      return Expr::pair(a, b);
    }
  }
  throw ParseError("unsupported construct", s.line, s.col);
}

CExpr lower_cexpr(const Syn& s, Scope& scope) {
  switch (s.k) {
    case Syn::K::Name: return CExpr::var(scope.lookup(s));
    case Syn::K::Lit: return CExpr::val(s.lit);
    case Syn::K::If:
      return CExpr::if_then_else(lower_cexpr(*s.kids[0], scope), lower_cexpr(*s.kids[1], scope),
                                 lower_cexpr(*s.kids[2], scope));
    case Syn::K::Integral: {
      scope.push(s.name);
      CExpr body = lower_cexpr(*s.kids[0], scope);
      scope.pop();
      return CExpr::integral(body, s.type);
    }
    case Syn::K::Op: return CExpr::op(s.op, lower_cexpr(*s.kids[0], scope));
    case Syn::K::Pair: {
      CExpr a = lower_cexpr(*s.kids[0], scope);
      CExpr b = lower_cexpr(*s.kids[1], scope);
      if (s.explicit_pair && a.kind() == CExprKind::Val && b.kind() == CExprKind::Val)
        return CExpr::val(Val::pair(a.value(), b.value()));
      return CExpr::pair(a, b);
    }
    case Syn::K::Let:
    case Syn::K::Random:
    case Syn::K::Fail: throw ParseError("let, random and fail are not allowed in densities", s.line, s.col);
  }
  throw ParseError("unsupported construct", s.line, s.col);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string binder_name(std::size_t depth) {
  static const char* names[] = {"x", "y", "z", "u", "v", "w"};
  if (depth < 6) return names[depth];
  return "x" + std::to_string(depth);
}

std::string integral_name(std::size_t depth, const std::string& avoid) {
  static const char* names[] = {"y", "z", "u", "v", "w"};
  std::string n = depth < 5 ? names[depth] : "y" + std::to_string(depth);
  if (n == avoid) n += "'";
  return n;
}

std::string free_name(std::size_t i) { return "_" + std::to_string(i); }

SynP to_syn(const Expr& e, std::vector<std::string>& names) {
  switch (e.kind()) {
    case ExprKind::Var:
      if (e.index() < names.size()) return syn_name(names[names.size() - 1 - e.index()]);
      return syn_name(free_name(e.index() - names.size()));
    case ExprKind::Val: return syn_lit(e.value());
    case ExprKind::Let: {
      Syn s;
      s.k = Syn::K::Let;
      s.name = binder_name(names.size());
      SynP bound = to_syn(e.bound(), names);
      names.push_back(s.name);
      SynP body = to_syn(e.body(), names);
      names.pop_back();
      s.kids = {bound, body};
      return make(std::move(s));
    }
    case ExprKind::Op: return syn_op(e.oper(), to_syn(e.arg(), names));
    case ExprKind::Pair: return syn_pair(to_syn(e.fst(), names), to_syn(e.snd(), names), true);
    case ExprKind::Random: {
      Syn s;
      s.k = Syn::K::Random;
      s.dist = e.dist();
      s.kids = {to_syn(e.param(), names)};
      return make(std::move(s));
    }
    case ExprKind::If: {
      Syn s;
      s.k = Syn::K::If;
      s.kids = {to_syn(e.cond(), names), to_syn(e.then_branch(), names), to_syn(e.else_branch(), names)};
      return make(std::move(s));
    }
    case ExprKind::Fail: {
      Syn s;
      s.k = Syn::K::Fail;
      s.type = e.fail_type();
      return make(std::move(s));
    }
  }
  return syn_lit(Val::unit());
}

SynP to_syn(const CExpr& e, std::vector<std::string>& names, const std::string& arg) {
  switch (e.kind()) {
    case CExprKind::Var:
      if (e.index() < names.size()) return syn_name(names[names.size() - 1 - e.index()]);
      return syn_name(free_name(e.index() - names.size()));
    case CExprKind::Val: return syn_lit(e.value());
    case CExprKind::Op: return syn_op(e.oper(), to_syn(e.arg(), names, arg));
    case CExprKind::Pair: return syn_pair(to_syn(e.fst(), names, arg), to_syn(e.snd(), names, arg), true);
    case CExprKind::If: {
      Syn s;
      s.k = Syn::K::If;
      s.kids = {to_syn(e.cond(), names, arg), to_syn(e.then_branch(), names, arg),
                to_syn(e.else_branch(), names, arg)};
      return make(std::move(s));
    }
    case CExprKind::Int: {
      Syn s;
      s.k = Syn::K::Integral;
      s.name = integral_name(names.size() - 1, arg);
      s.type = e.over();
      names.push_back(s.name);
      s.kids = {to_syn(e.body(), names, arg)};
      names.pop_back();
      return make(std::move(s));
    }
  }
  return syn_lit(Val::unit());
}

std::string type_text(const PdfType& t) { return t.to_string(); }

constexpr int kTop = 0;
constexpr int kOr = 1;
constexpr int kAnd = 2;
constexpr int kCmp = 3;
constexpr int kArith = 4;
constexpr int kTerm = 5;
constexpr int kFactor = 6;
constexpr int kAtom = 7;

bool is_infix_pair(const Syn& s) { return s.kids[0]->k == Syn::K::Pair; }

bool negative_literal(const Val& v) {
  if (v.kind() == TypeKind::Int) return v.as_int() < 0;
  if (v.kind() == TypeKind::Real) return std::signbit(v.as_real());
  return false;
}

bool numeric_literal(const Syn& s) {
  return s.k == Syn::K::Lit && (s.lit.kind() == TypeKind::Int || s.lit.kind() == TypeKind::Real);
}

bool is_unary_op(const Syn& s, OpKind k) { return s.k == Syn::K::Op && s.op.kind() == k; }

int level(const Syn& s) {
  switch (s.k) {
    case Syn::K::Let:
    case Syn::K::If:
    case Syn::K::Fail: return kTop;
    case Syn::K::Lit: return negative_literal(s.lit) ? kFactor : kAtom;
    case Syn::K::Op: {
      if (!is_infix_pair(s)) {
        if (s.op.kind() == OpKind::Minus || s.op.kind() == OpKind::Not) return kFactor;
        return kAtom;
      }
      switch (s.op.kind()) {
        case OpKind::Or: return kOr;
        case OpKind::And: return kAnd;
        case OpKind::Less:
        case OpKind::Equals: return kCmp;
        case OpKind::Add: return kArith;
        case OpKind::Mult: return kTerm;
        case OpKind::Pow:
        case OpKind::Minus:
        case OpKind::Not: return kFactor;
        default: return kAtom;
      }
    }
    default: return kAtom;
  }
}

std::string fn_name(const Operator& op) {
  switch (op.kind()) {
    case OpKind::Fst: return "fst";
    case OpKind::Snd: return "snd";
    case OpKind::Add: return "add";
    case OpKind::Mult: return "mult";
    case OpKind::Minus: return "minus";
    case OpKind::Less: return "less";
    case OpKind::Equals: return "equals";
    case OpKind::And: return "and";
    case OpKind::Or: return "or";
    case OpKind::Not: return "not";
    case OpKind::Pow: return "pow";
    case OpKind::Fact: return "fact";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::Exp: return "exp";
    case OpKind::Ln: return "ln";
    case OpKind::Inverse: return "inverse";
    case OpKind::Pi: return "pi";
    case OpKind::Cast: return op.cast_target().kind() == TypeKind::Real ? "real" : "int";
  }
  return "?";
}

std::string print(const Syn& s, int min_level);

std::string print_infix(const Syn& s) {
  const Syn& a = *s.kids[0]->kids[0];
  const Syn& b = *s.kids[0]->kids[1];
  switch (s.op.kind()) {
    case OpKind::Or: return print(a, kOr) + " || " + print(b, kAnd);
    case OpKind::And: return print(a, kAnd) + " && " + print(b, kCmp);
    case OpKind::Less: return print(a, kArith) + " < " + print(b, kArith);
    case OpKind::Equals: return print(a, kArith) + " = " + print(b, kArith);
    case OpKind::Add:
      if (is_unary_op(b, OpKind::Minus)) return print(a, kArith) + " - " + print(*b.kids[0], kTerm);
      return print(a, kArith) + " + " + print(b, kTerm);
    case OpKind::Mult:
      if (is_unary_op(b, OpKind::Inverse)) return print(a, kTerm) + " / " + print(*b.kids[0], kFactor);
      return print(a, kTerm) + " * " + print(b, kFactor);
    case OpKind::Pow: return print(a, kAtom) + " ^ " + print(b, kAtom);
    default: return fn_name(s.op) + "(" + print(*s.kids[0], kTop) + ")";
  }
}

// Operand of a prefix operator: a power or an atom.
std::string print_prefix_operand(const Syn& s) {
  if (numeric_literal(s)) return "(" + print(s, kTop) + ")";
  if (is_unary_op(s, OpKind::Pow) && is_infix_pair(s)) return print(s, kFactor);
  return print(s, kAtom);
}

std::string print_body(const Syn& s) {
  switch (s.k) {
    case Syn::K::Name: return s.name;
    case Syn::K::Lit: return s.lit.to_string();
    case Syn::K::Let:
      return "let " + s.name + " = " + print(*s.kids[0], kTop) + " in " + print(*s.kids[1], kTop);
    case Syn::K::If:
      return "if " + print(*s.kids[0], kTop) + " then " + print(*s.kids[1], kTop) + " else " +
             print(*s.kids[2], kTop);
    case Syn::K::Random: return "random " + dist_surface_name(s.dist) + "(" + print(*s.kids[0], kTop) + ")";
    case Syn::K::Fail: return "fail : " + type_text(s.type);
    case Syn::K::Integral:
      return "integral(" + s.name + " : " + type_text(s.type) + ") { " + print(*s.kids[0], kTop) + " }";
    case Syn::K::Pair: return "(" + print(*s.kids[0], kTop) + ", " + print(*s.kids[1], kTop) + ")";
    case Syn::K::Op: {
      if (s.op.kind() == OpKind::Pi && s.kids[0]->k == Syn::K::Lit && s.kids[0]->lit.kind() == TypeKind::Unit)
        return "pi";
      if (is_infix_pair(s)) {
        switch (s.op.kind()) {
          case OpKind::Or:
          case OpKind::And:
          case OpKind::Less:
          case OpKind::Equals:
          case OpKind::Add:
          case OpKind::Mult:
          case OpKind::Pow: return print_infix(s);
          default: break;
        }
      }
      if (s.op.kind() == OpKind::Minus) return "-" + print_prefix_operand(*s.kids[0]);
      if (s.op.kind() == OpKind::Not) return "!" + print_prefix_operand(*s.kids[0]);
      return fn_name(s.op) + "(" + print(*s.kids[0], kTop) + ")";
    }
  }
  return "?";
}

std::string print(const Syn& s, int min_level) {
  std::string body = print_body(s);
  return level(s) < min_level ? "(" + body + ")" : body;
}

}  // namespace

Expr parse_program(const std::string& text) {
  Parser p(text);
  SynP s = p.program();
  Scope scope;
  return lower_expr(*s, scope);
}

std::string pretty_expr(const Expr& e) {
  std::vector<std::string> names;
  return print(*to_syn(e, names), kTop);
}

DensityText parse_density(const std::string& text) {
  Parser p(text);
  auto [name, type, body] = p.density();
  Scope scope;
  scope.push(name);
  return {name, type, lower_cexpr(*body, scope)};
}

std::string pretty_density(const CExpr& f, const std::string& arg_name) {
  std::vector<std::string> names{arg_name};
  return print(*to_syn(f, names, arg_name), kTop);
}

std::string format_density(const CExpr& f, const PdfType& t, const std::string& arg_name) {
  return "fun " + arg_name + " : " + t.to_string() + " => " + pretty_density(f, arg_name);
}

Expr inline_lets(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Var:
    case ExprKind::Val:
    case ExprKind::Fail: return e;
    case ExprKind::Let: {
      Expr bound = inline_lets(e.bound());
      Expr body = inline_lets(e.body());
      if (is_deterministic(bound)) return expr_subst0(body, bound);
      return Expr::let_in(bound, body);
    }
    case ExprKind::Op: return Expr::op(e.oper(), inline_lets(e.arg()));
    case ExprKind::Pair: return Expr::pair(inline_lets(e.fst()), inline_lets(e.snd()));
    case ExprKind::Random: return Expr::random(e.dist(), inline_lets(e.param()));
    case ExprKind::If:
      return Expr::if_then_else(inline_lets(e.cond()), inline_lets(e.then_branch()), inline_lets(e.else_branch()));
  }
  return e;
}

}  // namespace densc
