#ifndef DENSC_EXPR_HPP
#define DENSC_EXPR_HPP

#include <cstddef>
#include <memory>
#include <set>
#include <vector>

#include "densc/types.hpp"

namespace densc {

// ---------------------------------------------------------------------------
// Source language
// ---------------------------------------------------------------------------

enum class ExprKind : std::uint8_t { Var, Val, Let, Op, Pair, Random, If, Fail };

// Source-language expression. Variables are de Bruijn indices; LetIn binds
// index 0 inside its body. Immutable, cheap to copy.
class Expr {
 public:
  static Expr var(std::size_t index);
  static Expr val(Val v);
  static Expr let_in(Expr bound, Expr body);
  static Expr op(Operator op, Expr arg);
  static Expr pair(Expr fst, Expr snd);
  static Expr random(Dist dist, Expr param);
  static Expr if_then_else(Expr cond, Expr then_branch, Expr else_branch);
  static Expr fail(PdfType t);

  ExprKind kind() const;
  std::size_t index() const;             // Var
  const Val& value() const;              // Val
  const Operator& oper() const;          // Op
  Dist dist() const;                     // Random
  const PdfType& fail_type() const;      // Fail

  const Expr& bound() const;             // Let
  const Expr& body() const;              // Let
  const Expr& arg() const;               // Op
  const Expr& fst() const;               // Pair
  const Expr& snd() const;               // Pair
  const Expr& param() const;             // Random
  const Expr& cond() const;              // If
  const Expr& then_branch() const;       // If
  const Expr& else_branch() const;       // If

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  std::size_t size() const;  // node count
  std::size_t hash() const;
  // Debug rendering with raw de Bruijn indices.
  std::string to_string() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const Expr& child(std::size_t i) const;

  std::shared_ptr<const Node> node_;
};

std::set<std::size_t> free_vars(const Expr& e);

// True iff `e` contains neither Random nor Fail.
bool is_deterministic(const Expr& e);

// ---------------------------------------------------------------------------
// Target language
// ---------------------------------------------------------------------------

enum class CExprKind : std::uint8_t { Var, Val, Op, Pair, If, Int };

// Target-language expression. CInt(body, t) integrates `body` over the
// stock measure of `t`; inside `body` the integration variable is index 0.
class CExpr {
 public:
  static CExpr var(std::size_t index);
  static CExpr val(Val v);
  static CExpr op(Operator op, CExpr arg);
  static CExpr pair(CExpr fst, CExpr snd);
  static CExpr if_then_else(CExpr cond, CExpr then_branch, CExpr else_branch);
  static CExpr integral(CExpr body, PdfType over);

  CExprKind kind() const;
  std::size_t index() const;            // Var
  const Val& value() const;             // Val
  const Operator& oper() const;         // Op
  const PdfType& over() const;          // Int

  const CExpr& arg() const;             // Op
  const CExpr& fst() const;             // Pair
  const CExpr& snd() const;             // Pair
  const CExpr& cond() const;            // If
  const CExpr& then_branch() const;     // If
  const CExpr& else_branch() const;     // If
  const CExpr& body() const;            // Int

  friend bool operator==(const CExpr& a, const CExpr& b);
  friend bool operator!=(const CExpr& a, const CExpr& b) { return !(a == b); }

  std::size_t size() const;
  std::size_t hash() const;
  std::string to_string() const;

 private:
  struct Node;
  explicit CExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const CExpr& child(std::size_t i) const;

  std::shared_ptr<const Node> node_;
};

struct CExprHash {
  std::size_t operator()(const CExpr& e) const { return e.hash(); }
};

std::set<std::size_t> free_vars(const CExpr& e);

// Small builders for the target language, used throughout the compiler and
// the simplifier. Binary arithmetic works on both INT and REAL operands.
namespace cx {

CExpr real(double r);
CExpr integer(long long n);
CExpr boolean(bool b);
CExpr add(CExpr a, CExpr b);
CExpr sub(CExpr a, CExpr b);        // a + (-b)
CExpr mul(CExpr a, CExpr b);
CExpr div(CExpr a, CExpr b);        // a * inverse(b)
CExpr neg(CExpr a);
CExpr inverse(CExpr a);
CExpr less(CExpr a, CExpr b);
CExpr le(CExpr a, CExpr b);         // not (b < a)
CExpr eq(CExpr a, CExpr b);
CExpr land(CExpr a, CExpr b);
CExpr lnot(CExpr a);
CExpr fst(CExpr a);
CExpr snd(CExpr a);
CExpr unary(OpKind k, CExpr a);
CExpr pi();
CExpr pow(CExpr a, CExpr b);
CExpr cast_real(CExpr a);
CExpr indicator(CExpr cond);        // IF cond THEN 1 ELSE 0
CExpr ite(CExpr c, CExpr a, CExpr b);

}  // namespace cx

}  // namespace densc

#endif  // DENSC_EXPR_HPP
