#ifndef DENSC_SYNTAX_HPP
#define DENSC_SYNTAX_HPP

#include <string>

#include "densc/expr.hpp"

namespace densc {

// Surface syntax with named variables, lowered to de Bruijn indices. A name
// `_n` that no binder declares is free variable n.
// Throws ParseError (with line and column) on syntax and scope errors.
Expr parse_program(const std::string& text);

// Renders an expression in surface syntax; parse_program reads it back to the
// same term, except that a pair of two literals comes back as a pair literal.
// Free variables print as `_n`.
std::string pretty_expr(const Expr& e);

// A density in the `.dens` text format: `fun x : real => <expr>`, where the
// body may use `integral(y : type) { <expr> }`.
struct DensityText {
  std::string arg_name;
  PdfType arg_type;
  CExpr body;
};

DensityText parse_density(const std::string& text);

// Body only, with variable 0 shown as `arg_name`.
std::string pretty_density(const CExpr& f, const std::string& arg_name = "x");

// Full `.dens` line.
std::string format_density(const CExpr& f, const PdfType& t, const std::string& arg_name = "x");

// Expands every let whose bound expression is deterministic.
Expr inline_lets(const Expr& e);

}  // namespace densc

#endif  // DENSC_SYNTAX_HPP
