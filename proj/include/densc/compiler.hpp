#ifndef DENSC_COMPILER_HPP
#define DENSC_COMPILER_HPP

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "densc/error.hpp"
#include "densc/expr.hpp"
#include "densc/typing.hpp"

namespace densc {

// Compilation state: random variables vs, parameter variables params, their
// types, and the joint density delta over vs and params (a REAL target
// expression whose variables are context indices).
struct DensityCtxt {
  std::vector<std::size_t> vs;
  std::vector<std::size_t> params;
  TypeEnv env;
  CExpr delta = CExpr::val(Val::real(1.0));
};

// Raised by compile_program when the stream is empty; carries the smallest
// subterm for which no rule produced a density.
class NoRuleError : public CompileError {
 public:
  NoRuleError(const std::string& msg, Expr subterm) : CompileError(msg), subterm_(std::move(subterm)) {}
  const Expr& subterm() const { return subterm_; }

 private:
  Expr subterm_;
};

// Receives each compiled density; return false to stop the stream.
using DensitySink = std::function<bool(const CExpr&)>;

// Runs the compilation rules on e and feeds every derivable density, in rule
// order and without syntactic duplicates, to `sink`. Densities are functions
// of variable 0; context variable x appears as x + 1.
// Returns false if the sink stopped the stream.
bool compile(const DensityCtxt& ctxt, const Expr& e, const DensitySink& sink);

std::vector<CExpr> compile_all(const DensityCtxt& ctxt, const Expr& e,
                               std::size_t limit = std::numeric_limits<std::size_t>::max());

struct CompiledProgram {
  PdfType type;
  CExpr density;
};

// Closed, well-typed program to its first density. Throws CompileError
// ("not closed"), TypeError ("ill-typed") or NoRuleError.
CompiledProgram compile_program(const Expr& e);

// Every density of a closed program, up to `limit`.
std::vector<CExpr> compile_program_all(const Expr& e,
                                       std::size_t limit = std::numeric_limits<std::size_t>::max());

// Structural translation of a deterministic expression; lets are expanded by
// substitution. Throws CompileError on Random or Fail.
CExpr expr_rf_to_cexpr(const Expr& e);

CExpr integrate_var(const TypeEnv& env, std::size_t x, const CExpr& e);
// The first listed variable becomes the outermost integral.
CExpr integrate_vars(const TypeEnv& env, const std::vector<std::size_t>& xs, const CExpr& e);
CExpr branch_prob_cexpr(const DensityCtxt& ctxt);
// Throws CompileError if x is not in vs.
CExpr marg_dens_cexpr(const TypeEnv& env, const std::vector<std::size_t>& vs, std::size_t x, const CExpr& delta);
// Density of the pair (x, y); throws CompileError if x == y or either is not in vs.
CExpr marg_dens2_cexpr(const TypeEnv& env, const std::vector<std::size_t>& vs, std::size_t x, std::size_t y,
                       const CExpr& delta);

// Density of `d` with parameter ep at point ex; 0 for invalid parameters.
CExpr dist_dens_cexpr(Dist d, const CExpr& ep, const CExpr& ex);

}  // namespace densc

#endif  // DENSC_COMPILER_HPP
