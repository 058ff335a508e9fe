#ifndef DENSC_TARGET_EVAL_HPP
#define DENSC_TARGET_EVAL_HPP

#include <cstddef>
#include <vector>

#include "densc/expr.hpp"
#include "densc/quadrature.hpp"
#include "densc/sampler.hpp"

namespace densc {

// Counters filled in by eval_cexpr. A divergent integral evaluates to 0;
// an inaccurate one keeps its value.
struct EvalDiagnostics {
  std::size_t divergent_integrals = 0;
  std::size_t inaccurate_integrals = 0;

  bool clean() const { return divergent_integrals == 0 && inaccurate_integrals == 0; }
};

// Evaluates a target expression. Inside CInt the integrand is clamped to
// max(0, .) and non-finite values count as 0. Throws EvalError when REAL
// integrals nest deeper than cfg.max_real_nesting or a variable is unbound.
Val eval_cexpr(const State& s, const CExpr& ce, const QuadConfig& cfg, EvalDiagnostics* diag = nullptr);

// Real payload of eval_cexpr; throws EvalError for non-REAL results.
double eval_real(const State& s, const CExpr& ce, const QuadConfig& cfg, EvalDiagnostics* diag = nullptr);

// Evaluates f, read as a function of variable 0, at x under state s.
double eval_density_at(const CExpr& f, const Val& x, const QuadConfig& cfg, const State& s = State(),
                       EvalDiagnostics* diag = nullptr);

// Integral of f (a function of variable 0 of type t) over the stock measure.
QuadResult integrate_density(const CExpr& f, const PdfType& t, const QuadConfig& cfg,
                             const State& s = State(), EvalDiagnostics* diag = nullptr);

// Candidate jump points of f, read as a function of REAL variable 0: roots
// of the comparisons in f whose two sides are affine in that variable.
std::vector<double> real_breakpoints(const CExpr& f, const QuadConfig& cfg, const State& s = State());

}  // namespace densc

#endif  // DENSC_TARGET_EVAL_HPP
