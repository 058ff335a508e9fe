#ifndef DENSC_SIMPLIFY_HPP
#define DENSC_SIMPLIFY_HPP

#include "densc/expr.hpp"

namespace densc {

// Rewrites a target expression to a fixpoint of constant folding, projection
// of pairs, constant conditionals, the identities x*1, x*0, x+0, merging of
// repeated guards, and exact expansion of integrals over UNIT, BOOL and
// their products. Keeps the type and the value at every state.
//
// x*0 fires only when the other factor has no operator that can produce a
// non-finite value from finite inputs (overflow in + and * aside). An expanded
// integral is clamped at 0 unless its body is provably non-negative.
CExpr simplify(const CExpr& ce);

// Source pre-pass: swaps the operands of + and * when the left one is
// deterministic and the right one is not, so the constant-operand rules apply.
Expr commute_constants(const Expr& e);

}  // namespace densc

#endif  // DENSC_SIMPLIFY_HPP
