#ifndef DENSC_DEBRUIJN_HPP
#define DENSC_DEBRUIJN_HPP

#include <cstddef>
#include <functional>

#include "densc/expr.hpp"

namespace densc {

using VarMap = std::function<std::size_t(std::size_t)>;

// Applies h to every free variable of e. Under CInt the map is lifted:
// index 0 stays fixed and h is applied to n - 1, then shifted back up.
CExpr map_vars(const VarMap& h, const CExpr& e);

// map_vars successor.
CExpr ins_var0(const CExpr& e);
// map_vars (0 -> 0, n -> n + 1): makes room for a new variable at index 1
// while keeping the function argument at 0.
CExpr ins_var1(const CExpr& f);
// map_vars predecessor. Throws CompileError if variable 0 is free.
CExpr del_var0(const CExpr& e);
// map_vars (0 -> 0, n -> n - 1). Throws CompileError if variable 1 is free.
CExpr del_var1(const CExpr& e);

// Replaces free CVar x in `target` by `replacement`. No indices are
// decremented; `replacement` is shifted when it moves under a binder.
CExpr cexpr_subst(std::size_t x, const CExpr& replacement, const CExpr& target);

// Replaces CVar 0 by `replacement` and decrements every other free variable.
CExpr cexpr_subst0(const CExpr& e, const CExpr& replacement);

// cexpr_subst0 with a value: applies e, read as a function of variable 0, to v.
CExpr cexpr_subst_val(const CExpr& e, const Val& v);

// Composition: the result applied to a is f applied to (g applied to a).
CExpr cexpr_comp(const CExpr& f, const CExpr& g);

// Source-language counterparts, used by let inlining.
Expr shift_expr(const Expr& e, std::size_t amount, std::size_t cutoff = 0);
// Replaces Var 0 by `replacement` and decrements every other free variable.
Expr expr_subst0(const Expr& e, const Expr& replacement);

}  // namespace densc

#endif  // DENSC_DEBRUIJN_HPP
