#ifndef DENSC_TYPING_HPP
#define DENSC_TYPING_HPP

#include <vector>

#include "densc/expr.hpp"

namespace densc {

// Total map from de Bruijn index to type; indices past the end map to UNIT.
class TypeEnv {
 public:
  TypeEnv() = default;
  explicit TypeEnv(std::vector<PdfType> types) : types_(std::move(types)) {}

  const PdfType& operator()(std::size_t i) const;
  // t . env: index 0 becomes t, everything else moves up by one.
  TypeEnv insert(PdfType t) const;
  std::size_t size() const { return types_.size(); }

 private:
  std::vector<PdfType> types_;
};

// Throws TypeError naming the rule and the path to the offending node.
PdfType typecheck_expr(const TypeEnv& env, const Expr& e);
PdfType typecheck_cexpr(const TypeEnv& env, const CExpr& ce);

}  // namespace densc

#endif  // DENSC_TYPING_HPP
