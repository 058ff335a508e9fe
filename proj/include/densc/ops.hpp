#ifndef DENSC_OPS_HPP
#define DENSC_OPS_HPP

#include <cstdint>
#include <optional>

#include "densc/types.hpp"

namespace densc {

// Result type of `op` applied to an argument of type `t`, if defined.
std::optional<PdfType> op_type(const Operator& op, const PdfType& t);

// Total operator semantics. Out-of-domain arguments map to 0 (Inverse 0,
// Sqrt of a negative, Ln of a non-positive, Pow with zero base or negative
// exponent). Fact of a negative integer is 1.
// Throws TypeError if `op_type(op, val_type(v))` is undefined, and EvalError
// for integer results too large to represent (Pow/Fact with huge arguments).
Val op_sem(const Operator& op, const Val& v);

PdfType val_type(const Val& v);

bool countable_type(const PdfType& t);

// Number of values of a countable type; nullopt when infinite.
// Throws TypeError for uncountable types.
std::optional<std::uint64_t> universe_size(const PdfType& t);

// The k-th value of a countable type in the canonical enumeration, or
// nullopt past the end of a finite universe. INT is enumerated 0, 1, -1,
// 2, -2, ...; products are enumerated by diagonalisation.
std::optional<Val> universe_element(const PdfType& t, std::uint64_t k);

// Unbounded stream over `type_universe t`.
class UniverseStream {
 public:
  // Throws TypeError("not enumerable") for uncountable types.
  explicit UniverseStream(PdfType t);

  std::optional<Val> next();

 private:
  PdfType type_;
  std::uint64_t index_ = 0;
};

}  // namespace densc

#endif  // DENSC_OPS_HPP
