#ifndef DENSC_JSON_HPP
#define DENSC_JSON_HPP

#include <json.hpp>

#include "densc/expr.hpp"

namespace densc {

using Json = nlohmann::json;

// Tagged encodings. Integers are decimal strings (they are unbounded);
// non-finite reals are the strings "inf", "-inf" and "nan".
// Decoders throw Error on malformed input.
Json val_to_json(const Val& v);
Val val_from_json(const Json& j);

// "unit" | "bool" | "int" | "real" | {"prod": [t1, t2]}
Json type_to_json(const PdfType& t);
PdfType type_from_json(const Json& j);

// {"node": "Let", "bound": ..., "body": ...} and so on; operators by name,
// casts carry a "target" type.
Json expr_to_json(const Expr& e);
Expr expr_from_json(const Json& j);

Json cexpr_to_json(const CExpr& e);
CExpr cexpr_from_json(const Json& j);

}  // namespace densc

#endif  // DENSC_JSON_HPP
