#ifndef DENSC_TYPES_HPP
#define DENSC_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace densc {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind : std::uint8_t { Unit, Bool, Int, Real, Prod };

// Type shared by the source and target language. Immutable; product
// components are shared between copies.
class PdfType {
 public:
  PdfType() : kind_(TypeKind::Unit) {}

  static PdfType unit() { return PdfType(TypeKind::Unit); }
  static PdfType boolean() { return PdfType(TypeKind::Bool); }
  static PdfType integer() { return PdfType(TypeKind::Int); }
  static PdfType real() { return PdfType(TypeKind::Real); }
  static PdfType prod(PdfType left, PdfType right);

  TypeKind kind() const { return kind_; }
  bool is_prod() const { return kind_ == TypeKind::Prod; }
  // Precondition: is_prod().
  const PdfType& left() const;
  const PdfType& right() const;

  friend bool operator==(const PdfType& a, const PdfType& b);
  friend bool operator!=(const PdfType& a, const PdfType& b) { return !(a == b); }

  std::string to_string() const;
  std::size_t hash() const;

 private:
  explicit PdfType(TypeKind k) : kind_(k) {}

  TypeKind kind_;
  std::shared_ptr<const std::pair<PdfType, PdfType>> parts_;
};

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

class Val;
using ValPair = std::pair<Val, Val>;

// Runtime value. Reals are doubles; integers are arbitrary precision.
class Val {
 public:
  Val() : data_(UnitTag{}) {}

  static Val unit() { return Val(); }
  static Val boolean(bool b) { return Val(Data(b)); }
  static Val integer(BigInt n) { return Val(Data(std::move(n))); }
  static Val integer(long long n) { return Val(Data(BigInt(n))); }
  static Val real(double r) { return Val(Data(r)); }
  // Like real() but rejects NaN and infinities; used for user-supplied
  // literals where the value must stay finite.
  static Val finite_real(double r);
  static Val pair(Val fst, Val snd);

  TypeKind kind() const;

  bool as_bool() const;
  const BigInt& as_int() const;
  double as_real() const;
  const Val& fst() const;
  const Val& snd() const;

  friend bool operator==(const Val& a, const Val& b);
  friend bool operator!=(const Val& a, const Val& b) { return !(a == b); }
  // Total order: by kind first, then by payload. Used for map keys only;
  // it has nothing to do with the Less operator.
  friend bool operator<(const Val& a, const Val& b);

  std::string to_string() const;
  std::size_t hash() const;

 private:
  struct UnitTag {};
  using Data = std::variant<UnitTag, bool, BigInt, double, std::shared_ptr<const ValPair>>;
  explicit Val(Data d) : data_(std::move(d)) {}

  Data data_;
};

struct ValHash {
  std::size_t operator()(const Val& v) const { return v.hash(); }
};

// ---------------------------------------------------------------------------
// Operators and distributions
// ---------------------------------------------------------------------------

enum class OpKind : std::uint8_t {
  Fst, Snd, Add, Mult, Minus, Less, Equals, And, Or, Not,
  Pow, Fact, Sqrt, Exp, Ln, Inverse, Pi, Cast
};

class Operator {
 public:
  // Precondition: k != OpKind::Cast (use cast()).
  explicit Operator(OpKind k);
  // Only REAL and INT are valid cast targets.
  static Operator cast(PdfType target);

  OpKind kind() const { return kind_; }
  // Meaningful only for casts.
  const PdfType& cast_target() const { return target_; }

  friend bool operator==(const Operator& a, const Operator& b) {
    return a.kind_ == b.kind_ && (a.kind_ != OpKind::Cast || a.target_ == b.target_);
  }
  friend bool operator!=(const Operator& a, const Operator& b) { return !(a == b); }

  std::string name() const;

 private:
  OpKind kind_;
  PdfType target_;
};

enum class Dist : std::uint8_t { Bernoulli, UniformInt, UniformReal, Gaussian, Poisson };

PdfType dist_param_type(Dist d);
PdfType dist_result_type(Dist d);
std::string dist_name(Dist d);                     // e.g. "Gaussian"
std::string dist_surface_name(Dist d);             // e.g. "gaussian"
std::optional<Dist> dist_from_surface_name(const std::string& name);
std::optional<Dist> dist_from_name(const std::string& name);

}  // namespace densc

#endif  // DENSC_TYPES_HPP
