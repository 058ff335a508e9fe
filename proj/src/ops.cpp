#include "densc/ops.hpp"

#include <cmath>
#include <numbers>

#include "densc/error.hpp"

namespace densc {

namespace {

// Integer results larger than this many bits are refused rather than
// allocated.
constexpr std::uint64_t kMaxIntBits = std::uint64_t{1} << 24;
constexpr long kMaxFactorial = 200000;

bool is_pair_of(const PdfType& t, TypeKind a, TypeKind b) {
  return t.is_prod() && t.left().kind() == a && t.right().kind() == b;
}

bool is_num_pair(const PdfType& t) {
  return is_pair_of(t, TypeKind::Int, TypeKind::Int) || is_pair_of(t, TypeKind::Real, TypeKind::Real);
}

bool is_num(const PdfType& t) { return t.kind() == TypeKind::Int || t.kind() == TypeKind::Real; }

BigInt int_pow(const BigInt& base, const BigInt& exponent) {
  if (base == 0 || exponent < 0) return BigInt(0);
  if (base == 1) return BigInt(1);
  if (base == -1) return (exponent % 2 == 0) ? BigInt(1) : BigInt(-1);
  auto bits = static_cast<std::uint64_t>(boost::multiprecision::msb(abs(base))) + 1;
  if (exponent > BigInt(kMaxIntBits / bits)) throw EvalError("Pow: integer result too large");
  return boost::multiprecision::pow(base, exponent.convert_to<unsigned>());
}

BigInt factorial(const BigInt& a) {
  if (a <= 1) return BigInt(1);
  if (a > kMaxFactorial) throw EvalError("Fact: argument too large");
  long n = a.convert_to<long>();
  BigInt r = 1;
  for (long i = 2; i <= n; ++i) r *= i;
  return r;
}

double to_double(const BigInt& n) { return n.convert_to<double>(); }

BigInt floor_to_int(double r) {
  if (!std::isfinite(r)) return BigInt(0);
  return BigInt(std::floor(r));
}

[[noreturn]] void bad_arg(const Operator& op, const Val& v) {
  throw TypeError("operator " + op.name() + " is not defined on " + val_type(v).to_string() +
                  " (argument " + v.to_string() + ")");
}

}  // namespace

std::optional<PdfType> op_type(const Operator& op, const PdfType& t) {
  switch (op.kind()) {
    case OpKind::Fst:
      if (t.is_prod()) return t.left();
      break;
    case OpKind::Snd:
      if (t.is_prod()) return t.right();
      break;
    case OpKind::Add:
    case OpKind::Mult:
      if (is_num_pair(t)) return t.left();
      break;
    case OpKind::Minus:
      if (is_num(t)) return t;
      break;
    case OpKind::Less:
      if (is_num_pair(t)) return PdfType::boolean();
      break;
    case OpKind::Equals:
      if (t.is_prod() && t.left() == t.right()) return PdfType::boolean();
      break;
    case OpKind::And:
    case OpKind::Or:
      if (is_pair_of(t, TypeKind::Bool, TypeKind::Bool)) return PdfType::boolean();
      break;
    case OpKind::Not:
      if (t.kind() == TypeKind::Bool) return PdfType::boolean();
      break;
    case OpKind::Pow:
      if (is_pair_of(t, TypeKind::Int, TypeKind::Int)) return PdfType::integer();
      if (is_pair_of(t, TypeKind::Real, TypeKind::Int)) return PdfType::real();
      break;
    case OpKind::Fact:
      if (t.kind() == TypeKind::Int) return PdfType::integer();
      break;
    case OpKind::Sqrt:
    case OpKind::Exp:
    case OpKind::Ln:
    case OpKind::Inverse:
      if (t.kind() == TypeKind::Real) return PdfType::real();
      break;
    case OpKind::Pi:
      if (t.kind() == TypeKind::Unit) return PdfType::real();
      break;
    case OpKind::Cast:
      if (op.cast_target().kind() == TypeKind::Real &&
          (t.kind() == TypeKind::Bool || t.kind() == TypeKind::Int))
        return PdfType::real();
      if (op.cast_target().kind() == TypeKind::Int &&
          (t.kind() == TypeKind::Bool || t.kind() == TypeKind::Real))
        return PdfType::integer();
      break;
  }
  return std::nullopt;
}

Val op_sem(const Operator& op, const Val& v) {
  const TypeKind k = v.kind();
  auto pair_kinds = [&](TypeKind a, TypeKind b) {
    return k == TypeKind::Prod && v.fst().kind() == a && v.snd().kind() == b;
  };
  const bool ints = pair_kinds(TypeKind::Int, TypeKind::Int);
  const bool reals = pair_kinds(TypeKind::Real, TypeKind::Real);

  switch (op.kind()) {
    case OpKind::Fst:
      if (k == TypeKind::Prod) return v.fst();
      break;
    case OpKind::Snd:
      if (k == TypeKind::Prod) return v.snd();
      break;
    case OpKind::Add:
      if (ints) return Val::integer(v.fst().as_int() + v.snd().as_int());
      if (reals) return Val::real(v.fst().as_real() + v.snd().as_real());
      break;
    case OpKind::Mult:
      if (ints) return Val::integer(v.fst().as_int() * v.snd().as_int());
      if (reals) return Val::real(v.fst().as_real() * v.snd().as_real());
      break;
    case OpKind::Minus:
      if (k == TypeKind::Int) return Val::integer(-v.as_int());
      if (k == TypeKind::Real) return Val::real(-v.as_real());
      break;
    case OpKind::Less:
      if (ints) return Val::boolean(v.fst().as_int() < v.snd().as_int());
      if (reals) return Val::boolean(v.fst().as_real() < v.snd().as_real());
      break;
    case OpKind::Equals:
      if (k == TypeKind::Prod && val_type(v.fst()) == val_type(v.snd()))
        return Val::boolean(v.fst() == v.snd());
      break;
    case OpKind::And:
      if (pair_kinds(TypeKind::Bool, TypeKind::Bool))
        return Val::boolean(v.fst().as_bool() && v.snd().as_bool());
      break;
    case OpKind::Or:
      if (pair_kinds(TypeKind::Bool, TypeKind::Bool))
        return Val::boolean(v.fst().as_bool() || v.snd().as_bool());
      break;
    case OpKind::Not:
      if (k == TypeKind::Bool) return Val::boolean(!v.as_bool());
      break;
    case OpKind::Pow:
      if (ints) return Val::integer(int_pow(v.fst().as_int(), v.snd().as_int()));
      if (pair_kinds(TypeKind::Real, TypeKind::Int)) {
        double a = v.fst().as_real();
        const BigInt& b = v.snd().as_int();
        if (a == 0.0 || b < 0) return Val::real(0.0);
        return Val::real(std::pow(a, to_double(b)));
      }
      break;
    case OpKind::Fact:
      if (k == TypeKind::Int) return Val::integer(factorial(v.as_int()));
      break;
    case OpKind::Sqrt:
      if (k == TypeKind::Real) {
        double a = v.as_real();
        return Val::real(a >= 0.0 ? std::sqrt(a) : 0.0);
      }
      break;
    case OpKind::Exp:
      if (k == TypeKind::Real) return Val::real(std::exp(v.as_real()));
      break;
    case OpKind::Ln:
      if (k == TypeKind::Real) {
        double a = v.as_real();
        return Val::real(a > 0.0 ? std::log(a) : 0.0);
      }
      break;
    case OpKind::Inverse:
      if (k == TypeKind::Real) {
        double a = v.as_real();
        return Val::real(a != 0.0 ? 1.0 / a : 0.0);
      }
      break;
    case OpKind::Pi:
      if (k == TypeKind::Unit) return Val::real(std::numbers::pi);
      break;
    case OpKind::Cast:
      if (op.cast_target().kind() == TypeKind::Real) {
        if (k == TypeKind::Bool) return Val::real(v.as_bool() ? 1.0 : 0.0);
        if (k == TypeKind::Int) return Val::real(to_double(v.as_int()));
      } else {
        if (k == TypeKind::Bool) return Val::integer(v.as_bool() ? 1 : 0);
        if (k == TypeKind::Real) return Val::integer(floor_to_int(v.as_real()));
      }
      break;
  }
  bad_arg(op, v);
}

PdfType val_type(const Val& v) {
  switch (v.kind()) {
    case TypeKind::Unit: return PdfType::unit();
    case TypeKind::Bool: return PdfType::boolean();
    case TypeKind::Int: return PdfType::integer();
    case TypeKind::Real: return PdfType::real();
    case TypeKind::Prod: return PdfType::prod(val_type(v.fst()), val_type(v.snd()));
  }
  return PdfType::unit();
}

bool countable_type(const PdfType& t) {
  switch (t.kind()) {
    case TypeKind::Unit:
    case TypeKind::Bool:
    case TypeKind::Int: return true;
    case TypeKind::Real: return false;
    case TypeKind::Prod: return countable_type(t.left()) && countable_type(t.right());
  }
  return false;
}

std::optional<std::uint64_t> universe_size(const PdfType& t) {
  switch (t.kind()) {
    case TypeKind::Unit: return 1;
    case TypeKind::Bool: return 2;
    case TypeKind::Int: return std::nullopt;
    case TypeKind::Real: throw TypeError("type real is not enumerable");
    case TypeKind::Prod: {
      auto a = universe_size(t.left());
      auto b = universe_size(t.right());
      if (a && b) return *a * *b;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

// Inverse of the Cantor pairing function.
std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k) {
  auto w = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0);
  while (w * (w + 1) / 2 > k) --w;
  while ((w + 1) * (w + 2) / 2 <= k) ++w;
  std::uint64_t j = k - w * (w + 1) / 2;
  return {w - j, j};
}

}  // namespace

std::optional<Val> universe_element(const PdfType& t, std::uint64_t k) {
  switch (t.kind()) {
    case TypeKind::Unit:
      if (k == 0) return Val::unit();
      return std::nullopt;
    case TypeKind::Bool:
      if (k < 2) return Val::boolean(k == 0);
      return std::nullopt;
    case TypeKind::Int: {
      if (k == 0) return Val::integer(0LL);
      BigInt half = BigInt((k + 1) / 2);
      return Val::integer(k % 2 == 1 ? half : BigInt(-half));
    }
    case TypeKind::Real: throw TypeError("type real is not enumerable");
    case TypeKind::Prod: {
      auto sa = universe_size(t.left());
      auto sb = universe_size(t.right());
      std::uint64_t i = 0;
      std::uint64_t j = 0;
      if (sa && sb) {
        if (k >= *sa * *sb) return std::nullopt;
        i = k / *sb;
        j = k % *sb;
      } else if (sa) {
        i = k % *sa;
        j = k / *sa;
      } else if (sb) {
        i = k / *sb;
        j = k % *sb;
      } else {
        std::tie(i, j) = cantor_unpair(k);
      }
      auto a = universe_element(t.left(), i);
      auto b = universe_element(t.right(), j);
      if (!a || !b) return std::nullopt;
      return Val::pair(std::move(*a), std::move(*b));
    }
  }
  return std::nullopt;
}

UniverseStream::UniverseStream(PdfType t) : type_(std::move(t)) {
  if (!countable_type(type_)) throw TypeError("type " + type_.to_string() + " is not enumerable");
}

std::optional<Val> UniverseStream::next() {
  auto v = universe_element(type_, index_);
  if (v) ++index_;
  return v;
}

}  // namespace densc
