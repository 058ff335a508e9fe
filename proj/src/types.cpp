#include "densc/types.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>

#include "densc/error.hpp"

namespace densc {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

// ---------------------------------------------------------------------------
// PdfType
// ---------------------------------------------------------------------------

PdfType PdfType::prod(PdfType left, PdfType right) {
  PdfType t(TypeKind::Prod);
  t.parts_ = std::make_shared<const std::pair<PdfType, PdfType>>(std::move(left), std::move(right));
  return t;
}

const PdfType& PdfType::left() const {
  if (!is_prod()) throw TypeError("left() on non-product type " + to_string());
  return parts_->first;
}

const PdfType& PdfType::right() const {
  if (!is_prod()) throw TypeError("right() on non-product type " + to_string());
  return parts_->second;
}

bool operator==(const PdfType& a, const PdfType& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != TypeKind::Prod) return true;
  if (a.parts_ == b.parts_) return true;
  return a.parts_->first == b.parts_->first && a.parts_->second == b.parts_->second;
}

std::string PdfType::to_string() const {
  switch (kind_) {
    case TypeKind::Unit: return "unit";
    case TypeKind::Bool: return "bool";
    case TypeKind::Int: return "int";
    case TypeKind::Real: return "real";
    case TypeKind::Prod: {
      auto side = [](const PdfType& t) {
        return t.is_prod() ? "(" + t.to_string() + ")" : t.to_string();
      };
      return side(left()) + " * " + side(right());
    }
  }
  return "?";
}

std::size_t PdfType::hash() const {
  std::size_t h = static_cast<std::size_t>(kind_);
  if (is_prod()) h = hash_combine(hash_combine(h, left().hash()), right().hash());
  return h;
}

// ---------------------------------------------------------------------------
// Val
// ---------------------------------------------------------------------------

Val Val::finite_real(double r) {
  if (!std::isfinite(r)) throw EvalError("real literal must be finite");
  return real(r);
}

Val Val::pair(Val fst, Val snd) {
  return Val(Data(std::make_shared<const ValPair>(std::move(fst), std::move(snd))));
}

TypeKind Val::kind() const {
  static constexpr std::array<TypeKind, 5> kinds = {TypeKind::Unit, TypeKind::Bool, TypeKind::Int,
                                                    TypeKind::Real, TypeKind::Prod};
  return kinds[data_.index()];
}

bool Val::as_bool() const {
  if (auto* b = std::get_if<bool>(&data_)) return *b;
  throw EvalError("expected a boolean value, got " + to_string());
}

const BigInt& Val::as_int() const {
  if (auto* n = std::get_if<BigInt>(&data_)) return *n;
  throw EvalError("expected an integer value, got " + to_string());
}

double Val::as_real() const {
  if (auto* r = std::get_if<double>(&data_)) return *r;
  throw EvalError("expected a real value, got " + to_string());
}

const Val& Val::fst() const {
  if (auto* p = std::get_if<std::shared_ptr<const ValPair>>(&data_)) return (*p)->first;
  throw EvalError("expected a pair value, got " + to_string());
}

const Val& Val::snd() const {
  if (auto* p = std::get_if<std::shared_ptr<const ValPair>>(&data_)) return (*p)->second;
  throw EvalError("expected a pair value, got " + to_string());
}

bool operator==(const Val& a, const Val& b) {
  if (a.data_.index() != b.data_.index()) return false;
  switch (a.kind()) {
    case TypeKind::Unit: return true;
    case TypeKind::Bool: return a.as_bool() == b.as_bool();
    case TypeKind::Int: return a.as_int() == b.as_int();
    case TypeKind::Real: return a.as_real() == b.as_real();
    case TypeKind::Prod: return a.fst() == b.fst() && a.snd() == b.snd();
  }
  return false;
}

bool operator<(const Val& a, const Val& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() < b.data_.index();
  switch (a.kind()) {
    case TypeKind::Unit: return false;
    case TypeKind::Bool: return a.as_bool() < b.as_bool();
    case TypeKind::Int: return a.as_int() < b.as_int();
    case TypeKind::Real: return a.as_real() < b.as_real();
    case TypeKind::Prod:
      if (a.fst() != b.fst()) return a.fst() < b.fst();
      return a.snd() < b.snd();
  }
  return false;
}

namespace {

std::string format_real(double r) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), r);
  std::string s(buf.data(), ptr);
  if (std::isfinite(r) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string Val::to_string() const {
  switch (kind()) {
    case TypeKind::Unit: return "unit";
    case TypeKind::Bool: return as_bool() ? "true" : "false";
    case TypeKind::Int: return as_int().str();
    case TypeKind::Real: return format_real(as_real());
    case TypeKind::Prod: return "(" + fst().to_string() + ", " + snd().to_string() + ")";
  }
  return "?";
}

std::size_t Val::hash() const {
  std::size_t h = data_.index();
  switch (kind()) {
    case TypeKind::Unit: return h;
    case TypeKind::Bool: return hash_combine(h, as_bool());
    case TypeKind::Int: return hash_combine(h, std::hash<std::string>{}(as_int().str()));
    case TypeKind::Real: {
      double r = as_real();
      if (r == 0.0) r = 0.0;  // +0 and -0 compare equal
      return hash_combine(h, std::hash<double>{}(r));
    }
    case TypeKind::Prod: return hash_combine(hash_combine(h, fst().hash()), snd().hash());
  }
  return h;
}

// ---------------------------------------------------------------------------
// Operator / Dist
// ---------------------------------------------------------------------------

Operator::Operator(OpKind k) : kind_(k) {
  if (k == OpKind::Cast) throw TypeError("Cast requires a target type; use Operator::cast");
}

Operator Operator::cast(PdfType target) {
  if (target.kind() != TypeKind::Real && target.kind() != TypeKind::Int)
    throw TypeError("cast target must be real or int, got " + target.to_string());
  Operator op(OpKind::Fst);
  op.kind_ = OpKind::Cast;
  op.target_ = std::move(target);
  return op;
}

std::string Operator::name() const {
  switch (kind_) {
    case OpKind::Fst: return "Fst";
    case OpKind::Snd: return "Snd";
    case OpKind::Add: return "Add";
    case OpKind::Mult: return "Mult";
    case OpKind::Minus: return "Minus";
    case OpKind::Less: return "Less";
    case OpKind::Equals: return "Equals";
    case OpKind::And: return "And";
    case OpKind::Or: return "Or";
    case OpKind::Not: return "Not";
    case OpKind::Pow: return "Pow";
    case OpKind::Fact: return "Fact";
    case OpKind::Sqrt: return "Sqrt";
    case OpKind::Exp: return "Exp";
    case OpKind::Ln: return "Ln";
    case OpKind::Inverse: return "Inverse";
    case OpKind::Pi: return "Pi";
    case OpKind::Cast: return "Cast";
  }
  return "?";
}

PdfType dist_param_type(Dist d) {
  switch (d) {
    case Dist::Bernoulli: return PdfType::real();
    case Dist::UniformInt: return PdfType::prod(PdfType::integer(), PdfType::integer());
    case Dist::UniformReal:
    case Dist::Gaussian: return PdfType::prod(PdfType::real(), PdfType::real());
    case Dist::Poisson: return PdfType::real();
  }
  return PdfType::unit();
}

PdfType dist_result_type(Dist d) {
  switch (d) {
    case Dist::Bernoulli: return PdfType::boolean();
    case Dist::UniformInt:
    case Dist::Poisson: return PdfType::integer();
    case Dist::UniformReal:
    case Dist::Gaussian: return PdfType::real();
  }
  return PdfType::unit();
}

namespace {

struct DistNames {
  Dist dist;
  const char* name;
  const char* surface;
};

constexpr std::array<DistNames, 5> kDistNames = {{
    {Dist::Bernoulli, "Bernoulli", "bernoulli"},
    {Dist::UniformInt, "UniformInt", "uniform_int"},
    {Dist::UniformReal, "UniformReal", "uniform_real"},
    {Dist::Gaussian, "Gaussian", "gaussian"},
    {Dist::Poisson, "Poisson", "poisson"},
}};

}  // namespace

std::string dist_name(Dist d) {
  for (const auto& n : kDistNames)
    if (n.dist == d) return n.name;
  return "?";
}

std::string dist_surface_name(Dist d) {
  for (const auto& n : kDistNames)
    if (n.dist == d) return n.surface;
  return "?";
}

std::optional<Dist> dist_from_surface_name(const std::string& name) {
  for (const auto& n : kDistNames)
    if (name == n.surface) return n.dist;
  return std::nullopt;
}

std::optional<Dist> dist_from_name(const std::string& name) {
  for (const auto& n : kDistNames)
    if (name == n.name) return n.dist;
  return std::nullopt;
}

}  // namespace densc
