#ifndef DENSC_SAMPLER_HPP
#define DENSC_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "densc/expr.hpp"

namespace densc {

// Total map from de Bruijn index to value. Reading an index past the end
// throws EvalError (the "undefined" sentinel).
class State {
 public:
  State() = default;
  explicit State(std::vector<Val> vals) : vals_(std::move(vals)) {}

  const Val& operator()(std::size_t i) const;
  // v . state
  State insert(Val v) const;
  std::size_t size() const { return vals_.size(); }

 private:
  std::vector<Val> vals_;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// nullopt is Bottom: the draw fell into the missing mass of a
// sub-probability measure (Fail or invalid distribution parameters).
using SampleOutcome = std::optional<Val>;

SampleOutcome sample_expr(const State& s, const Expr& e, Rng& rng);

// Value of a deterministic expression. Throws EvalError on Random or Fail.
Val expr_sem_rf(const State& s, const Expr& e);

// True iff `param` lies in the distribution's parameter domain.
bool dist_param_valid(Dist d, const Val& param);

SampleOutcome sample_dist(Dist d, const Val& param, Rng& rng);

// Density of the built-in distribution w.r.t. the stock measure of its
// result type; 0 for invalid parameters or points outside the support.
double dist_dens(Dist d, const Val& param, const Val& x);

}  // namespace densc

#endif  // DENSC_SAMPLER_HPP
