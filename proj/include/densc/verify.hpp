#ifndef DENSC_VERIFY_HPP
#define DENSC_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "densc/expr.hpp"
#include "densc/json.hpp"
#include "densc/quadrature.hpp"

namespace densc {

struct VerifyConfig {
  std::uint64_t n_samples = 100000;
  double alpha = 0.01;
  int bins = 64;  // low-index values always given a chi-square cell
  std::uint64_t seed = 1;
  QuadConfig quad;
  // Slack added to the binomial bound when comparing masses.
  double mass_tolerance = 1e-3;
};

// One goodness-of-fit test on the whole value or on one component of a pair.
struct TestResult {
  std::string test_name;  // "KS", "chi-square", "exact-point" or "none"
  std::string target;     // "value", "fst", "snd.fst", ...
  double statistic = 0.0;
  double threshold = 0.0;
  int dof = 0;            // chi-square only
  bool passed = true;
};

struct VerifyReport {
  double branch_prob_empirical = 0.0;
  double branch_prob_density = 0.0;
  double mass_bound = 0.0;
  bool mass_passed = true;
  // The test closest to (or furthest past) its threshold.
  std::string test_name = "none";
  double statistic = 0.0;
  double threshold = 0.0;
  std::vector<TestResult> tests;
  bool passed = false;
  std::vector<std::string> warnings;

  Json to_json() const;
  std::string to_text() const;
};

// Draws cfg.n_samples outcomes of e, checks the empirical non-Bottom mass
// against the integral of f, and compares the conditioned samples with
// f / integral. Throws Error on a bad configuration.
VerifyReport verify_program(const Expr& e, const CExpr& f, const PdfType& t, const VerifyConfig& cfg);

// Sup distance between the empirical CDF of `sorted` and `cdf`.
double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf);
// c(alpha) / sqrt(n) with c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_threshold(std::size_t n, double alpha);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
};

// One cell per key of `counts` plus a cell for the remaining probability.
// Cells with expected count below 5 are pooled. dof = cells - 1. A value
// observed where pmf is exactly 0 gives an infinite statistic.
ChiSquare chi_square_statistic(const std::map<Val, std::uint64_t>& counts,
                               const std::function<double(const Val&)>& pmf, std::uint64_t n);
// Upper alpha quantile of the chi-square distribution.
double chi_square_threshold(int dof, double alpha);

// Normalised CDF of a REAL density: panels of mass at most 1e-3 of the
// total, each integrated by 3-point Gauss-Legendre; inside a panel the
// quadratic through the three nodes is integrated exactly.
class TabulatedCdf {
 public:
  // The density may jump at `breakpoints`; panels never straddle them.
  TabulatedCdf(const std::function<double(double)>& density, const QuadConfig& cfg,
               const std::vector<double>& breakpoints = {});
  double operator()(double x) const;
  double total() const { return total_; }
  bool converged() const { return converged_; }
  // Smallest x with CDF(x) >= q.
  double quantile(double q) const;

 private:
  struct Seg {
    double a = 0.0, b = 0.0, c = 0.0;  // a + b s + c s^2, s = offset from the midpoint per unit width
  };
  std::vector<double> xs_;   // panel boundaries
  std::vector<double> cum_;  // cumulative mass at xs_
  std::vector<Seg> segs_;    // segs_[i] spans [xs_[i], xs_[i + 1]]
  double total_ = 0.0;
  bool converged_ = true;
};

// Density of the first (second) component of a pair-typed density.
CExpr fst_marginal(const CExpr& f, const PdfType& t);
CExpr snd_marginal(const CExpr& f, const PdfType& t);

// f times 1.2 on half of the support: below the sample median of the first
// REAL or INT component, on TRUE for BOOL, everywhere for UNIT.
CExpr mutate_density(const CExpr& f, const PdfType& t, const std::vector<Val>& samples);

}  // namespace densc

#endif  // DENSC_VERIFY_HPP
