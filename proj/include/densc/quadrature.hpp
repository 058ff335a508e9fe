#ifndef DENSC_QUADRATURE_HPP
#define DENSC_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "densc/types.hpp"

namespace densc {

struct QuadConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double initial_real_window = 1024.0;
  int max_window_doublings = 16;
  // Half-width of the first integer summation window.
  long long int_window = 16;
  // Bisection depth cap for a single panel.
  int max_depth = 48;
  // Cap on the number of live panels in one adaptive integration.
  int max_intervals = 4000;
  // Nested REAL integrations allowed during evaluation.
  int max_real_nesting = 3;
};

struct QuadResult {
  double value = 0.0;
  // False when window doubling did not settle; callers treat the integral
  // as divergent.
  bool converged = true;
  // False when the panel budget ran out before the error target was met.
  bool accurate = true;
};

using RealFn = std::function<double(double)>;
using ValFn = std::function<double(const Val&)>;

// A panel of the final adaptive partition with its integral.
struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

// Integral of f against the stock measure of t: counting measure for
// UNIT/BOOL/INT, Lebesgue measure for REAL, iterated for products (outer
// component first).
QuadResult integrate_stock(const ValFn& f, const PdfType& t, const QuadConfig& cfg);

// Lebesgue integral over the whole real line with window doubling.
// If `panels` is non-null it receives the final partition, sorted by a.
// Panels are split at `breakpoints`, where f may jump.
QuadResult integrate_real(const RealFn& f, const QuadConfig& cfg, std::vector<Panel>* panels = nullptr,
                          const std::vector<double>& breakpoints = {});

// Adaptive Gauss-Kronrod (7/15) on a finite interval.
QuadResult integrate_interval(const RealFn& f, double a, double b, const QuadConfig& cfg);

// Sum over the integers with symmetric window doubling.
QuadResult sum_integers(const std::function<double(const BigInt&)>& f, const QuadConfig& cfg);

}  // namespace densc

#endif  // DENSC_QUADRATURE_HPP
