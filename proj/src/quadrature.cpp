#include "densc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace densc {

namespace {

// Nodes in QUADPACK order, outermost first; the odd-indexed Kronrod nodes
// are the 7-point Gauss nodes.
struct Rule {
  std::array<double, 8> xgk;
  std::array<double, 8> wgk;
  std::array<double, 4> wg;

  Rule() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& x = gauss_kronrod<double, 15>::abscissa();
    const auto& w = gauss_kronrod<double, 15>::weights();
    const auto& g = gauss<double, 7>::weights();
    for (int i = 0; i < 8; ++i) {
      xgk[i] = x[7 - i];
      wgk[i] = w[7 - i];
    }
    for (int j = 0; j < 4; ++j) wg[j] = g[3 - j];
  }
};

const Rule kRule;
const std::array<double, 8>& kXgk = kRule.xgk;
const std::array<double, 8>& kWgk = kRule.wgk;
const std::array<double, 4>& kWg = kRule.wg;

double clean(double v) { return std::isfinite(v) ? v : 0.0; }

struct Piece {
  double a;
  double b;
  double value;
  double error;
  int depth;
};

Piece gk15(const RealFn& f, double a, double b, int depth) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double dhalf = std::fabs(half);

  const double fc = clean(f(center));
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};
  for (int j = 0; j < 3; ++j) {
    int jtw = 2 * j + 1;
    double dx = half * kXgk[jtw];
    double f1 = clean(f(center - dx));
    double f2 = clean(f(center + dx));
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::fabs(f1) + std::fabs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    int jtwm1 = 2 * j;
    double dx = half * kXgk[jtwm1];
    double f1 = clean(f(center - dx));
    double f2 = clean(f(center + dx));
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

  double result = resk * half;
  resabs *= dhalf;
  resasc *= dhalf;
  double abserr = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) abserr = std::max(eps * 50.0 * resabs, abserr);
  return {a, b, result, abserr, depth};
}

struct ByError {
  bool operator()(const Piece& x, const Piece& y) const { return x.error < y.error; }
};

struct Adaptive {
  double value = 0.0;
  double error = 0.0;
  bool accurate = true;
  std::vector<Piece> pieces;
};

// Global adaptive refinement starting from a fixed partition.
Adaptive adapt(const RealFn& f, const std::vector<std::pair<double, double>>& start,
               const QuadConfig& cfg, bool keep_pieces) {
  std::priority_queue<Piece, std::vector<Piece>, ByError> live;
  std::vector<Piece> frozen;
  double value = 0.0;
  double error = 0.0;
  for (auto [a, b] : start) {
    Piece p = gk15(f, a, b, 0);
    value += p.value;
    error += p.error;
    live.push(p);
  }
  bool accurate = true;
  for (;;) {
    if (error <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(value))) break;
    if (live.empty()) {
      accurate = false;
      break;
    }
    if (static_cast<int>(live.size() + frozen.size()) >= cfg.max_intervals) {
      accurate = false;
      break;
    }
    Piece p = live.top();
    live.pop();
    double mid = 0.5 * (p.a + p.b);
    if (p.depth >= cfg.max_depth || !(p.a < mid && mid < p.b)) {
      frozen.push_back(p);
      continue;
    }
    Piece l = gk15(f, p.a, mid, p.depth + 1);
    Piece r = gk15(f, mid, p.b, p.depth + 1);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    live.push(l);
    live.push(r);
  }

  Adaptive out;
  out.accurate = accurate;
  std::vector<Piece> all = std::move(frozen);
  while (!live.empty()) {
    all.push_back(live.top());
    live.pop();
  }
  std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  // Re-sum in positional order so the result does not depend on heap history.
  for (const auto& p : all) {
    out.value += p.value;
    out.error += p.error;
  }
  if (keep_pieces) out.pieces = std::move(all);
  return out;
}

// Splits every interval at the breakpoints strictly inside it.
std::vector<std::pair<double, double>> split(const std::vector<std::pair<double, double>>& parts,
                                             const std::vector<double>& cuts) {
  std::vector<std::pair<double, double>> out;
  for (auto [a, b] : parts) {
    double lo = std::min(a, b), hi = std::max(a, b);
    auto first = std::upper_bound(cuts.begin(), cuts.end(), lo);
    for (auto it = first; it != cuts.end() && *it < hi; ++it) {
      out.emplace_back(lo, *it);
      lo = *it;
    }
    out.emplace_back(lo, hi);
  }
  return out;
}

void append_panels(std::vector<Panel>* panels, const std::vector<Piece>& pieces) {
  if (!panels) return;
  for (const auto& p : pieces) panels->push_back({p.a, p.b, p.value, p.error});
}

}  // namespace

QuadResult integrate_interval(const RealFn& f, double a, double b, const QuadConfig& cfg) {
  if (a == b) return {0.0, true};
  Adaptive r = adapt(f, {{a, b}}, cfg, false);
  return {r.value, true, r.accurate};
}

QuadResult integrate_real(const RealFn& f, const QuadConfig& cfg, std::vector<Panel>* panels,
                          const std::vector<double>& breakpoints) {
  std::vector<double> cuts;
  for (double c : breakpoints)
    if (std::isfinite(c)) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double window = cfg.initial_real_window;
  std::vector<std::pair<double, double>> start;
  const double inner = std::min(16.0, window);
  for (double x = -inner; x < inner; x += 1.0) start.emplace_back(x, std::min(x + 1.0, inner));
  for (double x = inner; x < window; x *= 2.0) {
    double hi = std::min(2.0 * x, window);
    start.emplace_back(x, hi);
    start.emplace_back(-hi, -x);
  }
  if (panels) panels->clear();
  Adaptive core = adapt(f, split(start, cuts), cfg, panels != nullptr);
  append_panels(panels, core.pieces);
  double total = core.value;

  QuadResult out{total, false, core.accurate};
  double lo = window;
  for (int d = 0; d < cfg.max_window_doublings; ++d) {
    double hi = 2.0 * lo;
    if (!std::isfinite(hi)) break;
    Adaptive left = adapt(f, split({{-hi, -lo}}, cuts), cfg, panels != nullptr);
    Adaptive right = adapt(f, split({{lo, hi}}, cuts), cfg, panels != nullptr);
    append_panels(panels, left.pieces);
    append_panels(panels, right.pieces);
    out.accurate = out.accurate && left.accurate && right.accurate;
    double inc = left.value + right.value;
    total += inc;
    lo = hi;
    if (std::fabs(inc) < std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total))) {
      out.converged = true;
      break;
    }
  }
  out.value = total;
  if (panels)
    std::sort(panels->begin(), panels->end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  return out;
}

QuadResult sum_integers(const std::function<double(const BigInt&)>& f, const QuadConfig& cfg) {
  auto term = [&](long long k) { return clean(f(BigInt(k))); };
  long long w = std::max<long long>(1, cfg.int_window);
  double total = 0.0;
  for (long long k = -w; k <= w; ++k) total += term(k);
  int quiet = 0;
  for (int d = 0; d < cfg.max_window_doublings; ++d) {
    double inc = 0.0;
    for (long long k = w + 1; k <= 2 * w; ++k) inc += term(-k) + term(k);
    total += inc;
    w *= 2;
    quiet = std::fabs(inc) < cfg.abs_tol ? quiet + 1 : 0;
    if (quiet >= 2) return {total, true};
  }
  return {total, false};
}

QuadResult integrate_stock(const ValFn& f, const PdfType& t, const QuadConfig& cfg) {
  switch (t.kind()) {
    case TypeKind::Unit: return {clean(f(Val::unit())), true};
    case TypeKind::Bool: return {clean(f(Val::boolean(true))) + clean(f(Val::boolean(false))), true};
    case TypeKind::Int:
      return sum_integers([&](const BigInt& k) { return f(Val::integer(k)); }, cfg);
    case TypeKind::Real: return integrate_real([&](double x) { return f(Val::real(x)); }, cfg);
    case TypeKind::Prod: {
      bool inner_ok = true;
      bool inner_accurate = true;
      auto outer = [&](const Val& a) {
        QuadResult r = integrate_stock([&](const Val& b) { return f(Val::pair(a, b)); }, t.right(), cfg);
        inner_ok = inner_ok && r.converged;
        inner_accurate = inner_accurate && r.accurate;
        return r.value;
      };
      QuadResult r = integrate_stock(outer, t.left(), cfg);
      r.converged = r.converged && inner_ok;
      r.accurate = r.accurate && inner_accurate;
      return r;
    }
  }
  return {0.0, false};
}

}  // namespace densc
