#include "densc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "densc/debruijn.hpp"
#include "densc/error.hpp"
#include "densc/ops.hpp"
#include "densc/sampler.hpp"
#include "densc/target_eval.hpp"

namespace densc {

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

double ks_threshold(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

ChiSquare chi_square_statistic(const std::map<Val, std::uint64_t>& counts,
                               const std::function<double(const Val&)>& pmf, std::uint64_t n) {
  struct Cell {
    double expected;
    double observed;
  };
  const double total = static_cast<double>(n);
  std::vector<Cell> cells;
  double p_sum = 0.0;
  double o_sum = 0.0;
  bool impossible = false;
  for (const auto& [v, c] : counts) {
    const double p = std::max(0.0, pmf(v));
    impossible = impossible || (p == 0.0 && c > 0);
    p_sum += p;
    o_sum += static_cast<double>(c);
    cells.push_back({total * p, static_cast<double>(c)});
  }
  cells.push_back({total * std::max(0.0, 1.0 - p_sum), std::max(0.0, total - o_sum)});

  std::vector<Cell> kept;
  Cell pooled{0.0, 0.0};
  for (const Cell& c : cells) {
    if (c.expected >= 5.0) {
      kept.push_back(c);
    } else {
      pooled.expected += c.expected;
      pooled.observed += c.observed;
    }
  }
  if (pooled.expected >= 5.0 || kept.empty()) {
    kept.push_back(pooled);
  } else {
    auto smallest = std::min_element(kept.begin(), kept.end(),
                                     [](const Cell& a, const Cell& b) { return a.expected < b.expected; });
    smallest->expected += pooled.expected;
    smallest->observed += pooled.observed;
  }

  ChiSquare out;
  out.dof = static_cast<int>(kept.size()) - 1;
  if (impossible) {
    out.statistic = std::numeric_limits<double>::infinity();
    return out;
  }
  for (const Cell& c : kept) {
    if (c.expected <= 0.0) {
      if (c.observed > 0.0) out.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = c.observed - c.expected;
    out.statistic += d * d / c.expected;
  }
  return out;
}

double chi_square_threshold(int dof, double alpha) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

// ---------------------------------------------------------------------------
// Tabulated CDF
// ---------------------------------------------------------------------------

namespace {

double clamp_density(double v) { return std::isfinite(v) && v > 0.0 ? v : 0.0; }

// Offset of the outer 3-point Gauss-Legendre nodes from the midpoint, per
// unit width.
const double kGaussNode = 0.5 * std::sqrt(0.6);

}  // namespace

TabulatedCdf::TabulatedCdf(const std::function<double(double)>& density, const QuadConfig& cfg,
                           const std::vector<double>& breakpoints) {
  auto g = [&](double x) { return clamp_density(density(x)); };
  // The coarse pass only locates the mass; a tight tolerance would chase
  // the rounding noise of nested integrals.
  QuadConfig coarse_cfg = cfg;
  coarse_cfg.rel_tol = std::max(cfg.rel_tol, 1e-4);
  coarse_cfg.max_intervals = std::min(cfg.max_intervals, 400);
  std::vector<Panel> panels;
  QuadResult r = integrate_real(g, coarse_cfg, &panels, breakpoints);
  converged_ = r.converged;
  double coarse = 0.0;
  for (const Panel& p : panels) coarse += std::max(0.0, p.value);
  if (!(coarse > 0.0)) return;
  const double limit = 1e-3 * coarse;

  double acc = 0.0;
  for (const Panel& p : panels) {
    if (xs_.empty() || xs_.back() != p.a) {
      if (!xs_.empty()) segs_.push_back({});
      xs_.push_back(p.a);
      cum_.push_back(acc);
    }
    if (!(p.value > 0.0)) {
      segs_.push_back({});
      xs_.push_back(p.b);
      cum_.push_back(acc);
      continue;
    }
    const int k = static_cast<int>(std::min(1e5, std::ceil(p.value / limit)));
    const double h = (p.b - p.a) / k;
    for (int i = 0; i < k; ++i) {
      const double a = p.a + i * h;
      const double b = i + 1 == k ? p.b : a + h;
      const double w = b - a;
      const double c = 0.5 * (a + b);
      const double f1 = g(c - kGaussNode * w);
      const double f2 = g(c);
      const double f3 = g(c + kGaussNode * w);
      const Seg seg{f2, (f3 - f1) / (2.0 * kGaussNode), (f1 + f3 - 2.0 * f2) / (2.0 * kGaussNode * kGaussNode)};
      segs_.push_back(seg);
      acc += w * (seg.a + seg.c / 12.0);
      xs_.push_back(b);
      cum_.push_back(acc);
    }
  }
  total_ = acc;
}

double TabulatedCdf::operator()(double x) const {
  if (xs_.empty() || !(total_ > 0.0)) return 0.0;
  if (x <= xs_.front()) return 0.0;
  if (x >= xs_.back()) return 1.0;
  const std::size_t hi = std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
  const std::size_t lo = hi - 1;
  // Exact integral of the quadratic through the segment's three samples.
  const Seg& q = segs_[lo];
  const double h = xs_[hi] - xs_[lo];
  const double u = (x - xs_[lo]) / h - 0.5;
  const double part = h * (q.a * (u + 0.5) + q.b / 2.0 * (u * u - 0.25) + q.c / 3.0 * (u * u * u + 0.125));
  const double v = std::clamp(cum_[lo] + part, std::min(cum_[lo], cum_[hi]), std::max(cum_[lo], cum_[hi]));
  return std::clamp(v / total_, 0.0, 1.0);
}

double TabulatedCdf::quantile(double q) const {
  if (xs_.empty()) return 0.0;
  const double target = q * total_;
  const std::size_t hi = std::lower_bound(cum_.begin(), cum_.end(), target) - cum_.begin();
  if (hi == 0) return xs_.front();
  if (hi >= cum_.size()) return xs_.back();
  const std::size_t lo = hi - 1;
  const double span = cum_[hi] - cum_[lo];
  const double w = span > 0.0 ? (target - cum_[lo]) / span : 0.0;
  return xs_[lo] + w * (xs_[hi] - xs_[lo]);
}

// ---------------------------------------------------------------------------
// Marginals and mutation
// ---------------------------------------------------------------------------

CExpr fst_marginal(const CExpr& f, const PdfType& t) {
  CExpr body = cexpr_subst(0, CExpr::pair(CExpr::var(1), CExpr::var(0)), ins_var1(f));
  return CExpr::integral(body, t.right());
}

CExpr snd_marginal(const CExpr& f, const PdfType& t) {
  CExpr body = cexpr_subst(0, CExpr::pair(CExpr::var(0), CExpr::var(1)), ins_var1(f));
  return CExpr::integral(body, t.left());
}

CExpr mutate_density(const CExpr& f, const PdfType& t, const std::vector<Val>& samples) {
  PdfType c = t;
  CExpr sel = CExpr::var(0);
  std::vector<Val> vals = samples;
  while (c.is_prod()) {
    c = c.left();
    sel = cx::fst(sel);
    for (Val& v : vals) v = v.fst();
  }
  CExpr cond = cx::boolean(true);
  switch (c.kind()) {
    case TypeKind::Bool: cond = sel; break;
    case TypeKind::Real: {
      std::vector<double> xs;
      for (const Val& v : vals) xs.push_back(v.as_real());
      double median = 0.0;
      if (!xs.empty()) {
        std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
        median = xs[xs.size() / 2];
      }
      cond = cx::less(sel, cx::real(median));
      break;
    }
    case TypeKind::Int: {
      std::vector<BigInt> ns;
      for (const Val& v : vals) ns.push_back(v.as_int());
      BigInt median = 0;
      if (!ns.empty()) {
        std::nth_element(ns.begin(), ns.begin() + ns.size() / 2, ns.end());
        median = ns[ns.size() / 2];
      }
      cond = cx::le(sel, CExpr::val(Val::integer(median)));
      break;
    }
    default: break;
  }
  return cx::mul(f, cx::ite(cond, cx::real(1.2), cx::real(1.0)));
}

// ---------------------------------------------------------------------------
// verify_program
// ---------------------------------------------------------------------------

namespace {

bool has_real(const PdfType& t) {
  if (t.is_prod()) return has_real(t.left()) || has_real(t.right());
  return t.kind() == TypeKind::Real;
}

struct Job {
  std::string target;
  std::vector<bool> path;  // false = fst, true = snd
  CExpr density;
  PdfType type;
};

void plan(const CExpr& f, const PdfType& t, const std::string& target, std::vector<bool> path,
          std::vector<Job>& out) {
  if (t.is_prod() && !countable_type(t)) {
    auto sub = [&](const char* name, bool right, const CExpr& g, const PdfType& u) {
      std::vector<bool> p = path;
      p.push_back(right);
      plan(g, u, target == "value" ? name : target + "." + name, p, out);
    };
    sub("fst", false, fst_marginal(f, t), t.left());
    sub("snd", true, snd_marginal(f, t), t.right());
    return;
  }
  out.push_back({target, std::move(path), f, t});
}

Val project(Val v, const std::vector<bool>& path) {
  for (bool right : path) v = right ? v.snd() : v.fst();
  return v;
}

double ratio(const TestResult& r) {
  if (r.threshold > 0.0) return r.statistic / r.threshold;
  return r.statistic > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

VerifyReport verify_program(const Expr& e, const CExpr& f, const PdfType& t, const VerifyConfig& cfg) {
  if (cfg.n_samples < 100) throw Error("verify: need at least 100 samples");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error("verify: alpha must lie in (0, 1)");
  if (has_real(t) && cfg.n_samples < 1000) throw Error("verify: continuous tests need at least 1000 samples");

  VerifyReport rep;
  Rng rng(cfg.seed);
  std::vector<Val> samples;
  samples.reserve(cfg.n_samples);
  for (std::uint64_t i = 0; i < cfg.n_samples; ++i) {
    if (auto o = sample_expr(State(), e, rng)) samples.push_back(std::move(*o));
  }
  const double n = static_cast<double>(cfg.n_samples);
  rep.branch_prob_empirical = static_cast<double>(samples.size()) / n;

  EvalDiagnostics diag;
  QuadResult mass = integrate_density(f, t, cfg.quad, State(), &diag);
  rep.branch_prob_density = mass.value;
  if (!mass.converged) rep.warnings.push_back("integral of the density did not converge");
  if (diag.divergent_integrals > 0) rep.warnings.push_back("a nested integral diverged and was taken as 0");
  if (!mass.accurate || diag.inaccurate_integrals > 0)
    rep.warnings.push_back("quadrature ran out of panels before reaching the error target");
  if (mass.value > 1.0 + cfg.mass_tolerance) rep.warnings.push_back("density mass exceeds 1");

  const double p = std::clamp(mass.value, 0.0, 1.0);
  rep.mass_bound = 3.0 * std::sqrt(p * (1.0 - p) / n) + cfg.mass_tolerance;
  rep.mass_passed = std::fabs(rep.branch_prob_empirical - mass.value) <= rep.mass_bound;

  if (!samples.empty() && mass.value > 0.0) {
    std::vector<Job> jobs;
    plan(f, t, "value", {}, jobs);
    const double alpha = cfg.alpha / static_cast<double>(jobs.size());
    const std::uint64_t k = samples.size();
    for (const Job& job : jobs) {
      TestResult r;
      r.target = job.target;
      if (countable_type(job.type)) {
        std::map<Val, std::uint64_t> counts;
        for (const Val& v : samples) ++counts[project(v, job.path)];
        const std::size_t distinct = counts.size();
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(cfg.bins); ++i) {
          auto u = universe_element(job.type, i);
          if (!u) break;
          counts.try_emplace(*u, 0);
        }
        auto pmf = [&](const Val& v) {
          return clamp_density(eval_density_at(job.density, v, cfg.quad)) / mass.value;
        };
        ChiSquare cs = chi_square_statistic(counts, pmf, k);
        if (cs.dof >= 1) {
          r.test_name = "chi-square";
          r.statistic = cs.statistic;
          r.dof = cs.dof;
          r.threshold = chi_square_threshold(cs.dof, alpha);
        } else if (distinct == 1) {
          const Val& only = std::find_if(counts.begin(), counts.end(), [](const auto& c) { return c.second > 0; })->first;
          r.test_name = "exact-point";
          r.statistic = std::fabs(1.0 - pmf(only));
          r.threshold = cfg.mass_tolerance;
        } else {
          r.test_name = "chi-square";
          rep.warnings.push_back(job.target + ": too few cells for a chi-square test");
        }
      } else {
        std::vector<double> xs;
        xs.reserve(k);
        for (const Val& v : samples) xs.push_back(project(v, job.path).as_real());
        std::sort(xs.begin(), xs.end());
        TabulatedCdf cdf([&](double x) { return eval_density_at(job.density, Val::real(x), cfg.quad); }, cfg.quad,
                         real_breakpoints(job.density, cfg.quad));
        if (!cdf.converged()) rep.warnings.push_back(job.target + ": CDF integral did not converge");
        if (k < 1000) rep.warnings.push_back(job.target + ": fewer than 1000 successful draws for KS");
        r.test_name = "KS";
        r.statistic = ks_statistic(xs, cdf);
        r.threshold = ks_threshold(k, alpha);
      }
      r.passed = r.statistic <= r.threshold;
      rep.tests.push_back(r);
    }
    const TestResult& worst =
        *std::max_element(rep.tests.begin(), rep.tests.end(),
                          [](const TestResult& a, const TestResult& b) { return ratio(a) < ratio(b); });
    rep.test_name = worst.test_name;
    rep.statistic = worst.statistic;
    rep.threshold = worst.threshold;
  }

  rep.passed = mass.converged && rep.mass_passed &&
               std::all_of(rep.tests.begin(), rep.tests.end(), [](const TestResult& r) { return r.passed; });
  return rep;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

Json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

Json VerifyReport::to_json() const {
  Json tests_json = Json::array();
  for (const TestResult& r : tests) {
    tests_json.push_back({{"test_name", r.test_name},
                          {"target", r.target},
                          {"statistic", num(r.statistic)},
                          {"threshold", num(r.threshold)},
                          {"dof", r.dof},
                          {"passed", r.passed}});
  }
  return {{"branch_prob_empirical", num(branch_prob_empirical)},
          {"branch_prob_density", num(branch_prob_density)},
          {"mass_bound", num(mass_bound)},
          {"mass_passed", mass_passed},
          {"test_name", test_name},
          {"statistic", num(statistic)},
          {"threshold", num(threshold)},
          {"tests", tests_json},
          {"passed", passed},
          {"warnings", warnings}};
}

std::string VerifyReport::to_text() const {
  std::ostringstream out;
  out.precision(6);
  out << "mass: empirical " << branch_prob_empirical << ", density " << branch_prob_density << ", bound "
      << mass_bound << (mass_passed ? " (ok)" : " (FAILED)") << "\n";
  for (const TestResult& r : tests) {
    out << r.test_name << " on " << r.target << ": statistic " << r.statistic << ", threshold " << r.threshold;
    if (r.test_name == "chi-square") out << ", dof " << r.dof;
    out << (r.passed ? " (ok)" : " (FAILED)") << "\n";
  }
  if (tests.empty()) out << "no distribution test (no successful draws or zero mass)\n";
  for (const std::string& w : warnings) out << "warning: " << w << "\n";
  out << (passed ? "PASSED" : "FAILED") << "\n";
  return out.str();
}

}  // namespace densc
