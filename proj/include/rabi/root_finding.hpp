#pragma once

// Bracketed root finding on pole-free segments. The target functions are
// transcendental G-functions with simple poles and kinks near exclusion
// zones, so refinement is plain bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace rabi {

struct RootSearchConfig {
  double lo = 0.0;
  double hi = 1.0;
  int grid_points = 2000;     // sign-scan intervals across (lo, hi)
  double abs_tol = 1e-10;     // convergence tolerance on the variable
  double pole_margin = 1e-6;  // exclusion half-width around listed poles

  void validate() const {
    if (!(lo < hi)) throw std::domain_error("RootSearchConfig: lo < hi required");
    if (grid_points < 2) throw std::domain_error("RootSearchConfig: grid_points >= 2 required");
    if (!(abs_tol > 0.0)) throw std::domain_error("RootSearchConfig: abs_tol > 0 required");
    if (!(pole_margin > 0.0)) throw std::domain_error("RootSearchConfig: pole_margin > 0 required");
  }

  // Default density is 2000 scan intervals per unit of the search
  // variable, with tolerances scaled by the caller's unit.
  static RootSearchConfig over(double lo, double hi, double unit = 1.0) {
    RootSearchConfig cfg;
    cfg.lo = lo;
    cfg.hi = hi;
    cfg.grid_points =
        std::max(2, static_cast<int>(std::ceil(2000.0 * (hi - lo) / unit)));
    cfg.abs_tol = 1e-10 * unit;
    cfg.pole_margin = 1e-6 * unit;
    return cfg;
  }
};

struct RootScan {
  std::vector<double> roots;  // ascending
  std::vector<std::pair<double, double>> unresolved;  // segments that failed to evaluate
};

namespace detail {

inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double fa, double fb, double tol) {
  // invariant: sign(fa) != sign(fb)
  for (int it = 0; it < 200 && b - a > tol; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // interval at floating resolution
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Scans the grid restricted to pole-free segments, brackets every sign
// change, and bisects each bracket to abs_tol. A segment whose evaluation
// throws or returns a non-finite value is reported unresolved; the other
// segments are still searched. Deterministic for fixed cfg.
inline RootScan bracket_roots(const std::function<double(double)>& f,
                              const RootSearchConfig& cfg,
                              std::vector<double> poles = {}) {
  cfg.validate();
  RootScan out;

  // Pole-free segments of (lo, hi). The exclusion is widened a hair past
  // the nominal margin so that segment endpoints never tie with a margin
  // check inside the integrand (the pole positions are computed twice,
  // with different rounding).
  std::sort(poles.begin(), poles.end());
  std::vector<std::pair<double, double>> segments;
  double cursor = cfg.lo;
  for (double p : poles) {
    const double excl = cfg.pole_margin * 1.001 + 1e-12 * (1.0 + std::abs(p));
    if (p + excl <= cfg.lo || p - excl >= cfg.hi) continue;
    const double a = p - excl;
    const double b = p + excl;
    if (a > cursor) segments.emplace_back(cursor, a);
    cursor = std::max(cursor, b);
  }
  if (cursor < cfg.hi) segments.emplace_back(cursor, cfg.hi);

  const double full = cfg.hi - cfg.lo;
  for (const auto& [a, b] : segments) {
    const int cells = std::max(
        2, static_cast<int>(std::lround(cfg.grid_points * (b - a) / full)));
    const double h = (b - a) / cells;
    bool failed = false;
    double x_prev = a;
    double f_prev = 0.0;
    try {
      f_prev = f(a);
    } catch (const std::exception&) {
      failed = true;
    }
    if (!failed && !std::isfinite(f_prev)) failed = true;
    for (int i = 1; i <= cells && !failed; ++i) {
      const double x = (i == cells) ? b : a + i * h;
      double fx;
      try {
        fx = f(x);
      } catch (const std::exception&) {
        failed = true;
        break;
      }
      if (!std::isfinite(fx)) {
        failed = true;
        break;
      }
      if (f_prev == 0.0) {
        out.roots.push_back(x_prev);
      } else if ((f_prev < 0.0) != (fx < 0.0)) {
        out.roots.push_back(detail::bisect(f, x_prev, x, f_prev, fx, cfg.abs_tol));
      }
      x_prev = x;
      f_prev = fx;
    }
    if (!failed && f_prev == 0.0) out.roots.push_back(x_prev);
    if (failed) out.unresolved.emplace_back(a, b);
  }

  std::sort(out.roots.begin(), out.roots.end());
  // merge duplicates (a root landing exactly on a grid node is seen twice)
  std::vector<double> merged;
  for (double r : out.roots) {
    if (merged.empty() || r - merged.back() > cfg.abs_tol) {
      merged.push_back(r);
    }
  }
  out.roots = std::move(merged);
  return out;
}

}  // namespace rabi
