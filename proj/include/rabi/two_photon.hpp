#pragma once

// Asymmetric two-photon quantum Rabi model in the squeezed frame:
// su(1,1) weight tables, coefficient recurrences, the regular G-function
// per Bargmann sector, the even-multiple-of-beta degeneracy solver,
// terminated quasi-exact states, exceptional G-functions, and the
// normalized-energy map used for scaled-bias sweeps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rabi/common.hpp"
#include "rabi/polynomial.hpp"
#include "rabi/root_finding.hpp"
#include "rabi/series.hpp"

namespace rabi::two_photon {

inline constexpr double kDefaultPoleMarginFactor = 1e-6;
// Couplings within this fraction of omega/2 are excluded from automated
// scans; the collapse point itself has no analytic treatment here.
inline constexpr double kCollapseExclusion = 1e-3;

inline SeriesPolicy default_policy() {
  SeriesPolicy pol;
  pol.detect_stall = true;
  return pol;
}

enum class Branch { fe = +1, cd = -1 };

// Cached hyperbolics of the squeezed frame.
struct SqueezeFrame {
  double r = 0.0;
  double beta = 0.0;
  double tanh_r = 0.0;
  double cosh_r = 1.0;

  static SqueezeFrame from(const ModelParams& p) {
    SqueezeFrame f;
    f.r = squeeze_parameter(p);
    f.beta = renormalized_frequency(p);
    f.tanh_r = std::tanh(f.r);
    f.cosh_r = std::cosh(f.r);
    return f;
  }
};

enum class WeightMethod { ratio_recurrence, log_gamma };

// Ratio of consecutive su(1,1) vacuum-overlap weights,
// Omega_{m+1}/Omega_m = -tanh r (2m+2q+3/2)(2m+2q+1/2) / (2(m+1)).
inline double weight_ratio(Bargmann q, double tanh_r, int m) {
  const double qq = bargmann_value(q);
  return -tanh_r * (2.0 * m + 2.0 * qq + 1.5) * (2.0 * m + 2.0 * qq + 0.5) /
         (2.0 * (m + 1.0));
}

// Overlap weights Omega_m^(q); magnitudes kept in log space (the factorial
// in the direct formula overflows doubles near m ~ 85), signs separate.
struct WeightTable {
  Bargmann q = Bargmann::q14;
  std::vector<double> log_mag;
  std::vector<int> sign;
  WeightMethod built_by = WeightMethod::ratio_recurrence;

  double log_abs(int m) const { return log_mag[m]; }
  int sgn(int m) const { return sign[m]; }
  // May overflow to +/-inf for large m; the log accessors are exact.
  double value(int m) const { return sign[m] * std::exp(log_mag[m]); }
  std::size_t size() const { return log_mag.size(); }
};

inline WeightTable weights(Bargmann q, const ModelParams& p, int n_max,
                           WeightMethod method = WeightMethod::ratio_recurrence) {
  if (2.0 * p.g >= p.omega)
    throw std::domain_error("weights: g < omega/2 required");
  const SqueezeFrame fr = SqueezeFrame::from(p);
  WeightTable t;
  t.q = q;
  t.built_by = method;
  t.log_mag.reserve(n_max + 1);
  t.sign.reserve(n_max + 1);
  if (method == WeightMethod::ratio_recurrence) {
    double lm = -0.5 * std::log(fr.cosh_r);
    int sg = 1;
    t.log_mag.push_back(lm);
    t.sign.push_back(sg);
    for (int m = 0; m < n_max; ++m) {
      const double ratio = weight_ratio(q, fr.tanh_r, m);
      if (ratio == 0.0 || sg == 0) {
        sg = 0;
        lm = -std::numeric_limits<double>::infinity();
      } else {
        lm += std::log(std::abs(ratio));
        sg *= ratio > 0.0 ? 1 : -1;
      }
      t.log_mag.push_back(lm);
      t.sign.push_back(sg);
    }
  } else {
    // direct: Omega_m = (-tanh r)^m [2(m+q-1/4)]! / (sqrt(cosh r) 2^m m!)
    const double tt = -fr.tanh_r;
    const double half = bargmann_value(q) - 0.25;  // 0 or 1/2
    for (int m = 0; m <= n_max; ++m) {
      if (m > 0 && tt == 0.0) {
        t.log_mag.push_back(-std::numeric_limits<double>::infinity());
        t.sign.push_back(0);
        continue;
      }
      const double lm = m * (m > 0 ? std::log(tt) : 0.0) +
                        std::lgamma(2.0 * (m + half) + 1.0) - m * std::log(2.0) -
                        std::lgamma(m + 1.0) - 0.5 * std::log(fr.cosh_r);
      t.log_mag.push_back(lm);
      t.sign.push_back(1);
    }
  }
  return t;
}

namespace detail {

using rabi::detail::ScaledCarry;
using rabi::detail::StopState;

struct Recurrence {
  double omega, delta, epsilon, g, E, beta, qv, s;

  Recurrence(const ModelParams& p, Bargmann q, double E, Branch b)
      : omega(p.omega), delta(p.delta), epsilon(p.epsilon), g(p.g), E(E),
        beta(renormalized_frequency(p)), qv(bargmann_value(q)),
        s(b == Branch::fe ? 1.0 : -1.0) {}

  double den(int n) const {
    return 2.0 * beta * (n + qv) + (s * epsilon - omega) / 2.0 - E;
  }
  double step(int n, double x_n, double x_nm1) const {
    const double pf = (n + qv + 0.25) * (n + qv + 0.75);
    const double num = 2.0 * (2.0 * omega * omega - beta * beta) * (n + qv) -
                       beta * (E + (s * epsilon + omega) / 2.0) -
                       0.25 * delta * delta * beta / den(n);
    return num / (8.0 * g * omega * pf) * x_n - x_nm1 / (4.0 * pf);
  }
  double partner(int n, double x_n) const { return 0.5 * delta * x_n / den(n); }
};

// Pinned to the pole line (pin, J) of its own sector, with the energy
// substituted analytically:
//   A-pin:  den_f = 2 beta (n-J),        den_c = 2 beta (n-J) - eps
//   B-pin:  den_f = 2 beta (n-J) + eps,  den_c = 2 beta (n-J)
// and the drift term loses E in favor of 2 beta^2 (J+q) plus the matching
// epsilon shift.
struct PinnedRecurrence {
  double omega, delta, epsilon, g, beta, qv;
  int J;
  PoleKind pin;
  double s;

  double den(int n) const {
    const double base = 2.0 * beta * (n - J);
    if (pin == PoleKind::A) return s > 0 ? base : base - epsilon;
    return s > 0 ? base + epsilon : base;
  }
  double drift(int n) const {
    double d = 2.0 * (2.0 * omega * omega - beta * beta) * (n + qv) -
               2.0 * beta * beta * (J + qv);
    if (pin == PoleKind::A && s > 0) d -= beta * epsilon;
    if (pin == PoleKind::B && s < 0) d += beta * epsilon;
    return d;
  }
  double step(int n, double x_n, double x_nm1) const {
    const double pf = (n + qv + 0.25) * (n + qv + 0.75);
    const double num = drift(n) - 0.25 * delta * delta * beta / den(n);
    return num / (8.0 * g * omega * pf) * x_n - x_nm1 / (4.0 * pf);
  }
  double partner(int n, double x_n) const { return 0.5 * delta * x_n / den(n); }
};

}  // namespace detail

// Nearest pole line of either family within the q sector.
inline std::pair<PoleLine, double> nearest_pole(Bargmann q, const ModelParams& p,
                                                double E) {
  const double beta = renormalized_frequency(p);
  const double qv = bargmann_value(q);
  PoleLine best;
  double best_d = std::numeric_limits<double>::infinity();
  for (PoleKind kind : {PoleKind::A, PoleKind::B}) {
    const double sign = kind == PoleKind::A ? 1.0 : -1.0;
    const double offset = (sign * p.epsilon - p.omega) / 2.0;
    const int m = std::max(
        0, static_cast<int>(std::lround((E - offset) / (2.0 * beta) - qv)));
    const double d = std::abs(2.0 * beta * (m + qv) + offset - E);
    if (d < best_d) {
      best_d = d;
      best = PoleLine{Model::two_photon, kind, m, q};
    }
  }
  return {best, best_d};
}

inline void require_two_photon_domain(const ModelParams& p) {
  p.validate();
  if (!(p.g > 0.0)) throw std::domain_error("two_photon: g > 0 required");
  if (!(2.0 * p.g < p.omega)) throw std::domain_error("two_photon: g < omega/2 required");
}

// Coefficient recurrence from f_{-1} = 0, f_0 = 1; weighted terms are
// f_n Omega_n with the weight magnitudes folded in via the ratio law.
inline CoefficientTable coefficients(Bargmann q, const ModelParams& p, double E,
                                     Branch branch,
                                     const SeriesPolicy& pol = default_policy(),
                                     double pole_margin = -1.0) {
  require_two_photon_domain(p);
  if (pole_margin < 0.0) pole_margin = kDefaultPoleMarginFactor * p.omega;

  const SqueezeFrame fr = SqueezeFrame::from(p);
  const detail::Recurrence rec(p, q, E, branch);
  CoefficientTable out;
  detail::ScaledCarry carry;
  detail::StopState stop;
  double log_omega = -0.5 * std::log(fr.cosh_r);
  double sum_x = 0.0, sum_y = 0.0;
  bool stalled = false;
  for (int n = 0; n < pol.n_cap; ++n) {
    out.primary.push_back(carry.value_cur());
    out.truncation_n = n;
    if (std::abs(rec.den(n)) < pole_margin) {
      // resonant with the branch's own family: truncated, flagged table
      out.converged = false;
      out.tail_estimate = stop.tail;
      return out;
    }
    out.partner.push_back(rec.partner(n, carry.value_cur()));
    const double wn = std::exp(carry.log_scale + log_omega);
    const double tx = carry.cur * wn;
    const double ty = rec.partner(n, carry.cur) * wn;
    sum_x += tx;
    sum_y += ty;
    if (stop.update(pol, std::max(std::abs(tx), std::abs(ty)),
                    std::max(std::abs(sum_x), std::abs(sum_y)), &stalled)) {
      out.converged = !stalled;
      break;
    }
    carry.advance(rec.step(n, carry.cur, carry.prev));
    const double ratio = weight_ratio(q, fr.tanh_r, n);
    log_omega += ratio == 0.0 ? -std::numeric_limits<double>::infinity()
                              : std::log(std::abs(ratio));
  }
  out.tail_estimate = stop.tail;
  return out;
}

inline CoefficientTable coeffs_fe(Bargmann q, const ModelParams& p, double E,
                                  const SeriesPolicy& pol = default_policy()) {
  return coefficients(q, p, E, Branch::fe, pol);
}
inline CoefficientTable coeffs_cd(Bargmann q, const ModelParams& p, double E,
                                  const SeriesPolicy& pol = default_policy()) {
  return coefficients(q, p, E, Branch::cd, pol);
}

// Regular G-function of the q sector; zeros over E give the regular
// spectrum. The weights enter through their ratio law so only O(1)
// products are ever formed.
inline double g_function(Bargmann q, const ModelParams& p, double E,
                         const SeriesPolicy& pol = default_policy(),
                         double pole_margin = -1.0) {
  require_two_photon_domain(p);
  if (pole_margin < 0.0) pole_margin = kDefaultPoleMarginFactor * p.omega;
  const auto [line, dist] = nearest_pole(q, p, E);
  if (dist < pole_margin) throw PoleProximityError(line, pole_energy(line, p), E);

  const SqueezeFrame fr = SqueezeFrame::from(p);
  const detail::Recurrence rf(p, q, E, Branch::fe);
  const detail::Recurrence rc(p, q, E, Branch::cd);
  detail::ScaledCarry f, c;
  detail::StopState stop;
  double log_omega = -0.5 * std::log(fr.cosh_r);
  double sum_f = 0.0, sum_e = 0.0, sum_c = 0.0, sum_d = 0.0;
  bool stalled = false;
  bool done = false;
  for (int n = 0; n < pol.n_cap; ++n) {
    const double wf = std::exp(f.log_scale + log_omega);
    const double wc = std::exp(c.log_scale + log_omega);
    const double tf = f.cur * wf;
    const double te = rf.partner(n, f.cur) * wf;
    const double tc = c.cur * wc;
    const double td = rc.partner(n, c.cur) * wc;
    sum_f += tf;
    sum_e += te;
    sum_c += tc;
    sum_d += td;
    const double tmag = std::max(std::max(std::abs(tf), std::abs(te)),
                                 std::max(std::abs(tc), std::abs(td)));
    const double pmag = std::max(std::max(std::abs(sum_f), std::abs(sum_e)),
                                 std::max(std::abs(sum_c), std::abs(sum_d)));
    if (stop.update(pol, tmag, pmag, &stalled)) {
      done = !stalled;
      break;
    }
    f.advance(rf.step(n, f.cur, f.prev));
    c.advance(rc.step(n, c.cur, c.prev));
    const double ratio = weight_ratio(q, fr.tanh_r, n);
    log_omega += ratio == 0.0 ? -std::numeric_limits<double>::infinity()
                              : std::log(std::abs(ratio));
  }
  if (!done)
    throw ConvergenceError("two-photon G-function series did not converge",
                           pol.n_cap, stop.tail);
  return sum_e * sum_d - sum_f * sum_c;
}

// --- overlapped-pole-line constraints --------------------------------------

// f_N^(q) with the degenerate energy (M+N+2q) beta - omega/2 and bias
// eps = 2 beta (M-N) substituted.
inline double pole_constraint_f(Bargmann q, int N, int M, double delta,
                                double omega, double g) {
  if (N < 1 || M <= N)
    throw std::domain_error("pole_constraint_f: need 1 <= N < M (N = 0 belongs to the exceptional builders)");
  if (!(g > 0.0) || !(2.0 * g < omega))
    throw std::domain_error("pole_constraint_f: need 0 < g < omega/2");
  const double qv = bargmann_value(q);
  const double b2 = omega * omega - 4.0 * g * g;
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < N; ++n) {
    const double pf = (n + qv + 0.25) * (n + qv + 0.75);
    const double num = 2.0 * omega * omega * (n + qv) - b2 * (n + M + 2.0 * qv) +
                       delta * delta / (16.0 * (N - n));
    const double next = num / (4.0 * g * omega * pf) * cur - prev / (4.0 * pf);
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double pole_constraint_c(Bargmann q, int N, int M, double delta,
                                double omega, double g) {
  if (N < 1 || M <= N)
    throw std::domain_error("pole_constraint_c: need 1 <= N < M");
  if (!(g > 0.0) || !(2.0 * g < omega))
    throw std::domain_error("pole_constraint_c: need 0 < g < omega/2");
  const double qv = bargmann_value(q);
  const double b2 = omega * omega - 4.0 * g * g;
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < M; ++n) {
    const double pf = (n + qv + 0.25) * (n + qv + 0.75);
    const double num = 2.0 * omega * omega * (n + qv) - b2 * (n + N + 2.0 * qv) +
                       delta * delta / (16.0 * (M - n));
    const double next = num / (4.0 * g * omega * pf) * cur - prev / (4.0 * pf);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Constraint as a degree-N polynomial in y = (beta/omega)^2; positive
// roots in (0, 1) map back to couplings via g = (omega/2) sqrt(1-y).
inline Poly constraint_polynomial(Bargmann q, int N, int M, double delta,
                                  double omega) {
  const long double qv = bargmann_value(q);
  const long double dt2 = (long double)(delta / omega) * (delta / omega);
  Poly prev{0.0L}, cur{1.0L};
  for (int n = 0; n < N; ++n) {
    // Up to a positive factor, G_{n+1} =
    //   [8(n+q) - 4y(n+M+2q) + dt2/(4(N-n))] G_n
    //   - 16 (1-y) (n+q-3/4)(n+q-1/4) G_{n-1}
    Poly next(cur.size() + 1, 0.0L);
    const long double c0 = 8.0L * (n + qv) + dt2 / (4.0L * (N - n));
    const long double c1 = -4.0L * (n + M + 2.0L * qv);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i] += c0 * cur[i];
      next[i + 1] += c1 * cur[i];
    }
    const long double b0 = 16.0L * (n + qv - 0.75L) * (n + qv - 0.25L);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      next[i] -= b0 * prev[i];
      next[i + 1] += b0 * prev[i];
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Closed forms (N = 1 for any M; N = 2, M = 3): (g, epsilon), ascending g.
inline std::vector<std::pair<double, double>> closed_form(Bargmann q, int N, int M,
                                                          double delta, double omega) {
  if (M <= N) throw std::domain_error("closed_form: need M > N");
  const double qv = bargmann_value(q);
  const double dt = delta / omega;
  std::vector<double> ys;
  if (N == 1) {
    const double y = (2.0 * qv + dt * dt / 16.0) / (M + 2.0 * qv);
    if (y < 1.0) ys.push_back(y);  // no real positive root for delta >= 4 sqrt(M)
  } else if (N == 2 && M == 3) {
    if (q == Bargmann::q14) {
      const double mid = 1.0 / 3.0 + 23.0 * dt * dt / 2016.0;
      const double rad =
          std::sqrt(25.0 * std::pow(dt, 4) / 256.0 + 10.5 * dt * dt + 1008.0) / 126.0;
      ys = {mid - rad, mid + rad};
    } else {
      const double mid = 5.0 / 11.0 + 29.0 * dt * dt / 3168.0;
      const double rad = std::sqrt(20.0 / 363.0 + dt * dt / 8712.0 +
                                   49.0 * std::pow(dt, 4) / (3168.0 * 3168.0));
      ys = {mid - rad, mid + rad};
    }
  } else {
    throw std::domain_error("closed_form: closed forms cover N = 1 (any M) and (N, M) = (2, 3)");
  }
  std::vector<std::pair<double, double>> out;
  for (double y : ys) {
    if (!(y > 0.0 && y < 1.0)) continue;
    const double beta = omega * std::sqrt(y);
    out.emplace_back(0.5 * omega * std::sqrt(1.0 - y), 2.0 * beta * (M - N));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct DegeneratePoint2p {
  Bargmann q = Bargmann::q14;
  int N = 0;
  int M = 0;
  double g = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;  // 2 beta (M-N)
  double energy = 0.0;   // (M+N+2q) beta - omega/2
  double residual_f = 0.0;
  double residual_c = 0.0;
};

inline double collapse_scan_limit(double omega) {
  return 0.5 * omega * (1.0 - kCollapseExclusion);
}

// Degenerate crossings in the q sector: roots of the f-constraint over
// g in (0, omega/2) minus the collapse exclusion zone, cross-validated
// against the c-constraint and the Sturm count of the polynomial form;
// closed forms checked where available.
inline std::vector<DegeneratePoint2p> find_degenerate(
    Bargmann q, int N, int M, double delta, double omega,
    std::optional<RootSearchConfig> cfg_opt = std::nullopt) {
  if (N < 1 || M <= N)
    throw std::domain_error("find_degenerate: need 1 <= N < M");
  RootSearchConfig cfg = cfg_opt ? *cfg_opt
                                 : RootSearchConfig::over(0.0, collapse_scan_limit(omega), omega);
  if (!cfg_opt) cfg.abs_tol = 1e-13 * omega;

  const auto f = [&](double g) { return pole_constraint_f(q, N, M, delta, omega, g); };
  const auto c = [&](double g) { return pole_constraint_c(q, N, M, delta, omega, g); };

  const auto guarded_scan = [&](const std::function<double(double)>& fn,
                                const Poly& pol) {
    std::vector<double> roots = bracket_roots(fn, cfg, {0.0}).roots;
    const auto chain = poly::sturm_chain(pol);
    const auto y_of_g = [&](double g) { return 1.0 - 4.0 * g * g / (omega * omega); };
    const double y_lo = y_of_g(cfg.hi);
    const double y_hi = y_of_g(cfg.lo + cfg.pole_margin);
    if ((int)roots.size() != poly::count_roots(chain, y_lo, y_hi)) {
      std::vector<std::pair<double, double>> iso;
      poly::isolate(chain, y_lo, y_hi, iso);
      for (const auto& [ya, yb] : iso) {
        bool covered = false;
        for (double r : roots) {
          const double y = y_of_g(r);
          if (y >= ya && y <= yb) covered = true;
        }
        if (!covered) {
          const double y = poly::bisect_root(pol, ya, yb, 1e-16);
          roots.push_back(0.5 * omega * std::sqrt(1.0 - y));
        }
      }
      std::sort(roots.begin(), roots.end());
    }
    return roots;
  };

  std::vector<double> roots = guarded_scan(f, constraint_polynomial(q, N, M, delta, omega));
  std::vector<double> c_roots = guarded_scan(c, constraint_polynomial(q, M, N, delta, omega));

  if ((int)roots.size() > N)
    throw InconsistencyError("find_degenerate: more roots than the polynomial degree allows",
                             0.0, 0.0);
  std::vector<DegeneratePoint2p> out;
  for (double r : roots) {
    DegeneratePoint2p pt;
    pt.q = q;
    pt.N = N;
    pt.M = M;
    pt.g = r;
    ModelParams pp;
    pp.omega = omega;
    pp.delta = delta;
    pp.g = r;
    pt.beta = renormalized_frequency(pp);
    pt.epsilon = 2.0 * pt.beta * (M - N);
    pt.energy = (M + N + 2.0 * bargmann_value(q)) * pt.beta - 0.5 * omega;
    pt.residual_f = std::abs(f(r));
    pt.residual_c = std::abs(c(r));
    double nearest = std::numeric_limits<double>::infinity();
    for (double rc : c_roots) nearest = std::min(nearest, std::abs(rc - r));
    if (!(nearest < 1e-8 * omega))
      throw InconsistencyError(
          "find_degenerate: f-constraint root has no matching c-constraint root",
          pt.residual_f, pt.residual_c);
    out.push_back(pt);
  }
  if (c_roots.size() != roots.size())
    throw InconsistencyError("find_degenerate: constraint root counts differ",
                             (double)roots.size(), (double)c_roots.size());

  if (N == 1 || (N == 2 && M == 3)) {
    const auto closed = closed_form(q, N, M, delta, omega);
    if (closed.size() != out.size())
      throw InconsistencyError("find_degenerate: closed-form root count differs",
                               (double)out.size(), (double)closed.size());
    for (std::size_t i = 0; i < closed.size(); ++i)
      if (std::abs(closed[i].first - out[i].g) > 1e-8 * omega)
        throw InconsistencyError("find_degenerate: root deviates from closed form",
                                 out[i].g, closed[i].first);
  }
  return out;
}

// Terminated quasi-exact states at a degenerate point; the A-frame state
// ends at N with e_N = -(4 g omega / delta beta) f_{N-1}, the B-frame
// state at M with the matching d_M.
inline std::pair<TerminatedState, TerminatedState> degenerate_states(
    const DegeneratePoint2p& pt, const ModelParams& params) {
  const double omega = params.omega, delta = params.delta, g = pt.g;
  if (!(delta > 0.0)) throw std::domain_error("degenerate_states: delta > 0 required");
  const double qv = bargmann_value(pt.q);
  const double beta = pt.beta;

  const auto run = [&](int steps, bool c_side) {
    std::vector<double> xs{1.0};
    double prev = 0.0, cur = 1.0;
    const double b2 = beta * beta;
    const int big = c_side ? pt.M : pt.N;      // index inside the delta^2 term
    const int shift = c_side ? pt.N : pt.M;    // index inside the drift term
    for (int n = 0; n + 1 < steps; ++n) {
      const double pf = (n + qv + 0.25) * (n + qv + 0.75);
      const double num = 2.0 * omega * omega * (n + qv) -
                         b2 * (n + shift + 2.0 * qv) +
                         delta * delta / (16.0 * (big - n));
      const double next = num / (4.0 * g * omega * pf) * cur - prev / (4.0 * pf);
      prev = cur;
      cur = next;
      xs.push_back(cur);
    }
    return xs;
  };

  const std::vector<double> fs = run(pt.N, false);
  const std::vector<double> cs = run(pt.M, true);
  std::vector<double> es, ds;
  for (int n = 0; n < pt.N; ++n)
    es.push_back(0.5 * delta * fs[n] / (2.0 * beta * (n - pt.N)));
  es.push_back(-(4.0 * g * omega / (delta * beta)) * fs[pt.N - 1]);
  for (int n = 0; n < pt.M; ++n)
    ds.push_back(0.5 * delta * cs[n] / (2.0 * beta * (n - pt.M)));
  ds.push_back(-(4.0 * g * omega / (delta * beta)) * cs[pt.M - 1]);

  const double half = qv - 0.25;
  const auto amp = [&](int m) {
    return std::exp(0.5 * std::lgamma(2.0 * (m + half) + 1.0));
  };
  const double r = squeeze_parameter(ModelParams{omega, delta, pt.epsilon, g});

  TerminatedState a;
  a.model = Model::two_photon;
  a.frame = PoleKind::A;
  a.q = pt.q;
  a.frame_parameter = r;
  a.energy = pt.energy;
  for (int m = 0; m <= pt.N; ++m) a.upper.push_back(amp(m) * es[m]);
  for (int m = 0; m < pt.N; ++m) a.lower.push_back(amp(m) * fs[m]);

  TerminatedState b;
  b.model = Model::two_photon;
  b.frame = PoleKind::B;
  b.q = pt.q;
  b.frame_parameter = -r;
  b.energy = pt.energy;
  const auto alt = [](int m) { return m % 2 == 0 ? 1.0 : -1.0; };
  for (int m = 0; m < pt.M; ++m) b.upper.push_back(alt(m) * amp(m) * cs[m]);
  for (int m = 0; m <= pt.M; ++m) b.lower.push_back(alt(m) * amp(m) * ds[m]);
  return {a, b};
}

// Normalized energy E' = (E + omega/2)/(2 beta) - q + eps/(4 beta); maps
// the pole lines of a scaled-bias sweep onto horizontal lines.
inline double normalized_energy(double E, Bargmann q, double epsilon, double beta,
                                double omega) {
  if (!(beta > 0.0)) throw std::domain_error("normalized_energy: beta > 0 required");
  return (E + 0.5 * omega) / (2.0 * beta) - bargmann_value(q) +
         epsilon / (4.0 * beta);
}

// f_N^(q) with the energy pinned to the N-th type-A pole and the bias
// left free; its roots over g locate single levels crossing that line.
inline double pinned_constraint_f(Bargmann q, int N, const ModelParams& p) {
  if (N < 1) throw std::domain_error("pinned_constraint_f: N >= 1 required");
  require_two_photon_domain(p);
  const SqueezeFrame fr = SqueezeFrame::from(p);
  detail::PinnedRecurrence rec{p.omega, p.delta, p.epsilon, p.g,
                               fr.beta, bargmann_value(q), N, PoleKind::A, +1.0};
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < N; ++n) {
    const double next = rec.step(n, cur, prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

// c_M^(q) at the M-th type-B pole, bias free.
inline double pinned_constraint_c(Bargmann q, int M, const ModelParams& p) {
  if (M < 1) throw std::domain_error("pinned_constraint_c: M >= 1 required");
  require_two_photon_domain(p);
  const SqueezeFrame fr = SqueezeFrame::from(p);
  detail::PinnedRecurrence rec{p.omega, p.delta, p.epsilon, p.g,
                               fr.beta, bargmann_value(q), M, PoleKind::B, -1.0};
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < M; ++n) {
    const double next = rec.step(n, cur, prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

// --- non-degenerate exceptional G-functions --------------------------------

enum class ExcKind { x1A, x2A, x1B, x2B };

inline std::string to_string(ExcKind k) {
  switch (k) {
    case ExcKind::x1A: return "1A";
    case ExcKind::x2A: return "2A";
    case ExcKind::x1B: return "1B";
    default: return "2B";
  }
}

// Couplings at which the opposite family becomes resonant with the pinned
// pole line, i.e. the g-poles of the exceptional G-function.
inline std::vector<double> exceptional_pole_couplings(ExcKind kind, int index,
                                                      const ModelParams& p,
                                                      double g_hi) {
  std::vector<double> out;
  if (!(p.epsilon > 0.0)) return out;
  const double beta_min =
      renormalized_frequency(ModelParams{p.omega, p.delta, p.epsilon, g_hi});
  const bool a_pin = kind == ExcKind::x1A || kind == ExcKind::x2A;
  const int k_max = a_pin ? static_cast<int>(std::floor(p.epsilon / (2.0 * beta_min)))
                          : index;
  for (int k = 1; k <= k_max; ++k) {
    const double beta = p.epsilon / (2.0 * k);
    if (beta >= p.omega) continue;
    const double y = beta / p.omega;
    out.push_back(0.5 * p.omega * std::sqrt(1.0 - y * y));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline void validate_exceptional(ExcKind kind, int index, const ModelParams& p) {
  p.validate();
  if (!(p.delta > 0.0)) throw std::domain_error("exceptional_g: delta > 0 required");
  if (!(p.epsilon > 0.0))
    throw std::domain_error(
        "exceptional_g: epsilon > 0 required (at epsilon = 0 the pinned line is "
        "resonant with the opposite family)");
  const bool head = kind == ExcKind::x1A || kind == ExcKind::x1B;
  if (head && index < 1)
    throw std::domain_error("exceptional_g: head kinds need index >= 1");
  if (!head && index < 0)
    throw std::domain_error("exceptional_g: tail kinds need index >= 0");
}

// Evaluates the requested exceptional G-function at coupling p.g with the
// energy pinned to the (kind, index) pole line of sector q.
inline double exceptional_g(ExcKind kind, Bargmann q, int index,
                            const ModelParams& p,
                            const SeriesPolicy& pol = default_policy()) {
  require_two_photon_domain(p);
  validate_exceptional(kind, index, p);
  const bool head = kind == ExcKind::x1A || kind == ExcKind::x1B;
  const bool a_pin = kind == ExcKind::x1A || kind == ExcKind::x2A;

  const SqueezeFrame fr = SqueezeFrame::from(p);
  const double qv = bargmann_value(q);
  // g > 0 implies r < 0, so every weight ratio is positive and the weights
  // carry no sign; only log magnitudes are tracked here.
  detail::PinnedRecurrence rec_f{p.omega, p.delta, p.epsilon, p.g, fr.beta, qv,
                                 index, a_pin ? PoleKind::A : PoleKind::B, +1.0};
  detail::PinnedRecurrence rec_c = rec_f;
  rec_c.s = -1.0;

  // resonance of the ordinary-series side with the pinned line
  {
    const detail::PinnedRecurrence& ord = a_pin ? rec_c : rec_f;
    const int n_res = static_cast<int>(std::lround(
        index + (a_pin ? 1.0 : -1.0) * p.epsilon / (2.0 * fr.beta)));
    if (n_res >= 0 && std::abs(ord.den(n_res)) < 1e-9 * p.omega) {
      PoleLine line{Model::two_photon, a_pin ? PoleKind::B : PoleKind::A, n_res, q};
      throw PoleProximityError(line, pole_energy(line, p),
                               pole_energy(PoleLine{Model::two_photon,
                                                    a_pin ? PoleKind::A : PoleKind::B,
                                                    index, q}, p));
    }
  }

  struct Side {
    double sum_x = 0.0, sum_y = 0.0;
    detail::ScaledCarry carry;
    double log_omega = 0.0;
    int n = 0;
    bool streaming = true;
  };
  Side a, b;
  const double log_omega0 = -0.5 * std::log(fr.cosh_r);
  a.log_omega = b.log_omega = log_omega0;

  const auto omega_log_at = [&](int m) {
    double lo = log_omega0;
    for (int i = 0; i < m; ++i) lo += std::log(weight_ratio(q, fr.tanh_r, i));
    return lo;
  };

  const auto head_fill = [&](Side& s, const detail::PinnedRecurrence& rec, int J) {
    double prev = 0.0, cur = 1.0, x_last = 1.0;
    double lo = log_omega0;
    for (int n = 0; n < J; ++n) {
      const double wn = std::exp(lo);
      s.sum_x += cur * wn;
      s.sum_y += rec.partner(n, cur) * wn;
      x_last = cur;
      const double next = rec.step(n, cur, prev);
      prev = cur;
      cur = next;
      lo += std::log(weight_ratio(q, fr.tanh_r, n));
    }
    const double yJ = -(4.0 * rec.g * rec.omega / (rec.delta * rec.beta)) * x_last;
    s.sum_y += yJ * std::exp(lo);
    s.streaming = false;
  };

  const auto tail_init = [&](Side& s, const detail::PinnedRecurrence& rec, int J) {
    s.n = J + 1;
    s.carry.prev = 0.0;
    const double pf = (J + qv + 0.25) * (J + qv + 0.75);
    s.carry.cur = -rec.beta * rec.delta / (16.0 * rec.g * rec.omega * pf);
    s.sum_y += std::exp(omega_log_at(J));  // y_J = 1
    s.log_omega = omega_log_at(J + 1);
  };

  if (a_pin) {
    head ? head_fill(a, rec_f, index) : tail_init(a, rec_f, index);
  } else {
    head ? head_fill(b, rec_c, index) : tail_init(b, rec_c, index);
  }

  detail::StopState stop;
  bool stalled = false;
  bool done = false;
  for (int it = 0; it < pol.n_cap; ++it) {
    double tmag = 0.0, pmag = 0.0;
    for (auto* s : {&a, &b}) {
      if (!s->streaming) continue;
      const detail::PinnedRecurrence& rec = (s == &a) ? rec_f : rec_c;
      const double wn = std::exp(s->carry.log_scale + s->log_omega);
      const double tx = s->carry.cur * wn;
      const double ty = rec.partner(s->n, s->carry.cur) * wn;
      s->sum_x += tx;
      s->sum_y += ty;
      tmag = std::max(tmag, std::max(std::abs(tx), std::abs(ty)));
      pmag = std::max(pmag, std::max(std::abs(s->sum_x), std::abs(s->sum_y)));
      s->carry.advance(rec.step(s->n, s->carry.cur, s->carry.prev));
      s->log_omega += std::log(weight_ratio(q, fr.tanh_r, s->n));
      ++s->n;
    }
    if (stop.update(pol, tmag, pmag, &stalled)) {
      done = !stalled;
      break;
    }
  }
  if (!done)
    throw ConvergenceError("exceptional G-function series did not converge",
                           pol.n_cap, stop.tail);
  return a.sum_y * b.sum_y - a.sum_x * b.sum_x;
}

// Roots in g of an exceptional G-function over (lo, hi), with the
// resonance couplings excluded as poles. As in the one-photon module, the
// head-truncated kinds are located on the vanishing coefficient itself.
inline std::vector<double> exceptional_zeros(ExcKind kind, Bargmann q, int index,
                                             ModelParams p, double lo, double hi,
                                             std::optional<RootSearchConfig> cfg_opt = std::nullopt) {
  validate_exceptional(kind, index, p);
  RootSearchConfig cfg = cfg_opt ? *cfg_opt : RootSearchConfig::over(lo, hi, p.omega);
  cfg.lo = lo;
  cfg.hi = hi;
  if (kind == ExcKind::x1A || kind == ExcKind::x1B) {
    const auto constraint = [&](double g) {
      ModelParams pp = p;
      pp.g = g;
      return kind == ExcKind::x1A ? pinned_constraint_f(q, index, pp)
                                  : pinned_constraint_c(q, index, pp);
    };
    return bracket_roots(constraint, cfg, {0.0}).roots;
  }
  std::vector<double> poles = exceptional_pole_couplings(kind, index, p, hi);
  poles.push_back(0.0);
  const auto f = [&](double g) {
    ModelParams pp = p;
    pp.g = g;
    return exceptional_g(kind, q, index, pp);
  };
  return bracket_roots(f, cfg, poles).roots;
}

}  // namespace rabi::two_photon
