#pragma once

// Asymmetric one-photon quantum Rabi model in the displaced-frame
// expansion: coefficient recurrences, the regular G-function, the
// degenerate-crossing solver on overlapped pole lines, terminated
// quasi-exact states, and the non-degenerate exceptional G-functions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rabi/common.hpp"
#include "rabi/polynomial.hpp"
#include "rabi/root_finding.hpp"
#include "rabi/series.hpp"

namespace rabi::one_photon {

inline constexpr double kDefaultPoleMarginFactor = 1e-6;

// Branch sign: +1 for the (f, e) family, -1 for the (c, d) family. The
// two families differ only by the sign with which the bias enters.
enum class Branch { fe = +1, cd = -1 };

namespace detail {

using rabi::detail::ScaledCarry;
using rabi::detail::StopState;

inline double branch_sign(Branch b) { return b == Branch::fe ? 1.0 : -1.0; }

struct Recurrence {
  double omega, delta, epsilon, g, E, s;

  Recurrence(const ModelParams& p, double E, Branch b)
      : omega(p.omega), delta(p.delta), epsilon(p.epsilon), g(p.g), E(E),
        s(branch_sign(b)) {}

  double den(int n) const {
    return n * omega - g * g / omega + s * epsilon / 2.0 - E;
  }
  double drift(int n) const {
    return n * omega + 3.0 * g * g / omega - s * epsilon / 2.0 - E;
  }
  // (n+1) x_{n+1} = (drift(n) - delta^2/(4 den(n))) x_n / (2g) - x_{n-1}
  double step(int n, double x_n, double x_nm1) const {
    const double a = drift(n) - delta * delta / (4.0 * den(n));
    return (a * x_n / (2.0 * g) - x_nm1) / (n + 1);
  }
  double partner(int n, double x_n) const {
    return 0.5 * delta * x_n / den(n);
  }
};

// Recurrence with the pole energy substituted analytically, so the
// denominators are exact integer multiples of omega (no cancellation).
// Pinning to the A-family pole at index J gives
//   den_f(n) = (n-J) w,          drift_f(n) = (n-J) w + 4g^2/w - eps,
//   den_c(n) = (n-J) w - eps,    drift_c(n) = (n-J) w + 4g^2/w,
// and pinning to the B-family pole at J the epsilon shifts move to the
// other side. At eps = (M-N) w the A-pinned forms reduce to the
// overlapped-line constraint recurrences.
struct PinnedRecurrence {
  double omega, delta, epsilon, g;
  int J;
  PoleKind pin;
  double s;  // branch sign

  double den(int n) const {
    const double base = (n - J) * omega;
    if (pin == PoleKind::A) return s > 0 ? base : base - epsilon;
    return s > 0 ? base + epsilon : base;
  }
  double drift(int n) const {
    const double base = (n - J) * omega + 4.0 * g * g / omega;
    if (pin == PoleKind::A) return s > 0 ? base - epsilon : base;
    return s > 0 ? base : base + epsilon;
  }
  double step(int n, double x_n, double x_nm1) const {
    const double a = drift(n) - delta * delta / (4.0 * den(n));
    return (a * x_n / (2.0 * g) - x_nm1) / (n + 1);
  }
  double partner(int n, double x_n) const {
    return 0.5 * delta * x_n / den(n);
  }
};

}  // namespace detail

// Nearest pole line of either family to the energy E, with its distance.
inline std::pair<PoleLine, double> nearest_pole(const ModelParams& p, double E) {
  const double base = -p.g * p.g / p.omega;
  PoleLine best;
  double best_d = std::numeric_limits<double>::infinity();
  for (PoleKind kind : {PoleKind::A, PoleKind::B}) {
    const double sign = kind == PoleKind::A ? 1.0 : -1.0;
    const double offset = base + sign * p.epsilon / 2.0;
    const int m = std::max(0, static_cast<int>(std::lround((E - offset) / p.omega)));
    const double d = std::abs(m * p.omega + offset - E);
    if (d < best_d) {
      best_d = d;
      best = PoleLine{Model::one_photon, kind, m, std::nullopt};
    }
  }
  return {best, best_d};
}

// Coefficient recurrence from x_0 = 1 with the series policy's weighted
// stop rule; weights are (g/omega)^n. An E inside the pole margin of the
// branch's own denominator family yields a table truncated at the
// resonant index and flagged unconverged (the coefficients below the
// resonance stay well defined; continuing would need the exceptional
// builders).
inline CoefficientTable coefficients(const ModelParams& p, double E, Branch branch,
                                     const SeriesPolicy& pol = {},
                                     double pole_margin = -1.0) {
  p.validate();
  if (!(p.g > 0.0)) throw std::domain_error("coefficients: g > 0 required");
  if (pole_margin < 0.0) pole_margin = kDefaultPoleMarginFactor * p.omega;

  const detail::Recurrence rec(p, E, branch);
  const double logw = std::log(p.g / p.omega);
  CoefficientTable out;
  detail::ScaledCarry carry;  // x_{-1} = 0, x_0 = 1
  detail::StopState stop;
  double sum_x = 0.0, sum_y = 0.0;
  bool stalled = false;
  for (int n = 0; n < pol.n_cap; ++n) {
    out.primary.push_back(carry.value_cur());
    out.truncation_n = n;
    if (std::abs(rec.den(n)) < pole_margin) {
      out.converged = false;
      out.tail_estimate = stop.tail;
      return out;
    }
    out.partner.push_back(rec.partner(n, carry.value_cur()));
    const double wn = std::exp(carry.log_scale + n * logw);
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
  }
  out.tail_estimate = stop.tail;
  return out;
}

inline CoefficientTable coeffs_fe(const ModelParams& p, double E,
                                  const SeriesPolicy& pol = {}) {
  return coefficients(p, E, Branch::fe, pol);
}
inline CoefficientTable coeffs_cd(const ModelParams& p, double E,
                                  const SeriesPolicy& pol = {}) {
  return coefficients(p, E, Branch::cd, pol);
}

// Regular G-function of the asymmetric model; its zeros over E are the
// regular spectrum. E must stay outside the pole margins of both
// families.
inline double g_function(const ModelParams& p, double E,
                         const SeriesPolicy& pol = {},
                         double pole_margin = -1.0) {
  p.validate();
  if (!(p.g > 0.0)) throw std::domain_error("g_function: g > 0 required");
  if (pole_margin < 0.0) pole_margin = kDefaultPoleMarginFactor * p.omega;
  const auto [line, dist] = nearest_pole(p, E);
  if (dist < pole_margin) throw PoleProximityError(line, pole_energy(line, p), E);

  const detail::Recurrence rf(p, E, Branch::fe);
  const detail::Recurrence rc(p, E, Branch::cd);
  const double logw = std::log(p.g / p.omega);
  detail::ScaledCarry f, c;
  detail::StopState stop;
  double sum_f = 0.0, sum_e = 0.0, sum_c = 0.0, sum_d = 0.0;
  bool stalled = false;
  bool done = false;
  for (int n = 0; n < pol.n_cap; ++n) {
    const double wf = std::exp(f.log_scale + n * logw);
    const double wc = std::exp(c.log_scale + n * logw);
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
  }
  if (!done)
    throw ConvergenceError("one-photon G-function series did not converge",
                           pol.n_cap, stop.tail);
  return sum_e * sum_d - sum_f * sum_c;
}

// --- overlapped-pole-line constraints -------------------------------------

// f_N evaluated with the overlapped pole energy (M+N) w/2 - g^2/w and
// eps = (M-N) w substituted. Finite for all g > 0.
inline double pole_constraint_f(int N, int M, double delta, double omega, double g) {
  if (N < 1 || M <= N)
    throw std::domain_error("pole_constraint_f: need 1 <= N < M (N = 0 belongs to the exceptional builders)");
  if (!(g > 0.0) || !(omega > 0.0))
    throw std::domain_error("pole_constraint_f: need g > 0, omega > 0");
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < N; ++n) {
    const double a = 4.0 * g * g / omega + (n - M) * omega -
                     delta * delta / (4.0 * omega * (n - N));
    const double next = (a * cur / (2.0 * g) - prev) / (n + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

// c_M with the same substitution (roles of N and M exchanged).
inline double pole_constraint_c(int N, int M, double delta, double omega, double g) {
  if (N < 1 || M <= N)
    throw std::domain_error("pole_constraint_c: need 1 <= N < M");
  if (!(g > 0.0) || !(omega > 0.0))
    throw std::domain_error("pole_constraint_c: need g > 0, omega > 0");
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < M; ++n) {
    const double a = 4.0 * g * g / omega + (n - N) * omega -
                     delta * delta / (4.0 * omega * (n - M));
    const double next = (a * cur / (2.0 * g) - prev) / (n + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

// f_N (2g)^N is a degree-N polynomial in x = 4 g^2/omega^2; its positive
// roots are exactly the constraint roots. Coefficients ascending.
inline Poly constraint_polynomial(int N, int M, double delta, double omega) {
  const long double dt2 = (long double)(delta / omega) * (delta / omega);
  Poly prev{0.0L}, cur{1.0L};
  for (int n = 0; n < N; ++n) {
    // F_{n+1} = [ (x + (n-M) - dt2/(4(n-N))) F_n - x F_{n-1} ] / (n+1)
    Poly next(cur.size() + 1, 0.0L);
    const long double c0 = (long double)(n - M) - dt2 / (4.0L * (n - N));
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i] += c0 * cur[i];
      next[i + 1] += cur[i];
    }
    for (std::size_t i = 0; i < prev.size(); ++i) next[i + 1] -= prev[i];
    for (long double& c : next) c /= (n + 1);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Closed forms for the low-order constraints (N = 1 for any M, and the
// N = 2 radical); ascending g.
inline std::vector<double> closed_form_roots(int N, int M, double delta, double omega) {
  if (M <= N) throw std::domain_error("closed_form_roots: need M > N");
  const double dt = delta / omega;
  std::vector<double> xs;
  if (N == 1) {
    xs.push_back(M - 0.25 * dt * dt);
  } else if (N == 2) {
    const double mid = M - 3.0 * dt * dt / 16.0;
    const double rad = std::sqrt(std::pow(dt * dt / 16.0 - 1.0, 2) + (M - 1));
    xs.push_back(mid - rad);
    xs.push_back(mid + rad);
  } else {
    throw std::domain_error("closed_form_roots: closed forms cover N = 1, 2 only");
  }
  std::vector<double> out;
  for (double x : xs)
    if (x > 0.0) out.push_back(0.5 * omega * std::sqrt(x));
  std::sort(out.begin(), out.end());
  return out;
}

struct DegeneratePoint1p {
  int N = 0;
  int M = 0;
  double g = 0.0;
  double epsilon = 0.0;  // (M-N) omega
  double energy = 0.0;   // (M+N) omega/2 - g^2/omega
  double residual_f = 0.0;
  double residual_c = 0.0;
};

// Doubly degenerate crossings on the overlapped (N, M) pole line: roots of
// the f-constraint over g, cross-validated against the c-constraint, with
// a Sturm-chain count on the equivalent polynomial guarding against close
// root pairs, and the closed forms checked where available.
inline std::vector<DegeneratePoint1p> find_degenerate(
    int N, int M, double delta, double omega,
    std::optional<RootSearchConfig> cfg_opt = std::nullopt) {
  if (N < 1 || M <= N)
    throw std::domain_error("find_degenerate: need 1 <= N < M");
  RootSearchConfig cfg = cfg_opt ? *cfg_opt
                                 : RootSearchConfig::over(
                                       0.0, std::max(2.0, std::sqrt((double)M)) * omega, omega);
  if (!cfg_opt) cfg.abs_tol = 1e-13 * omega;

  const auto f = [&](double g) { return pole_constraint_f(N, M, delta, omega, g); };
  const auto c = [&](double g) { return pole_constraint_c(N, M, delta, omega, g); };

  // Grid scan with an independent Sturm-chain count on the polynomial
  // form; isolating intervals recover any close pair the sign scan missed.
  const auto guarded_scan = [&](const std::function<double(double)>& fn,
                                const Poly& pol) {
    std::vector<double> roots = bracket_roots(fn, cfg, {0.0}).roots;
    const auto chain = poly::sturm_chain(pol);
    const double x_lo = std::pow(2.0 * (cfg.lo + cfg.pole_margin) / omega, 2);
    const double x_hi = std::pow(2.0 * cfg.hi / omega, 2);
    if ((int)roots.size() != poly::count_roots(chain, x_lo, x_hi)) {
      std::vector<std::pair<double, double>> iso;
      poly::isolate(chain, x_lo, x_hi, iso);
      for (const auto& [xa, xb] : iso) {
        bool covered = false;
        for (double r : roots) {
          const double x = 4.0 * r * r / (omega * omega);
          if (x >= xa && x <= xb) covered = true;
        }
        if (!covered) {
          const double x = poly::bisect_root(pol, xa, xb, 1e-15 * std::max(1.0, xb));
          roots.push_back(0.5 * omega * std::sqrt(x));
        }
      }
      std::sort(roots.begin(), roots.end());
    }
    return roots;
  };

  // the c-constraint polynomial is the f one with the roles exchanged
  std::vector<double> roots = guarded_scan(f, constraint_polynomial(N, M, delta, omega));
  const std::vector<double> c_roots =
      guarded_scan(c, constraint_polynomial(M, N, delta, omega));
  if ((int)roots.size() > N)
    throw InconsistencyError("find_degenerate: more roots than the polynomial degree allows",
                             0.0, 0.0);
  std::vector<DegeneratePoint1p> out;
  for (double r : roots) {
    DegeneratePoint1p pt;
    pt.N = N;
    pt.M = M;
    pt.g = r;
    pt.epsilon = (M - N) * omega;
    pt.energy = 0.5 * (M + N) * omega - r * r / omega;
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

  if (N <= 2) {
    const auto closed = closed_form_roots(N, M, delta, omega);
    if (closed.size() != out.size())
      throw InconsistencyError("find_degenerate: closed-form root count differs",
                               (double)out.size(), (double)closed.size());
    for (std::size_t i = 0; i < closed.size(); ++i)
      if (std::abs(closed[i] - out[i].g) > 1e-8 * omega)
        throw InconsistencyError("find_degenerate: root deviates from closed form",
                                 out[i].g, closed[i]);
  }
  return out;
}

// The two terminated quasi-exact states at a degenerate point. State A
// terminates at index N with e_N = -(4g/delta) f_{N-1}; state B at M with
// d_M = -(4g/delta) c_{M-1}.
inline std::pair<TerminatedState, TerminatedState> degenerate_states(
    const DegeneratePoint1p& pt, const ModelParams& params) {
  const double omega = params.omega, delta = params.delta, g = pt.g;
  if (!(delta > 0.0)) throw std::domain_error("degenerate_states: delta > 0 required");

  std::vector<double> fs{1.0};
  {
    double prev = 0.0, cur = 1.0;
    for (int n = 0; n + 1 < pt.N; ++n) {
      const double a = 4.0 * g * g / omega + (n - pt.M) * omega -
                       delta * delta / (4.0 * omega * (n - pt.N));
      const double next = (a * cur / (2.0 * g) - prev) / (n + 1);
      prev = cur;
      cur = next;
      fs.push_back(cur);
    }
  }
  std::vector<double> es;
  for (int n = 0; n < pt.N; ++n)
    es.push_back(0.5 * delta * fs[n] / ((n - pt.N) * omega));
  es.push_back(-(4.0 * g / delta) * fs[pt.N - 1]);

  std::vector<double> cs{1.0};
  {
    double prev = 0.0, cur = 1.0;
    for (int n = 0; n + 1 < pt.M; ++n) {
      const double a = 4.0 * g * g / omega + (n - pt.N) * omega -
                       delta * delta / (4.0 * omega * (n - pt.M));
      const double next = (a * cur / (2.0 * g) - prev) / (n + 1);
      prev = cur;
      cur = next;
      cs.push_back(cur);
    }
  }
  std::vector<double> ds;
  for (int n = 0; n < pt.M; ++n)
    ds.push_back(0.5 * delta * cs[n] / ((n - pt.M) * omega));
  ds.push_back(-(4.0 * g / delta) * cs[pt.M - 1]);

  const auto amp = [](int n) { return std::exp(0.5 * std::lgamma(n + 1.0)); };

  TerminatedState a;
  a.model = Model::one_photon;
  a.frame = PoleKind::A;
  a.frame_parameter = -g / omega;
  a.energy = pt.energy;
  for (int n = 0; n <= pt.N; ++n) a.upper.push_back(amp(n) * es[n]);
  for (int n = 0; n < pt.N; ++n) a.lower.push_back(amp(n) * fs[n]);

  TerminatedState b;
  b.model = Model::one_photon;
  b.frame = PoleKind::B;
  b.frame_parameter = g / omega;
  b.energy = pt.energy;
  const auto alt = [](int n) { return n % 2 == 0 ? 1.0 : -1.0; };
  for (int n = 0; n < pt.M; ++n) b.upper.push_back(alt(n) * amp(n) * cs[n]);
  for (int n = 0; n <= pt.M; ++n) b.lower.push_back(alt(n) * amp(n) * ds[n]);
  return {a, b};
}

// f_N evaluated with the energy pinned to the N-th type-A pole and the
// bias left free (the fixed-bias analogue of pole_constraint_f); its
// roots over g locate single levels crossing that pole line.
inline double pinned_constraint_f(int N, const ModelParams& p) {
  if (N < 1) throw std::domain_error("pinned_constraint_f: N >= 1 required");
  if (!(p.g > 0.0)) throw std::domain_error("pinned_constraint_f: g > 0 required");
  detail::PinnedRecurrence rec{p.omega, p.delta, p.epsilon, p.g, N, PoleKind::A, +1.0};
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < N; ++n) {
    const double next = rec.step(n, cur, prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

// c_M at the M-th type-B pole, bias free.
inline double pinned_constraint_c(int M, const ModelParams& p) {
  if (M < 1) throw std::domain_error("pinned_constraint_c: M >= 1 required");
  if (!(p.g > 0.0)) throw std::domain_error("pinned_constraint_c: g > 0 required");
  detail::PinnedRecurrence rec{p.omega, p.delta, p.epsilon, p.g, M, PoleKind::B, -1.0};
  double prev = 0.0, cur = 1.0;
  for (int n = 0; n < M; ++n) {
    const double next = rec.step(n, cur, prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

// --- non-degenerate exceptional G-functions --------------------------------

// Kind x1A truncates the f-series head at the pinned N-th type-A pole (its
// zeros coincide with f_N = 0); x2A resets the head (e_N = 1, lower
// coefficients zero) and keeps the tail. x1B/x2B mirror these on the
// B-family, and `merged` applies the tail reset on both sides of an
// overlapped pole line (integer epsilon/omega).
enum class ExcKind { x1A, x2A, x1B, x2B, merged };

inline std::string to_string(ExcKind k) {
  switch (k) {
    case ExcKind::x1A: return "1A";
    case ExcKind::x2A: return "2A";
    case ExcKind::x1B: return "1B";
    case ExcKind::x2B: return "2B";
    default: return "merged";
  }
}

namespace detail {

struct SideSums {
  double sum_x = 0.0;  // f or c weighted sum
  double sum_y = 0.0;  // e or d weighted sum
};

// Head-truncated side: x_0 .. x_{J-1} by the pinned recurrence, partner
// from the linear relation, y_J = -(4g/delta) x_{J-1}.
inline SideSums head_side(const PinnedRecurrence& rec, int J, double logw) {
  SideSums s;
  double prev = 0.0, cur = 1.0;
  double x_jm1 = 0.0;
  for (int n = 0; n < J; ++n) {
    const double wn = std::exp(n * logw);
    s.sum_x += cur * wn;
    s.sum_y += rec.partner(n, cur) * wn;
    if (n == J - 1) x_jm1 = cur;
    const double next = rec.step(n, cur, prev);
    prev = cur;
    cur = next;
  }
  s.sum_y += -(4.0 * rec.g / rec.delta) * x_jm1 * std::exp(J * logw);
  return s;
}

}  // namespace detail

// Validates a kind/index/bias combination. The ordinary-series side of a
// pinned evaluation carries denominators (n - J) omega -/+ epsilon, so an
// integer epsilon/omega that makes one of them vanish is rejected (the
// merged builder covers the overlapped-line case).
inline void validate_exceptional(ExcKind kind, int index, const ModelParams& p) {
  p.validate();
  if (!(p.delta > 0.0)) throw std::domain_error("exceptional_g: delta > 0 required");
  if (!(p.epsilon >= 0.0))
    throw std::domain_error("exceptional_g: canonicalize to epsilon >= 0 first");
  const long k = std::lround(p.epsilon / p.omega);
  const bool integer_eps = std::abs(p.epsilon / p.omega - k) < 1e-9;
  switch (kind) {
    case ExcKind::x1A:
      if (index < 1) throw std::domain_error("exceptional_g: kind 1A needs N >= 1");
      break;
    case ExcKind::x2A:
      if (index < 0) throw std::domain_error("exceptional_g: kind 2A needs N >= 0");
      break;
    case ExcKind::x1B:
      if (index < 1) throw std::domain_error("exceptional_g: kind 1B needs M >= 1");
      break;
    case ExcKind::x2B:
      if (index < 0) throw std::domain_error("exceptional_g: kind 2B needs M >= 0");
      break;
    case ExcKind::merged:
      if (!integer_eps || k < 1)
        throw std::domain_error(
            "exceptional_g: merged kind needs epsilon = (M-N) omega with integer M-N >= 1");
      if (index < 0) throw std::domain_error("exceptional_g: merged kind needs N >= 0");
      return;
  }
  const bool a_pin = kind == ExcKind::x1A || kind == ExcKind::x2A;
  if (integer_eps && (a_pin || k <= index))
    throw std::domain_error(
        "exceptional_g: integer epsilon/omega makes the opposite family resonant; "
        "use the merged kind");
}

// Evaluates the requested exceptional G-function at coupling p.g with the
// energy pinned to the pole line the kind refers to. Zeros over g are the
// non-degenerate exceptional points.
inline double exceptional_g(ExcKind kind, int index, const ModelParams& p,
                            const SeriesPolicy& pol = {}) {
  validate_exceptional(kind, index, p);
  if (!(p.g > 0.0)) throw std::domain_error("exceptional_g: g > 0 required");
  const double omega = p.omega;

  int J_a = -1, J_b = -1;  // head/tail indices per side; -1 = ordinary series
  bool tail_a = false, tail_b = false;
  PoleKind pin = PoleKind::A;
  int pin_index = index;
  switch (kind) {
    case ExcKind::x1A:
      J_a = index;
      break;
    case ExcKind::x2A:
      J_a = index;
      tail_a = true;
      break;
    case ExcKind::x1B:
      pin = PoleKind::B;
      J_b = index;
      break;
    case ExcKind::x2B:
      pin = PoleKind::B;
      J_b = index;
      tail_b = true;
      break;
    case ExcKind::merged: {
      J_a = index;
      J_b = index + static_cast<int>(std::lround(p.epsilon / omega));
      tail_a = tail_b = true;
      break;
    }
  }

  const double logw = std::log(p.g / omega);
  detail::PinnedRecurrence rec_f{omega, p.delta, p.epsilon, p.g, pin_index, pin, +1.0};
  detail::PinnedRecurrence rec_c{omega, p.delta, p.epsilon, p.g, pin_index, pin, -1.0};

  detail::SideSums a, b;
  // finite sides first
  if (J_a >= 0 && !tail_a) a = detail::head_side(rec_f, J_a, logw);
  if (J_b >= 0 && !tail_b) b = detail::head_side(rec_c, J_b, logw);

  // streaming sides (ordinary or tail-reset), advanced together under one
  // stop rule
  struct Stream {
    bool active = false;
    detail::PinnedRecurrence* rec = nullptr;
    detail::SideSums* sums = nullptr;
    detail::ScaledCarry carry;
    int n = 0;       // index of carry.cur
    int reset = -1;  // tail start J, or -1 for ordinary
  };
  Stream sa, sb;
  sa.rec = &rec_f;
  sa.sums = &a;
  sb.rec = &rec_c;
  sb.sums = &b;
  if (J_a < 0) {
    sa.active = true;  // ordinary from x_0 = 1
  } else if (tail_a) {
    sa.active = true;
    sa.reset = J_a;
    sa.n = J_a + 1;
    sa.carry.prev = 0.0;
    sa.carry.cur = -p.delta / (4.0 * p.g * (J_a + 1));
    a.sum_y += 1.0 * std::exp(J_a * logw);  // y_J = 1
  }
  if (J_b < 0) {
    sb.active = true;
  } else if (tail_b) {
    sb.active = true;
    sb.reset = J_b;
    sb.n = J_b + 1;
    sb.carry.prev = 0.0;
    sb.carry.cur = -p.delta / (4.0 * p.g * (J_b + 1));
    b.sum_y += 1.0 * std::exp(J_b * logw);
  }

  detail::StopState stop;
  bool stalled = false;
  bool done = false;
  for (int it = 0; it < pol.n_cap; ++it) {
    double tmag = 0.0, pmag = 0.0;
    for (Stream* s : {&sa, &sb}) {
      if (!s->active) continue;
      const double wn = std::exp(s->carry.log_scale + s->n * logw);
      const double tx = s->carry.cur * wn;
      const double ty = s->rec->partner(s->n, s->carry.cur) * wn;
      s->sums->sum_x += tx;
      s->sums->sum_y += ty;
      tmag = std::max(tmag, std::max(std::abs(tx), std::abs(ty)));
      pmag = std::max(pmag, std::max(std::abs(s->sums->sum_x), std::abs(s->sums->sum_y)));
      s->carry.advance(s->rec->step(s->n, s->carry.cur, s->carry.prev));
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

// Roots in g of an exceptional G-function over (lo, hi). The
// head-truncated kinds factor through the vanishing coefficient (the
// truncated expansion is consistent only where f_N resp. c_M vanishes;
// other sign changes of the product expression carry no state, which the
// oracle confirms), so their zeros are located on the pinned constraint
// and cross-checked against the G-function value.
inline std::vector<double> exceptional_zeros(ExcKind kind, int index,
                                             ModelParams p, double lo, double hi,
                                             std::optional<RootSearchConfig> cfg_opt = std::nullopt) {
  validate_exceptional(kind, index, p);
  RootSearchConfig cfg = cfg_opt ? *cfg_opt : RootSearchConfig::over(lo, hi, p.omega);
  cfg.lo = lo;
  cfg.hi = hi;
  if (kind == ExcKind::x1A || kind == ExcKind::x1B) {
    const auto constraint = [&](double g) {
      ModelParams q = p;
      q.g = g;
      return kind == ExcKind::x1A ? pinned_constraint_f(index, q)
                                  : pinned_constraint_c(index, q);
    };
    return bracket_roots(constraint, cfg, {0.0}).roots;
  }
  const auto f = [&](double g) {
    ModelParams q = p;
    q.g = g;
    return exceptional_g(kind, index, q);
  };
  return bracket_roots(f, cfg, {0.0}).roots;
}

}  // namespace rabi::one_photon
