#pragma once

// Test-only reference implementations, kept independent of the library's
// evaluation paths: the symmetric-model G-functions written in the
// conventional one-sided form, and direct factorial/log-gamma weight
// evaluations.

#include <cmath>
#include <vector>

namespace ref {

// Symmetric one-photon model (bias = 0): G_{+-}(E) =
//   sum_n f_n w^n [1 -+ (delta/2)/(n w - g^2/w - E)],  w = g/omega,
// with the three-term recurrence of the displaced frame at zero bias.
inline double sym_qrm_g(double omega, double delta, double g, double E, int sign,
                        int n_terms = 400) {
  const double w = g / omega;
  double prev = 0.0, cur = 1.0;
  double acc = 0.0;
  double wn = 1.0;
  for (int n = 0; n < n_terms; ++n) {
    const double den = n * omega - g * g / omega - E;
    acc += cur * wn * (1.0 - sign * 0.5 * delta / den);
    const double a = n * omega + 3.0 * g * g / omega - E -
                     delta * delta / (4.0 * den);
    const double next = (a * cur / (2.0 * g) - prev) / (n + 1);
    prev = cur;
    cur = next;
    wn *= w;
  }
  return acc;
}

// Symmetric two-photon model: G_{+-}^(q)(E) =
//   sum_m f_m Omega_m [1 -+ (delta/2)/(2 beta (m+q) - omega/2 - E)].
inline double sym_tpqrm_g(double omega, double delta, double g, double qv, double E,
                          int sign, int n_terms = 400) {
  const double beta = omega * std::sqrt(1.0 - 4.0 * g * g / (omega * omega));
  const double r = 0.25 * std::log((1.0 - 2.0 * g / omega) / (1.0 + 2.0 * g / omega));
  const double th = std::tanh(r), ch = std::cosh(r);
  double prev = 0.0, cur = 1.0;
  double log_omega_m = -0.5 * std::log(ch);
  double acc = 0.0;
  for (int m = 0; m < n_terms; ++m) {
    const double den = 2.0 * beta * (m + qv) - 0.5 * omega - E;
    acc += cur * std::exp(log_omega_m) * (1.0 - sign * 0.5 * delta / den);
    const double pf = (m + qv + 0.25) * (m + qv + 0.75);
    const double num = 2.0 * (2.0 * omega * omega - beta * beta) * (m + qv) -
                       beta * (E + 0.5 * omega) - 0.25 * delta * delta * beta / den;
    const double next = num / (8.0 * g * omega * pf) * cur - prev / (4.0 * pf);
    prev = cur;
    cur = next;
    log_omega_m += std::log(-th * (2.0 * m + 2.0 * qv + 1.5) *
                            (2.0 * m + 2.0 * qv + 0.5) / (2.0 * (m + 1.0)));
  }
  return acc;
}

// Direct factorial weight for small m:
//   q = 1/4: (-tanh r)^m (2m)!   / (sqrt(cosh r) 2^m m!)
//   q = 3/4: (-tanh r)^m (2m+1)! / (sqrt(cosh r) 2^m m!)
inline double weight_direct_factorial(double r, bool q34, int m) {
  double fact = 1.0;
  const int top = q34 ? 2 * m + 1 : 2 * m;
  for (int i = 2; i <= top; ++i) fact *= i;
  double mfact = 1.0;
  for (int i = 2; i <= m; ++i) mfact *= i;
  return std::pow(-std::tanh(r), m) * fact /
         (std::sqrt(std::cosh(r)) * std::pow(2.0, m) * mfact);
}

// Same in log space via lgamma, usable for large m.
inline double weight_log_gamma(double r, bool q34, int m) {
  const double t = -std::tanh(r);
  if (m > 0 && t == 0.0) return -std::numeric_limits<double>::infinity();
  return (m > 0 ? m * std::log(t) : 0.0) +
         std::lgamma((q34 ? 2.0 * m + 2.0 : 2.0 * m + 1.0)) - m * std::log(2.0) -
         std::lgamma(m + 1.0) - 0.5 * std::log(std::cosh(r));
}

}  // namespace ref
