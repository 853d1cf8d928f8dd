#pragma once

// Small dense polynomials with Sturm-chain root counting. Used to
// cross-check the grid scans of the degenerate-point solvers: the
// constraint functions reduce to low-degree polynomials whose real-root
// count in an interval can be established independently, which guards
// against close root pairs slipping through a sign scan.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rabi {

// Coefficients ascending: p(x) = c[0] + c[1] x + ...
using Poly = std::vector<long double>;

namespace poly {

inline long double eval(const Poly& p, long double x) {
  long double acc = 0.0L;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * (long double)i);
  if (d.empty()) d.push_back(0.0L);
  return d;
}

inline void trim(Poly& p, long double tol) {
  long double maxc = 0.0L;
  for (long double c : p) maxc = std::max(maxc, std::abs(c));
  while (p.size() > 1 && std::abs(p.back()) <= tol * maxc) p.pop_back();
}

inline void normalize(Poly& p) {
  long double maxc = 0.0L;
  for (long double c : p) maxc = std::max(maxc, std::abs(c));
  if (maxc > 0.0L)
    for (long double& c : p) c /= maxc;
}

// -remainder(a, b), already sign-flipped as the Sturm chain wants.
inline Poly neg_remainder(Poly a, const Poly& b) {
  const std::size_t db = b.size() - 1;
  while (a.size() - 1 >= db && a.size() > 1) {
    const long double q = a.back() / b.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= q * b[i];
    a.pop_back();
  }
  for (long double& c : a) c = -c;
  trim(a, 1e-30L);
  return a;
}

inline std::vector<Poly> sturm_chain(Poly p) {
  trim(p, 0.0L);
  normalize(p);
  std::vector<Poly> chain{p};
  if (p.size() > 1) {
    Poly d = derivative(p);
    normalize(d);
    chain.push_back(d);
    while (chain.back().size() > 1) {
      Poly r = neg_remainder(chain[chain.size() - 2], chain.back());
      if (r.size() == 1 && r[0] == 0.0L) break;
      normalize(r);
      chain.push_back(r);
    }
  }
  return chain;
}

inline int sign_variations(const std::vector<Poly>& chain, long double x) {
  int var = 0;
  int prev = 0;
  for (const Poly& p : chain) {
    const long double v = eval(p, x);
    const int s = v > 0.0L ? 1 : (v < 0.0L ? -1 : 0);
    if (s != 0) {
      if (prev != 0 && s != prev) ++var;
      prev = s;
    }
  }
  return var;
}

// Number of distinct real roots in (a, b].
inline int count_roots(const std::vector<Poly>& chain, long double a, long double b) {
  return sign_variations(chain, a) - sign_variations(chain, b);
}

// Subdivides (a, b] until each piece holds at most one root; returns the
// isolating intervals.
inline void isolate(const std::vector<Poly>& chain, long double a, long double b,
                    std::vector<std::pair<double, double>>& out, int depth = 0) {
  const int n = count_roots(chain, a, b);
  if (n == 0) return;
  if (n == 1 || depth > 80 || (b - a) < 1e-15L * std::max(1.0L, std::abs(b))) {
    out.emplace_back(static_cast<double>(a), static_cast<double>(b));
    return;
  }
  const long double m = 0.5L * (a + b);
  isolate(chain, a, m, out, depth + 1);
  isolate(chain, m, b, out, depth + 1);
}

inline double bisect_root(const Poly& p, double a, double b, double tol) {
  long double fa = eval(p, a);
  long double fb = eval(p, b);
  if (fa == 0.0L) return a;
  if (fb == 0.0L) return b;
  if ((fa < 0.0L) == (fb < 0.0L))
    throw std::runtime_error("poly::bisect_root: endpoints do not bracket");
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const long double fm = eval(p, m);
    if (fm == 0.0L) return m;
    if ((fa < 0.0L) == (fm < 0.0L)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace poly
}  // namespace rabi
