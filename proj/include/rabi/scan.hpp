#pragma once

// Spectrum tracing over coupling sweeps and exhaustive crossing
// enumeration across (N, M) pairs.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rabi/common.hpp"
#include "rabi/one_photon.hpp"
#include "rabi/parallel.hpp"
#include "rabi/root_finding.hpp"
#include "rabi/two_photon.hpp"

namespace rabi::scan {

// Bias rule of a sweep: a fixed epsilon, or epsilon = k beta(g) re-evaluated
// at every grid point.
struct EpsilonRule {
  bool scaled = false;
  double value = 0.0;  // epsilon when fixed, k when scaled

  double at(const ModelParams& p) const {
    return scaled ? value * renormalized_frequency(p) : value;
  }
};

struct TraceConfig {
  Model model = Model::one_photon;
  std::optional<Bargmann> q{};
  double omega = 1.0;
  double delta = 0.0;
  EpsilonRule bias{};
  double g_lo = 0.0;
  double g_hi = 1.0;
  double g_step = 0.01;
  std::optional<std::pair<double, double>> e_window{};
  int grid_per_unit = 2000;
  double abs_tol = 1e-10;
  double pole_margin = 1e-6;
  bool annotate_special = true;

  std::pair<double, double> window_for(const ModelParams& p) const {
    if (e_window) return *e_window;
    if (model == Model::one_photon)
      return {-p.g * p.g / p.omega - p.epsilon / 2.0 - p.omega, 6.0 * p.omega};
    return {-p.omega, 6.0 * p.omega};
  }
};

struct SpecialPoint {
  bool degenerate = false;
  std::string kind;  // "degenerate", "merged", "1A", "2B", ...
  int n = -1;        // type-A index (or -1)
  int m = -1;        // type-B index (or -1)
  double g = 0.0;
  double epsilon = 0.0;
  double energy = 0.0;
};

struct SpectrumRecord {
  double g = 0.0;
  double epsilon = 0.0;
  std::vector<double> energies;  // ascending regular G-zeros in the window
  std::vector<SpecialPoint> special;
  std::vector<std::pair<double, double>> unresolved;  // gap annotations
};

namespace detail {

inline std::vector<double> poles_in_window(const TraceConfig& cfg,
                                           const ModelParams& p, double lo,
                                           double hi) {
  std::vector<double> poles;
  for (PoleKind kind : {PoleKind::A, PoleKind::B}) {
    for (int m = 0;; ++m) {
      PoleLine line{cfg.model, kind, m, cfg.q};
      const double e = pole_energy(line, p);
      if (e > hi + 1.0) break;
      if (e >= lo - 1.0) poles.push_back(e);
      if (m > 10000) break;
    }
  }
  std::sort(poles.begin(), poles.end());
  return poles;
}

inline std::vector<double> g_grid(const TraceConfig& cfg) {
  std::vector<double> gs;
  for (double g = cfg.g_lo; g <= cfg.g_hi + 1e-12 * cfg.omega; g += cfg.g_step)
    gs.push_back(g);
  return gs;
}

}  // namespace detail

// Special points of the sweep, computed once from the solvers and later
// attached to the nearest grid record.
inline std::vector<SpecialPoint> special_points(const TraceConfig& cfg) {
  std::vector<SpecialPoint> out;
  const double omega = cfg.omega;
  ModelParams probe{omega, cfg.delta, 0.0, std::max(cfg.g_lo, 1e-3 * omega)};
  probe.epsilon = cfg.bias.at(probe);
  const auto [win_lo, win_hi] = cfg.window_for(probe);

  if (cfg.model == Model::one_photon) {
    if (cfg.bias.scaled)
      throw std::domain_error("special_points: scaled bias applies to the two-photon sweep");
    const double eps = cfg.bias.value;
    const long k = std::lround(eps / omega);
    const bool integer_eps = std::abs(eps / omega - k) < 1e-9;
    const int n_cap = std::max(
        0, static_cast<int>(std::floor((win_hi - eps / 2.0 + cfg.g_hi * cfg.g_hi / omega) / omega)));
    ModelParams base{omega, cfg.delta, eps, 1e-3 * omega};
    if (integer_eps && k >= 1) {
      for (int N = 1; N <= n_cap; ++N) {
        for (const auto& pt :
             one_photon::find_degenerate(N, N + static_cast<int>(k), cfg.delta, omega)) {
          if (pt.g < cfg.g_lo || pt.g > cfg.g_hi) continue;
          out.push_back({true, "degenerate", pt.N, pt.M, pt.g, pt.epsilon, pt.energy});
        }
      }
      for (int N = 0; N <= n_cap; ++N) {
        for (double z : one_photon::exceptional_zeros(one_photon::ExcKind::merged, N,
                                                      base, cfg.g_lo, cfg.g_hi)) {
          ModelParams p = base;
          p.g = z;
          out.push_back({false, "merged", N, N + static_cast<int>(k), z, eps,
                         pole_energy({cfg.model, PoleKind::A, N}, p)});
        }
      }
      for (int M = 0; M < k; ++M) {
        for (double z : one_photon::exceptional_zeros(one_photon::ExcKind::x2B, M,
                                                      base, cfg.g_lo, cfg.g_hi)) {
          ModelParams p = base;
          p.g = z;
          out.push_back({false, "2B", -1, M, z, eps,
                         pole_energy({cfg.model, PoleKind::B, M}, p)});
        }
      }
    } else {
      for (int N = 0; N <= n_cap; ++N) {
        for (one_photon::ExcKind kind : {one_photon::ExcKind::x1A, one_photon::ExcKind::x2A}) {
          if (kind == one_photon::ExcKind::x1A && N < 1) continue;
          for (double z : one_photon::exceptional_zeros(kind, N, base, cfg.g_lo, cfg.g_hi)) {
            ModelParams p = base;
            p.g = z;
            out.push_back({false, one_photon::to_string(kind), N, -1, z, eps,
                           pole_energy({cfg.model, PoleKind::A, N}, p)});
          }
        }
        for (one_photon::ExcKind kind : {one_photon::ExcKind::x1B, one_photon::ExcKind::x2B}) {
          if (kind == one_photon::ExcKind::x1B && N < 1) continue;
          for (double z : one_photon::exceptional_zeros(kind, N, base, cfg.g_lo, cfg.g_hi)) {
            ModelParams p = base;
            p.g = z;
            out.push_back({false, one_photon::to_string(kind), -1, N, z, eps,
                           pole_energy({cfg.model, PoleKind::B, N}, p)});
          }
        }
      }
    }
  } else {
    const Bargmann q = cfg.q.value_or(Bargmann::q14);
    const double g_hi = std::min(cfg.g_hi, two_photon::collapse_scan_limit(omega));
    const double beta_max = omega;  // at g -> 0
    const int m_cap = std::max(
        0, static_cast<int>(std::floor((win_hi + omega) / (2.0 * renormalized_frequency(
            ModelParams{omega, cfg.delta, 0.0, std::min(g_hi, 0.49 * omega)})))));
    (void)beta_max;
    if (cfg.bias.scaled) {
      const double k = cfg.bias.value;
      const long k_int = std::lround(k);
      const bool even_k = std::abs(k - k_int) < 1e-9 && k_int % 2 == 0 && k_int >= 2;
      if (even_k) {
        for (int N = 1; N <= m_cap; ++N) {
          const int M = N + static_cast<int>(k_int / 2);
          for (const auto& pt : two_photon::find_degenerate(q, N, M, cfg.delta, omega)) {
            if (pt.g < cfg.g_lo || pt.g > g_hi) continue;
            out.push_back({true, "degenerate", pt.N, pt.M, pt.g, pt.epsilon, pt.energy});
          }
        }
      } else {
        // non-even scale: only non-degenerate exceptional points
        for (int idx = 0; idx <= m_cap; ++idx) {
          for (two_photon::ExcKind kind :
               {two_photon::ExcKind::x1A, two_photon::ExcKind::x2A,
                two_photon::ExcKind::x1B, two_photon::ExcKind::x2B}) {
            const bool head = kind == two_photon::ExcKind::x1A || kind == two_photon::ExcKind::x1B;
            if (head && idx < 1) continue;
            const bool a_pin = kind == two_photon::ExcKind::x1A || kind == two_photon::ExcKind::x2A;
            RootSearchConfig rc = RootSearchConfig::over(std::max(cfg.g_lo, 1e-4), g_hi, omega);
            const auto fn = [&](double g) {
              ModelParams p{omega, cfg.delta, 0.0, g};
              p.epsilon = cfg.bias.at(p);
              return head ? (a_pin ? two_photon::pinned_constraint_f(q, idx, p)
                                   : two_photon::pinned_constraint_c(q, idx, p))
                          : two_photon::exceptional_g(kind, q, idx, p);
            };
            for (double z : bracket_roots(fn, rc, {0.0}).roots) {
              ModelParams p{omega, cfg.delta, 0.0, z};
              p.epsilon = cfg.bias.at(p);
              const PoleKind pk = a_pin ? PoleKind::A : PoleKind::B;
              out.push_back({false, two_photon::to_string(kind), a_pin ? idx : -1,
                             a_pin ? -1 : idx, z, p.epsilon,
                             pole_energy({cfg.model, pk, idx, q}, p)});
            }
          }
        }
      }
    } else {
      ModelParams base{omega, cfg.delta, cfg.bias.value, 1e-3 * omega};
      for (int idx = 0; idx <= m_cap; ++idx) {
        for (two_photon::ExcKind kind :
             {two_photon::ExcKind::x1A, two_photon::ExcKind::x2A,
              two_photon::ExcKind::x1B, two_photon::ExcKind::x2B}) {
          const bool head = kind == two_photon::ExcKind::x1A || kind == two_photon::ExcKind::x1B;
          if (head && idx < 1) continue;
          const bool a_pin = kind == two_photon::ExcKind::x1A || kind == two_photon::ExcKind::x2A;
          for (double z : two_photon::exceptional_zeros(kind, q, idx, base,
                                                        cfg.g_lo, g_hi)) {
            ModelParams p = base;
            p.g = z;
            const PoleKind pk = a_pin ? PoleKind::A : PoleKind::B;
            out.push_back({false, two_photon::to_string(kind), a_pin ? idx : -1,
                           a_pin ? -1 : idx, z, p.epsilon,
                           pole_energy({cfg.model, pk, idx, q}, p)});
          }
        }
      }
    }
  }

  // keep points inside the energy window, ordered canonically
  std::vector<SpecialPoint> kept;
  for (const auto& sp : out)
    if (sp.energy >= win_lo && sp.energy <= win_hi) kept.push_back(sp);
  std::sort(kept.begin(), kept.end(), [](const SpecialPoint& a, const SpecialPoint& b) {
    if (a.g != b.g) return a.g < b.g;
    if (a.n != b.n) return a.n < b.n;
    return a.m < b.m;
  });
  return kept;
}

// Regular G-zeros of one parameter point over (lo, hi), with the pole
// lines of both families excluded from the scan.
inline RootScan regular_zeros(Model model, std::optional<Bargmann> q,
                              const ModelParams& p, double lo, double hi,
                              int grid_per_unit = 2000, double abs_tol = 1e-10,
                              double pole_margin = 1e-6) {
  TraceConfig probe;
  probe.model = model;
  probe.q = q;
  RootSearchConfig rc;
  rc.lo = lo;
  rc.hi = hi;
  rc.grid_points =
      std::max(2, static_cast<int>(std::ceil(grid_per_unit * (hi - lo) / p.omega)));
  rc.abs_tol = abs_tol * p.omega;
  rc.pole_margin = pole_margin * p.omega;
  const auto poles = detail::poles_in_window(probe, p, lo, hi);
  const auto eval = [&](double E) {
    return model == Model::one_photon
               ? one_photon::g_function(p, E)
               : two_photon::g_function(q.value_or(Bargmann::q14), p, E);
  };
  return bracket_roots(eval, rc, poles);
}

// Per grid point: pole energies in the window, segmented bracketing of the
// regular G-zeros, and gap annotations for unconverged evaluations.
inline std::vector<SpectrumRecord> trace(const TraceConfig& cfg) {
  const std::vector<double> gs = detail::g_grid(cfg);
  std::vector<SpectrumRecord> records(gs.size());

  parallel_for(gs.size(), [&](std::size_t i) {
    SpectrumRecord rec;
    rec.g = gs[i];
    ModelParams p{cfg.omega, cfg.delta, 0.0, rec.g};
    if (cfg.model == Model::two_photon &&
        rec.g > two_photon::collapse_scan_limit(cfg.omega)) {
      rec.epsilon = std::numeric_limits<double>::quiet_NaN();
      records[i] = std::move(rec);  // collapse exclusion zone: out of domain
      return;
    }
    p.epsilon = cfg.bias.at(p);
    rec.epsilon = p.epsilon;
    const auto [lo, hi] = cfg.window_for(p);
    if (p.g > 0.0) {
      const RootScan scan = regular_zeros(cfg.model, cfg.q, p, lo, hi,
                                          cfg.grid_per_unit, cfg.abs_tol,
                                          cfg.pole_margin);
      rec.energies = scan.roots;
      rec.unresolved = scan.unresolved;
    }
    records[i] = std::move(rec);
  });

  if (cfg.annotate_special) {
    const auto specials = special_points(cfg);
    for (const auto& sp : specials) {
      // attach to the nearest grid point
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < gs.size(); ++i) {
        const double d = std::abs(gs[i] - sp.g);
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      if (bd <= cfg.g_step) records[best].special.push_back(sp);
    }
  }
  return records;
}

// Level connectivity for plotting: nearest-energy matching between
// adjacent grid points, with a maximum jump of three times the local
// level spacing; ambiguous matches start fresh curves.
inline std::vector<std::vector<int>> assign_curve_ids(
    const std::vector<SpectrumRecord>& records) {
  std::vector<std::vector<int>> ids(records.size());
  int next_id = 0;
  std::vector<int> prev_ids;
  std::vector<double> prev_e;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& es = records[i].energies;
    std::vector<int> cur(es.size(), -1);
    if (!prev_e.empty() && !es.empty()) {
      for (std::size_t j = 0; j < es.size(); ++j) {
        // local spacing from this record's neighbors
        double spacing = std::numeric_limits<double>::infinity();
        if (j > 0) spacing = std::min(spacing, es[j] - es[j - 1]);
        if (j + 1 < es.size()) spacing = std::min(spacing, es[j + 1] - es[j]);
        std::size_t bk = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < prev_e.size(); ++k) {
          const double d = std::abs(prev_e[k] - es[j]);
          if (d < bd) {
            bd = d;
            bk = k;
          }
        }
        if (bd <= 3.0 * spacing) cur[j] = prev_ids[bk];
      }
      // a previous curve claimed twice is ambiguous: detach both
      for (std::size_t j = 0; j < cur.size(); ++j) {
        for (std::size_t l = j + 1; l < cur.size(); ++l) {
          if (cur[j] >= 0 && cur[j] == cur[l]) cur[j] = cur[l] = -1;
        }
      }
    }
    for (auto& id : cur)
      if (id < 0) id = next_id++;
    ids[i] = cur;
    prev_ids = cur;
    prev_e = es;
  }
  return ids;
}

struct CrossingCensus {
  Model model = Model::one_photon;
  std::optional<Bargmann> q{};
  double delta = 0.0;
  double omega = 1.0;
  std::pair<int, int> n_range{1, 1};
  std::pair<int, int> m_range{2, 2};

  struct Point {
    int N, M;
    double g, epsilon, energy, residual_f, residual_c;
  };
  std::vector<Point> points;  // sorted by (N, M, g)
  std::vector<std::pair<std::pair<int, int>, int>> per_pair;  // ((N, M), count)
  std::vector<std::string> anomalies;
  int total = 0;
};

// Runs the degenerate-point solver over every admissible (N, M) pair.
// Solver inconsistencies are collected as anomalies; the run never aborts.
inline CrossingCensus enumerate_crossings(Model model, std::optional<Bargmann> q,
                                          double delta, double omega,
                                          std::pair<int, int> n_range,
                                          std::pair<int, int> m_range) {
  CrossingCensus census;
  census.model = model;
  census.q = q;
  census.delta = delta;
  census.omega = omega;
  census.n_range = n_range;
  census.m_range = m_range;

  std::vector<std::pair<int, int>> pairs;
  for (int N = n_range.first; N <= n_range.second; ++N)
    for (int M = std::max(N + 1, m_range.first); M <= m_range.second; ++M)
      pairs.emplace_back(N, M);

  std::vector<std::vector<CrossingCensus::Point>> results(pairs.size());
  std::vector<std::string> anomalies(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [N, M] = pairs[i];
    try {
      if (model == Model::one_photon) {
        for (const auto& pt : one_photon::find_degenerate(N, M, delta, omega))
          results[i].push_back({pt.N, pt.M, pt.g, pt.epsilon, pt.energy,
                                pt.residual_f, pt.residual_c});
      } else {
        for (const auto& pt : two_photon::find_degenerate(q.value_or(Bargmann::q14),
                                                          N, M, delta, omega))
          results[i].push_back({pt.N, pt.M, pt.g, pt.epsilon, pt.energy,
                                pt.residual_f, pt.residual_c});
      }
    } catch (const std::exception& e) {
      anomalies[i] = "(N=" + std::to_string(N) + ",M=" + std::to_string(M) + ") " + e.what();
    }
  });

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!anomalies[i].empty()) census.anomalies.push_back(anomalies[i]);
    int count = 0;
    for (const auto& pt : results[i]) {
      // unique under (N, M, g)
      bool dup = false;
      for (const auto& prev : census.points)
        if (prev.N == pt.N && prev.M == pt.M &&
            std::abs(prev.g - pt.g) < 1e-8 * omega) dup = true;
      if (!dup) {
        census.points.push_back(pt);
        ++count;
      }
    }
    census.per_pair.push_back({pairs[i], count});
  }
  census.total = static_cast<int>(census.points.size());
  return census;
}

}  // namespace rabi::scan
