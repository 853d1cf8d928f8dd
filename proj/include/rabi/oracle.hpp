#pragma once

// Independent verification path: truncated-Fock-space Hamiltonians for
// both models, a dense symmetric eigensolver, zero/eigenvalue matching,
// and embeddings of the terminated frame states for residual checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabi/common.hpp"

namespace rabi::oracle {

enum class Sector { full, even, odd };

inline std::string to_string(Sector s) {
  switch (s) {
    case Sector::full: return "full";
    case Sector::even: return "even";
    default: return "odd";
  }
}

// One-photon matrices live on |sigma> x |n>, spin-major blocks; two-photon
// matrices are built in the rotated frame where the parity sectors are
// explicit, restricted to even or odd Fock indices.
struct TruncatedHamiltonian {
  Model model = Model::one_photon;
  Sector sector = Sector::full;
  int n_max = 0;
  ModelParams params{};
  bool rotated = false;  // one-photon only: coupling-diagonal frame
  bool custom = false;   // hand-built matrix; no rebuild possible
  Eigen::MatrixXd h;

  int dim() const { return static_cast<int>(h.rows()); }

  static TruncatedHamiltonian from_matrix(Eigen::MatrixXd m) {
    TruncatedHamiltonian t;
    t.custom = true;
    t.h = std::move(m);
    t.n_max = static_cast<int>(t.h.rows()) - 1;
    return t;
  }
};

inline TruncatedHamiltonian build_1p(const ModelParams& p, int n_max) {
  p.validate();
  if (n_max < 2) throw std::domain_error("build_1p: n_max >= 2 required");
  const int d = n_max + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (int n = 0; n < d; ++n) {
    h(n, n) = 0.5 * p.delta + n * p.omega;
    h(d + n, d + n) = -0.5 * p.delta + n * p.omega;
    h(n, d + n) = h(d + n, n) = 0.5 * p.epsilon;
  }
  for (int n = 0; n + 1 < d; ++n) {
    const double v = p.g * std::sqrt(n + 1.0);
    h(n, d + n + 1) = h(d + n + 1, n) = v;
    h(n + 1, d + n) = h(d + n, n + 1) = v;
  }
  return {Model::one_photon, Sector::full, n_max, p, false, false, std::move(h)};
}

// Same spectrum as build_1p, in the frame where the coupling is diagonal;
// this is the frame the displaced-basis expansions live in.
inline TruncatedHamiltonian build_1p_rotated(const ModelParams& p, int n_max) {
  p.validate();
  if (n_max < 2) throw std::domain_error("build_1p_rotated: n_max >= 2 required");
  const int d = n_max + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (int n = 0; n < d; ++n) {
    h(n, n) = n * p.omega + 0.5 * p.epsilon;
    h(d + n, d + n) = n * p.omega - 0.5 * p.epsilon;
    h(n, d + n) = h(d + n, n) = -0.5 * p.delta;
  }
  for (int n = 0; n + 1 < d; ++n) {
    const double v = p.g * std::sqrt(n + 1.0);
    h(n, n + 1) = h(n + 1, n) = v;
    h(d + n, d + n + 1) = h(d + n + 1, d + n) = -v;
  }
  return {Model::one_photon, Sector::full, n_max, p, true, false, std::move(h)};
}

// Fock indices of a two-photon sector up to the cutoff.
inline std::vector<int> sector_indices(Sector s, int n_max) {
  std::vector<int> idx;
  const int start = s == Sector::odd ? 1 : 0;
  const int step = s == Sector::full ? 1 : 2;
  for (int n = start; n <= n_max; n += step) idx.push_back(n);
  return idx;
}

inline TruncatedHamiltonian build_2p_sector(const ModelParams& p, int n_max, Sector s) {
  p.validate();
  if (n_max < 3) throw std::domain_error("build_2p: n_max >= 3 required");
  const std::vector<int> idx = sector_indices(s, n_max);
  const int d = static_cast<int>(idx.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    const int n = idx[i];
    h(i, i) = n * p.omega + 0.5 * p.epsilon;
    h(d + i, d + i) = n * p.omega - 0.5 * p.epsilon;
    h(i, d + i) = h(d + i, i) = -0.5 * p.delta;
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (idx[j] - idx[i] != 2) continue;
      const int n = idx[i];
      const double v = p.g * std::sqrt((n + 1.0) * (n + 2.0));
      h(i, j) = h(j, i) = v;
      h(d + i, d + j) = h(d + j, d + i) = -v;
    }
  }
  return {Model::two_photon, s, n_max, p, true, false, std::move(h)};
}

inline TruncatedHamiltonian build_2p(const ModelParams& p, int n_max, Bargmann q) {
  return build_2p_sector(p, n_max, q == Bargmann::q14 ? Sector::even : Sector::odd);
}

inline TruncatedHamiltonian build_2p_full(const ModelParams& p, int n_max) {
  return build_2p_sector(p, n_max, Sector::full);
}

struct OracleResult {
  std::vector<double> eigenvalues;  // ascending
  int n_max = 0;
  double converged_below = 0.0;
};

inline std::vector<double> solve_all(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("dense symmetric eigensolver failed", h.rows(), 0.0);
  std::vector<double> ev(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  return ev;  // Eigen returns them sorted ascending
}

inline TruncatedHamiltonian rebuild(const TruncatedHamiltonian& h, int n_max) {
  if (h.model == Model::one_photon)
    return h.rotated ? build_1p_rotated(h.params, n_max) : build_1p(h.params, n_max);
  return build_2p_sector(h.params, n_max, h.sector);
}

// Lowest `count` eigenvalues; converged_below is set by re-solving at
// twice the cutoff and keeping the energy range whose values moved by
// less than 1e-8 (in the params' energy units, scaled by omega).
inline OracleResult eigenvalues(const TruncatedHamiltonian& h, int count) {
  if (count > h.dim()) throw std::domain_error("eigenvalues: count exceeds dimension");
  OracleResult out;
  out.n_max = h.n_max;
  std::vector<double> ev = solve_all(h.h);
  ev.resize(count);
  out.eigenvalues = ev;
  if (h.custom) {
    out.converged_below = std::numeric_limits<double>::infinity();
    return out;
  }
  const std::vector<double> ref = solve_all(rebuild(h, 2 * h.n_max).h);
  const double tol = 1e-8 * h.params.omega;
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ev.size() && i < ref.size(); ++i) {
    if (std::abs(ev[i] - ref[i]) >= tol) {
      bound = ev[i];
      break;
    }
  }
  out.converged_below = bound;
  return out;
}

// Pairs of consecutive eigenvalues close enough to count as a candidate
// double degeneracy.
inline std::vector<std::pair<int, double>> degenerate_pairs(const OracleResult& r,
                                                            double tol) {
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i + 1 < r.eigenvalues.size(); ++i) {
    const double gap = r.eigenvalues[i + 1] - r.eigenvalues[i];
    if (gap < tol) out.emplace_back(static_cast<int>(i), gap);
  }
  return out;
}

struct MatchReport {
  struct Pair {
    double zero;
    double level;
    double abs_diff;
  };
  std::vector<Pair> matched;
  std::vector<double> unmatched_zeros;
  std::vector<double> unmatched_levels;
  double worst_abs_diff = 0.0;
  bool success = false;
};

// Greedy nearest matching between G-zeros and oracle levels, both limited
// to the cutoff-converged window (and optionally to e_max).
inline MatchReport verify_zeros(const std::vector<double>& zeros,
                                const OracleResult& result, double tol,
                                double e_max = std::numeric_limits<double>::infinity()) {
  const double cap = std::min(e_max, result.converged_below);
  std::vector<double> levels;
  for (double v : result.eigenvalues)
    if (v <= cap) levels.push_back(v);

  struct Cand {
    double d;
    std::size_t iz, il;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < zeros.size(); ++i)
    for (std::size_t j = 0; j < levels.size(); ++j)
      if (std::abs(zeros[i] - levels[j]) <= tol)
        cands.push_back({std::abs(zeros[i] - levels[j]), i, j});
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.d < b.d; });

  MatchReport rep;
  std::vector<bool> zdone(zeros.size(), false), ldone(levels.size(), false);
  for (const Cand& c : cands) {
    if (zdone[c.iz] || ldone[c.il]) continue;
    zdone[c.iz] = ldone[c.il] = true;
    rep.matched.push_back({zeros[c.iz], levels[c.il], c.d});
    rep.worst_abs_diff = std::max(rep.worst_abs_diff, c.d);
  }
  for (std::size_t i = 0; i < zeros.size(); ++i)
    if (!zdone[i]) rep.unmatched_zeros.push_back(zeros[i]);
  for (std::size_t j = 0; j < levels.size(); ++j)
    if (!ldone[j]) rep.unmatched_levels.push_back(levels[j]);
  rep.success = rep.unmatched_zeros.empty() && rep.unmatched_levels.empty();
  return rep;
}

// --- frame-state embeddings -------------------------------------------------

// Fock expansion of the displaced number state D(alpha)|n>.
inline Eigen::VectorXd displaced_fock(double alpha, int n, int cutoff) {
  if (n >= cutoff) throw std::domain_error("displaced_fock: n >= cutoff");
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(cutoff);
  for (int k = 0; k < cutoff; ++k) {
    // coherent state amplitudes, in log space to avoid factorial overflow
    const double la = std::abs(alpha);
    if (la == 0.0) {
      cur[k] = k == 0 ? 1.0 : 0.0;
      continue;
    }
    const double lg = -0.5 * alpha * alpha + k * std::log(la) -
                      0.5 * std::lgamma(k + 1.0);
    cur[k] = std::exp(lg) * (alpha < 0.0 && k % 2 == 1 ? -1.0 : 1.0);
  }
  for (int m = 0; m < n; ++m) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(cutoff);
    for (int k = 0; k < cutoff; ++k) {
      double v = -alpha * cur[k];
      if (k > 0) v += std::sqrt(static_cast<double>(k)) * cur[k - 1];
      next[k] = v / std::sqrt(m + 1.0);
    }
    cur = next;
  }
  return cur;
}

// Fock expansion of the squeezed number state S(zeta)|n>, with
// S(zeta) = exp((zeta/2)(a^2 - a^dag^2)) for real zeta.
inline Eigen::VectorXd squeezed_fock(double zeta, int n, int cutoff) {
  if (n >= cutoff) throw std::domain_error("squeezed_fock: n >= cutoff");
  const double ch = std::cosh(zeta), th = std::tanh(zeta);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(cutoff);
  cur[0] = 1.0 / std::sqrt(ch);
  for (int k = 1; k + 1 < cutoff; k += 2)
    cur[k + 1] = -th * std::sqrt(k / (k + 1.0)) * cur[k - 1];
  for (int m = 0; m < n; ++m) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(cutoff);
    for (int k = 0; k < cutoff; ++k) {
      double v = 0.0;
      if (k > 0) v += ch * std::sqrt(static_cast<double>(k)) * cur[k - 1];
      if (k + 1 < cutoff) v += std::sinh(zeta) * std::sqrt(k + 1.0) * cur[k + 1];
      next[k] = v / std::sqrt(m + 1.0);
    }
    cur = next;
  }
  return cur;
}

// Spinor Fock embedding of a terminated state, in the frame of the
// matching oracle matrix (rotated one-photon, or the sector matrix of the
// state's Bargmann index). The returned vector is laid out like the
// oracle blocks: [upper | lower].
inline Eigen::VectorXd embed_terminated(const TerminatedState& st,
                                        const TruncatedHamiltonian& h) {
  const int n_max = h.n_max;
  if (st.model == Model::one_photon) {
    if (h.model != Model::one_photon || !h.rotated)
      throw std::domain_error("embed_terminated: need a rotated one-photon oracle");
    const int d = n_max + 1;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(2 * d);
    for (std::size_t n = 0; n < st.upper.size(); ++n)
      psi.segment(0, d) += st.upper[n] * displaced_fock(st.frame_parameter, (int)n, d);
    for (std::size_t n = 0; n < st.lower.size(); ++n)
      psi.segment(d, d) += st.lower[n] * displaced_fock(st.frame_parameter, (int)n, d);
    return psi;
  }
  if (h.model != Model::two_photon || h.sector == Sector::full)
    throw std::domain_error("embed_terminated: need a sector two-photon oracle");
  if (!st.q) throw std::domain_error("embed_terminated: state lacks a Bargmann index");
  const std::vector<int> idx = sector_indices(h.sector, n_max);
  const int d = static_cast<int>(idx.size());
  const int parity = bargmann_parity(*st.q);
  if ((h.sector == Sector::even) != (parity == 0))
    throw std::domain_error("embed_terminated: sector mismatch");
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(2 * d);
  const auto add = [&](const std::vector<double>& amps, int block) {
    for (std::size_t m = 0; m < amps.size(); ++m) {
      const int n_fock = 2 * static_cast<int>(m) + parity;
      const Eigen::VectorXd full =
          squeezed_fock(st.frame_parameter, n_fock, n_max + 1);
      for (int i = 0; i < d; ++i) psi[block * d + i] += amps[m] * full[idx[i]];
    }
  };
  add(st.upper, 0);
  add(st.lower, 1);
  return psi;
}

// ||H psi - E psi|| / ||psi||
inline double state_residual(const TruncatedHamiltonian& h, const Eigen::VectorXd& psi,
                             double energy) {
  return (h.h * psi - energy * psi).norm() / psi.norm();
}

// |<a|b>| / (||a|| ||b||)
inline double normalized_overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

}  // namespace rabi::oracle
