#pragma once

// Summation policy and coefficient-table types shared by the series
// expansions of both models.

#include <cmath>
#include <cstddef>
#include <vector>

namespace rabi {

// Stop rule for the G-function series: accumulate weighted terms and stop
// once `consecutive_below` successive terms are each smaller than
// tail_tol x (running max partial-sum magnitude). Hitting n_cap first
// flags the evaluation as unconverged. The stall detector (used by the
// two-photon series, whose convergence degrades toward the collapse
// point) flags evaluations whose weighted-term magnitudes plateau.
struct SeriesPolicy {
  double tail_tol = 1e-14;
  int consecutive_below = 10;
  int n_cap = 5000;
  bool detect_stall = false;
  double stall_band_lo = 0.99;
  double stall_band_hi = 1.01;
  int stall_window = 50;
};

// Output of a coefficient recurrence: `primary` is the f_n (or c_n)
// sequence built from primary[0] = 1, `partner` the e_n (or d_n) linear
// companions.
struct CoefficientTable {
  std::vector<double> primary;
  std::vector<double> partner;
  int truncation_n = 0;
  bool converged = false;
  double tail_estimate = 0.0;  // magnitude of last retained weighted term
};

namespace detail {

// Two-term carry for three-term recurrences whose magnitudes can leave the
// double range; value_n = mant * exp(log_scale).
struct ScaledCarry {
  double prev = 0.0;  // x_{n-1} mantissa
  double cur = 1.0;   // x_n mantissa
  double log_scale = 0.0;

  void advance(double next) {
    prev = cur;
    cur = next;
    const double m = std::max(std::abs(prev), std::abs(cur));
    if (m > 1e140 || (m > 0.0 && m < 1e-140)) {
      prev /= m;
      cur /= m;
      log_scale += std::log(m);
    }
  }

  double value_cur() const { return cur * std::exp(log_scale); }
};

// Convergence bookkeeping for one streaming evaluation.
struct StopState {
  int small_run = 0;
  int stall_run = 0;
  double run_max = 0.0;
  double last_mag = -1.0;
  double tail = 0.0;

  // Returns true when the series may stop; sets *stalled on plateau.
  bool update(const SeriesPolicy& pol, double term_mag, double partial_mag,
              bool* stalled) {
    run_max = std::max(run_max, partial_mag);
    tail = term_mag;
    if (term_mag < pol.tail_tol * run_max) {
      if (++small_run >= pol.consecutive_below) return true;
    } else {
      small_run = 0;
    }
    if (pol.detect_stall && last_mag > 0.0 && term_mag > 0.0) {
      const double ratio = term_mag / last_mag;
      if (ratio >= pol.stall_band_lo && ratio <= pol.stall_band_hi) {
        if (++stall_run >= pol.stall_window) {
          *stalled = true;
          return true;
        }
      } else {
        stall_run = 0;
      }
    }
    last_mag = term_mag;
    return false;
  }
};

}  // namespace detail

}  // namespace rabi
