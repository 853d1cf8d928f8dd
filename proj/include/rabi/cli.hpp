#pragma once

// Subcommand implementations behind the rabi-spectra tool. Exit codes:
// 0 success, 1 validation error, 2 numerical non-convergence,
// 3 verification mismatch.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "rabi/common.hpp"
#include "rabi/config.hpp"
#include "rabi/one_photon.hpp"
#include "rabi/oracle.hpp"
#include "rabi/output.hpp"
#include "rabi/scan.hpp"
#include "rabi/two_photon.hpp"

namespace rabi::cli {

inline constexpr int kOk = 0;
inline constexpr int kValidationError = 1;
inline constexpr int kNonConvergence = 2;
inline constexpr int kVerifyMismatch = 3;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

inline void validate_common(const RunConfig& c) {
  require(c.model == "1p" || c.model == "2p", "--model must be 1p or 2p");
  require(c.omega > 0.0, "omega must be > 0");
  require(c.delta >= 0.0, "delta must be >= 0");
  if (c.epsilon) require(*c.epsilon >= 0.0,
                         "epsilon must be >= 0 (negative bias maps onto the "
                         "positive one by exchanging the frame roles)");
  if (c.q) require(*c.q == "14" || *c.q == "34", "--q must be 14 or 34");
  if (c.model == "2p") require(c.q.has_value() || true, "");
  for (const auto& f : c.formats)
    require(f == "csv" || f == "json" || f == "svg", "--format must be csv,json,svg");
  require(!c.formats.empty(), "at least one output format required");
  if (c.k) require(c.model == "2p", "--k (scaled bias) applies to the two-photon model");
  require(!(c.k && c.epsilon), "--epsilon and --k are mutually exclusive");
}

inline ModelParams params_at(const RunConfig& c, double g) {
  ModelParams p{c.omega, c.delta, 0.0, g};
  if (c.k) {
    p.epsilon = *c.k * renormalized_frequency(p);
  } else {
    p.epsilon = c.epsilon.value_or(0.0);
  }
  return p;
}

inline scan::EpsilonRule bias_rule(const RunConfig& c) {
  scan::EpsilonRule rule;
  if (c.k) {
    rule.scaled = true;
    rule.value = *c.k;
  } else {
    rule.value = c.epsilon.value_or(0.0);
  }
  return rule;
}

inline std::pair<double, double> window_or_default(const RunConfig& c,
                                                   const ModelParams& p) {
  if (c.e_window) return {c.e_window->lo, c.e_window->hi};
  if (c.model_enum() == Model::one_photon)
    return {-p.g * p.g / p.omega - p.epsilon / 2.0 - p.omega, 6.0 * p.omega};
  return {-p.omega, 6.0 * p.omega};
}

inline bool wants(const RunConfig& c, const std::string& f) {
  return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.out_dir) / name;
}

inline void stamp(out::Csv& csv, const RunConfig& c) {
  csv.comment("version", out::kVersion);
  csv.comment("config", to_json(c).dump());
}

inline int default_nmax(const RunConfig& c) {
  if (c.nmax) return *c.nmax;
  return c.model_enum() == Model::one_photon ? 200 : 400;
}

// nearest row of a sampled E grid
inline std::size_t nearest_index(const std::vector<double>& grid, double v) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::abs(grid[i] - v);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// G-curve over energy at fixed coupling, with pole annotations, bracketed
// zeros, and an optional oracle overlay column.
inline int cmd_gcurve(const RunConfig& c) {
  detail::validate_common(c);
  detail::require(c.g.has_value(), "gcurve: --g is required");
  detail::require(!c.k.has_value(), "gcurve: fixed epsilon only");
  const Model model = c.model_enum();
  const auto q = c.q_enum();
  if (model == Model::two_photon)
    detail::require(c.g < c.omega / 2.0, "gcurve: two-photon requires g < omega/2");
  const ModelParams p = detail::params_at(c, *c.g);
  const auto [lo, hi] = detail::window_or_default(c, p);
  detail::require(lo <= hi, "gcurve: empty energy window must still be ordered");

  const double margin = c.pole_margin.value_or(1e-6) * c.omega;
  std::vector<double> poles;
  std::vector<std::string> pole_labels;
  for (PoleKind kind : {PoleKind::A, PoleKind::B}) {
    for (int m = 0;; ++m) {
      PoleLine line{model, kind, m, q};
      const double e = pole_energy(line, p);
      if (e > hi + 1.0 || m > 10000) break;
      if (e >= lo - 1.0) {
        poles.push_back(e);
        pole_labels.push_back(line.label() + " " + out::fmt(e));
      }
    }
  }

  // samples, zeros, oracle
  std::vector<double> es, gs_val;
  const int samples = std::max(2, static_cast<int>(std::ceil(400.0 * (hi - lo) / c.omega)));
  for (int i = 0; i <= samples; ++i) {
    const double E = lo + (hi - lo) * i / samples;
    bool near_pole = false;
    for (double pe : poles)
      if (std::abs(E - pe) < 2.0 * margin) near_pole = true;
    if (near_pole) continue;
    try {
      const double val = model == Model::one_photon
                             ? one_photon::g_function(p, E)
                             : two_photon::g_function(q.value_or(Bargmann::q14), p, E);
      es.push_back(E);
      gs_val.push_back(val);
    } catch (const PoleProximityError&) {
    }
  }
  std::vector<double> zeros;
  if (lo < hi && *c.g > 0.0)
    zeros = scan::regular_zeros(model, q, p, lo, hi, 2000,
                                c.tol.value_or(1e-10), c.pole_margin.value_or(1e-6))
                .roots;
  std::vector<double> oracle_levels;
  if (c.oracle_overlay) {
    const auto h = model == Model::one_photon
                       ? oracle::build_1p(p, detail::default_nmax(c))
                       : oracle::build_2p(p, detail::default_nmax(c),
                                          q.value_or(Bargmann::q14));
    const auto res = oracle::eigenvalues(h, std::min(h.dim(), 64));
    for (double v : res.eigenvalues)
      if (v >= lo && v <= hi && v <= res.converged_below) oracle_levels.push_back(v);
  }

  out::Csv csv;
  detail::stamp(csv, c);
  for (const auto& s : pole_labels) csv.comment("pole", s);
  csv.header({"E", "G", "zero", "oracle_E"});
  std::vector<std::string> zero_col(es.size()), oracle_col(es.size());
  for (double z : zeros)
    if (!es.empty()) zero_col[detail::nearest_index(es, z)] = out::fmt(z);
  for (double v : oracle_levels)
    if (!es.empty()) oracle_col[detail::nearest_index(es, v)] = out::fmt(v);
  for (std::size_t i = 0; i < es.size(); ++i)
    csv.row({out::fmt(es[i]), out::fmt(gs_val[i]), zero_col[i], oracle_col[i]});

  if (detail::wants(c, "csv"))
    out::write_atomic(detail::out_path(c, "gcurve.csv"), csv.str());
  if (detail::wants(c, "json")) {
    nlohmann::ordered_json j;
    j["config"] = to_json(c);
    j["zeros"] = zeros;
    j["oracle"] = oracle_levels;
    j["poles"] = poles;
    out::write_atomic(detail::out_path(c, "gcurve.json"), j.dump(2) + "\n");
  }
  if (detail::wants(c, "svg")) {
    double cap = 1.0;
    for (double v : gs_val) cap = std::max(cap, std::min(std::abs(v), 50.0));
    out::Svg svg(lo, hi, -cap, cap);
    std::vector<std::pair<double, double>> seg;
    for (std::size_t i = 0; i < es.size(); ++i) {
      const double v = std::clamp(gs_val[i], -cap, cap);
      if (i > 0 && es[i] - es[i - 1] > 3.0 * (hi - lo) / samples) {
        svg.polyline(seg);
        seg.clear();
      }
      seg.emplace_back(es[i], v);
    }
    svg.polyline(seg);
    for (double pe : poles) {
      (void)pe;
    }
    for (double z : zeros) svg.marker(z, 0.0, "circle", "#0077bb");
    for (double v : oracle_levels) svg.marker(v, 0.0, "cross", "#000000");
    out::write_atomic(detail::out_path(c, "gcurve.svg"), svg.str("E", "G(E)"));
  }
  return kOk;
}

// Spectrum sweep over g (fixed or scaled bias), with special points.
inline int cmd_spectrum(const RunConfig& c) {
  detail::validate_common(c);
  detail::require(c.g_range.has_value(), "spectrum: --g-range is required");
  const Model model = c.model_enum();
  scan::TraceConfig tc;
  tc.model = model;
  tc.q = c.q_enum();
  tc.omega = c.omega;
  tc.delta = c.delta;
  tc.bias = detail::bias_rule(c);
  tc.g_lo = c.g_range->lo;
  tc.g_hi = c.g_range->hi;
  tc.g_step = c.g_range->step;
  if (c.e_window) tc.e_window = {{c.e_window->lo, c.e_window->hi}};
  if (c.tol) tc.abs_tol = *c.tol;
  if (c.pole_margin) tc.pole_margin = *c.pole_margin;

  const auto records = scan::trace(tc);
  const auto curve_ids = scan::assign_curve_ids(records);

  const bool scaled = tc.bias.scaled;
  out::Csv csv;
  detail::stamp(csv, c);
  csv.comment("e_window", c.e_window ? out::fmt(c.e_window->lo) + ":" + out::fmt(c.e_window->hi)
                                     : std::string("default"));
  csv.header({"g", "epsilon", "E", "E_prime", "curve", "tag", "n", "m"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (std::isnan(r.epsilon)) continue;  // collapse exclusion zone
    for (std::size_t j = 0; j < r.energies.size(); ++j) {
      std::string eprime;
      if (model == Model::two_photon && scaled && r.g > 0.0) {
        const double beta = renormalized_frequency(ModelParams{c.omega, c.delta, 0.0, r.g});
        eprime = out::fmt(two_photon::normalized_energy(
            r.energies[j], tc.q.value_or(Bargmann::q14), r.epsilon, beta, c.omega));
      }
      csv.row({out::fmt(r.g), out::fmt(r.epsilon), out::fmt(r.energies[j]), eprime,
               std::to_string(curve_ids[i][j]), "regular", "", ""});
    }
    for (const auto& sp : r.special) {
      std::string eprime;
      if (model == Model::two_photon && scaled && sp.g > 0.0) {
        const double beta = renormalized_frequency(ModelParams{c.omega, c.delta, 0.0, sp.g});
        eprime = out::fmt(two_photon::normalized_energy(
            sp.energy, tc.q.value_or(Bargmann::q14), sp.epsilon, beta, c.omega));
      }
      csv.row({out::fmt(sp.g), out::fmt(sp.epsilon), out::fmt(sp.energy), eprime,
               "", sp.kind, sp.n >= 0 ? std::to_string(sp.n) : "",
               sp.m >= 0 ? std::to_string(sp.m) : ""});
    }
    for (const auto& [a, b] : r.unresolved)
      csv.row({out::fmt(r.g), out::fmt(r.epsilon), "", "", "",
               "gap " + out::fmt(a) + ":" + out::fmt(b), "", ""});
  }
  if (detail::wants(c, "csv"))
    out::write_atomic(detail::out_path(c, "spectrum.csv"), csv.str());

  if (detail::wants(c, "json")) {
    nlohmann::ordered_json j;
    j["config"] = to_json(c);
    auto& recs = j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : records) {
      if (std::isnan(r.epsilon)) continue;
      nlohmann::ordered_json jr;
      jr["g"] = r.g;
      jr["epsilon"] = r.epsilon;
      jr["energies"] = r.energies;
      auto& sp = jr["special"] = nlohmann::ordered_json::array();
      for (const auto& s : r.special)
        sp.push_back({{"kind", s.kind}, {"n", s.n}, {"m", s.m}, {"g", s.g},
                      {"epsilon", s.epsilon}, {"E", s.energy}});
      recs.push_back(jr);
    }
    out::write_atomic(detail::out_path(c, "spectrum.json"), j.dump(2) + "\n");
  }

  if (detail::wants(c, "svg")) {
    // plot variable: E + g^2/w + eps/2 (one-photon), E' (scaled two-photon),
    // raw E otherwise
    const auto plot_y = [&](double g, double eps, double E) {
      if (model == Model::one_photon) return E + g * g / c.omega + eps / 2.0;
      if (scaled && g > 0.0) {
        const double beta = renormalized_frequency(ModelParams{c.omega, c.delta, 0.0, g});
        return two_photon::normalized_energy(E, tc.q.value_or(Bargmann::q14), eps,
                                             beta, c.omega);
      }
      return E;
    };
    double y_lo = 1e300, y_hi = -1e300;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (std::isnan(r.epsilon)) continue;
      for (double e : r.energies) {
        const double y = plot_y(r.g, r.epsilon, e);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
      }
    }
    if (y_lo > y_hi) {
      y_lo = 0.0;
      y_hi = 1.0;
    }
    out::Svg svg(tc.g_lo, tc.g_hi, y_lo - 0.2, y_hi + 0.2);
    std::map<int, std::vector<std::pair<double, double>>> curves;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (std::isnan(r.epsilon)) continue;
      for (std::size_t j = 0; j < r.energies.size(); ++j)
        curves[curve_ids[i][j]].emplace_back(r.g, plot_y(r.g, r.epsilon, r.energies[j]));
    }
    for (const auto& [id, pts] : curves) svg.polyline(pts);
    for (const auto& r : records) {
      if (std::isnan(r.epsilon)) continue;
      for (const auto& sp : r.special) {
        const bool tri = sp.degenerate || sp.kind == "1A" || sp.kind == "1B";
        svg.marker(sp.g, plot_y(sp.g, sp.epsilon, sp.energy), tri ? "triangle" : "circle",
                   sp.degenerate ? "#cc3311" : "#0077bb");
      }
    }
    out::write_atomic(detail::out_path(c, "spectrum.svg"),
                      svg.str("g", model == Model::one_photon
                                       ? "E + g^2/w + eps/2"
                                       : (scaled ? "E'" : "E")));
  }
  return kOk;
}

// Doubly degenerate crossings of one (N, M) pair.
inline int cmd_crossings(const RunConfig& c) {
  detail::validate_common(c);
  detail::require(c.n_index.has_value() && c.m_index.has_value(),
                  "crossings: --N and --M are required");
  const Model model = c.model_enum();
  out::Csv csv;
  detail::stamp(csv, c);
  csv.header({"model", "q", "N", "M", "g", "epsilon", "E", "residual_f", "residual_c"});
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  if (model == Model::one_photon) {
    for (const auto& pt :
         one_photon::find_degenerate(*c.n_index, *c.m_index, c.delta, c.omega)) {
      csv.row({"1p", "", std::to_string(pt.N), std::to_string(pt.M), out::fmt(pt.g),
               out::fmt(pt.epsilon), out::fmt(pt.energy), out::fmt(pt.residual_f),
               out::fmt(pt.residual_c)});
      points.push_back({{"N", pt.N}, {"M", pt.M}, {"g", pt.g}, {"epsilon", pt.epsilon},
                        {"E", pt.energy}, {"residual_f", pt.residual_f},
                        {"residual_c", pt.residual_c}});
    }
  } else {
    detail::require(c.q.has_value(), "crossings: --q is required for the two-photon model");
    const Bargmann q = *c.q_enum();
    for (const auto& pt :
         two_photon::find_degenerate(q, *c.n_index, *c.m_index, c.delta, c.omega)) {
      csv.row({"2p", *c.q, std::to_string(pt.N), std::to_string(pt.M), out::fmt(pt.g),
               out::fmt(pt.epsilon), out::fmt(pt.energy), out::fmt(pt.residual_f),
               out::fmt(pt.residual_c)});
      points.push_back({{"q", *c.q}, {"N", pt.N}, {"M", pt.M}, {"g", pt.g},
                        {"epsilon", pt.epsilon}, {"E", pt.energy},
                        {"residual_f", pt.residual_f}, {"residual_c", pt.residual_c}});
    }
  }
  if (detail::wants(c, "csv"))
    out::write_atomic(detail::out_path(c, "crossings.csv"), csv.str());
  if (detail::wants(c, "json")) {
    nlohmann::ordered_json j;
    j["config"] = to_json(c);
    j["points"] = points;
    out::write_atomic(detail::out_path(c, "crossings.json"), j.dump(2) + "\n");
  }
  return kOk;
}

// Non-degenerate exceptional points: one kind, or the full enumeration.
inline int cmd_exceptional(const RunConfig& c) {
  detail::validate_common(c);
  const Model model = c.model_enum();
  const double g_hi_default = model == Model::one_photon
                                  ? 2.0 * c.omega
                                  : two_photon::collapse_scan_limit(c.omega);
  const double g_lo = c.g_range ? c.g_range->lo : 0.0;
  const double g_hi = c.g_range ? c.g_range->hi : g_hi_default;

  out::Csv csv;
  detail::stamp(csv, c);
  csv.header({"kind", "n", "m", "g", "epsilon", "E"});
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  const auto emit = [&](const scan::SpecialPoint& sp) {
    csv.row({sp.kind, sp.n >= 0 ? std::to_string(sp.n) : "",
             sp.m >= 0 ? std::to_string(sp.m) : "", out::fmt(sp.g),
             out::fmt(sp.epsilon), out::fmt(sp.energy)});
    points.push_back({{"kind", sp.kind}, {"n", sp.n}, {"m", sp.m}, {"g", sp.g},
                      {"epsilon", sp.epsilon}, {"E", sp.energy}});
  };

  if (c.kind) {
    const bool b_kind = *c.kind == "1B" || *c.kind == "2B";
    const std::optional<int> idx = b_kind ? c.m_index : c.n_index;
    detail::require(idx.has_value(),
                    b_kind ? "exceptional: --M indexes B-family kinds"
                           : "exceptional: --N indexes A-family kinds");
    ModelParams base = detail::params_at(c, std::max(g_lo, 1e-3 * c.omega));
    if (model == Model::one_photon) {
      const std::map<std::string, one_photon::ExcKind> kinds{
          {"1A", one_photon::ExcKind::x1A}, {"2A", one_photon::ExcKind::x2A},
          {"1B", one_photon::ExcKind::x1B}, {"2B", one_photon::ExcKind::x2B},
          {"merged", one_photon::ExcKind::merged}};
      detail::require(kinds.count(*c.kind) > 0, "exceptional: unknown kind " + *c.kind);
      for (double z :
           one_photon::exceptional_zeros(kinds.at(*c.kind), *idx, base, g_lo, g_hi)) {
        ModelParams p = base;
        p.g = z;
        const PoleKind pk = b_kind ? PoleKind::B : PoleKind::A;
        emit({false, *c.kind, b_kind ? -1 : *idx, b_kind ? *idx : -1, z, p.epsilon,
              pole_energy({model, pk, *idx, std::nullopt}, p)});
      }
    } else {
      detail::require(c.q.has_value(), "exceptional: --q is required for the two-photon model");
      const std::map<std::string, two_photon::ExcKind> kinds{
          {"1A", two_photon::ExcKind::x1A}, {"2A", two_photon::ExcKind::x2A},
          {"1B", two_photon::ExcKind::x1B}, {"2B", two_photon::ExcKind::x2B}};
      detail::require(kinds.count(*c.kind) > 0, "exceptional: unknown kind " + *c.kind);
      const Bargmann q = *c.q_enum();
      ModelParams base2 = detail::params_at(c, std::max(g_lo, 1e-3 * c.omega));
      for (double z : two_photon::exceptional_zeros(kinds.at(*c.kind), q, *idx, base2,
                                                    g_lo, g_hi)) {
        ModelParams p = base2;
        p.g = z;
        const PoleKind pk = b_kind ? PoleKind::B : PoleKind::A;
        emit({false, *c.kind, b_kind ? -1 : *idx, b_kind ? *idx : -1, z, p.epsilon,
              pole_energy({model, pk, *idx, q}, p)});
      }
    }
  } else {
    scan::TraceConfig tc;
    tc.model = model;
    tc.q = c.q_enum();
    tc.omega = c.omega;
    tc.delta = c.delta;
    tc.bias = detail::bias_rule(c);
    tc.g_lo = g_lo;
    tc.g_hi = g_hi;
    tc.g_step = (g_hi - g_lo) / 100.0;
    if (c.e_window) tc.e_window = {{c.e_window->lo, c.e_window->hi}};
    for (const auto& sp : scan::special_points(tc))
      if (!sp.degenerate) emit(sp);
  }

  if (detail::wants(c, "csv"))
    out::write_atomic(detail::out_path(c, "exceptional.csv"), csv.str());
  if (detail::wants(c, "json")) {
    nlohmann::ordered_json j;
    j["config"] = to_json(c);
    j["points"] = points;
    out::write_atomic(detail::out_path(c, "exceptional.json"), j.dump(2) + "\n");
  }
  return kOk;
}

// Exhaustive crossing census over (N, M) ranges.
inline int cmd_census(const RunConfig& c) {
  detail::validate_common(c);
  const Model model = c.model_enum();
  if (model == Model::two_photon)
    detail::require(c.q.has_value(), "census: --q is required for the two-photon model");
  const auto n_range = c.n_range.value_or(std::pair<int, int>{1, 10});
  const auto m_range = c.m_range.value_or(std::pair<int, int>{2, 20});
  const auto census = scan::enumerate_crossings(model, c.q_enum(), c.delta, c.omega,
                                                n_range, m_range);
  out::Csv csv;
  detail::stamp(csv, c);
  csv.comment("total", static_cast<double>(census.total));
  csv.header({"N", "M", "g", "epsilon", "E", "residual_f", "residual_c"});
  for (const auto& pt : census.points)
    csv.row({std::to_string(pt.N), std::to_string(pt.M), out::fmt(pt.g),
             out::fmt(pt.epsilon), out::fmt(pt.energy), out::fmt(pt.residual_f),
             out::fmt(pt.residual_c)});
  if (detail::wants(c, "csv"))
    out::write_atomic(detail::out_path(c, "census.csv"), csv.str());

  nlohmann::ordered_json j;
  j["config"] = to_json(c);
  j["total"] = census.total;
  auto& per_pair = j["per_pair"] = nlohmann::ordered_json::array();
  for (const auto& [pair, count] : census.per_pair)
    per_pair.push_back({{"N", pair.first}, {"M", pair.second}, {"count", count}});
  j["anomalies"] = census.anomalies;
  if (detail::wants(c, "json"))
    out::write_atomic(detail::out_path(c, "census.json"), j.dump(2) + "\n");
  return kOk;
}

// Oracle cross-check of the regular G-zeros at one parameter point.
inline int cmd_verify(const RunConfig& c) {
  detail::validate_common(c);
  detail::require(c.g.has_value(), "verify: --g is required");
  detail::require(!c.k.has_value(), "verify: fixed epsilon only");
  const Model model = c.model_enum();
  const ModelParams p = detail::params_at(c, *c.g);
  if (model == Model::two_photon)
    detail::require(2.0 * p.g < p.omega, "verify: two-photon requires g < omega/2");
  const auto [lo, hi] = detail::window_or_default(c, p);
  const double tol = c.tol.value_or(1e-6) * c.omega;

  std::vector<Bargmann> sectors;
  if (model == Model::one_photon) {
    sectors = {Bargmann::q14};  // ignored
  } else if (c.q) {
    sectors = {*c.q_enum()};
  } else {
    sectors = {Bargmann::q14, Bargmann::q34};
  }

  bool all_ok = true;
  double worst = 0.0;
  nlohmann::ordered_json sectors_json = nlohmann::ordered_json::array();
  out::Csv csv;
  detail::stamp(csv, c);
  csv.header({"sector", "zero", "oracle_E", "abs_diff", "status"});
  for (Bargmann q : sectors) {
    const auto zeros = scan::regular_zeros(model, model == Model::two_photon
                                                      ? std::optional<Bargmann>(q)
                                                      : std::nullopt,
                                           p, lo, hi, 2000, 1e-10,
                                           c.pole_margin.value_or(1e-6))
                           .roots;
    const auto h = model == Model::one_photon
                       ? oracle::build_1p(p, detail::default_nmax(c))
                       : oracle::build_2p(p, detail::default_nmax(c), q);
    const auto res = oracle::eigenvalues(h, std::min(h.dim(), 128));
    const auto rep = oracle::verify_zeros(zeros, res, tol, hi);
    const std::string sector =
        model == Model::one_photon ? "full" : (q == Bargmann::q14 ? "q=1/4" : "q=3/4");
    for (const auto& m : rep.matched)
      csv.row({sector, out::fmt(m.zero), out::fmt(m.level), out::fmt(m.abs_diff), "matched"});
    for (double z : rep.unmatched_zeros)
      csv.row({sector, out::fmt(z), "", "", "unmatched_zero"});
    for (double v : rep.unmatched_levels)
      csv.row({sector, "", out::fmt(v), "", "unmatched_level"});
    nlohmann::ordered_json js;
    js["sector"] = sector;
    js["pass"] = rep.success;
    js["worst_abs_diff"] = rep.worst_abs_diff;
    js["matched"] = rep.matched.size();
    js["unmatched_zeros"] = rep.unmatched_zeros;
    js["unmatched_levels"] = rep.unmatched_levels;
    sectors_json.push_back(js);
    all_ok = all_ok && rep.success;
    worst = std::max(worst, rep.worst_abs_diff);
    if (model == Model::one_photon) break;
  }

  if (detail::wants(c, "csv"))
    out::write_atomic(detail::out_path(c, "verify.csv"), csv.str());
  nlohmann::ordered_json j;
  j["config"] = to_json(c);
  j["pass"] = all_ok;
  j["worst_abs_diff"] = worst;
  j["sectors"] = sectors_json;
  if (detail::wants(c, "json"))
    out::write_atomic(detail::out_path(c, "verify.json"), j.dump(2) + "\n");
  std::cout << (all_ok ? "PASS" : "FAIL") << " worst |dE| = " << out::fmt(worst) << "\n";
  return all_ok ? kOk : kVerifyMismatch;
}

inline int dispatch(const std::string& command, const RunConfig& cfg) {
  try {
    if (command == "gcurve") return cmd_gcurve(cfg);
    if (command == "spectrum") return cmd_spectrum(cfg);
    if (command == "crossings") return cmd_crossings(cfg);
    if (command == "exceptional") return cmd_exceptional(cfg);
    if (command == "census") return cmd_census(cfg);
    if (command == "verify") return cmd_verify(cfg);
    std::cerr << "unknown command: " << command << "\n";
    return kValidationError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
}

}  // namespace rabi::cli
