// Command-line frontend: spectra, G-curves, level crossings, exceptional
// points, the crossing census, and oracle verification for the asymmetric
// one- and two-photon quantum Rabi models.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rabi/cli.hpp"

namespace {

bool parse_pair(const std::string& s, double& a, double& b) {
  std::istringstream is(s);
  char sep;
  return static_cast<bool>(is >> a >> sep >> b) && sep == ':';
}

bool parse_triple(const std::string& s, double& a, double& b, double& c) {
  std::istringstream is(s);
  char s1, s2;
  return static_cast<bool>(is >> a >> s1 >> b >> s2 >> c) && s1 == ':' && s2 == ':';
}

bool parse_int_pair(const std::string& s, int& a, int& b) {
  std::istringstream is(s);
  char sep;
  return static_cast<bool>(is >> a >> sep >> b) && sep == ':';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver suite for the asymmetric one- and two-photon "
               "quantum Rabi models"};
  app.require_subcommand(1);

  rabi::cli::RunConfig cfg;
  std::string config_path, g_range_s, e_window_s, n_range_s, m_range_s, formats_s;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override)");
    sub->add_option("--model", cfg.model, "model: 1p or 2p");
    sub->add_option_function<std::string>(
        "--q", [&cfg](const std::string& v) { cfg.q = v; },
        "Bargmann sector: 14 or 34 (two-photon)");
    sub->add_option("--omega", cfg.omega, "cavity frequency");
    sub->add_option("--delta", cfg.delta, "qubit splitting");
    sub->add_option_function<double>(
        "--epsilon", [&cfg](const double& v) { cfg.epsilon = v; },
        "qubit bias (fixed rule)");
    sub->add_option_function<double>(
        "--k", [&cfg](const double& v) { cfg.k = v; },
        "scaled bias rule epsilon = k beta(g)");
    sub->add_option_function<double>(
        "--g", [&cfg](const double& v) { cfg.g = v; }, "coupling strength");
    sub->add_option("--g-range", g_range_s, "coupling sweep a:b:step");
    sub->add_option("--e-window", e_window_s, "energy window a:b");
    sub->add_option_function<int>(
        "--N", [&cfg](const int& v) { cfg.n_index = v; },
        "type-A / first constraint index");
    sub->add_option_function<int>(
        "--M", [&cfg](const int& v) { cfg.m_index = v; },
        "type-B / second constraint index");
    sub->add_option_function<std::string>(
        "--kind", [&cfg](const std::string& v) { cfg.kind = v; },
        "exceptional kind: 1A 2A 1B 2B merged");
    sub->add_option("--n-range", n_range_s, "census N range a:b");
    sub->add_option("--m-range", m_range_s, "census M range a:b");
    sub->add_option_function<int>(
        "--nmax", [&cfg](const int& v) { cfg.nmax = v; }, "oracle photon cutoff");
    sub->add_option_function<double>(
        "--tol", [&cfg](const double& v) { cfg.tol = v; }, "tolerance override");
    sub->add_option_function<double>(
        "--pole-margin", [&cfg](const double& v) { cfg.pole_margin = v; },
        "pole exclusion half-width (units of omega)");
    sub->add_flag("--oracle-overlay", cfg.oracle_overlay, "add oracle column");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", formats_s, "comma list: csv,json,svg");
  };

  CLI::App* sub_gcurve = app.add_subcommand("gcurve", "G(E) curve at fixed coupling");
  CLI::App* sub_spectrum = app.add_subcommand("spectrum", "spectrum sweep over g");
  CLI::App* sub_crossings =
      app.add_subcommand("crossings", "degenerate points of one (N, M) pair");
  CLI::App* sub_exceptional =
      app.add_subcommand("exceptional", "non-degenerate exceptional points");
  CLI::App* sub_census = app.add_subcommand("census", "crossing census over (N, M) ranges");
  CLI::App* sub_verify = app.add_subcommand("verify", "oracle cross-check of G-zeros");
  for (CLI::App* s : {sub_gcurve, sub_spectrum, sub_crossings, sub_exceptional,
                      sub_census, sub_verify})
    add_common(s);

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return rabi::cli::kValidationError;
    }
    try {
      nlohmann::ordered_json j;
      f >> j;
      rabi::cli::RunConfig merged = rabi::cli::config_from_json(j);
      // any field changed by a flag wins over the file value
      const rabi::cli::RunConfig defaults;
      if (cfg.model != defaults.model) merged.model = cfg.model;
      if (cfg.q) merged.q = cfg.q;
      if (cfg.omega != defaults.omega) merged.omega = cfg.omega;
      if (cfg.delta != defaults.delta) merged.delta = cfg.delta;
      if (cfg.epsilon) merged.epsilon = cfg.epsilon;
      if (cfg.k) merged.k = cfg.k;
      if (cfg.g) merged.g = cfg.g;
      if (cfg.n_index) merged.n_index = cfg.n_index;
      if (cfg.m_index) merged.m_index = cfg.m_index;
      if (cfg.kind) merged.kind = cfg.kind;
      if (cfg.nmax) merged.nmax = cfg.nmax;
      if (cfg.tol) merged.tol = cfg.tol;
      if (cfg.pole_margin) merged.pole_margin = cfg.pole_margin;
      if (cfg.oracle_overlay) merged.oracle_overlay = true;
      if (cfg.out_dir != defaults.out_dir) merged.out_dir = cfg.out_dir;
      cfg = merged;
    } catch (const std::exception& e) {
      std::cerr << "error: bad config file: " << e.what() << "\n";
      return rabi::cli::kValidationError;
    }
  }

  if (!g_range_s.empty()) {
    double a, b, s;
    if (!parse_triple(g_range_s, a, b, s)) {
      std::cerr << "error: --g-range expects a:b:step\n";
      return rabi::cli::kValidationError;
    }
    cfg.g_range = rabi::cli::GridRange{a, b, s};
  }
  if (!e_window_s.empty()) {
    double a, b;
    if (!parse_pair(e_window_s, a, b)) {
      std::cerr << "error: --e-window expects a:b\n";
      return rabi::cli::kValidationError;
    }
    cfg.e_window = rabi::cli::Window{a, b};
  }
  if (!n_range_s.empty()) {
    int a, b;
    if (!parse_int_pair(n_range_s, a, b)) {
      std::cerr << "error: --n-range expects a:b\n";
      return rabi::cli::kValidationError;
    }
    cfg.n_range = {a, b};
  }
  if (!m_range_s.empty()) {
    int a, b;
    if (!parse_int_pair(m_range_s, a, b)) {
      std::cerr << "error: --m-range expects a:b\n";
      return rabi::cli::kValidationError;
    }
    cfg.m_range = {a, b};
  }
  if (!formats_s.empty()) {
    cfg.formats.clear();
    std::istringstream is(formats_s);
    std::string tok;
    while (std::getline(is, tok, ',')) cfg.formats.push_back(tok);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return rabi::cli::dispatch(command, cfg);
}
