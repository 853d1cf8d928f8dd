#pragma once

// Run configuration shared by the CLI subcommands, with lossless JSON
// round-tripping. The schema is documented in docs/config-schema.md.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabi/common.hpp"

namespace rabi::cli {

struct GridRange {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.01;
  bool operator==(const GridRange&) const = default;
};

struct Window {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Window&) const = default;
};

struct RunConfig {
  std::string model = "1p";  // "1p" | "2p"
  std::optional<std::string> q;  // "14" | "34"
  double omega = 1.0;
  double delta = 0.0;
  std::optional<double> epsilon;
  std::optional<double> k;  // scaled bias rule epsilon = k beta(g)
  std::optional<double> g;
  std::optional<GridRange> g_range;
  std::optional<Window> e_window;
  std::optional<int> n_index;  // N (type-A / first constraint index)
  std::optional<int> m_index;  // M (type-B / second constraint index)
  std::optional<std::string> kind;  // exceptional kind: 1A 2A 1B 2B merged
  std::optional<std::pair<int, int>> n_range;  // census
  std::optional<std::pair<int, int>> m_range;  // census
  std::optional<int> nmax;
  std::optional<double> tol;
  std::optional<double> pole_margin;
  bool oracle_overlay = false;
  std::string out_dir = ".";
  std::vector<std::string> formats{"csv"};

  bool operator==(const RunConfig&) const = default;

  Model model_enum() const {
    if (model == "1p") return Model::one_photon;
    if (model == "2p") return Model::two_photon;
    throw std::domain_error("RunConfig: model must be 1p or 2p");
  }
  std::optional<Bargmann> q_enum() const {
    if (!q) return std::nullopt;
    if (*q == "14") return Bargmann::q14;
    if (*q == "34") return Bargmann::q34;
    throw std::domain_error("RunConfig: q must be 14 or 34");
  }
};

namespace detail {

template <class T>
void put(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}
template <class T>
void get(const nlohmann::ordered_json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  detail::put(j, "q", c.q);
  j["omega"] = c.omega;
  j["delta"] = c.delta;
  detail::put(j, "epsilon", c.epsilon);
  detail::put(j, "k", c.k);
  detail::put(j, "g", c.g);
  if (c.g_range)
    j["g_range"] = {{"lo", c.g_range->lo}, {"hi", c.g_range->hi}, {"step", c.g_range->step}};
  if (c.e_window) j["e_window"] = {{"lo", c.e_window->lo}, {"hi", c.e_window->hi}};
  detail::put(j, "n", c.n_index);
  detail::put(j, "m", c.m_index);
  detail::put(j, "kind", c.kind);
  if (c.n_range) j["n_range"] = {c.n_range->first, c.n_range->second};
  if (c.m_range) j["m_range"] = {c.m_range->first, c.m_range->second};
  detail::put(j, "nmax", c.nmax);
  detail::put(j, "tol", c.tol);
  detail::put(j, "pole_margin", c.pole_margin);
  j["oracle_overlay"] = c.oracle_overlay;
  j["out_dir"] = c.out_dir;
  j["formats"] = c.formats;
  return j;
}

inline RunConfig config_from_json(const nlohmann::ordered_json& j) {
  RunConfig c;
  c.model = j.at("model").get<std::string>();
  detail::get(j, "q", c.q);
  if (j.contains("omega")) c.omega = j.at("omega").get<double>();
  if (j.contains("delta")) c.delta = j.at("delta").get<double>();
  detail::get(j, "epsilon", c.epsilon);
  detail::get(j, "k", c.k);
  detail::get(j, "g", c.g);
  if (j.contains("g_range")) {
    GridRange r;
    r.lo = j.at("g_range").at("lo").get<double>();
    r.hi = j.at("g_range").at("hi").get<double>();
    r.step = j.at("g_range").at("step").get<double>();
    c.g_range = r;
  }
  if (j.contains("e_window")) {
    Window w;
    w.lo = j.at("e_window").at("lo").get<double>();
    w.hi = j.at("e_window").at("hi").get<double>();
    c.e_window = w;
  }
  detail::get(j, "n", c.n_index);
  detail::get(j, "m", c.m_index);
  detail::get(j, "kind", c.kind);
  if (j.contains("n_range"))
    c.n_range = {j.at("n_range").at(0).get<int>(), j.at("n_range").at(1).get<int>()};
  if (j.contains("m_range"))
    c.m_range = {j.at("m_range").at(0).get<int>(), j.at("m_range").at(1).get<int>()};
  detail::get(j, "nmax", c.nmax);
  detail::get(j, "tol", c.tol);
  detail::get(j, "pole_margin", c.pole_margin);
  if (j.contains("oracle_overlay")) c.oracle_overlay = j.at("oracle_overlay").get<bool>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("formats")) c.formats = j.at("formats").get<std::vector<std::string>>();
  return c;
}

}  // namespace rabi::cli
