#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entrotter/bounds.hpp"
#include "entrotter/dense.hpp"
#include "entrotter/hamiltonian.hpp"
#include "entrotter/mps.hpp"
#include "entrotter/trotter.hpp"

namespace entrotter {

// Thrown for any rejected configuration; what() is a single line.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ModelSpec {
  std::string family = "tfim";  // tfim | heisenberg | all_to_all | syk4
  double J = 1.0;
  double h = 2.5;

  HamiltonianModel build(std::size_t n, std::uint64_t seed) const {
    if (family == "tfim") return build_tfim(n, J, h);
    if (family == "heisenberg") return build_heisenberg(n, J);
    if (family == "all_to_all") return build_all_to_all_ising(n, h);
    if (family == "syk4") return build_syk4(n, J, seed);
    throw ConfigError("unknown model family '" + family + "'");
  }

  bool nearest_neighbour() const { return family == "tfim" || family == "heisenberg"; }
};

struct PanelBSpec {
  std::size_t n = 8;
  std::size_t max_gates = 12;
  std::size_t states_per_level = 4;
  std::size_t window = 2;  // qubits on each side of the cut scanned for Pauli pairs
};

struct ExperimentConfig {
  std::string experiment = "validate";
  ModelSpec model;
  ModelSpec volume_model{"all_to_all", 1.0, 1.0};
  std::vector<std::size_t> n{8, 16, 32, 64, 128};
  std::vector<std::size_t> dense_n{6, 8, 10, 12};
  double t = 1.0;
  std::vector<std::size_t> r{20};
  std::vector<int> p{1};
  std::vector<double> taus;
  std::size_t chi_max = 16;
  double cutoff = kDefaultCutoff;
  std::string cut_mode = "contiguous";
  std::string ordering = "forward";
  std::string initial_state = "zeros";
  std::size_t reference_r = 40;
  int reference_p = 4;
  double eps = 0.01;
  std::string bound_J = "max_norm";  // max_norm | coupling
  std::vector<std::string> panels{"a", "b", "c", "d"};
  PanelBSpec panel_b;
  std::uint64_t seed = 20240601;
  std::string output = "out";
  std::size_t threads = 1;
  bool plots = false;
  bool record_timings = false;
  BoundConstants constants;

  Ordering term_ordering() const { return ordering_from_string(ordering); }
  CutMode cuts() const { return cut_mode_from_string(cut_mode); }
  ProductPattern initial_pattern() const {
    if (initial_state == "zeros") return ProductPattern::zeros();
    if (initial_state == "plus") return ProductPattern::plus();
    throw ConfigError("unknown initial state '" + initial_state + "'");
  }

  void validate() const;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"validate", "separation", "orders", "resources",
                                              "sweep"};
  return names;
}

inline std::vector<double> default_taus() {
  std::vector<double> out;
  for (int k = 4; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

// Defaults per subcommand. validate runs TFIM with J=1, h=2.5 from |0...0>.
inline ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "validate") {
    c.bound_J = "coupling";
  } else if (experiment == "separation") {
    c.n = {6, 8, 10, 12};
    c.r = {32};
  } else if (experiment == "orders") {
    c.n = {6};
    c.p = {1, 2, 4};
    c.taus = default_taus();
  } else if (experiment == "resources") {
    c.n = {};
  } else if (experiment == "sweep") {
    c.n = {6, 8, 10};
    c.r = {10, 20, 40};
    c.p = {1, 2};
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return c;
}

inline void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (std::find(experiment_names().begin(), experiment_names().end(), experiment) ==
      experiment_names().end())
    fail("unknown experiment '" + experiment + "'");
  for (const auto* m : {&model, &volume_model})
    if (m->family != "tfim" && m->family != "heisenberg" && m->family != "all_to_all" &&
        m->family != "syk4")
      fail("unknown model family '" + m->family + "'");
  if (!std::isfinite(t) || t < 0.0) fail("t must be finite and non-negative");
  if (!std::isfinite(model.J) || !std::isfinite(model.h)) fail("model parameters must be finite");
  if (chi_max < 1) fail("chi_max must be at least 1");
  if (!(cutoff >= 0.0) || cutoff >= 1.0) fail("cutoff must lie in [0, 1)");
  if (!(eps > 0.0)) fail("eps must be positive");
  if (threads < 1) fail("threads must be at least 1");
  if (bound_J != "max_norm" && bound_J != "coupling")
    fail("bound_J must be 'max_norm' or 'coupling'");
  try {
    (void)term_ordering();
    (void)cuts();
    (void)initial_pattern();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  for (auto x : r)
    if (x < 1) fail("every r must be at least 1");
  for (int x : p)
    if (!supported_order(x)) fail("unsupported order " + std::to_string(x) + " (use 1, 2, 4, 6)");
  if (!supported_order(reference_p)) fail("unsupported reference order");
  if (reference_r < 1) fail("reference_r must be at least 1");
  for (auto x : n)
    if (x < 2) fail("every n must be at least 2");
  for (auto x : dense_n)
    if (x < 2 || x > kDenseLimit)
      fail("dense_n entries must lie in [2, " + std::to_string(kDenseLimit) + "]");
  for (double x : taus)
    if (!(x > 0.0)) fail("step sizes must be positive");

  const bool needs_work = experiment != "resources";
  if (needs_work && (r.empty() || p.empty())) fail("r and p lists must be non-empty");

  if (experiment == "validate") {
    if (model.family != "tfim") fail("validate needs the tfim model family");
    if (panels.empty()) fail("no panels requested");
    for (const auto& pn : panels)
      if (pn != "a" && pn != "b" && pn != "c" && pn != "d") fail("unknown panel '" + pn + "'");
    if (n.empty()) fail("n list must be non-empty");
    if (panel_b.n < 4 || panel_b.n > 10) fail("panel_b.n must lie in [4, 10]");
    if (panel_b.window < 1 || panel_b.window > panel_b.n / 2) fail("panel_b.window out of range");
    if (panel_b.states_per_level < 1) fail("panel_b.states_per_level must be at least 1");
  }
  if (experiment == "separation" || experiment == "orders") {
    if (n.empty()) fail("n list must be non-empty");
    for (auto x : n)
      if (x > kDenseLimit)
        fail("n = " + std::to_string(x) + " exceeds the dense limit of " +
             std::to_string(kDenseLimit) + " for a dense-backend experiment");
  }
  if (experiment == "separation") {
    if (n.size() < 2) fail("separation needs at least two system sizes");
    if (model.family != "tfim") fail("separation needs the tfim model family for the area-law runs");
    if (volume_model.family != "all_to_all") fail("separation needs all_to_all as the volume model");
  }
  if (experiment == "orders" && taus.size() < 4) fail("orders needs at least 4 step sizes");
  if (experiment == "sweep") {
    if (n.empty()) fail("n list must be non-empty");
    for (auto x : n)
      if (x > kDenseLimit && !model.nearest_neighbour())
        fail("n = " + std::to_string(x) + " needs the MPS backend, which supports tfim and "
                                          "heisenberg only");
  }
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ModelSpec& m) {
  return {{"family", m.family}, {"J", m.J}, {"h", m.h}};
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"experiment", c.experiment},
          {"model", to_json(c.model)},
          {"volume_model", to_json(c.volume_model)},
          {"n", c.n},
          {"dense_n", c.dense_n},
          {"t", c.t},
          {"r", c.r},
          {"p", c.p},
          {"taus", c.taus},
          {"chi_max", c.chi_max},
          {"cutoff", c.cutoff},
          {"cut_mode", c.cut_mode},
          {"ordering", c.ordering},
          {"initial_state", c.initial_state},
          {"reference_r", c.reference_r},
          {"reference_p", c.reference_p},
          {"eps", c.eps},
          {"bound_J", c.bound_J},
          {"panels", c.panels},
          {"panel_b",
           {{"n", c.panel_b.n},
            {"max_gates", c.panel_b.max_gates},
            {"states_per_level", c.panel_b.states_per_level},
            {"window", c.panel_b.window}}},
          {"seed", c.seed},
          {"output", c.output},
          {"threads", c.threads},
          {"plots", c.plots},
          {"record_timings", c.record_timings},
          {"constants", to_json(c.constants)}};
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void read_model(const nlohmann::json& j, ModelSpec& m, const std::string& where) {
  reject_unknown(j, {"family", "J", "h"}, where);
  read(j, "family", m.family);
  read(j, "J", m.J);
  read(j, "h", m.h);
}

}  // namespace detail

// Overlays `j` on `base`. Unknown keys and type mismatches are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base) {
  using detail::read;
  try {
    detail::reject_unknown(
        j,
        {"experiment", "model", "volume_model", "n", "dense_n", "t", "r", "p", "taus", "chi_max",
         "cutoff", "cut_mode", "ordering", "initial_state", "reference_r", "reference_p", "eps",
         "bound_J", "panels", "panel_b", "seed", "output", "threads", "plots", "record_timings",
         "constants"},
        "config");
    if (j.contains("experiment")) {
      const auto name = j.at("experiment").get<std::string>();
      if (name != base.experiment) base = default_config(name);
    }
    if (j.contains("model")) detail::read_model(j.at("model"), base.model, "model");
    if (j.contains("volume_model"))
      detail::read_model(j.at("volume_model"), base.volume_model, "volume_model");
    read(j, "n", base.n);
    read(j, "dense_n", base.dense_n);
    read(j, "t", base.t);
    read(j, "r", base.r);
    read(j, "p", base.p);
    read(j, "taus", base.taus);
    read(j, "chi_max", base.chi_max);
    read(j, "cutoff", base.cutoff);
    read(j, "cut_mode", base.cut_mode);
    read(j, "ordering", base.ordering);
    read(j, "initial_state", base.initial_state);
    read(j, "reference_r", base.reference_r);
    read(j, "reference_p", base.reference_p);
    read(j, "eps", base.eps);
    read(j, "bound_J", base.bound_J);
    read(j, "panels", base.panels);
    if (j.contains("panel_b")) {
      const auto& b = j.at("panel_b");
      detail::reject_unknown(b, {"n", "max_gates", "states_per_level", "window"}, "panel_b");
      read(b, "n", base.panel_b.n);
      read(b, "max_gates", base.panel_b.max_gates);
      read(b, "states_per_level", base.panel_b.states_per_level);
      read(b, "window", base.panel_b.window);
    }
    read(j, "seed", base.seed);
    read(j, "output", base.output);
    read(j, "threads", base.threads);
    read(j, "plots", base.plots);
    read(j, "record_timings", base.record_timings);
    if (j.contains("constants")) {
      const auto& k = j.at("constants");
      detail::reject_unknown(k,
                             {"C1", "Cp", "c_growth", "c_p", "c_prime", "threshold_C",
                              "lower_bound_c", "geometry_c"},
                             "constants");
      auto& bc = base.constants;
      read(k, "C1", bc.C1);
      if (k.contains("Cp")) bc.Cp = k.at("Cp").get<double>();
      read(k, "c_growth", bc.c_growth);
      read(k, "c_prime", bc.c_prime);
      read(k, "threshold_C", bc.threshold_C);
      read(k, "lower_bound_c", bc.lower_bound_c);
      read(k, "geometry_c", bc.geometry_c);
      if (k.contains("c_p")) {
        const auto& cp = k.at("c_p");
        if (!cp.is_object()) throw ConfigError("constants.c_p must map order to constant");
        for (const auto& [key, v] : cp.items()) bc.c_p[std::stoi(key)] = v.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    throw ConfigError("malformed config: " + msg);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return base;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  std::string name = "validate";
  if (j.is_object() && j.contains("experiment") && j.at("experiment").is_string())
    name = j.at("experiment").get<std::string>();
  return config_from_json(j, default_config(name));
}

}  // namespace entrotter
