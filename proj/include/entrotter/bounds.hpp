#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "entrotter/hamiltonian.hpp"
#include "entrotter/trotter.hpp"

namespace entrotter {

inline const double kLog2E = 1.0 / std::log(2.0);

// Constants left as O/Omega factors. Defaults are echoed in every report.
struct BoundConstants {
  double C1 = 8.0;
  std::optional<double> Cp;  // (4p)^p when unset
  double c_growth = 4.0 * kLog2E;
  std::map<int, double> c_p{{1, 0.5}, {2, 0.1}};
  double c_prime = 1.0;       // v_LR = c' d J
  double threshold_C = 1.0;
  double lower_bound_c = 1.0;
  double geometry_c = 1.0;    // prefactor of the geometry entropy presets

  double cp_for(int p) const { return Cp ? *Cp : std::pow(4.0 * p, p); }
};

namespace detail {

inline void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0) || std::isnan(v))
    throw std::invalid_argument(std::string(what) + " must be non-negative");
}

inline void require_pos(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

inline double log2n(double n) {
  if (!(n >= 2.0)) throw std::invalid_argument("bounds need n >= 2");
  return std::log2(n);
}

}  // namespace detail

// c_p (2 L J t)^{p+1} / r^p
inline double standard_bound(double L, double J, double t, double r, int p,
                             const BoundConstants& k = {}) {
  detail::require_pos(L, "L");
  detail::require_nonneg(J, "J");
  detail::require_nonneg(t, "t");
  detail::require_pos(r, "r");
  auto it = k.c_p.find(p);
  if (it == k.c_p.end())
    throw std::invalid_argument("no c_p constant for order " + std::to_string(p) +
                                "; supply one in the bound constants");
  return it->second * std::pow(2.0 * L * J * t, p + 1) / std::pow(r, p);
}

inline double effective_entanglement(double s_max, double d, double J, double t,
                                     double c_growth = 4.0 * kLog2E) {
  detail::require_nonneg(s_max, "S_max");
  detail::require_nonneg(d, "d");
  detail::require_nonneg(J, "J");
  detail::require_nonneg(t, "t");
  return s_max + c_growth * d * J * t;
}

// C1 t^2 J^2 d S* log2(n)^2 / r
inline double ent_bound_first(double t, double J, double d, double s_star, double n, double r,
                              double C1 = 8.0) {
  detail::require_nonneg(t, "t");
  detail::require_nonneg(J, "J");
  detail::require_nonneg(d, "d");
  detail::require_nonneg(s_star, "S*");
  detail::require_pos(r, "r");
  const double lg = detail::log2n(n);
  return C1 * t * t * J * J * d * s_star * lg * lg / r;
}

// Natural log of Cp (tJd)^{p+1} 2^{p S*/2} log2(n)^{p+1} / r^p. -inf when the bound is 0.
inline double log_ent_bound_p(double t, double J, double d, double s_star, double n, double r,
                              int p, double Cp) {
  if (p < 2) throw std::invalid_argument("higher-order entanglement bound needs p >= 2");
  detail::require_nonneg(t, "t");
  detail::require_nonneg(J, "J");
  detail::require_nonneg(d, "d");
  detail::require_nonneg(s_star, "S*");
  detail::require_pos(r, "r");
  detail::require_pos(Cp, "Cp");
  const double lg = detail::log2n(n);
  const double tjd = t * J * d;
  if (tjd == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(Cp) + (p + 1) * std::log(tjd) + 0.5 * p * s_star * std::log(2.0) +
         (p + 1) * std::log(lg) - p * std::log(r);
}

inline double ent_bound_p(double t, double J, double d, double s_star, double n, double r, int p,
                          const BoundConstants& k = {}) {
  return std::exp(log_ent_bound_p(t, J, d, s_star, n, r, p, k.cp_for(p)));
}

// S_A(t) <= S_A(0) + c_growth |dA| J |t|
inline double growth_bound(double s0, double boundary, double J, double t,
                           double c_growth = 4.0 * kLog2E) {
  detail::require_nonneg(s0, "S0");
  detail::require_nonneg(boundary, "boundary size");
  detail::require_nonneg(J, "J");
  return s0 + c_growth * boundary * J * std::abs(t);
}

// |<[a, b]>| <= 2 2^S ||a|| ||b||
inline double commutator_entropy_bound_raw(double s, double norm_a, double norm_b) {
  detail::require_nonneg(s, "S");
  detail::require_nonneg(norm_a, "norm");
  detail::require_nonneg(norm_b, "norm");
  return 2.0 * std::exp2(s) * norm_a * norm_b;
}

inline double commutator_entropy_bound(double s, double norm_a, double norm_b, double tau,
                                       double rank = std::numeric_limits<double>::infinity()) {
  detail::require_nonneg(tau, "tau");
  detail::require_pos(rank, "rank");
  detail::require_nonneg(s, "S");
  return 4.0 * tau * tau * norm_a * norm_b * std::min(std::exp2(s), rank);
}

// c t^2 h n / eps, valid for eps <= 1/4.
inline double lower_bound_steps(double t, double n, double eps, double h, double c = 1.0) {
  if (!(eps > 0.0)) throw std::invalid_argument("target error must be positive");
  if (eps > 0.25)
    throw std::invalid_argument("the lower bound only holds for target error <= 1/4, got " +
                                std::to_string(eps));
  detail::require_nonneg(t, "t");
  detail::require_pos(n, "n");
  detail::require_nonneg(h, "h");
  return c * t * t * h * n / eps;
}

struct ThresholdResult {
  bool satisfied = false;
  double improvement = 0.0;  // n^2 / (S* log2(n)^2)
  double s_star = 0.0;
};

inline ThresholdResult threshold_check(double s_max, double n, double d, double J, double t,
                                       double C = 1.0, double c_growth = 4.0 * kLog2E) {
  if (!(n >= 4.0)) throw std::invalid_argument("threshold check needs n >= 4");
  ThresholdResult out;
  out.s_star = effective_entanglement(s_max, d, J, t, c_growth);
  const double lg = std::log2(n);
  const double lhs = out.s_star * lg * lg;
  out.satisfied = lhs < C * n * n;
  out.improvement = lhs > 0.0 ? n * n / lhs : std::numeric_limits<double>::infinity();
  return out;
}

// Largest supported p with S* <= (2/p) log2 n; 1 if none.
inline int order_recommendation(double s_star, double n) {
  detail::require_nonneg(s_star, "S*");
  const double lg = detail::log2n(n);
  int best = 1;
  for (int p : {1, 2, 4, 6})
    if (s_star <= 2.0 / p * lg) best = p;
  return best;
}

// n / (J^2 log2(n)^2)
inline double separation_ratio(double n, double J) {
  detail::require_pos(J, "J");
  const double lg = detail::log2n(n);
  return n / (J * J * lg * lg);
}

// ---------------------------------------------------------------------------
// Geometry presets and step inversion

// Default S_max per geometry: chain keeps S0, grid2d c sqrt(n), grid3d c n^{2/3},
// tree c omega, all-to-all n/2.
inline double preset_entropy(GeometryKind g, double n, double s0, double treewidth = 1.0,
                             double c = 1.0) {
  switch (g) {
    case GeometryKind::chain: return s0;
    case GeometryKind::grid2d: return c * std::sqrt(n);
    case GeometryKind::grid3d: return c * std::cbrt(n * n);
    case GeometryKind::tree: return c * treewidth;
    case GeometryKind::all_to_all: return n / 2.0;
    case GeometryKind::custom: break;
  }
  throw std::invalid_argument("no entropy preset for geometry '" + to_string(g) + "'");
}

struct BoundParams {
  double n = 2;
  double L = 1;
  double J = 1;
  double h = 1;  // field strength, used by the lower bound
  double d = 2;
  double t = 1;
  double r = 1;
  int p = 1;
  double s_max = 0;
  GeometryKind geometry = GeometryKind::chain;
  double treewidth = 1;
  bool use_geometry_preset = false;
  BoundConstants constants;

  double entropy() const {
    return use_geometry_preset
               ? preset_entropy(geometry, n, s_max, treewidth, constants.geometry_c)
               : s_max;
  }
  double s_star() const { return effective_entanglement(entropy(), d, J, t, constants.c_growth); }

  void validate() const {
    detail::require_pos(n, "n");
    detail::require_pos(L, "L");
    detail::require_nonneg(J, "J");
    detail::require_nonneg(h, "h");
    detail::require_nonneg(d, "d");
    detail::require_nonneg(t, "t");
    detail::require_pos(r, "r");
    if (!supported_order(p)) throw std::invalid_argument("unsupported order " + std::to_string(p));
    if (!(s_max >= 0.0) || s_max > n / 2.0)
      throw std::invalid_argument("S_max must lie in [0, n/2]");
  }
};

enum class BoundKind { standard, entanglement };

// Smallest integer r with bound(r) <= eps.
inline double required_steps(const BoundParams& bp, double eps, BoundKind which) {
  if (!(eps > 0.0)) throw std::invalid_argument("target error must be positive");
  bp.validate();
  const int p = bp.p;
  double log_r = 0.0;  // natural log of the real-valued solution
  if (which == BoundKind::standard) {
    const double at_one = standard_bound(bp.L, bp.J, bp.t, 1.0, p, bp.constants);
    if (at_one == 0.0) return 1.0;
    log_r = (std::log(at_one) - std::log(eps)) / p;
  } else if (p == 1) {
    const double at_one = ent_bound_first(bp.t, bp.J, bp.d, bp.s_star(), bp.n, 1.0, bp.constants.C1);
    if (at_one == 0.0) return 1.0;
    log_r = std::log(at_one) - std::log(eps);
  } else {
    const double lb = log_ent_bound_p(bp.t, bp.J, bp.d, bp.s_star(), bp.n, 1.0, p,
                                      bp.constants.cp_for(p));
    if (std::isinf(lb)) return 1.0;
    log_r = (lb - std::log(eps)) / p;
  }
  // Guard against round-off pushing an exact integer up by one.
  const double r = std::exp(log_r);
  return std::max(1.0, std::ceil(r * (1.0 - 1e-12)));
}

struct BoundReport {
  BoundParams params;
  double eps = 0.0;
  double s_star = 0.0;
  double standard = 0.0;
  double ent_first = 0.0;
  std::optional<double> ent_p;  // only for p >= 2
  std::optional<double> lower_bound;
  double required_standard = 0.0;
  double required_ent = 0.0;
  bool threshold_satisfied = false;
  double improvement = 0.0;
};

inline BoundReport evaluate_bounds(const BoundParams& bp, double eps) {
  bp.validate();
  BoundReport rep;
  rep.params = bp;
  rep.eps = eps;
  rep.s_star = bp.s_star();
  const auto& k = bp.constants;
  rep.standard = standard_bound(bp.L, bp.J, bp.t, bp.r, bp.p, k);
  rep.ent_first = ent_bound_first(bp.t, bp.J, bp.d, rep.s_star, bp.n, bp.r, k.C1);
  if (bp.p >= 2) rep.ent_p = ent_bound_p(bp.t, bp.J, bp.d, rep.s_star, bp.n, bp.r, bp.p, k);
  if (eps <= 0.25) rep.lower_bound = lower_bound_steps(bp.t, bp.n, eps, bp.h, k.lower_bound_c);
  rep.required_standard = required_steps(bp, eps, BoundKind::standard);
  rep.required_ent = required_steps(bp, eps, BoundKind::entanglement);
  if (bp.n >= 4.0) {
    const auto th = threshold_check(bp.entropy(), bp.n, bp.d, bp.J, bp.t, k.threshold_C, k.c_growth);
    rep.threshold_satisfied = th.satisfied;
  }
  rep.improvement = rep.required_standard / rep.required_ent;
  return rep;
}

inline nlohmann::json to_json(const BoundConstants& k) {
  nlohmann::json cp = nlohmann::json::object();
  for (const auto& [p, c] : k.c_p) cp[std::to_string(p)] = c;
  nlohmann::json j{{"C1", k.C1},
                   {"c_growth", k.c_growth},
                   {"c_p", cp},
                   {"c_prime", k.c_prime},
                   {"threshold_C", k.threshold_C},
                   {"lower_bound_c", k.lower_bound_c},
                   {"geometry_c", k.geometry_c}};
  j["Cp"] = k.Cp ? nlohmann::json(*k.Cp) : nlohmann::json("(4p)^p");
  return j;
}

inline nlohmann::json to_json(const BoundReport& r) {
  const auto& p = r.params;
  nlohmann::json j{{"n", p.n},
                   {"L", p.L},
                   {"J", p.J},
                   {"h", p.h},
                   {"d", p.d},
                   {"t", p.t},
                   {"r", p.r},
                   {"p", p.p},
                   {"S_max", p.entropy()},
                   {"geometry", to_string(p.geometry)},
                   {"eps", r.eps},
                   {"S_star", r.s_star},
                   {"standard_bound", r.standard},
                   {"ent_bound_first", r.ent_first},
                   {"required_steps_standard", r.required_standard},
                   {"required_steps_ent", r.required_ent},
                   {"threshold_satisfied", r.threshold_satisfied},
                   {"improvement_factor", r.improvement},
                   {"constants", to_json(p.constants)}};
  j["ent_bound_p"] = r.ent_p ? nlohmann::json(*r.ent_p) : nlohmann::json(nullptr);
  j["lower_bound_steps"] = r.lower_bound ? nlohmann::json(*r.lower_bound) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Step-count table, in units of t^2 J^2 / eps: worst case n^2, entanglement
// S log2(n)^2 with S from the geometry preset.

struct ResourceRow {
  std::string label;
  GeometryKind geometry = GeometryKind::chain;
  std::vector<std::size_t> dims;
  double n = 0;
  double entropy = 0;
  double worst_case = 0;
  double entanglement = 0;
  double improvement = 0;
};

inline ResourceRow resource_row(std::string label, GeometryKind g, std::vector<std::size_t> dims,
                                double s0 = 1.0, double treewidth = 1.0, double c = 1.0) {
  ResourceRow row;
  row.label = std::move(label);
  row.geometry = g;
  row.dims = std::move(dims);
  row.n = 1.0;
  for (auto x : row.dims) row.n *= static_cast<double>(x);
  const double lg = detail::log2n(row.n);
  row.entropy = preset_entropy(g, row.n, s0, treewidth, c);
  row.worst_case = row.n * row.n;
  row.entanglement = row.entropy * lg * lg;
  row.improvement = row.worst_case / row.entanglement;
  return row;
}

}  // namespace entrotter
