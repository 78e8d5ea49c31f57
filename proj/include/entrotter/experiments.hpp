#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "entrotter/bounds.hpp"
#include "entrotter/config.hpp"
#include "entrotter/dense.hpp"
#include "entrotter/hamiltonian.hpp"
#include "entrotter/mps.hpp"
#include "entrotter/records.hpp"
#include "entrotter/svg.hpp"
#include "entrotter/trotter.hpp"

namespace entrotter {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Controlled-entropy states and Pauli scans across a cut

namespace detail {

// splitmix64 finaliser; derives independent per-job seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::size_t uniform_index(GaussianStream& g, std::size_t k) {
  return std::min(k - 1, static_cast<std::size_t>(g.uniform_open() * static_cast<double>(k)));
}

}  // namespace detail

// Haar-like random unitary: QR of a complex Gaussian matrix with the phases of R removed.
template <int N>
Eigen::Matrix<cplx, N, N> random_unitary(GaussianStream& g) {
  Eigen::Matrix<cplx, N, N> a;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) a(i, j) = cplx{g.next(), g.next()};
  Eigen::HouseholderQR<Eigen::Matrix<cplx, N, N>> qr(a);
  Eigen::Matrix<cplx, N, N> q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < N; ++j) {
    const double m = std::abs(r(j, j));
    if (m > 0.0) q.col(j) *= r(j, j) / m;
  }
  return q;
}

// Random product state followed by `gates` random two-qubit unitaries, each
// acting on one qubit left of `cut` and one right of it.
inline DenseState controlled_entropy_state(std::size_t n, std::size_t cut, std::size_t gates,
                                           std::uint64_t seed) {
  if (cut < 1 || cut >= n) throw std::invalid_argument("cut must split the register");
  GaussianStream g(seed);
  Vector v = DenseState::from_product(n, ProductPattern::zeros()).amplitudes();
  for (std::size_t q = 0; q < n; ++q) apply_one_qubit_gate_inplace(v, q, random_unitary<2>(g));
  for (std::size_t k = 0; k < gates; ++k) {
    const std::size_t a = detail::uniform_index(g, cut);
    const std::size_t b = cut + detail::uniform_index(g, n - cut);
    apply_two_qubit_gate_inplace(v, a, b, random_unitary<4>(g));
  }
  v.normalize();
  return {n, std::move(v)};
}

// Unit-norm Pauli strings of weight 1, and weight 2 on neighbouring qubits, within [lo, hi).
inline std::vector<PauliTerm> local_pauli_strings(std::size_t lo, std::size_t hi) {
  std::vector<PauliTerm> out;
  const Pauli all[] = {Pauli::X, Pauli::Y, Pauli::Z};
  for (std::size_t q = lo; q < hi; ++q)
    for (Pauli a : all) out.emplace_back(1.0, std::map<std::size_t, Pauli>{{q, a}});
  for (std::size_t q = lo; q + 1 < hi; ++q)
    for (Pauli a : all)
      for (Pauli b : all) out.emplace_back(1.0, std::map<std::size_t, Pauli>{{q, a}, {q + 1, b}});
  return out;
}

struct CommutatorScan {
  double max_abs = 0.0;
  std::size_t pairs = 0;  // non-commuting pairs evaluated
};

// Largest |<[a, b]>| over non-commuting pairs whose joint support straddles
// the cut between qubits cut-1 and cut. Strings live within `window` qubits of the cut.
inline CommutatorScan scan_straddling_commutators(const DenseState& s, std::size_t cut,
                                                  std::size_t window) {
  const std::size_t n = s.num_qubits();
  if (cut < 1 || cut >= n) throw std::invalid_argument("cut must split the register");
  const std::size_t lo = cut >= window ? cut - window : 0;
  const std::size_t hi = std::min(n, cut + window);
  const auto strings = local_pauli_strings(lo, hi);
  std::vector<Vector> images;
  images.reserve(strings.size());
  for (const auto& p : strings) images.push_back(apply_pauli_string(s.amplitudes(), p));

  CommutatorScan out;
  for (std::size_t i = 0; i < strings.size(); ++i)
    for (std::size_t j = i + 1; j < strings.size(); ++j) {
      if (strings_commute(strings[i], strings[j])) continue;
      bool left = false, right = false;
      for (const auto* t : {&strings[i], &strings[j]})
        for (const auto& [q, _] : t->paulis) (q < cut ? left : right) = true;
      if (!left || !right) continue;
      // Hermitian a, b: <[a, b]> = 2i Im<a psi | b psi>.
      const double v = 2.0 * std::abs(images[i].dot(images[j]).imag());
      out.max_abs = std::max(out.max_abs, v);
      ++out.pairs;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Job pool

using Job = std::function<std::vector<ExperimentRecord>()>;

inline std::vector<ExperimentRecord> run_jobs(const std::vector<Job>& jobs, std::size_t threads) {
  std::vector<std::vector<ExperimentRecord>> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        slots[i] = jobs[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t k = std::max<std::size_t>(1, std::min(threads, jobs.size()));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<ExperimentRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  sort_records(out);
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers

struct ExperimentResult {
  std::string experiment;
  std::vector<ExperimentRecord> records;
  nlohmann::json summary = nlohmann::json::object();
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline ExperimentRecord base_record(const std::string& experiment, const ExperimentConfig& cfg,
                                    const ModelSpec& model, const HamiltonianModel& h) {
  const auto meta = interaction_metadata(h);
  ExperimentRecord r;
  r.experiment = experiment;
  r.model = model.family;
  r.geometry = to_string(h.geometry().kind);
  r.n = h.num_qubits();
  r.L = meta.term_count;
  r.J = model.J;
  r.h = model.h;
  r.d = static_cast<double>(meta.max_degree);
  r.t = cfg.t;
  r.seed = cfg.seed;
  return r;
}

// Bound columns for a run from a state with entropy s_max.
inline void fill_bounds(ExperimentRecord& rec, const HamiltonianModel& h,
                        const ExperimentConfig& cfg, double s_max) {
  const auto meta = interaction_metadata(h);
  const auto& k = cfg.constants;
  const double J = cfg.bound_J == "coupling" && rec.J ? *rec.J : meta.max_norm;
  const double d = static_cast<double>(meta.max_degree);
  const double t = rec.t.value_or(cfg.t);
  const double r = static_cast<double>(rec.r);
  const double n = static_cast<double>(h.num_qubits());
  const double s_star = effective_entanglement(s_max, d, J, t, k.c_growth);
  rec.S_star = s_star;
  if (k.c_p.count(rec.p))
    rec.bound_standard = standard_bound(static_cast<double>(meta.term_count), J, t, r, rec.p, k);
  rec.bound_ent_first = ent_bound_first(t, J, d, s_star, n, r, k.C1);
  if (rec.p >= 2) rec.bound_ent_p = ent_bound_p(t, J, d, s_star, n, r, rec.p, k);
}

inline void set_runtime(ExperimentRecord& rec, const ExperimentConfig& cfg,
                        std::chrono::steady_clock::time_point start) {
  if (cfg.record_timings) rec.runtime_ms = elapsed_ms(start);
}

// Two-sided 95% Student-t quantiles for 1..30 degrees of freedom.
inline double t_quantile_95(std::size_t dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof == 0) return std::numeric_limits<double>::infinity();
  return dof <= 30 ? table[dof - 1] : 1.96;
}

inline nlohmann::json fit_json(const LogLogFit& f, std::size_t samples) {
  const double half = samples > 2 ? t_quantile_95(samples - 2) * f.slope_stderr : 0.0;
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"slope_stderr", f.slope_stderr},
          {"ci95", {f.slope - half, f.slope + half}},
          {"samples", samples}};
}

}  // namespace detail

struct MpsRun {
  MpsState state;
  double max_entropy = 0.0;  // over all bonds and all step boundaries
};

// Trotter evolution on the MPS backend, tracking the largest bond entropy.
inline MpsRun evolve_mps_tracking(const HamiltonianModel& h, const MpsState& psi0, int p, double t,
                                  std::size_t r, Ordering ordering) {
  const TrotterPlan one = build_plan(h, p, t / static_cast<double>(r), 1, ordering);
  MpsRun run{psi0, mps_max_entropy(psi0)};
  for (std::size_t k = 0; k < r; ++k) {
    run.state = execute(one, run.state);
    run.max_entropy = std::max(run.max_entropy, mps_max_entropy(run.state));
  }
  return run;
}

// ---------------------------------------------------------------------------
// validate: the four validation panels

inline ExperimentResult run_validation(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto wants = [&](const char* p) {
    return std::find(cfg.panels.begin(), cfg.panels.end(), p) != cfg.panels.end();
  };
  const int p = cfg.p.front();
  const std::size_t r = cfg.r.front();
  const Ordering ord = cfg.term_ordering();
  std::vector<Job> jobs;

  if (wants("a")) {
    for (std::size_t n : cfg.n) {
      jobs.emplace_back([&cfg, n, p, r, ord] {
        const auto start = std::chrono::steady_clock::now();
        const auto h = cfg.model.build(n, cfg.seed);
        const auto psi0 = MpsState::from_product(n, cfg.initial_pattern(), cfg.chi_max, cfg.cutoff);
        const auto run = evolve_mps_tracking(h, psi0, p, cfg.t, r, ord);
        auto rec = detail::base_record("panel_a", cfg, cfg.model, h);
        rec.p = p;
        rec.r = r;
        rec.chi_max = cfg.chi_max;
        rec.cutoff = cfg.cutoff;
        rec.backend = "mps";
        rec.S_max_initial = mps_max_entropy(psi0);
        rec.S_star = run.max_entropy;
        rec.discarded_weight = run.state.cum_discarded();
        detail::set_runtime(rec, cfg, start);

        auto vol = detail::base_record("panel_a", cfg, cfg.model, h);
        vol.p = p;
        vol.r = r;
        vol.backend = "bound";
        vol.curve_provenance = "bound";
        vol.S_star = static_cast<double>(n) / 2.0;
        return std::vector<ExperimentRecord>{rec, vol};
      });
    }
  }

  if (wants("b")) {
    const auto& b = cfg.panel_b;
    const std::size_t cut = b.n / 2;
    for (std::size_t g = 0; g <= b.max_gates; ++g)
      for (std::size_t i = 0; i < b.states_per_level; ++i)
        jobs.emplace_back([&cfg, &b, cut, g, i] {
          const auto start = std::chrono::steady_clock::now();
          const std::uint64_t seed = detail::mix_seed(cfg.seed, g * 1000003ULL + i);
          const auto state = controlled_entropy_state(b.n, cut, g, seed);
          const double s = entanglement_entropy(schmidt_spectrum(state, contiguous_cut(cut)));
          const auto scan = scan_straddling_commutators(state, cut, b.window);
          ExperimentRecord rec;
          rec.experiment = "panel_b";
          rec.model = "random_circuit";
          rec.geometry = "chain";
          rec.n = b.n;
          rec.L = g;  // entangling gates applied
          rec.p = 1;
          rec.r = 1;
          rec.seed = seed;
          rec.backend = "dense";
          rec.S_max_initial = s;
          rec.error = scan.max_abs;
          detail::set_runtime(rec, cfg, start);
          return std::vector<ExperimentRecord>{rec};
        });
    jobs.emplace_back([&cfg, &b] {
      std::vector<ExperimentRecord> out;
      for (std::size_t k = 0; k <= 4 * (b.n / 2); ++k) {
        ExperimentRecord rec;
        rec.experiment = "panel_b";
        rec.model = "random_circuit";
        rec.geometry = "chain";
        rec.n = b.n;
        rec.seed = cfg.seed;
        rec.backend = "bound";
        rec.curve_provenance = "bound";
        rec.S_max_initial = 0.25 * static_cast<double>(k);
        rec.error = commutator_entropy_bound_raw(*rec.S_max_initial, 1.0, 1.0);
        out.push_back(rec);
      }
      return out;
    });
  }

  std::set<std::size_t> sizes;
  if (wants("c") || wants("d")) {
    sizes.insert(cfg.n.begin(), cfg.n.end());
    sizes.insert(cfg.dense_n.begin(), cfg.dense_n.end());
    for (std::size_t n : sizes) {
      jobs.emplace_back([&cfg, n, p, r, ord] {
        const auto start = std::chrono::steady_clock::now();
        const auto h = cfg.model.build(n, cfg.seed);
        auto rec = detail::base_record("panel_c", cfg, cfg.model, h);
        rec.p = p;
        rec.r = r;
        if (n <= kDenseLimit) {
          const auto psi0 = DenseState::from_product(n, cfg.initial_pattern());
          const auto s = measure_error(h, psi0, p, cfg.t, r, ord, cfg.cuts());
          rec.backend = "dense";
          rec.S_max_initial = s.s_max_initial;
          rec.error = s.error;
        } else {
          const auto psi0 = MpsState::from_product(n, cfg.initial_pattern(), cfg.chi_max, cfg.cutoff);
          const auto trotter = execute(build_plan(h, p, cfg.t, r, ord), psi0);
          const auto ref =
              execute(build_plan(h, cfg.reference_p, cfg.t, cfg.reference_r, ord), psi0);
          rec.backend = "mps";
          rec.chi_max = cfg.chi_max;
          rec.cutoff = cfg.cutoff;
          rec.S_max_initial = mps_max_entropy(psi0);
          rec.error = mps_distance(trotter, ref);
          rec.discarded_weight = trotter.cum_discarded() + ref.cum_discarded();
        }
        detail::fill_bounds(rec, h, cfg, *rec.S_max_initial);
        detail::set_runtime(rec, cfg, start);

        auto vol = detail::base_record("panel_c", cfg, cfg.model, h);
        vol.p = p;
        vol.r = r;
        vol.backend = "bound";
        vol.curve_provenance = "bound";
        vol.S_max_initial = static_cast<double>(n) / 2.0;
        detail::fill_bounds(vol, h, cfg, *vol.S_max_initial);
        return std::vector<ExperimentRecord>{rec, vol};
      });
    }
  }

  ExperimentResult result;
  result.experiment = "validate";
  auto all = run_jobs(jobs, cfg.threads);

  // Panel d: volume-law bound over the measured area-law error at each n.
  std::vector<ExperimentRecord> panel_d;
  if (wants("d")) {
    std::map<std::size_t, const ExperimentRecord*> area, vol;
    for (const auto& rec : all)
      if (rec.experiment == "panel_c")
        (rec.curve_provenance == "measured" ? area : vol)[rec.n] = &rec;
    for (const auto& [n, a] : area) {
      const auto* v = vol.at(n);
      ExperimentRecord d = *v;
      d.experiment = "panel_d";
      d.backend = a->backend;
      d.error = a->error;
      d.improvement = *v->bound_ent_first / *a->error;
      panel_d.push_back(d);
    }
  }
  // Bound soundness over the measured area-law runs.
  if (wants("c") || wants("d")) {
    nlohmann::json findings = nlohmann::json::array();
    std::size_t std_viol = 0, ent_viol = 0, runs = 0;
    for (const auto& rec : all)
      if (rec.experiment == "panel_c" && rec.curve_provenance == "measured") {
        ++runs;
        if (rec.bound_standard && *rec.error > *rec.bound_standard) ++std_viol;
        if (*rec.error > *rec.bound_ent_first) {
          ++ent_viol;
          findings.push_back({{"n", rec.n}, {"error", *rec.error}, {"bound", *rec.bound_ent_first}});
        }
      }
    result.summary["soundness"] = {{"measured_runs", runs},
                       {"standard_bound_violations", std_viol},
                       {"ent_bound_first_violations", ent_viol},
                       {"ent_bound_findings", findings}};
  }
  if (!wants("c"))
    all.erase(std::remove_if(all.begin(), all.end(),
                             [](const ExperimentRecord& x) { return x.experiment == "panel_c"; }),
              all.end());
  all.insert(all.end(), panel_d.begin(), panel_d.end());
  sort_records(all);
  result.records = std::move(all);

  // Summary checks.
  auto& sm = result.summary;
  if (wants("a")) {
    double worst = 0.0;
    for (const auto& rec : result.records)
      if (rec.experiment == "panel_a" && rec.curve_provenance == "measured")
        worst = std::max(worst, *rec.S_star);
    sm["panel_a"] = {{"max_area_law_entropy", worst}, {"below_one_bit", worst < 1.0}};
  }
  if (wants("b")) {
    std::size_t violations = 0, states = 0;
    for (const auto& rec : result.records)
      if (rec.experiment == "panel_b" && rec.curve_provenance == "measured") {
        ++states;
        if (*rec.error > commutator_entropy_bound_raw(*rec.S_max_initial, 1.0, 1.0) + 1e-9)
          ++violations;
      }
    sm["panel_b"] = {{"states", states}, {"bound_violations", violations}};
  }
  if (wants("d")) {
    nlohmann::json ratios = nlohmann::json::array();
    bool monotone = true;
    double prev = -1.0;
    for (const auto& rec : panel_d) {
      ratios.push_back({{"n", rec.n}, {"ratio", *rec.improvement}});
      if (*rec.improvement <= prev) monotone = false;
      prev = *rec.improvement;
    }
    sm["panel_d"] = {{"ratios", ratios}, {"monotone_increasing", monotone}};
  }
  sm["bound_J"] = cfg.bound_J;
  return result;
}

// ---------------------------------------------------------------------------
// separation: area-law TFIM vs all-to-all error growth with n

inline ExperimentResult run_separation(const ExperimentConfig& cfg) {
  cfg.validate();
  const int p = cfg.p.front();
  const std::size_t r = cfg.r.front();
  const Ordering ord = cfg.term_ordering();
  std::vector<Job> jobs;
  for (std::size_t n : cfg.n)
    for (int which = 0; which < 2; ++which)
      jobs.emplace_back([&cfg, n, p, r, ord, which] {
        const auto start = std::chrono::steady_clock::now();
        const ModelSpec& spec = which == 0 ? cfg.model : cfg.volume_model;
        const auto h = spec.build(n, cfg.seed);
        const auto psi0 = DenseState::from_product(
            n, which == 0 ? cfg.initial_pattern() : ProductPattern::plus());
        const auto s = measure_error(h, psi0, p, cfg.t, r, which == 0 ? ord : Ordering::forward,
                                     cfg.cuts());
        auto rec = detail::base_record("separation", cfg, spec, h);
        rec.p = p;
        rec.r = r;
        rec.backend = "dense";
        rec.S_max_initial = s.s_max_initial;
        rec.error = s.error;
        detail::fill_bounds(rec, h, cfg, s.s_max_initial);
        detail::set_runtime(rec, cfg, start);
        return std::vector<ExperimentRecord>{rec};
      });

  ExperimentResult result;
  result.experiment = "separation";
  result.records = run_jobs(jobs, cfg.threads);

  std::map<std::size_t, double> area, vol;
  for (const auto& rec : result.records)
    (rec.model == cfg.volume_model.family ? vol : area)[rec.n] = *rec.error;
  std::vector<double> ns, ea, ea_norm, ev;
  for (const auto& [n, e] : area) {
    ns.push_back(static_cast<double>(n));
    ea.push_back(e);
    const double lg = std::log2(static_cast<double>(n));
    ea_norm.push_back(e / (lg * lg));
    ev.push_back(vol.at(n));
  }
  for (auto& rec : result.records)
    if (rec.model == cfg.volume_model.family) rec.improvement = vol.at(rec.n) / area.at(rec.n);

  nlohmann::json ratio = nlohmann::json::array();
  bool increasing = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ratio.push_back({{"n", ns[i]}, {"ratio", ev[i] / ea[i]}});
    if (i && ev[i] / ea[i] <= ev[i - 1] / ea[i - 1]) increasing = false;
  }
  result.summary = {{"area_fit", detail::fit_json(fit_loglog(ns, ea), ns.size())},
                    {"area_fit_log2n_normalised", detail::fit_json(fit_loglog(ns, ea_norm), ns.size())},
                    {"volume_fit", detail::fit_json(fit_loglog(ns, ev), ns.size())},
                    {"ratio", ratio},
                    {"ratio_increasing", increasing}};
  return result;
}

// ---------------------------------------------------------------------------
// orders: single-step error exponent per formula order

inline ExperimentResult run_order_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n.front();
  const auto h = cfg.model.build(n, cfg.seed);
  const auto psi0 = DenseState::from_product(n, cfg.initial_pattern());
  const ExactPropagator exact(h);
  std::vector<OrderFit> fits(cfg.p.size());
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.p.size(); ++i)
    jobs.emplace_back([&, i] {
      const auto start = std::chrono::steady_clock::now();
      const int p = cfg.p[i];
      fits[i] = order_scaling_fit(exact, psi0, p, cfg.taus, cfg.term_ordering());
      std::vector<ExperimentRecord> out;
      for (std::size_t k = 0; k < cfg.taus.size(); ++k) {
        auto rec = detail::base_record("orders", cfg, cfg.model, h);
        rec.p = p;
        rec.r = 1;
        rec.t = cfg.taus[k];
        rec.backend = "dense";
        rec.S_max_initial = 0.0;
        rec.error = fits[i].errors[k];
        detail::fill_bounds(rec, h, cfg, *rec.S_max_initial);
        out.push_back(rec);
      }
      detail::set_runtime(out.front(), cfg, start);
      return out;
    });

  ExperimentResult result;
  result.experiment = "orders";
  result.records = run_jobs(jobs, cfg.threads);
  nlohmann::json fj = nlohmann::json::array();
  for (std::size_t i = 0; i < cfg.p.size(); ++i) {
    nlohmann::json e = {{"p", cfg.p[i]}, {"expected_slope", cfg.p[i] + 1},
                        {"degenerate", fits[i].fit.degenerate}};
    if (!fits[i].fit.degenerate) e["fit"] = detail::fit_json(fits[i].fit, cfg.taus.size());
    fj.push_back(e);
  }
  result.summary = {{"fits", fj}};
  return result;
}

// ---------------------------------------------------------------------------
// resources: step-count table across geometries

inline std::vector<ResourceRow> default_resource_rows(const BoundConstants& k = {}) {
  const double c = k.geometry_c;
  return {resource_row("1D n=100", GeometryKind::chain, {100}, 1.0, 1.0, c),
          resource_row("1D n=1000", GeometryKind::chain, {1000}, 1.0, 1.0, c),
          resource_row("2D 10x10", GeometryKind::grid2d, {10, 10}, 1.0, 1.0, c),
          resource_row("2D 32x32", GeometryKind::grid2d, {32, 32}, 1.0, 1.0, c),
          resource_row("Tree n=100", GeometryKind::tree, {100}, 1.0, 1.0, c),
          resource_row("3D 5x5x5", GeometryKind::grid3d, {5, 5, 5}, 1.0, 1.0, c)};
}

inline ExperimentResult run_resource_table(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.experiment = "resources";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : default_resource_rows(cfg.constants)) {
    ExperimentRecord rec;
    rec.experiment = "resources";
    rec.model = "table";
    rec.geometry = to_string(row.geometry);
    rec.n = static_cast<std::size_t>(row.n);
    rec.seed = cfg.seed;
    rec.backend = "bound";
    rec.curve_provenance = "bound";
    rec.S_max_initial = row.entropy;
    rec.bound_standard = row.worst_case;
    rec.bound_ent_first = row.entanglement;
    rec.improvement = row.improvement;
    result.records.push_back(rec);
    rows.push_back({{"system", row.label},
                    {"n", row.n},
                    {"entropy", row.entropy},
                    {"worst_case", row.worst_case},
                    {"entanglement", row.entanglement},
                    {"improvement", row.improvement}});
  }
  sort_records(result.records);
  result.summary = {{"units", "t^2 J^2 / eps"}, {"rows", rows}};
  return result;
}

// ---------------------------------------------------------------------------
// sweep: (n, r, p) grid, dense up to the dense limit and MPS beyond

inline ExperimentResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Ordering ord = cfg.term_ordering();
  std::vector<Job> jobs;
  for (std::size_t n : cfg.n)
    for (std::size_t r : cfg.r)
      for (int p : cfg.p)
        jobs.emplace_back([&cfg, n, r, p, ord] {
          const auto start = std::chrono::steady_clock::now();
          const auto h = cfg.model.build(n, cfg.seed);
          auto rec = detail::base_record("sweep", cfg, cfg.model, h);
          rec.p = p;
          rec.r = r;
          if (n <= kDenseLimit) {
            const auto s =
                measure_error(h, DenseState::from_product(n, cfg.initial_pattern()), p, cfg.t, r, ord,
                              cfg.cuts());
            rec.backend = "dense";
            rec.S_max_initial = s.s_max_initial;
            rec.error = s.error;
          } else {
            const auto psi0 =
                MpsState::from_product(n, cfg.initial_pattern(), cfg.chi_max, cfg.cutoff);
            const auto a = execute(build_plan(h, p, cfg.t, r, ord), psi0);
            const auto b = execute(build_plan(h, cfg.reference_p, cfg.t, cfg.reference_r, ord), psi0);
            rec.backend = "mps";
            rec.chi_max = cfg.chi_max;
            rec.cutoff = cfg.cutoff;
            rec.S_max_initial = mps_max_entropy(psi0);
            rec.error = mps_distance(a, b);
            rec.discarded_weight = a.cum_discarded() + b.cum_discarded();
          }
          detail::fill_bounds(rec, h, cfg, *rec.S_max_initial);
          detail::set_runtime(rec, cfg, start);
          return std::vector<ExperimentRecord>{rec};
        });
  ExperimentResult result;
  result.experiment = "sweep";
  result.records = run_jobs(jobs, cfg.threads);
  std::size_t viol = 0;
  for (const auto& rec : result.records)
    if (rec.bound_standard && *rec.error > *rec.bound_standard) ++viol;
  result.summary = {{"runs", result.records.size()}, {"standard_bound_violations", viol}};
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "validate") return run_validation(cfg);
  if (cfg.experiment == "separation") return run_separation(cfg);
  if (cfg.experiment == "orders") return run_order_sweep(cfg);
  if (cfg.experiment == "resources") return run_resource_table(cfg);
  if (cfg.experiment == "sweep") return run_sweep(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

using Pred = std::function<bool(const ExperimentRecord&)>;
using Get = std::function<OptD(const ExperimentRecord&)>;

inline void add_series(SvgPlot& plot, const std::vector<ExperimentRecord>& rows, const Pred& keep,
                       const std::string& name, const Get& x, const Get& y, bool dashed = false,
                       bool lines = true) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (keep(r)) {
      const auto xv = x(r), yv = y(r);
      if (xv && yv) pts.emplace_back(*xv, *yv);
    }
  if (pts.empty()) return;
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  SvgPlot::Series s;
  s.name = name;
  s.dashed = dashed;
  s.lines = lines;
  for (const auto& [a, b] : pts) {
    s.x.push_back(a);
    s.y.push_back(b);
  }
  plot.add(std::move(s));
}

inline OptD col_n(const ExperimentRecord& r) { return static_cast<double>(r.n); }

inline Pred is(const std::string& provenance) {
  return [provenance](const ExperimentRecord& r) { return r.curve_provenance == provenance; };
}

inline SvgPlot plot_for(const std::string& name, const std::vector<ExperimentRecord>& rows) {
  const auto err = [](const ExperimentRecord& r) { return r.error; };
  if (name == "panel_a") {
    SvgPlot p("Entanglement entropy vs system size", "n", "S_max (bits)", true, true);
    add_series(p, rows, is("measured"), "area law (MPS)", col_n,
               [](const ExperimentRecord& r) { return r.S_star; });
    add_series(p, rows, is("bound"), "volume law n/2", col_n,
               [](const ExperimentRecord& r) { return r.S_star; }, true);
    return p;
  }
  if (name == "panel_b") {
    SvgPlot p("Commutator expectation vs entropy", "S (bits)", "max |<[a,b]>|", false, true);
    add_series(p, rows, is("measured"), "measured", [](const ExperimentRecord& r) { return r.S_max_initial; },
               err, false, false);
    add_series(p, rows, is("bound"), "2 * 2^S", [](const ExperimentRecord& r) { return r.S_max_initial; },
               err, true);
    return p;
  }
  if (name == "panel_c") {
    SvgPlot p("Trotter error vs system size", "n", "error", true, true);
    add_series(p, rows, is("measured"), "area law (measured)", col_n, err);
    add_series(p, rows, is("measured"), "area law (entanglement bound)", col_n,
               [](const ExperimentRecord& r) { return r.bound_ent_first; }, true);
    add_series(p, rows, is("bound"), "volume law (entanglement bound)", col_n,
               [](const ExperimentRecord& r) { return r.bound_ent_first; }, true);
    add_series(p, rows, is("bound"), "worst case", col_n,
               [](const ExperimentRecord& r) { return r.bound_standard; }, true);
    return p;
  }
  if (name == "panel_d") {
    SvgPlot p("Volume-law bound over area-law error", "n", "ratio", true, true);
    add_series(p, rows, [](const ExperimentRecord&) { return true; }, "ratio", col_n,
               [](const ExperimentRecord& r) { return r.improvement; });
    return p;
  }
  if (name == "separation") {
    SvgPlot p("Trotter error: area law vs all-to-all", "n", "error", true, true);
    std::set<std::string> models;
    for (const auto& r : rows) models.insert(r.model);
    for (const auto& m : models)
      add_series(p, rows, [m](const ExperimentRecord& r) { return r.model == m; }, m, col_n, err);
    return p;
  }
  if (name == "orders") {
    SvgPlot p("Single-step error vs step size", "tau", "error", true, true);
    std::set<int> ps;
    for (const auto& r : rows) ps.insert(r.p);
    for (int q : ps)
      add_series(p, rows, [q](const ExperimentRecord& r) { return r.p == q; },
                 "p = " + std::to_string(q), [](const ExperimentRecord& r) { return r.t; }, err);
    return p;
  }
  if (name == "resources") {
    SvgPlot p("Step-count improvement by geometry", "n", "improvement", true, true);
    std::set<std::string> geoms;
    for (const auto& r : rows) geoms.insert(r.geometry);
    for (const auto& g : geoms)
      add_series(p, rows, [g](const ExperimentRecord& r) { return r.geometry == g; }, g, col_n,
                 [](const ExperimentRecord& r) { return r.improvement; }, false, false);
    return p;
  }
  SvgPlot p("Trotter error", "n", "error", false, true);
  std::set<std::pair<int, std::size_t>> keys;
  for (const auto& r : rows) keys.insert({r.p, r.r});
  for (const auto& [q, rr] : keys)
    add_series(p, rows, [q = q, rr = rr](const ExperimentRecord& r) { return r.p == q && r.r == rr; },
               "p = " + std::to_string(q) + ", r = " + std::to_string(rr), col_n, err);
  return p;
}

inline std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

inline std::string json_version() {
  return std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
}

}  // namespace detail

// Files are grouped by experiment name: <name>.csv, <name>.svg, plus manifest.json.
// Everything is rendered in memory first, so a failure leaves no partial output.
inline std::vector<std::string> emit_outputs(const ExperimentResult& result,
                                             const ExperimentConfig& cfg, bool plots) {
  if (result.records.empty()) throw std::invalid_argument("no records to emit");
  std::map<std::string, std::vector<ExperimentRecord>> groups;
  for (const auto& r : result.records) groups[r.experiment].push_back(r);

  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& [name, rows] : groups) {
    files.emplace_back(name + ".csv", to_csv(rows));
    if (plots) files.emplace_back(name + ".svg", detail::plot_for(name, rows).render());
  }
  nlohmann::json config = to_json(cfg);
  config.erase("output");  // keeps the manifest identical across output locations
  nlohmann::json listing = nlohmann::json::array();
  for (const auto& f : files) listing.push_back(f.first);
  const nlohmann::json manifest = {
      {"tool", "entrotter"},
      {"version", kVersion},
      {"experiment", result.experiment},
      {"config", config},
      {"constants", to_json(cfg.constants)},
      {"versions",
       {{"entrotter", kVersion},
        {"eigen", detail::eigen_version()},
        {"nlohmann_json", detail::json_version()},
        {"compiler", __VERSION__}}},
      {"files", listing},
      {"summary", result.summary}};
  files.emplace_back("manifest.json", manifest.dump(2) + "\n");

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::string> written;
  for (const auto& [name, body] : files) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw std::runtime_error("failed to write '" + path.string() + "'");
    written.push_back(path.string());
  }
  return written;
}

}  // namespace entrotter
