#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "entrotter/dense.hpp"
#include "entrotter/hamiltonian.hpp"
#include "entrotter/mps.hpp"

namespace entrotter {

enum class Ordering { forward, even_odd };

inline std::string to_string(Ordering o) { return o == Ordering::forward ? "forward" : "even-odd"; }

inline Ordering ordering_from_string(const std::string& s) {
  if (s == "forward") return Ordering::forward;
  if (s == "even-odd") return Ordering::even_odd;
  throw std::invalid_argument("unknown term ordering '" + s + "'");
}

// Orders 1, 2, 4, 6. Order 2 is the symmetric (midpoint) formula; each higher
// even order 2k+2 is built from order 2k with s = (4 - 4^{1/(2k+1)})^{-1}.
inline bool supported_order(int p) { return p == 1 || p == 2 || p == 4 || p == 6; }

inline constexpr int kMaxSupportedOrder = 6;

inline double suzuki_weight(int k) { return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k + 1.0))); }

// Time fractions of the symmetric second-order blocks making up one step of
// S_p. Order 1 and 2 are a single block.
inline std::vector<double> suzuki_stage_multipliers(int p) {
  if (!supported_order(p))
    throw std::invalid_argument("unsupported product-formula order " + std::to_string(p) +
                                " (expected 1, 2, 4 or 6)");
  std::vector<double> fr{1.0};
  for (int order = 2; order < p; order += 2) {
    const double s = suzuki_weight(order / 2);
    std::vector<double> next;
    next.reserve(fr.size() * 5);
    for (double w : {s, s, 1.0 - 4.0 * s, s, s})
      for (double f : fr) next.push_back(w * f);
    fr = std::move(next);
  }
  return fr;
}

struct Stage {
  std::size_t term = 0;
  double multiplier = 0.0;  // fraction of the step time applied to this term
};

struct TrotterPlan {
  int order = 1;
  std::size_t steps = 1;
  double time = 0.0;
  Ordering ordering = Ordering::forward;
  std::size_t num_qubits = 0;
  std::vector<PauliTerm> terms;
  std::vector<Stage> stages;  // one step

  double step_time() const { return time / static_cast<double>(steps); }
  std::size_t exponentials_per_step() const { return stages.size(); }
};

// Term order: builder order, or for chains two-site terms on even bonds, then
// odd bonds, then everything else.
inline std::vector<std::size_t> term_order(const HamiltonianModel& h, Ordering ordering) {
  std::vector<std::size_t> idx(h.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (ordering == Ordering::forward) return idx;
  if (h.geometry().kind != GeometryKind::chain)
    throw std::invalid_argument("even-odd ordering needs a chain geometry");
  std::vector<std::size_t> even, odd, rest;
  for (auto j : idx) {
    const auto s = h.term(j).support();
    if (s.size() == 2 && s[1] == s[0] + 1)
      (s[0] % 2 == 0 ? even : odd).push_back(j);
    else
      rest.push_back(j);
  }
  idx.clear();
  for (auto* v : {&even, &odd, &rest}) idx.insert(idx.end(), v->begin(), v->end());
  return idx;
}

inline TrotterPlan build_plan(const HamiltonianModel& h, int p, double t, std::size_t r,
                              Ordering ordering = Ordering::forward) {
  if (r < 1) throw std::invalid_argument("Trotter step count must be at least 1");
  if (!std::isfinite(t)) throw std::invalid_argument("evolution time must be finite");
  const auto fractions = suzuki_stage_multipliers(p);
  TrotterPlan plan;
  plan.order = p;
  plan.steps = r;
  plan.time = t;
  plan.ordering = ordering;
  plan.num_qubits = h.num_qubits();
  plan.terms = h.terms();
  const auto order = term_order(h, ordering);

  auto push = [&](std::size_t j, double m) {
    if (!plan.stages.empty() && plan.stages.back().term == j)
      plan.stages.back().multiplier += m;
    else
      plan.stages.push_back({j, m});
  };
  if (p == 1) {
    for (auto j : order) push(j, 1.0);
    return plan;
  }
  for (double f : fractions) {
    for (auto j : order) push(j, 0.5 * f);
    for (auto it = order.rbegin(); it != order.rend(); ++it) push(*it, 0.5 * f);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Execution

inline void execute_inplace(const TrotterPlan& plan, Vector& v) {
  const double tau = plan.step_time();
  for (std::size_t step = 0; step < plan.steps; ++step)
    for (const auto& st : plan.stages)
      apply_term_exponential_inplace(v, plan.terms[st.term], tau * st.multiplier);
}

inline DenseState execute(const TrotterPlan& plan, const DenseState& psi0) {
  if (psi0.num_qubits() != plan.num_qubits)
    throw std::invalid_argument("plan and state register sizes differ");
  Vector v = psi0.amplitudes();
  execute_inplace(plan, v);
  return {psi0.num_qubits(), std::move(v)};
}

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cplx{0, -1}, cplx{0, 1}, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// exp(-i angle c P) for a one-site term.
inline Eigen::Matrix2cd one_site_gate(const PauliTerm& t, double angle) {
  const double theta = angle * t.coefficient.real();
  return std::cos(theta) * Eigen::Matrix2cd::Identity() -
         cplx{0.0, std::sin(theta)} * pauli_matrix(t.paulis.begin()->second);
}

// exp(-i angle c P_i P_{i+1}) in the basis s_i + 2 s_{i+1}.
inline Eigen::Matrix4cd two_site_gate(const PauliTerm& t, double angle) {
  const double theta = angle * t.coefficient.real();
  auto it = t.paulis.begin();
  const Eigen::Matrix2cd lo = pauli_matrix(it->second);
  const Eigen::Matrix2cd hi = pauli_matrix(std::next(it)->second);
  Eigen::Matrix4cd p;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a0 = 0; a0 < 2; ++a0)
        for (int b0 = 0; b0 < 2; ++b0) p(a + 2 * b, a0 + 2 * b0) = lo(a, a0) * hi(b, b0);
  return std::cos(theta) * Eigen::Matrix4cd::Identity() - cplx{0.0, std::sin(theta)} * p;
}

// MPS execution; supports identity, one-site and nearest-neighbour terms.
inline MpsState execute(const TrotterPlan& plan, const MpsState& psi0) {
  if (psi0.num_sites() != plan.num_qubits)
    throw std::invalid_argument("plan and state register sizes differ");
  for (const auto& t : plan.terms) {
    if (!t.is_hermitian()) throw std::invalid_argument("MPS backend needs real coefficients");
    const auto s = t.support();
    if (s.size() > 2 || (s.size() == 2 && s[1] != s[0] + 1))
      throw std::invalid_argument("MPS backend supports nearest-neighbour terms only, got " +
                                  t.label());
  }
  MpsState psi = psi0;
  const double tau = plan.step_time();
  for (std::size_t step = 0; step < plan.steps; ++step)
    for (const auto& st : plan.stages) {
      const auto& t = plan.terms[st.term];
      const double angle = tau * st.multiplier;
      if (t.paulis.empty()) {
        const cplx phase = std::polar(1.0, -angle * t.coefficient.real());
        psi.apply_single_site_gate(0, phase * Eigen::Matrix2cd::Identity());
      } else if (t.paulis.size() == 1) {
        psi.apply_single_site_gate(t.paulis.begin()->first, one_site_gate(t, angle));
      } else {
        psi.apply_two_site_gate(t.paulis.begin()->first, two_site_gate(t, angle));
      }
    }
  return psi;
}

// ---------------------------------------------------------------------------
// Error measurement

struct ErrorSample {
  std::size_t n = 0;
  int p = 1;
  std::size_t r = 1;
  double t = 0.0;
  std::string backend = "dense";
  double error = 0.0;
  double runtime_s = 0.0;
  double s_max_initial = 0.0;
  double s_max_final = 0.0;
};

inline ErrorSample measure_error(const ExactPropagator& exact, const DenseState& psi0, int p,
                                 double t, std::size_t r, Ordering ordering = Ordering::forward,
                                 CutMode cuts = CutMode::contiguous) {
  const auto start = std::chrono::steady_clock::now();
  const auto& h = exact.hamiltonian();
  if (psi0.num_qubits() != h.num_qubits())
    throw std::invalid_argument("state and Hamiltonian register sizes differ");
  const DenseState trotter = execute(build_plan(h, p, t, r, ordering), psi0);
  const DenseState reference = exact.evolve(psi0, t);
  ErrorSample s;
  s.n = psi0.num_qubits();
  s.p = p;
  s.r = r;
  s.t = t;
  s.error = state_distance(trotter, reference);
  s.s_max_initial = max_entropy(psi0, cuts);
  s.s_max_final = max_entropy(reference, cuts);
  s.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

inline ErrorSample measure_error(const HamiltonianModel& h, const DenseState& psi0, int p, double t,
                                 std::size_t r, Ordering ordering = Ordering::forward,
                                 CutMode cuts = CutMode::contiguous) {
  if (h.num_qubits() > kDenseLimit)
    throw std::invalid_argument("n = " + std::to_string(h.num_qubits()) +
                                " exceeds the dense limit of " + std::to_string(kDenseLimit));
  return measure_error(ExactPropagator(h), psi0, p, t, r, ordering, cuts);
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  bool degenerate = false;
};

// Least-squares line through (log x, log y).
inline LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("log-log fit needs at least two paired samples");
  const auto m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("log-log fit needs positive samples");
    const double x = std::log(xs[i]), y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("log-log fit needs distinct abscissae");
  LogLogFit f;
  f.slope = (m * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / m;
  if (xs.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double res = std::log(ys[i]) - (f.intercept + f.slope * std::log(xs[i]));
      rss += res * res;
    }
    f.slope_stderr = std::sqrt(rss / (m - 2.0) * m / denom);
  }
  return f;
}

// Errors below this are indistinguishable from round-off.
inline constexpr double kErrorFloor = 1e-12;

struct OrderFit {
  LogLogFit fit;
  std::vector<double> taus;
  std::vector<double> errors;  // single-step errors
};

// Slope of log ||(S_p(tau) - e^{-iH tau}) psi0|| against log tau; expected p + 1.
inline OrderFit order_scaling_fit(const ExactPropagator& exact, const DenseState& psi0, int p,
                                  const std::vector<double>& taus,
                                  Ordering ordering = Ordering::forward) {
  if (taus.size() < 4) throw std::invalid_argument("order fit needs at least 4 step sizes");
  OrderFit out;
  out.taus = taus;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw std::invalid_argument("step sizes must be positive");
    const DenseState trotter = execute(build_plan(exact.hamiltonian(), p, tau, 1, ordering), psi0);
    out.errors.push_back(state_distance(trotter, exact.evolve(psi0, tau)));
  }
  if (*std::max_element(out.errors.begin(), out.errors.end()) < kErrorFloor) {
    out.fit.degenerate = true;
    return out;
  }
  out.fit = fit_loglog(out.taus, out.errors);
  return out;
}

inline OrderFit order_scaling_fit(const HamiltonianModel& h, const DenseState& psi0, int p,
                                  const std::vector<double>& taus,
                                  Ordering ordering = Ordering::forward) {
  return order_scaling_fit(ExactPropagator(h), psi0, p, taus, ordering);
}

}  // namespace entrotter
