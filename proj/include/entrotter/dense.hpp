#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entrotter/hamiltonian.hpp"
#include "entrotter/pauli.hpp"

namespace entrotter {

// Largest register the dense backend evolves (16384 amplitudes).
inline constexpr std::size_t kDenseLimit = 14;
// Largest register for which exact evolution diagonalises H; above it a Krylov
// propagator is used.
inline constexpr std::size_t kEigenLimit = 10;
// Squared Schmidt coefficients below this are numerical zeros.
inline constexpr double kSpectrumFloor = 1e-14;

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Product-state recipe shared by both backends. For `bitstring`, character k
// sets qubit k.
struct ProductPattern {
  enum class Kind { zeros, plus, bitstring } kind = Kind::zeros;
  std::string bits;

  static ProductPattern zeros() { return {Kind::zeros, {}}; }
  static ProductPattern plus() { return {Kind::plus, {}}; }
  static ProductPattern bitstring(std::string b) {
    for (char c : b)
      if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0/1");
    return {Kind::bitstring, std::move(b)};
  }

  // Amplitudes (a0, a1) of qubit q.
  std::pair<cplx, cplx> qubit(std::size_t q) const {
    switch (kind) {
      case Kind::zeros: return {1.0, 0.0};
      case Kind::plus: return {M_SQRT1_2, M_SQRT1_2};
      case Kind::bitstring:
        return bits.at(q) == '1' ? std::pair<cplx, cplx>{0.0, 1.0} : std::pair<cplx, cplx>{1.0, 0.0};
    }
    return {1.0, 0.0};
  }
};

namespace detail {

struct PauliMasks {
  std::uint64_t flip = 0;   // X or Y
  std::uint64_t phase = 0;  // Z or Y
  cplx prefactor{1.0, 0.0};  // i^{#Y}
};

inline PauliMasks masks_of(const PauliTerm& t) {
  PauliMasks m;
  const cplx i{0.0, 1.0};
  for (const auto& [q, p] : t.paulis) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (p != Pauli::Z) m.flip |= bit;
    if (p != Pauli::X) m.phase |= bit;
    if (p == Pauli::Y) m.prefactor *= i;
  }
  return m;
}

inline double parity_sign(std::uint64_t x) { return (std::popcount(x) & 1) ? -1.0 : 1.0; }

inline void check_register(const PauliTerm& t, std::size_t n) {
  if (!t.paulis.empty() && t.max_qubit() >= n)
    throw std::invalid_argument("term " + t.label() + " acts outside the " + std::to_string(n) +
                                "-qubit register");
}

}  // namespace detail

// out += scale * P v for the Pauli string of `t` (coefficient ignored).
inline void accumulate_pauli(const Vector& v, const PauliTerm& t, cplx scale, Vector& out) {
  const auto m = detail::masks_of(t);
  const cplx f = scale * m.prefactor;
  const auto dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t b = 0; b < dim; ++b)
    out[static_cast<Eigen::Index>(b ^ m.flip)] +=
        f * detail::parity_sign(b & m.phase) * v[static_cast<Eigen::Index>(b)];
}

// P v for the bare Pauli string of `t`.
inline Vector apply_pauli_string(const Vector& v, const PauliTerm& t) {
  Vector out = Vector::Zero(v.size());
  accumulate_pauli(v, t, 1.0, out);
  return out;
}

// (sum_j c_j P_j) v
inline Vector apply_terms(const Vector& v, const std::vector<PauliTerm>& terms) {
  Vector out = Vector::Zero(v.size());
  for (const auto& t : terms) accumulate_pauli(v, t, t.coefficient, out);
  return out;
}

// exp(-i angle c P) v, in place, via cos(theta) I - i sin(theta) P.
inline void apply_term_exponential_inplace(Vector& v, const PauliTerm& t, double angle) {
  if (!t.is_hermitian())
    throw std::invalid_argument("term exponential needs a real coefficient, got " + t.label());
  const double theta = angle * t.coefficient.real();
  if (theta == 0.0) return;
  const double c = std::cos(theta);
  const cplx s = cplx{0.0, -std::sin(theta)};
  if (t.paulis.empty()) {
    v *= cplx{c, 0.0} + s;
    return;
  }
  const auto m = detail::masks_of(t);
  const auto dim = static_cast<std::uint64_t>(v.size());
  if (m.flip == 0) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      const auto idx = static_cast<Eigen::Index>(b);
      v[idx] *= c + s * m.prefactor * detail::parity_sign(b & m.phase);
    }
    return;
  }
  // Pairs (b, b^flip) mix among themselves; visit each pair once from the
  // member whose highest flipped bit is clear.
  const std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(m.flip));
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & lead) continue;
    const std::uint64_t bp = b ^ m.flip;
    const auto i0 = static_cast<Eigen::Index>(b);
    const auto i1 = static_cast<Eigen::Index>(bp);
    const cplx v0 = v[i0], v1 = v[i1];
    // P|b> = prefactor * sign(b) |b^flip>
    const cplx p_b = m.prefactor * detail::parity_sign(b & m.phase);
    const cplx p_bp = m.prefactor * detail::parity_sign(bp & m.phase);
    v[i0] = c * v0 + s * p_bp * v1;
    v[i1] = c * v1 + s * p_b * v0;
  }
}

class DenseState {
 public:
  DenseState() = default;

  DenseState(std::size_t n, Vector amplitudes, double norm_tol = 1e-10)
      : n_(n), amps_(std::move(amplitudes)) {
    if (n_ == 0 || n_ > 30) throw std::invalid_argument("unsupported dense register size");
    if (amps_.size() != (Eigen::Index{1} << n_))
      throw std::invalid_argument("amplitude vector length does not match 2^n");
    if (std::abs(amps_.norm() - 1.0) > norm_tol)
      throw std::invalid_argument("dense state is not normalised");
  }

  static DenseState from_product(std::size_t n, const ProductPattern& pattern) {
    if (n < 1) throw std::invalid_argument("product state needs n >= 1");
    if (n > kDenseLimit)
      throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the dense limit of " +
                                  std::to_string(kDenseLimit));
    if (pattern.kind == ProductPattern::Kind::bitstring && pattern.bits.size() != n)
      throw std::invalid_argument("bitstring length must equal n");
    Vector v = Vector::Ones(1);
    for (std::size_t q = 0; q < n; ++q) {
      const auto [a0, a1] = pattern.qubit(q);
      Vector w(v.size() * 2);
      w.head(v.size()) = a0 * v;
      w.tail(v.size()) = a1 * v;
      v = std::move(w);
    }
    return {n, std::move(v)};
  }

  static DenseState random(std::size_t n, std::uint64_t seed) {
    GaussianStream g(seed);
    Vector v(Eigen::Index{1} << n);
    for (auto& a : v) a = {g.next(), g.next()};
    v.normalize();
    return {n, std::move(v)};
  }

  std::size_t num_qubits() const { return n_; }
  const Vector& amplitudes() const { return amps_; }
  Vector& mutable_amplitudes() { return amps_; }
  cplx amplitude(std::size_t index) const { return amps_[static_cast<Eigen::Index>(index)]; }
  double norm() const { return amps_.norm(); }

 private:
  std::size_t n_ = 0;
  Vector amps_;
};

inline DenseState apply_term_exponential(const DenseState& state, const PauliTerm& t, double angle) {
  detail::check_register(t, state.num_qubits());
  Vector v = state.amplitudes();
  apply_term_exponential_inplace(v, t, angle);
  return {state.num_qubits(), std::move(v)};
}

// Applies a 2x2 unitary to qubit q.
inline void apply_one_qubit_gate_inplace(Vector& v, std::size_t q, const Eigen::Matrix2cd& u) {
  const std::uint64_t bit = std::uint64_t{1} << q;
  const auto dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & bit) continue;
    const auto i0 = static_cast<Eigen::Index>(b), i1 = static_cast<Eigen::Index>(b | bit);
    const cplx a0 = v[i0], a1 = v[i1];
    v[i0] = u(0, 0) * a0 + u(0, 1) * a1;
    v[i1] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

// Applies a 4x4 unitary to qubits (q0, q1); the gate's basis index is s0 + 2 s1.
inline void apply_two_qubit_gate_inplace(Vector& v, std::size_t q0, std::size_t q1,
                                         const Eigen::Matrix4cd& g) {
  if (q0 == q1) throw std::invalid_argument("two-qubit gate needs distinct qubits");
  const std::uint64_t b0 = std::uint64_t{1} << q0, b1 = std::uint64_t{1} << q1;
  const auto dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (b & (b0 | b1)) continue;
    const Eigen::Index idx[4] = {static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b | b0),
                                 static_cast<Eigen::Index>(b | b1),
                                 static_cast<Eigen::Index>(b | b0 | b1)};
    Eigen::Vector4cd in;
    for (int k = 0; k < 4; ++k) in[k] = v[idx[k]];
    const Eigen::Vector4cd out = g * in;
    for (int k = 0; k < 4; ++k) v[idx[k]] = out[k];
  }
}

inline Matrix dense_matrix(const HamiltonianModel& h) {
  const std::size_t n = h.num_qubits();
  if (n > 12) throw std::invalid_argument("dense Hamiltonian matrix limited to n <= 12");
  const auto dim = std::uint64_t{1} << n;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : h.terms()) {
    const auto mk = detail::masks_of(t);
    for (std::uint64_t b = 0; b < dim; ++b)
      m(static_cast<Eigen::Index>(b ^ mk.flip), static_cast<Eigen::Index>(b)) +=
          t.coefficient * mk.prefactor * detail::parity_sign(b & mk.phase);
  }
  return m;
}

inline Matrix dense_matrix(const PauliTerm& t, std::size_t n) {
  return dense_matrix(HamiltonianModel(n, {t}));
}

inline double energy(const DenseState& s, const HamiltonianModel& h) {
  return s.amplitudes().dot(apply_terms(s.amplitudes(), h.terms())).real();
}

// Action of exp(-iHt) on a fixed Hamiltonian. Diagonalises H for n <= 10 and
// runs a step-controlled Lanczos propagator for larger registers.
class ExactPropagator {
 public:
  explicit ExactPropagator(HamiltonianModel h, double krylov_tol = 1e-13)
      : h_(std::move(h)), tol_(krylov_tol) {
    if (h_.num_qubits() > kDenseLimit)
      throw std::invalid_argument("n = " + std::to_string(h_.num_qubits()) +
                                  " exceeds the dense limit of " + std::to_string(kDenseLimit));
    if (!h_.is_hermitian()) throw std::invalid_argument("exact evolution needs a Hermitian H");
    if (h_.num_qubits() <= kEigenLimit) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(dense_matrix(h_));
      if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
      evals_ = es.eigenvalues();
      evecs_ = es.eigenvectors();
    }
  }

  const HamiltonianModel& hamiltonian() const { return h_; }
  bool diagonalised() const { return evecs_.size() > 0; }

  Vector evolve(const Vector& psi, double t) const {
    if (t == 0.0) return psi;
    if (diagonalised()) {
      Vector c = evecs_.adjoint() * psi;
      for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -evals_[k] * t);
      return evecs_ * c;
    }
    return krylov(psi, t);
  }

  DenseState evolve(const DenseState& s, double t) const {
    if (s.num_qubits() != h_.num_qubits())
      throw std::invalid_argument("state and Hamiltonian register sizes differ");
    return {s.num_qubits(), evolve(s.amplitudes(), t)};
  }

 private:
  Vector krylov(Vector psi, double t) const {
    const Eigen::Index dim = psi.size();
    const Eigen::Index m_max = std::min<Eigen::Index>(40, dim);
    const double sign = t < 0 ? -1.0 : 1.0;
    double remaining = std::abs(t);
    double dt = remaining;
    while (remaining > 0.0) {
      const double beta0 = psi.norm();
      Matrix basis(dim, m_max + 1);
      Eigen::VectorXd alpha(m_max), beta(m_max);
      basis.col(0) = psi / beta0;
      Eigen::Index m = m_max;
      double beta_last = 0.0;
      for (Eigen::Index j = 0; j < m_max; ++j) {
        Vector w = apply_terms(basis.col(j), h_.terms());
        alpha[j] = basis.col(j).dot(w).real();
        // Full reorthogonalisation.
        for (int pass = 0; pass < 2; ++pass)
          for (Eigen::Index k = 0; k <= j; ++k) w -= basis.col(k).dot(w) * basis.col(k);
        const double b = w.norm();
        beta[j] = b;
        if (b < 1e-12 * std::max(1.0, std::abs(alpha[j]))) {
          m = j + 1;  // invariant subspace found
          beta_last = 0.0;
          break;
        }
        basis.col(j + 1) = w / b;
        beta_last = b;
      }
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index j = 0; j < m; ++j) {
        tri(j, j) = alpha[j];
        if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta[j];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      const Eigen::VectorXd& lam = es.eigenvalues();
      const Eigen::MatrixXd& q = es.eigenvectors();

      auto coeffs = [&](double step) {
        Vector c(m);
        for (Eigen::Index k = 0; k < m; ++k) c[k] = q(0, k) * std::polar(1.0, -sign * lam[k] * step);
        return Vector((q.cast<cplx>() * c).eval());
      };
      dt = std::min(dt, remaining);
      Vector c = coeffs(dt);
      // A-posteriori Lanczos error estimate: beta_m |c_m|.
      while (beta_last > 0.0 && beta_last * std::abs(c[m - 1]) > tol_ * dt / std::abs(t)) {
        dt *= 0.5;
        c = coeffs(dt);
      }
      psi = beta0 * (basis.leftCols(m) * c);
      remaining -= dt;
      dt *= 1.5;
    }
    return psi;
  }

  HamiltonianModel h_;
  double tol_;
  Eigen::VectorXd evals_;
  Matrix evecs_;
};

inline DenseState exact_evolve(const DenseState& state, const HamiltonianModel& h, double t) {
  if (t == 0.0) return state;
  return ExactPropagator(h).evolve(state, t);
}

// ---------------------------------------------------------------------------
// Bipartite structure

struct SchmidtSpectrum {
  std::vector<std::size_t> cut;   // qubits of region A
  std::vector<double> lambdas;    // squared Schmidt coefficients, descending

  std::size_t rank() const { return lambdas.size(); }
  double root_sum() const {
    double s = 0.0;
    for (double l : lambdas) s += std::sqrt(l);
    return s;
  }
};

// Amplitudes reshaped to a (2^|A|) x (2^|complement|) matrix.
inline Matrix bipartite_matrix(const DenseState& state, const std::vector<std::size_t>& region) {
  const std::size_t n = state.num_qubits();
  std::vector<bool> in_a(n, false);
  for (auto q : region) {
    if (q >= n) throw std::invalid_argument("cut qubit out of range");
    if (in_a[q]) throw std::invalid_argument("cut lists a qubit twice");
    in_a[q] = true;
  }
  const std::size_t na = region.size();
  if (na == 0 || na == n) throw std::invalid_argument("cut must be a proper non-empty subset");
  std::vector<std::size_t> a_bits, b_bits;
  for (std::size_t q = 0; q < n; ++q) (in_a[q] ? a_bits : b_bits).push_back(q);
  Matrix m(Eigen::Index{1} << na, Eigen::Index{1} << (n - na));
  const auto dim = std::uint64_t{1} << n;
  for (std::uint64_t b = 0; b < dim; ++b) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t k = 0; k < a_bits.size(); ++k) row |= ((b >> a_bits[k]) & 1u) << k;
    for (std::size_t k = 0; k < b_bits.size(); ++k) col |= ((b >> b_bits[k]) & 1u) << k;
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
        state.amplitudes()[static_cast<Eigen::Index>(b)];
  }
  return m;
}

inline std::vector<double> squared_singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double l = svd.singularValues()[k] * svd.singularValues()[k];
    if (l > kSpectrumFloor) out.push_back(l);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline SchmidtSpectrum schmidt_spectrum(const DenseState& state, std::vector<std::size_t> region) {
  std::sort(region.begin(), region.end());
  SchmidtSpectrum s;
  s.lambdas = squared_singular_values(bipartite_matrix(state, region));
  s.cut = std::move(region);
  return s;
}

inline std::vector<std::size_t> contiguous_cut(std::size_t k) {
  std::vector<std::size_t> a(k);
  std::iota(a.begin(), a.end(), std::size_t{0});
  return a;
}

// -sum lambda log2 lambda, in bits.
inline double entanglement_entropy(const std::vector<double>& lambdas) {
  double s = 0.0;
  for (double l : lambdas)
    if (l > kSpectrumFloor) s -= l * std::log2(l);
  return std::max(0.0, s);
}

inline double entanglement_entropy(const SchmidtSpectrum& spectrum) {
  return entanglement_entropy(spectrum.lambdas);
}

enum class CutMode { contiguous, all_balanced };

inline std::string to_string(CutMode m) {
  return m == CutMode::contiguous ? "contiguous" : "all-balanced";
}

inline CutMode cut_mode_from_string(const std::string& s) {
  if (s == "contiguous") return CutMode::contiguous;
  if (s == "all-balanced") return CutMode::all_balanced;
  throw std::invalid_argument("unknown cut mode '" + s + "'");
}

inline constexpr std::size_t kBalancedScanLimit = 14;

inline double max_entropy(const DenseState& state, CutMode mode = CutMode::contiguous) {
  const std::size_t n = state.num_qubits();
  if (n < 2) return 0.0;
  double best = 0.0;
  if (mode == CutMode::contiguous) {
    for (std::size_t k = 1; k < n; ++k)
      best = std::max(best, entanglement_entropy(schmidt_spectrum(state, contiguous_cut(k))));
    return best;
  }
  if (n > kBalancedScanLimit)
    throw std::invalid_argument("all-balanced entropy scan limited to n <= 14");
  const std::size_t half = n / 2;
  // Fixing qubit n-1 outside A halves the scan when n is even (A and its
  // complement give the same entropy).
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != half) continue;
    if (n % 2 == 0 && (mask >> (n - 1)) & 1u) continue;
    std::vector<std::size_t> a;
    for (std::size_t q = 0; q < n; ++q)
      if ((mask >> q) & 1u) a.push_back(q);
    best = std::max(best, entanglement_entropy(schmidt_spectrum(state, a)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Commutators on states

// (AB - BA)|psi>
inline Vector commutator_action(const DenseState& state, const std::vector<PauliTerm>& a,
                                const std::vector<PauliTerm>& b) {
  for (const auto& t : a) detail::check_register(t, state.num_qubits());
  for (const auto& t : b) detail::check_register(t, state.num_qubits());
  const Vector& psi = state.amplitudes();
  return apply_terms(apply_terms(psi, b), a) - apply_terms(apply_terms(psi, a), b);
}

// <psi|[A, B]|psi>. For Hermitian A, B this is 2i Im<A psi|B psi>.
inline cplx commutator_expectation(const DenseState& state, const std::vector<PauliTerm>& a,
                                   const std::vector<PauliTerm>& b) {
  auto hermitian = [](const std::vector<PauliTerm>& ts) {
    return std::all_of(ts.begin(), ts.end(), [](const PauliTerm& t) { return t.is_hermitian(); });
  };
  if (!hermitian(a) || !hermitian(b))
    return state.amplitudes().dot(commutator_action(state, a, b));
  for (const auto& t : a) detail::check_register(t, state.num_qubits());
  for (const auto& t : b) detail::check_register(t, state.num_qubits());
  const Vector ap = apply_terms(state.amplitudes(), a);
  const Vector bp = apply_terms(state.amplitudes(), b);
  return {0.0, 2.0 * ap.dot(bp).imag()};
}

inline cplx commutator_expectation(const DenseState& state, const PauliTerm& a, const PauliTerm& b) {
  return commutator_expectation(state, std::vector<PauliTerm>{a}, std::vector<PauliTerm>{b});
}

inline cplx inner_product(const DenseState& a, const DenseState& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("inner product of states with different register sizes");
  return a.amplitudes().dot(b.amplitudes());
}

// Plain l2 distance; global phase is not quotiented out.
inline double state_distance(const DenseState& a, const DenseState& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("state_distance: register sizes differ (" +
                                std::to_string(a.num_qubits()) + " vs " +
                                std::to_string(b.num_qubits()) + ")");
  return (a.amplitudes() - b.amplitudes()).norm();
}

// Diagnostic only: |<a|b>|^2.
inline double fidelity(const DenseState& a, const DenseState& b) {
  return std::norm(inner_product(a, b));
}

}  // namespace entrotter
