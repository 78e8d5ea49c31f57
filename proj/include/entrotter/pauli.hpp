#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrotter {

using cplx = std::complex<double>;

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown Pauli letter '") + c + "'");
}

inline char to_char(Pauli p) { return static_cast<char>(p); }

// A weighted Pauli string. Qubits absent from `paulis` carry the identity.
// Sparse storage keeps operations O(k) for k-local terms.
struct PauliTerm {
  cplx coefficient{1.0, 0.0};
  std::map<std::size_t, Pauli> paulis;

  PauliTerm() = default;
  PauliTerm(cplx c, std::map<std::size_t, Pauli> p) : coefficient(c), paulis(std::move(p)) {}

  // Parses strings like "Z0 Z1" or "X3".
  static PauliTerm parse(cplx c, const std::string& spec);

  bool is_identity() const { return paulis.empty(); }
  std::size_t weight() const { return paulis.size(); }

  // Spectral norm: every Pauli string is unitary, so it is |c|.
  double norm() const { return std::abs(coefficient); }

  bool is_hermitian(double tol = 1e-14) const { return std::abs(coefficient.imag()) <= tol; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    s.reserve(paulis.size());
    for (const auto& [q, _] : paulis) s.push_back(q);
    return s;
  }

  std::size_t max_qubit() const { return paulis.empty() ? 0 : paulis.rbegin()->first; }

  std::string label() const {
    if (paulis.empty()) return "I";
    std::string out;
    for (const auto& [q, p] : paulis) {
      if (!out.empty()) out += ' ';
      out += to_char(p);
      out += std::to_string(q);
    }
    return out;
  }

  bool same_string(const PauliTerm& o) const { return paulis == o.paulis; }
};

inline PauliTerm PauliTerm::parse(cplx c, const std::string& spec) {
  PauliTerm t;
  t.coefficient = c;
  std::size_t i = 0;
  while (i < spec.size()) {
    if (spec[i] == ' ') {
      ++i;
      continue;
    }
    const Pauli p = pauli_from_char(spec[i++]);
    std::size_t j = i;
    while (j < spec.size() && spec[j] >= '0' && spec[j] <= '9') ++j;
    if (j == i) throw std::invalid_argument("missing qubit index in Pauli spec '" + spec + "'");
    const std::size_t q = std::stoul(spec.substr(i, j - i));
    if (!t.paulis.emplace(q, p).second)
      throw std::invalid_argument("repeated qubit in Pauli spec '" + spec + "'");
    i = j;
  }
  return t;
}

namespace detail {

// Single-qubit product a*b = phase * result, or phase * I when `identity` is set.
struct SingleProduct {
  cplx phase;
  bool identity;
  Pauli result;
};

inline SingleProduct single_product(Pauli a, Pauli b) {
  const cplx i{0.0, 1.0};
  if (a == b) return {1.0, true, Pauli::X};
  // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
  if (a == Pauli::X && b == Pauli::Y) return {i, false, Pauli::Z};
  if (a == Pauli::Y && b == Pauli::X) return {-i, false, Pauli::Z};
  if (a == Pauli::Y && b == Pauli::Z) return {i, false, Pauli::X};
  if (a == Pauli::Z && b == Pauli::Y) return {-i, false, Pauli::X};
  if (a == Pauli::Z && b == Pauli::X) return {i, false, Pauli::Y};
  return {-i, false, Pauli::Y};  // XZ = -iY
}

}  // namespace detail

// Operator product a*b as a single Pauli term with the accumulated phase.
inline PauliTerm pauli_product(const PauliTerm& a, const PauliTerm& b) {
  PauliTerm out;
  out.coefficient = a.coefficient * b.coefficient;
  auto ia = a.paulis.begin();
  auto ib = b.paulis.begin();
  while (ia != a.paulis.end() || ib != b.paulis.end()) {
    if (ib == b.paulis.end() || (ia != a.paulis.end() && ia->first < ib->first)) {
      out.paulis.emplace_hint(out.paulis.end(), *ia++);
    } else if (ia == a.paulis.end() || ib->first < ia->first) {
      out.paulis.emplace_hint(out.paulis.end(), *ib++);
    } else {
      const auto sp = detail::single_product(ia->second, ib->second);
      out.coefficient *= sp.phase;
      if (!sp.identity) out.paulis.emplace_hint(out.paulis.end(), ia->first, sp.result);
      ++ia;
      ++ib;
    }
  }
  return out;
}

// Two Pauli strings commute iff they anticommute on an even number of shared qubits.
inline bool strings_commute(const PauliTerm& a, const PauliTerm& b) {
  std::size_t anti = 0;
  for (const auto& [q, p] : a.paulis) {
    auto it = b.paulis.find(q);
    if (it != b.paulis.end() && it->second != p) ++anti;
  }
  return anti % 2 == 0;
}

// Pauli-basis expansion of a commutator. Empty iff the inputs commute.
struct CommutatorExpansion {
  std::vector<PauliTerm> terms;

  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
};

// [a, b] = ab - ba. For Pauli strings this is either 0 or 2ab.
inline CommutatorExpansion term_commutator(const PauliTerm& a, const PauliTerm& b) {
  CommutatorExpansion out;
  if (strings_commute(a, b)) return out;
  PauliTerm ab = pauli_product(a, b);
  ab.coefficient *= 2.0;
  if (ab.coefficient != cplx{0.0, 0.0}) out.terms.push_back(std::move(ab));
  return out;
}

// Commutator of two sums of Pauli terms, with like strings merged and zeros dropped.
inline CommutatorExpansion sum_commutator(const std::vector<PauliTerm>& a,
                                          const std::vector<PauliTerm>& b,
                                          double drop_tol = 1e-14) {
  std::map<std::map<std::size_t, Pauli>, cplx> acc;
  for (const auto& x : a)
    for (const auto& y : b)
      for (auto& t : term_commutator(x, y).terms) acc[t.paulis] += t.coefficient;
  CommutatorExpansion out;
  for (auto& [p, c] : acc)
    if (std::abs(c) > drop_tol) out.terms.emplace_back(c, p);
  return out;
}

}  // namespace entrotter
