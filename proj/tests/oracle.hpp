#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the PauliTerm data type.

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <vector>

#include "entrotter/hamiltonian.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(char p) {
  Mat m(2, 2);
  const cplx i{0, 1};
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Qubit 0 is the least significant bit, so it is the rightmost factor.
inline Mat matrix(const entrotter::PauliTerm& t, std::size_t n) {
  Mat m = Mat::Identity(1, 1);
  for (std::size_t q = n; q-- > 0;) {
    auto it = t.paulis.find(q);
    m = kron(m, pauli(it == t.paulis.end() ? 'I' : entrotter::to_char(it->second)));
  }
  return t.coefficient * m;
}

inline Mat matrix(const std::vector<entrotter::PauliTerm>& terms, std::size_t n) {
  Mat m = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (const auto& t : terms) m += matrix(t, n);
  return m;
}

inline Mat matrix(const entrotter::HamiltonianModel& h) { return matrix(h.terms(), h.num_qubits()); }

inline Mat expm_hermitian(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases[k] = std::polar(1.0, -t * es.eigenvalues()[k]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline double spectral_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

// Eigenvalues of the reduced density matrix on `region`, by explicit partial trace.
inline std::vector<double> reduced_density_eigs(const Vec& psi, std::size_t n,
                                                const std::vector<std::size_t>& region) {
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < n; ++q)
    if (std::find(region.begin(), region.end(), q) == region.end()) rest.push_back(q);
  const std::size_t da = std::size_t{1} << region.size(), db = std::size_t{1} << rest.size();
  auto index = [&](std::size_t a, std::size_t b) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < region.size(); ++k)
      if ((a >> k) & 1) idx |= std::size_t{1} << region[k];
    for (std::size_t k = 0; k < rest.size(); ++k)
      if ((b >> k) & 1) idx |= std::size_t{1} << rest[k];
    return static_cast<Eigen::Index>(idx);
  };
  Mat rho = Mat::Zero(da, da);
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t a2 = 0; a2 < da; ++a2)
      for (std::size_t b = 0; b < db; ++b) rho(a, a2) += psi[index(a, b)] * std::conj(psi[index(a2, b)]);
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(es.eigenvalues()[k]);
  std::sort(out.rbegin(), out.rend());
  return out;
}

inline double entropy_bits(const std::vector<double>& p) {
  double s = 0;
  for (double x : p)
    if (x > 1e-14) s -= x * std::log2(x);
  return s;
}

// All-pairs qubit distances where two qubits are adjacent iff some term acts on both.
inline std::vector<std::vector<std::size_t>> qubit_distances(const entrotter::HamiltonianModel& h) {
  const std::size_t n = h.num_qubits();
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t q = 0; q < n; ++q) d[q][q] = 0;
  for (const auto& t : h.terms())
    for (const auto& [a, _] : t.paulis)
      for (const auto& [b, __] : t.paulis)
        if (a != b) d[a][b] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Number of terms k != j within graph distance `radius` of term j.
inline std::size_t light_cone_count(const entrotter::HamiltonianModel& h, std::size_t j, double radius) {
  const auto d = qubit_distances(h);
  std::size_t count = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (k == j) continue;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& [a, _] : h.term(j).paulis)
      for (const auto& [b, __] : h.term(k).paulis) best = std::min(best, d[a][b]);
    if (static_cast<double>(best) <= radius) ++count;
  }
  return count;
}

}  // namespace oracle
