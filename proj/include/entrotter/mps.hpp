#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "entrotter/dense.hpp"

namespace entrotter {

// Singular values below cutoff * (norm of the spectrum) are dropped.
inline constexpr double kDefaultCutoff = 1e-12;
inline constexpr int kMpsCheckpointVersion = 1;

// Open-boundary matrix product state. Site k holds A^0, A^1 with shape
// (left bond) x (right bond); boundary bonds have dimension 1.
class MpsState {
 public:
  using Site = std::array<Matrix, 2>;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  MpsState() = default;

  MpsState(std::vector<Site> sites, std::size_t chi_max, double cutoff = kDefaultCutoff)
      : sites_(std::move(sites)), chi_max_(chi_max), cutoff_(cutoff) {
    if (sites_.empty()) throw std::invalid_argument("MPS needs at least one site");
    if (chi_max_ < 1) throw std::invalid_argument("chi_max must be at least 1");
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      const auto& s = sites_[k];
      if (s[0].rows() != s[1].rows() || s[0].cols() != s[1].cols())
        throw std::invalid_argument("site tensor components disagree in shape");
      if (k > 0 && sites_[k - 1][0].cols() != s[0].rows())
        throw std::invalid_argument("bond dimensions of neighbouring sites disagree");
    }
    if (sites_.front()[0].rows() != 1 || sites_.back()[0].cols() != 1)
      throw std::invalid_argument("boundary bonds must have dimension 1");
  }

  static MpsState from_product(std::size_t n, const ProductPattern& pattern,
                               std::size_t chi_max = 16, double cutoff = kDefaultCutoff) {
    if (n < 2) throw std::invalid_argument("MPS product state needs n >= 2");
    if (pattern.kind == ProductPattern::Kind::bitstring && pattern.bits.size() != n)
      throw std::invalid_argument("bitstring length must equal n");
    std::vector<Site> sites(n);
    for (std::size_t q = 0; q < n; ++q) {
      const auto [a0, a1] = pattern.qubit(q);
      sites[q][0] = Matrix::Constant(1, 1, a0);
      sites[q][1] = Matrix::Constant(1, 1, a1);
    }
    MpsState m(std::move(sites), chi_max, cutoff);
    m.center_ = 0;  // every site is both left- and right-normalised
    return m;
  }

  // Exact (up to chi_max) tensor-train decomposition of a dense state.
  static MpsState from_dense(const DenseState& state, std::size_t chi_max = npos,
                             double cutoff = kDefaultCutoff) {
    const std::size_t n = state.num_qubits();
    if (n < 2) throw std::invalid_argument("MPS needs n >= 2");
    std::vector<Site> sites(n);
    // rest(l, c) with c = s_k + 2 * (higher qubits)
    Matrix rest = state.amplitudes().transpose();
    double discarded = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const Eigen::Index dl = rest.rows();
      const Eigen::Index cols = rest.cols() / 2;
      Matrix m(2 * dl, cols);
      for (Eigen::Index l = 0; l < dl; ++l)
        for (Eigen::Index c = 0; c < cols; ++c) {
          m(l, c) = rest(l, 2 * c);
          m(dl + l, c) = rest(l, 2 * c + 1);
        }
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto keep = truncation_rank(svd.singularValues(), chi_max, cutoff, discarded);
      const Matrix u = svd.matrixU().leftCols(keep);
      sites[k][0] = u.topRows(dl);
      sites[k][1] = u.bottomRows(dl);
      rest = svd.singularValues().head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
      rest /= rest.norm();
    }
    sites[n - 1][0] = rest.col(0);
    sites[n - 1][1] = rest.col(1);
    MpsState out(std::move(sites), chi_max == npos ? (std::size_t{1} << (n / 2)) : chi_max, cutoff);
    out.center_ = n - 1;
    out.cum_discarded_ = discarded;
    return out;
  }

  std::size_t num_sites() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(std::size_t k) const { return sites_.at(k); }
  std::size_t chi_max() const { return chi_max_; }
  double cutoff() const { return cutoff_; }
  double cum_discarded() const { return cum_discarded_; }
  std::size_t center() const { return center_; }

  void set_truncation(std::size_t chi_max, double cutoff) {
    if (chi_max < 1) throw std::invalid_argument("chi_max must be at least 1");
    chi_max_ = chi_max;
    cutoff_ = cutoff;
  }

  // Dimension of the bond between sites b and b+1.
  std::size_t bond_dimension(std::size_t b) const {
    check_bond(b);
    return static_cast<std::size_t>(sites_[b][0].cols());
  }

  std::size_t max_bond_dimension() const {
    std::size_t m = 1;
    for (std::size_t b = 0; b + 1 < sites_.size(); ++b) m = std::max(m, bond_dimension(b));
    return m;
  }

  // Mixed-canonical form with orthogonality centre on `site`, normalised.
  void canonicalize(std::size_t site) {
    if (site >= sites_.size()) throw std::out_of_range("canonical centre out of range");
    if (center_ == npos) {
      for (std::size_t k = 0; k < site; ++k) left_orthonormalize(k);
      for (std::size_t k = sites_.size() - 1; k > site; --k) right_orthonormalize(k);
    } else {
      for (std::size_t k = center_; k < site; ++k) left_orthonormalize(k);
      for (std::size_t k = center_; k > site; --k) right_orthonormalize(k);
    }
    center_ = site;
    const double nrm = std::sqrt(sites_[site][0].squaredNorm() + sites_[site][1].squaredNorm());
    if (nrm == 0.0) throw std::runtime_error("MPS has zero norm");
    sites_[site][0] /= nrm;
    sites_[site][1] /= nrm;
  }

  // Unitary on one site; preserves any canonical form.
  void apply_single_site_gate(std::size_t site, const Eigen::Matrix2cd& u) {
    if (site >= sites_.size()) throw std::out_of_range("site out of range");
    check_unitary(u);
    auto& s = sites_[site];
    const Matrix a0 = s[0], a1 = s[1];
    s[0] = u(0, 0) * a0 + u(0, 1) * a1;
    s[1] = u(1, 0) * a0 + u(1, 1) * a1;
  }

  // Contracts sites (site, site+1) with a 4x4 unitary (basis s_site + 2 s_{site+1}),
  // splits by SVD keeping min(chi_max, #{lambda >= cutoff}) values and
  // renormalises. Returns the discarded squared weight.
  double apply_two_site_gate(std::size_t site, const Eigen::Matrix4cd& gate) {
    if (site + 1 >= sites_.size()) throw std::out_of_range("two-site gate needs site <= n-2");
    check_unitary(gate);
    canonicalize(site);
    auto& left = sites_[site];
    auto& right = sites_[site + 1];
    const Eigen::Index dl = left[0].rows(), dr = right[0].cols();
    Matrix theta[2][2];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) theta[a][b] = left[a] * right[b];
    Matrix m(2 * dl, 2 * dr);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Matrix blk = Matrix::Zero(dl, dr);
        for (int a0 = 0; a0 < 2; ++a0)
          for (int b0 = 0; b0 < 2; ++b0) {
            const cplx g = gate(a + 2 * b, a0 + 2 * b0);
            if (g != cplx{0.0, 0.0}) blk += g * theta[a0][b0];
          }
        m.block(a * dl, b * dr, dl, dr) = blk;
      }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double discarded = 0.0;
    const auto keep = truncation_rank(svd.singularValues(), chi_max_, cutoff_, discarded);
    Eigen::VectorXd sv = svd.singularValues().head(keep);
    sv /= sv.norm();
    const Matrix u = svd.matrixU().leftCols(keep);
    const Matrix svh = sv.cast<cplx>().asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    left[0] = u.topRows(dl);
    left[1] = u.bottomRows(dl);
    right[0] = svh.leftCols(dr);
    right[1] = svh.rightCols(dr);
    center_ = site + 1;
    cum_discarded_ += discarded;
    return discarded;
  }

  // Squared Schmidt values across bond b, descending.
  std::vector<double> bond_spectrum(std::size_t b) const {
    check_bond(b);
    MpsState tmp = *this;
    tmp.canonicalize(b);
    const auto& s = tmp.sites_[b];
    Matrix m(2 * s[0].rows(), s[0].cols());
    m << s[0], s[1];
    return squared_singular_values(m);
  }

 private:
  friend MpsState mps_from_json(const nlohmann::json&);

  void check_bond(std::size_t b) const {
    if (b + 1 >= sites_.size())
      throw std::out_of_range("bond " + std::to_string(b) + " out of range for " +
                              std::to_string(sites_.size()) + " sites");
  }

  template <typename M>
  static void check_unitary(const M& g) {
    const double dev = (g.adjoint() * g - M::Identity()).cwiseAbs().maxCoeff();
    if (dev > 1e-10) throw std::invalid_argument("gate is not unitary (deviation " +
                                                 std::to_string(dev) + ")");
  }

  static Eigen::Index truncation_rank(const Eigen::VectorXd& sv, std::size_t chi_max, double cutoff,
                                      double& discarded) {
    const double total = sv.squaredNorm();
    const double floor = cutoff * std::sqrt(total);
    Eigen::Index keep = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv[k] >= floor) ++keep;
    keep = std::max<Eigen::Index>(1, std::min<Eigen::Index>(keep, static_cast<Eigen::Index>(
                                                                      std::min<std::size_t>(
                                                                          chi_max, sv.size()))));
    for (Eigen::Index k = keep; k < sv.size(); ++k) discarded += sv[k] * sv[k] / total;
    return keep;
  }

  void left_orthonormalize(std::size_t k) {
    auto& s = sites_[k];
    const Eigen::Index dl = s[0].rows(), dr = s[0].cols();
    Matrix m(2 * dl, dr);
    m << s[0], s[1];
    Eigen::HouseholderQR<Matrix> qr(m);
    const Eigen::Index r = std::min(2 * dl, dr);
    const Matrix q = qr.householderQ() * Matrix::Identity(2 * dl, r);
    const Matrix rr = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    s[0] = q.topRows(dl);
    s[1] = q.bottomRows(dl);
    auto& next = sites_[k + 1];
    next[0] = rr * next[0];
    next[1] = rr * next[1];
  }

  void right_orthonormalize(std::size_t k) {
    auto& s = sites_[k];
    const Eigen::Index dl = s[0].rows(), dr = s[0].cols();
    Matrix m(dl, 2 * dr);
    m << s[0], s[1];
    Eigen::HouseholderQR<Matrix> qr(m.adjoint());
    const Eigen::Index r = std::min(2 * dr, dl);
    const Matrix q = qr.householderQ() * Matrix::Identity(2 * dr, r);
    const Matrix rr = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    const Matrix qh = q.adjoint();
    s[0] = qh.leftCols(dr);
    s[1] = qh.rightCols(dr);
    auto& prev = sites_[k - 1];
    const Matrix rh = rr.adjoint();
    prev[0] = prev[0] * rh;
    prev[1] = prev[1] * rh;
  }

  std::vector<Site> sites_;
  std::size_t chi_max_ = 16;
  double cutoff_ = kDefaultCutoff;
  double cum_discarded_ = 0.0;
  std::size_t center_ = npos;
};

struct GateResult {
  MpsState state;
  double discarded = 0.0;
};

inline MpsState mps_from_product(std::size_t n, const ProductPattern& pattern,
                                 std::size_t chi_max = 16, double cutoff = kDefaultCutoff) {
  return MpsState::from_product(n, pattern, chi_max, cutoff);
}

inline GateResult apply_two_site_gate(const MpsState& mps, std::size_t site,
                                      const Eigen::Matrix4cd& gate, std::size_t chi_max,
                                      double cutoff = kDefaultCutoff) {
  GateResult r{mps, 0.0};
  r.state.set_truncation(chi_max, cutoff);
  r.discarded = r.state.apply_two_site_gate(site, gate);
  return r;
}

inline MpsState mps_canonicalize(const MpsState& mps, std::size_t center) {
  MpsState out = mps;
  out.canonicalize(center);
  return out;
}

inline double mps_entropy_at_bond(const MpsState& mps, std::size_t bond) {
  const double s = entanglement_entropy(mps.bond_spectrum(bond));
  const double cap = std::log2(static_cast<double>(mps.bond_dimension(bond)));
  if (s > cap + 1e-9)
    throw std::logic_error("bond entropy exceeds log2 of the bond dimension");
  return s;
}

inline double mps_max_entropy(const MpsState& mps) {
  double best = 0.0;
  MpsState tmp = mps;
  // Sweep the centre left to right so each bond costs one QR.
  for (std::size_t b = 0; b + 1 < tmp.num_sites(); ++b) {
    tmp.canonicalize(b);
    const auto& s = tmp.site(b);
    Matrix m(2 * s[0].rows(), s[0].cols());
    m << s[0], s[1];
    best = std::max(best, entanglement_entropy(squared_singular_values(m)));
  }
  return best;
}

inline DenseState mps_to_dense(const MpsState& mps) {
  const std::size_t n = mps.num_sites();
  if (n > kDenseLimit)
    throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the dense limit of " +
                                std::to_string(kDenseLimit));
  Matrix acc(2, mps.site(0)[0].cols());
  acc << mps.site(0)[0], mps.site(0)[1];
  for (std::size_t k = 1; k < n; ++k) {
    const auto& s = mps.site(k);
    Matrix next(acc.rows() * 2, s[0].cols());
    next << acc * s[0], acc * s[1];
    acc = std::move(next);
  }
  Vector v = acc.col(0);
  const double nrm = v.norm();
  if (std::abs(nrm - 1.0) > 1e-8) v /= nrm;
  return {n, std::move(v)};
}

// <a|b>
inline cplx mps_overlap(const MpsState& a, const MpsState& b) {
  if (a.num_sites() != b.num_sites())
    throw std::invalid_argument("mps_overlap: site counts differ");
  Matrix env = Matrix::Ones(1, 1);
  for (std::size_t k = 0; k < a.num_sites(); ++k) {
    const auto& sa = a.site(k);
    const auto& sb = b.site(k);
    env = sa[0].adjoint() * env * sb[0] + sa[1].adjoint() * env * sb[1];
  }
  return env(0, 0);
}

inline double mps_norm(const MpsState& a) { return std::sqrt(std::abs(mps_overlap(a, a))); }

// ||a - b|| from overlaps. Cancellation limits resolution to about 1e-8;
// compare dense vectors when tighter checks are needed.
inline double mps_distance(const MpsState& a, const MpsState& b) {
  const double na = mps_overlap(a, a).real(), nb = mps_overlap(b, b).real();
  return std::sqrt(std::max(0.0, na + nb - 2.0 * mps_overlap(a, b).real()));
}

// ---------------------------------------------------------------------------
// Checkpoints: JSON with a versioned header; site data row-major over
// (left, physical, right).

inline nlohmann::json to_json(const MpsState& mps) {
  nlohmann::json j;
  j["format"] = "entrotter-mps";
  j["version"] = kMpsCheckpointVersion;
  j["n"] = mps.num_sites();
  j["chi_max"] = mps.chi_max();
  j["cutoff"] = mps.cutoff();
  j["cum_discarded"] = mps.cum_discarded();
  auto tensors = nlohmann::json::array();
  for (const auto& s : mps.sites()) {
    const auto dl = s[0].rows(), dr = s[0].cols();
    std::vector<double> re, im;
    re.reserve(static_cast<std::size_t>(dl * dr * 2));
    im.reserve(re.capacity());
    for (Eigen::Index l = 0; l < dl; ++l)
      for (int p = 0; p < 2; ++p)
        for (Eigen::Index r = 0; r < dr; ++r) {
          re.push_back(s[p](l, r).real());
          im.push_back(s[p](l, r).imag());
        }
    tensors.push_back({{"shape", {dl, 2, dr}}, {"re", re}, {"im", im}});
  }
  j["tensors"] = tensors;
  return j;
}

inline MpsState mps_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "entrotter-mps")
    throw std::invalid_argument("not an MPS checkpoint");
  const int version = j.at("version").get<int>();
  if (version != kMpsCheckpointVersion)
    throw std::invalid_argument("unsupported MPS checkpoint version " + std::to_string(version));
  std::vector<MpsState::Site> sites;
  for (const auto& t : j.at("tensors")) {
    const auto shape = t.at("shape").get<std::vector<Eigen::Index>>();
    if (shape.size() != 3 || shape[1] != 2) throw std::invalid_argument("bad tensor shape");
    const auto re = t.at("re").get<std::vector<double>>();
    const auto im = t.at("im").get<std::vector<double>>();
    if (re.size() != static_cast<std::size_t>(shape[0] * 2 * shape[2]) || im.size() != re.size())
      throw std::invalid_argument("tensor data length does not match its shape");
    MpsState::Site s{Matrix(shape[0], shape[2]), Matrix(shape[0], shape[2])};
    std::size_t idx = 0;
    for (Eigen::Index l = 0; l < shape[0]; ++l)
      for (int p = 0; p < 2; ++p)
        for (Eigen::Index r = 0; r < shape[2]; ++r, ++idx) s[p](l, r) = {re[idx], im[idx]};
    sites.push_back(std::move(s));
  }
  MpsState out(std::move(sites), j.at("chi_max").get<std::size_t>(), j.at("cutoff").get<double>());
  out.cum_discarded_ = j.value("cum_discarded", 0.0);
  return out;
}

inline void save_checkpoint(const MpsState& mps, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << to_json(mps).dump() << '\n';
  if (!f) throw std::runtime_error("failed writing " + path);
}

inline MpsState load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return mps_from_json(nlohmann::json::parse(f));
}

}  // namespace entrotter
