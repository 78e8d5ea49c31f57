#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "entrotter/pauli.hpp"

namespace entrotter {

enum class GeometryKind { chain, grid2d, grid3d, tree, all_to_all, custom };

inline std::string to_string(GeometryKind g) {
  switch (g) {
    case GeometryKind::chain: return "chain";
    case GeometryKind::grid2d: return "grid2d";
    case GeometryKind::grid3d: return "grid3d";
    case GeometryKind::tree: return "tree";
    case GeometryKind::all_to_all: return "all-to-all";
    case GeometryKind::custom: return "custom";
  }
  return "custom";
}

inline GeometryKind geometry_from_string(const std::string& s) {
  if (s == "chain") return GeometryKind::chain;
  if (s == "grid2d") return GeometryKind::grid2d;
  if (s == "grid3d") return GeometryKind::grid3d;
  if (s == "tree") return GeometryKind::tree;
  if (s == "all-to-all") return GeometryKind::all_to_all;
  if (s == "custom") return GeometryKind::custom;
  throw std::invalid_argument("unknown geometry '" + s + "'");
}

struct Geometry {
  GeometryKind kind = GeometryKind::custom;
  std::vector<std::size_t> dims;  // lattice extents for chain/grid geometries

  bool is_lattice() const {
    return kind == GeometryKind::chain || kind == GeometryKind::grid2d ||
           kind == GeometryKind::grid3d;
  }
  int spatial_dimension() const {
    switch (kind) {
      case GeometryKind::chain: return 1;
      case GeometryKind::grid2d: return 2;
      case GeometryKind::grid3d: return 3;
      default: return 0;
    }
  }
};

// (L, J, d) of a local Hamiltonian.
struct InteractionMetadata {
  std::size_t term_count = 0;
  double max_norm = 0.0;
  std::size_t max_degree = 0;
};

// Named group of term indices, e.g. the ZZ and X blocks of an Ising model.
struct TermBlock {
  std::string name;
  std::vector<std::size_t> indices;
};

class HamiltonianModel {
 public:
  HamiltonianModel() = default;

  HamiltonianModel(std::size_t n, std::vector<PauliTerm> terms, Geometry geometry = {},
                   std::vector<TermBlock> blocks = {})
      : n_(n), geometry_(std::move(geometry)), blocks_(std::move(blocks)) {
    if (n_ == 0) throw std::invalid_argument("Hamiltonian needs at least one qubit");
    terms_.reserve(terms.size());
    std::vector<std::size_t> remap(terms.size(), npos);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      auto& t = terms[k];
      for (const auto& [q, _] : t.paulis)
        if (q >= n_)
          throw std::invalid_argument("term " + t.label() + " acts outside the " +
                                      std::to_string(n_) + "-qubit register");
      if (t.coefficient == cplx{0.0, 0.0}) continue;
      remap[k] = terms_.size();
      terms_.push_back(std::move(t));
    }
    for (auto& b : blocks_) {
      std::vector<std::size_t> kept;
      for (auto i : b.indices)
        if (i < remap.size() && remap[i] != npos) kept.push_back(remap[i]);
      b.indices = std::move(kept);
    }
    build_graph();
  }

  std::size_t num_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  const PauliTerm& term(std::size_t j) const { return terms_.at(j); }
  std::size_t size() const { return terms_.size(); }
  const Geometry& geometry() const { return geometry_; }
  const std::vector<TermBlock>& blocks() const { return blocks_; }

  std::vector<PauliTerm> block_terms(const std::string& name) const {
    for (const auto& b : blocks_) {
      if (b.name != name) continue;
      std::vector<PauliTerm> out;
      for (auto i : b.indices) out.push_back(terms_[i]);
      return out;
    }
    throw std::invalid_argument("no term block named '" + name + "'");
  }

  const std::vector<std::set<std::size_t>>& adjacency() const { return adjacency_; }

  bool is_hermitian() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PauliTerm& t) { return t.is_hermitian(); });
  }

  // Graph distance from every qubit to the nearest qubit of `sources`.
  std::vector<std::size_t> distances_from(const std::vector<std::size_t>& sources) const {
    std::vector<std::size_t> dist(n_, npos);
    std::deque<std::size_t> queue;
    for (auto s : sources) {
      if (dist[s] == 0) continue;
      dist[s] = 0;
      queue.push_back(s);
    }
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto w : adjacency_[v]) {
        if (dist[w] != npos) continue;
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
    return dist;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  void build_graph() {
    adjacency_.assign(n_, {});
    for (const auto& t : terms_) {
      const auto s = t.support();
      for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b) {
          adjacency_[s[a]].insert(s[b]);
          adjacency_[s[b]].insert(s[a]);
        }
    }
  }

  std::size_t n_ = 0;
  std::vector<PauliTerm> terms_;
  Geometry geometry_;
  std::vector<TermBlock> blocks_;
  std::vector<std::set<std::size_t>> adjacency_;
};

inline InteractionMetadata interaction_metadata(const HamiltonianModel& h) {
  InteractionMetadata m;
  for (const auto& t : h.terms()) {
    if (t.coefficient == cplx{0.0, 0.0}) continue;
    ++m.term_count;
    m.max_norm = std::max(m.max_norm, t.norm());
  }
  for (const auto& nb : h.adjacency()) m.max_degree = std::max(m.max_degree, nb.size());
  return m;
}

// ---------------------------------------------------------------------------
// Builders. Terms come out in reading order: interaction block, then field block.

inline HamiltonianModel build_tfim(std::size_t n, double coupling, double field) {
  if (n < 2) throw std::invalid_argument("TFIM needs n >= 2");
  std::vector<PauliTerm> terms;
  TermBlock zz{"ZZ", {}}, x{"X", {}};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    zz.indices.push_back(terms.size());
    terms.emplace_back(coupling, std::map<std::size_t, Pauli>{{i, Pauli::Z}, {i + 1, Pauli::Z}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    x.indices.push_back(terms.size());
    terms.emplace_back(field, std::map<std::size_t, Pauli>{{i, Pauli::X}});
  }
  return {n, std::move(terms), Geometry{GeometryKind::chain, {n}}, {zz, x}};
}

inline HamiltonianModel build_heisenberg(std::size_t n, double coupling) {
  if (n < 2) throw std::invalid_argument("Heisenberg chain needs n >= 2");
  std::vector<PauliTerm> terms;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z})
      terms.emplace_back(coupling, std::map<std::size_t, Pauli>{{i, p}, {i + 1, p}});
  return {n, std::move(terms), Geometry{GeometryKind::chain, {n}}};
}

// n^{-1/2} sum_{i<j} Z_i Z_j + h sum_i X_i, with blocks "ZZ" and "X".
inline HamiltonianModel build_all_to_all_ising(std::size_t n, double field) {
  if (n < 2) throw std::invalid_argument("all-to-all Ising needs n >= 2");
  const double c = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<PauliTerm> terms;
  TermBlock zz{"ZZ", {}}, x{"X", {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      zz.indices.push_back(terms.size());
      terms.emplace_back(c, std::map<std::size_t, Pauli>{{i, Pauli::Z}, {j, Pauli::Z}});
    }
  for (std::size_t i = 0; i < n; ++i) {
    x.indices.push_back(terms.size());
    terms.emplace_back(field, std::map<std::size_t, Pauli>{{i, Pauli::X}});
  }
  return {n, std::move(terms), Geometry{GeometryKind::all_to_all, {n}}, {zz, x}};
}

// Standard-normal sampler with a platform-independent definition:
// mt19937_64 words -> 53-bit uniforms -> Box-Muller (cosine branch only).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double uniform_open() {
    // (0, 1]: never zero, so log() below is finite.
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// sum_{i<j<k<l} J_ijkl X_i X_j X_k X_l, J_ijkl ~ N(0, J^2 / n^3).
inline HamiltonianModel build_syk4(std::size_t n, double scale, std::uint64_t seed) {
  if (n < 4) throw std::invalid_argument("SYK-4 needs n >= 4");
  GaussianStream rng(seed);
  const double sigma = scale / std::pow(static_cast<double>(n), 1.5);
  std::vector<PauliTerm> terms;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l)
          terms.emplace_back(sigma * rng.next(),
                             std::map<std::size_t, Pauli>{
                                 {i, Pauli::X}, {j, Pauli::X}, {k, Pauli::X}, {l, Pauli::X}});
  return {n, std::move(terms), Geometry{GeometryKind::all_to_all, {n}}};
}

// Nearest-neighbour Ising model on an open 1D/2D/3D lattice; qubit index is
// row-major with the first extent varying fastest.
inline HamiltonianModel build_lattice_ising(const std::vector<std::size_t>& dims, double coupling,
                                            double field) {
  if (dims.empty() || dims.size() > 3) throw std::invalid_argument("lattice must be 1D, 2D or 3D");
  std::size_t n = 1;
  for (auto e : dims) {
    if (e == 0) throw std::invalid_argument("lattice extent must be positive");
    n *= e;
  }
  if (n < 2) throw std::invalid_argument("lattice needs at least two sites");
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t a = 1; a < dims.size(); ++a) stride[a] = stride[a - 1] * dims[a - 1];

  std::vector<PauliTerm> terms;
  TermBlock zz{"ZZ", {}}, x{"X", {}};
  for (std::size_t site = 0; site < n; ++site)
    for (std::size_t a = 0; a < dims.size(); ++a) {
      const std::size_t coord = (site / stride[a]) % dims[a];
      if (coord + 1 >= dims[a]) continue;
      zz.indices.push_back(terms.size());
      terms.emplace_back(coupling, std::map<std::size_t, Pauli>{{site, Pauli::Z},
                                                                {site + stride[a], Pauli::Z}});
    }
  for (std::size_t i = 0; i < n; ++i) {
    x.indices.push_back(terms.size());
    terms.emplace_back(field, std::map<std::size_t, Pauli>{{i, Pauli::X}});
  }
  static constexpr GeometryKind kinds[] = {GeometryKind::chain, GeometryKind::grid2d,
                                           GeometryKind::grid3d};
  return {n, std::move(terms), Geometry{kinds[dims.size() - 1], dims}, {zz, x}};
}

// ---------------------------------------------------------------------------
// Light cones

// l(tau) = v_LR * tau + xi * ln(L)
inline double light_cone_radius(double tau, double v_lr, double xi, double term_count) {
  if (tau < 0.0 || v_lr < 0.0 || xi < 0.0 || term_count < 1.0)
    throw std::invalid_argument("light_cone_radius: arguments must be non-negative and L >= 1");
  return v_lr * tau + xi * std::log(term_count);
}

// v_LR = c' d J
inline double default_lieb_robinson_velocity(const InteractionMetadata& m, double c_prime = 1.0) {
  return c_prime * static_cast<double>(m.max_degree) * m.max_norm;
}

// xi = 1 / ln(max(d, 2))
inline double default_correlation_length(const InteractionMetadata& m) {
  return 1.0 / std::log(std::max<double>(static_cast<double>(m.max_degree), 2.0));
}

struct LightConeCount {
  std::size_t count = 0;  // terms k != j within the radius
  double radius = 0.0;
  double cap = 0.0;  // d (d l)^D
  bool within_cap = true;
};

inline LightConeCount light_cone_neighbor_count(const HamiltonianModel& h, std::size_t j,
                                                double radius) {
  if (!h.geometry().is_lattice())
    throw std::invalid_argument("light cone needs a chain or grid geometry, got " +
                                to_string(h.geometry().kind));
  if (j >= h.size()) throw std::out_of_range("term index out of range");
  if (!(radius >= 0.0)) throw std::invalid_argument("light cone radius must be non-negative");

  const auto dist = h.distances_from(h.term(j).support());
  LightConeCount out;
  out.radius = radius;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (k == j) continue;
    std::size_t best = HamiltonianModel::npos;
    for (const auto& [q, _] : h.term(k).paulis) best = std::min(best, dist[q]);
    if (best != HamiltonianModel::npos && static_cast<double>(best) <= radius) ++out.count;
  }
  const double d = static_cast<double>(interaction_metadata(h).max_degree);
  out.cap = d * std::pow(d * radius, h.geometry().spatial_dimension());
  out.within_cap = static_cast<double>(out.count) <= out.cap;
  return out;
}

inline LightConeCount light_cone_neighbor_count(const HamiltonianModel& h, std::size_t j,
                                                double tau, double v_lr, double xi) {
  if (!(tau > 0.0)) throw std::invalid_argument("light cone needs tau > 0");
  return light_cone_neighbor_count(h, j,
                                   light_cone_radius(tau, v_lr, xi, static_cast<double>(h.size())));
}

// ---------------------------------------------------------------------------
// JSON: {n, geometry, terms:[{coeff_re, coeff_im, paulis:{"0":"Z"}}]}

inline nlohmann::json to_json(const HamiltonianModel& h) {
  nlohmann::json j;
  j["n"] = h.num_qubits();
  j["geometry"] = to_string(h.geometry().kind);
  if (!h.geometry().dims.empty()) j["dims"] = h.geometry().dims;
  auto terms = nlohmann::json::array();
  for (const auto& t : h.terms()) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [q, l] : t.paulis) p[std::to_string(q)] = std::string(1, to_char(l));
    terms.push_back({{"coeff_re", t.coefficient.real()},
                     {"coeff_im", t.coefficient.imag()},
                     {"paulis", p}});
  }
  j["terms"] = terms;
  if (!h.blocks().empty()) {
    auto blocks = nlohmann::json::object();
    for (const auto& b : h.blocks()) blocks[b.name] = b.indices;
    j["blocks"] = blocks;
  }
  return j;
}

inline HamiltonianModel hamiltonian_from_json(const nlohmann::json& j) {
  const std::size_t n = j.at("n").get<std::size_t>();
  Geometry g;
  g.kind = geometry_from_string(j.value("geometry", std::string("custom")));
  if (j.contains("dims")) g.dims = j.at("dims").get<std::vector<std::size_t>>();
  std::vector<PauliTerm> terms;
  for (const auto& jt : j.at("terms")) {
    PauliTerm t;
    t.coefficient = {jt.at("coeff_re").get<double>(), jt.value("coeff_im", 0.0)};
    for (const auto& [key, val] : jt.at("paulis").items()) {
      const auto letter = val.get<std::string>();
      if (letter.size() != 1) throw std::invalid_argument("Pauli letter must be one character");
      t.paulis.emplace(std::stoul(key), pauli_from_char(letter[0]));
    }
    terms.push_back(std::move(t));
  }
  std::vector<TermBlock> blocks;
  if (j.contains("blocks"))
    for (const auto& [name, idx] : j.at("blocks").items())
      blocks.push_back({name, idx.get<std::vector<std::size_t>>()});
  return {n, std::move(terms), std::move(g), std::move(blocks)};
}

}  // namespace entrotter
