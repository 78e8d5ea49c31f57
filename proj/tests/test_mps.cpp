#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "entrotter/mps.hpp"
#include "entrotter/trotter.hpp"
#include "oracle.hpp"

using namespace entrotter;

namespace {

Eigen::Matrix4cd cz() {
  Eigen::Matrix4cd g = Eigen::Matrix4cd::Identity();
  g(3, 3) = -1;
  return g;
}

Eigen::Matrix4cd random_unitary4(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<Eigen::Matrix4cd> qr(m);
  return qr.householderQ();
}

struct Gate {
  std::size_t site;
  Eigen::Matrix4cd u;
};

std::vector<Gate> random_circuit(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> site(0, n - 2);
  std::vector<Gate> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back({site(rng), random_unitary4(rng)});
  return out;
}

Vector run_dense(std::size_t n, const std::vector<Gate>& gates) {
  Vector v = DenseState::from_product(n, ProductPattern::zeros()).amplitudes();
  for (const auto& g : gates) apply_two_qubit_gate_inplace(v, g.site, g.site + 1, g.u);
  return v;
}

}  // namespace

TEST(Mps, ProductStateRoundTrip) {
  const auto m = MpsState::from_product(5, ProductPattern::bitstring("10110"));
  EXPECT_EQ(m.max_bond_dimension(), 1u);
  const auto d = mps_to_dense(m);
  EXPECT_NEAR(std::abs(d.amplitude(0b01101)), 1.0, 1e-15);
  EXPECT_NEAR(mps_norm(m), 1.0, 1e-14);
}

TEST(Mps, IdentityGateDiscardsNothing) {
  const auto m = MpsState::from_product(4, ProductPattern::plus());
  const auto r = apply_two_site_gate(m, 1, Eigen::Matrix4cd::Identity(), 16);
  EXPECT_EQ(r.discarded, 0.0);
  EXPECT_EQ(r.state.max_bond_dimension(), 1u);
  EXPECT_LT(mps_distance(r.state, m), 1e-14);
}

TEST(Mps, CzOnPlusPairHasBondTwo) {
  auto m = MpsState::from_product(2, ProductPattern::plus());
  const auto r = apply_two_site_gate(m, 0, cz(), 2);
  EXPECT_EQ(r.discarded, 0.0);
  EXPECT_EQ(r.state.bond_dimension(0), 2u);
  // Dense two-qubit Schmidt oracle.
  const Vector v = mps_to_dense(r.state).amplitudes();
  const auto eigs = oracle::reduced_density_eigs(v, 2, {0});
  const auto bond = r.state.bond_spectrum(0);
  ASSERT_EQ(bond.size(), 2u);
  EXPECT_NEAR(bond[0], eigs[0], 1e-14);
  EXPECT_NEAR(bond[1], eigs[1], 1e-14);
  EXPECT_NEAR(mps_entropy_at_bond(r.state, 0), 1.0, 1e-12);
}

TEST(Mps, RankOneTruncationLeavesProductState) {
  const auto cut = apply_two_site_gate(MpsState::from_product(3, ProductPattern::plus()), 0, cz(), 1);
  EXPECT_NEAR(cut.discarded, 0.5, 1e-12);
  EXPECT_EQ(cut.state.max_bond_dimension(), 1u);
  EXPECT_NEAR(mps_norm(cut.state), 1.0, 1e-12);
  EXPECT_NEAR(mps_max_entropy(cut.state), 0.0, 1e-12);
}

TEST(Mps, RejectsNonUnitaryGateAndBadSite) {
  auto m = MpsState::from_product(3, ProductPattern::zeros());
  Eigen::Matrix4cd bad = Eigen::Matrix4cd::Identity() * 1.1;
  EXPECT_THROW(m.apply_two_site_gate(0, bad), std::invalid_argument);
  EXPECT_THROW(m.apply_two_site_gate(2, cz()), std::out_of_range);
}

TEST(Mps, UntruncatedMatchesDense) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 4 + seed % 5;
    const auto gates = random_circuit(n, 30, seed);
    auto m = MpsState::from_product(n, ProductPattern::zeros(), std::size_t{1} << (n / 2));
    for (const auto& g : gates) m.apply_two_site_gate(g.site, g.u);
    EXPECT_LT((mps_to_dense(m).amplitudes() - run_dense(n, gates)).norm(), 1e-10) << "seed " << seed;
    EXPECT_NEAR(m.cum_discarded(), 0.0, 1e-20);
  }
}

TEST(Mps, FromDenseIsExactWithoutCap) {
  const auto psi = DenseState::random(7, 3);
  const auto m = MpsState::from_dense(psi);
  EXPECT_LT(state_distance(mps_to_dense(m), psi), 1e-12);
  for (std::size_t b = 0; b + 1 < 7; ++b) {
    const auto eigs = oracle::reduced_density_eigs(psi.amplitudes(), 7, contiguous_cut(b + 1));
    EXPECT_NEAR(mps_entropy_at_bond(m, b), oracle::entropy_bits(eigs), 1e-10);
  }
}

TEST(Mps, EntropyNeverExceedsLogBondDimension) {
  const auto gates = random_circuit(8, 40, 5);
  for (std::size_t chi : {2u, 3u, 5u}) {
    auto m = MpsState::from_product(8, ProductPattern::zeros(), chi);
    for (const auto& g : gates) m.apply_two_site_gate(g.site, g.u);
    for (std::size_t b = 0; b < 7; ++b) {
      EXPECT_LE(m.bond_dimension(b), chi);
      EXPECT_LE(mps_entropy_at_bond(m, b), std::log2(static_cast<double>(chi)) + 1e-9);
    }
  }
}

TEST(Mps, DiscardedWeightAccounting) {
  const auto gates = random_circuit(8, 40, 9);
  auto m = MpsState::from_product(8, ProductPattern::zeros(), 3);
  double total = 0.0, last = 0.0;
  for (const auto& g : gates) {
    total += m.apply_two_site_gate(g.site, g.u);
    EXPECT_GE(m.cum_discarded(), last);
    last = m.cum_discarded();
  }
  EXPECT_GT(total, 0.0);
  EXPECT_NEAR(m.cum_discarded(), total, 1e-12);
}

TEST(Mps, SingleTruncationDistanceFollowsRenormalisedWeight) {
  // One truncation of weight w, then renormalisation, moves the state by
  // exactly sqrt(2 - 2 sqrt(1 - w)).
  const auto psi = DenseState::random(6, 41);
  const auto exact = MpsState::from_dense(psi);
  auto m = exact;
  m.set_truncation(2, kDefaultCutoff);
  const double w = m.apply_two_site_gate(2, Eigen::Matrix4cd::Identity());
  ASSERT_GT(w, 0.0);
  const double d = state_distance(mps_to_dense(m), psi);
  EXPECT_NEAR(d, std::sqrt(2.0 - 2.0 * std::sqrt(1.0 - w)), 1e-10);
}

TEST(Mps, TruncatedDistanceWithinDiscardedWeightEstimate) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto gates = random_circuit(8, 30, 100 + seed);
    auto m = MpsState::from_product(8, ProductPattern::zeros(), 4);
    for (const auto& g : gates) m.apply_two_site_gate(g.site, g.u);
    const double d = (mps_to_dense(m).amplitudes() - run_dense(8, gates)).norm();
    EXPECT_LE(d, std::sqrt(m.cum_discarded()) + 1e-9) << "seed " << seed;
  }
}

TEST(Mps, TruncatedDistanceWithinTriangleEstimate) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto gates = random_circuit(8, 30, 100 + seed);
    auto m = MpsState::from_product(8, ProductPattern::zeros(), 4);
    double budget = 0.0;
    for (const auto& g : gates) {
      const double w = m.apply_two_site_gate(g.site, g.u);
      budget += std::sqrt(2.0 - 2.0 * std::sqrt(1.0 - w));
    }
    const double d = (mps_to_dense(m).amplitudes() - run_dense(8, gates)).norm();
    EXPECT_LE(d, budget + 1e-9) << "seed " << seed;
  }
}

TEST(Mps, LargerChiNeverWorseOnTfimCircuits) {
  const auto h = build_tfim(10, 1.0, 1.2);
  const auto plan = build_plan(h, 2, 2.0, 20, Ordering::even_odd);
  const auto psi0 = DenseState::from_product(10, ProductPattern::zeros());
  const auto reference = execute(plan, psi0);
  double previous = 1e300;
  for (std::size_t chi : {1u, 2u, 4u, 8u, 16u, 32u}) {
    const auto m = execute(plan, MpsState::from_product(10, ProductPattern::zeros(), chi));
    const double d = state_distance(mps_to_dense(m), reference);
    EXPECT_LE(d, previous + 1e-12) << "chi " << chi;
    previous = d;
  }
  EXPECT_LT(previous, 1e-8);
}

TEST(Mps, CanonicalizeIsIdempotentAndNormalising) {
  const auto gates = random_circuit(6, 20, 77);
  auto m = MpsState::from_product(6, ProductPattern::zeros(), 8);
  for (const auto& g : gates) m.apply_two_site_gate(g.site, g.u);
  const auto once = mps_canonicalize(m, 3);
  const auto twice = mps_canonicalize(once, 3);
  EXPECT_NEAR(mps_norm(once), 1.0, 1e-10);
  for (std::size_t k = 0; k < 6; ++k)
    for (int s = 0; s < 2; ++s) EXPECT_LT((once.site(k)[s] - twice.site(k)[s]).norm(), 1e-12);
  EXPECT_LT(state_distance(mps_to_dense(once), mps_to_dense(m)), 1e-12);
  // Left-normalised sites to the left of the centre.
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& a = once.site(k);
    const Matrix gram = a[0].adjoint() * a[0] + a[1].adjoint() * a[1];
    EXPECT_LT((gram - Matrix::Identity(gram.rows(), gram.cols())).norm(), 1e-12);
  }
}

TEST(Mps, OverlapMatchesDense) {
  const auto a = MpsState::from_dense(DenseState::random(5, 1));
  const auto b = MpsState::from_dense(DenseState::random(5, 2));
  EXPECT_NEAR(std::abs(mps_overlap(a, b) - inner_product(mps_to_dense(a), mps_to_dense(b))), 0.0, 1e-12);
}

TEST(Mps, CheckpointRoundTrip) {
  const auto gates = random_circuit(6, 15, 4);
  auto m = MpsState::from_product(6, ProductPattern::zeros(), 3);
  for (const auto& g : gates) m.apply_two_site_gate(g.site, g.u);
  const auto path = (std::filesystem::temp_directory_path() / "entrotter_mps_ckpt.json").string();
  save_checkpoint(m, path);
  const auto back = load_checkpoint(path);
  std::remove(path.c_str());
  EXPECT_EQ(back.num_sites(), 6u);
  EXPECT_EQ(back.chi_max(), 3u);
  EXPECT_DOUBLE_EQ(back.cum_discarded(), m.cum_discarded());
  EXPECT_LT(mps_distance(back, m), 1e-14);
  auto j = to_json(m);
  j["version"] = 99;
  EXPECT_THROW(mps_from_json(j), std::invalid_argument);
}
