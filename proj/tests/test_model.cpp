#include <bit>
#include <random>

#include <gtest/gtest.h>

#include "dense_oracle.hpp"
#include "svqe/eigensolver.hpp"
#include "svqe/model.hpp"

using namespace svqe;

namespace {

ModelParams make(int n, double x, std::vector<double> mu, std::vector<double> nu) {
  ModelParams p;
  p.sites = n;
  p.flavors = static_cast<int>(mu.size());
  p.x = x;
  p.mu = std::move(mu);
  p.nu = std::move(nu);
  return p;
}

ModelParams random_model(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return make(n, std::abs(u(rng)), {u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
}

// Permutation matrix of the flip-reflection, built from its definition on bits.
oracle::MatrixXcd flip_reflection_matrix(int m) {
  const Eigen::Index dim = Eigen::Index{1} << m;
  oracle::MatrixXcd s = oracle::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    Eigen::Index r = 0;
    for (int q = 0; q < m; ++q) {
      if (!((b >> q) & 1)) r |= Eigen::Index{1} << (m - 1 - q);
    }
    s(r, b) = 1.0;
  }
  return s;
}

}  // namespace

TEST(ModelParams, Validation) {
  EXPECT_NO_THROW(make(2, 1.0, {0, 0, 0}, {0, 0, 0}).validate());
  EXPECT_THROW(make(3, 1.0, {0, 0, 0}, {0, 0, 0}).validate(), std::invalid_argument);
  EXPECT_THROW(make(0, 1.0, {0, 0, 0}, {0, 0, 0}).validate(), std::invalid_argument);
  EXPECT_THROW(make(2, -1.0, {0, 0, 0}, {0, 0, 0}).validate(), std::invalid_argument);
  ModelParams p = make(2, 1.0, {0, 0, 0}, {0, 0});
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(build_hamiltonian(p), std::invalid_argument);
}

TEST(BuildHamiltonian, SingleFlavorPairWithoutHoppingIsProjector) {
  const PauliSum w = build_hamiltonian(make(2, 0.0, {0.0}, {0.0}));
  ASSERT_EQ(w.size(), 2U);
  EXPECT_EQ(w.coefficient(parse_word("II")), Complex(0.5, 0.0));
  EXPECT_EQ(w.coefficient(parse_word("ZI")), Complex(0.5, 0.0));
}

TEST(BuildHamiltonian, HoppingStringCoversIntermediateFlavors) {
  const PauliSum w = build_hamiltonian(make(2, 1.0, {0.3, 0.1, 0.2}, {0.5, 0.0, -0.1}));
  int found = 0;
  for (const auto& t : w.terms()) {
    if (t.word.is_diagonal()) continue;
    const std::string s = to_string(t.word, 6);
    if (s[0] == 'I') continue;
    // flavor-0 hopping between qubits 0 and 3
    EXPECT_EQ(t.word.support(), 0b001111U) << s;
    EXPECT_EQ(s.substr(1, 2), "ZZ") << s;
    EXPECT_TRUE((s[0] == 'X' && s[3] == 'Y') || (s[0] == 'Y' && s[3] == 'X')) << s;
    EXPECT_NEAR(std::abs(t.coeff), 0.5, 1e-15);
    ++found;
  }
  EXPECT_EQ(found, 2);
}

TEST(BuildHamiltonian, CoefficientsAreRealAfterSimplification) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const PauliSum w = build_hamiltonian(random_model(trial % 2 == 0 ? 2 : 4, rng));
    EXPECT_LT(w.max_imag(), 1e-14);
    for (std::size_t i = 1; i < w.size(); ++i) EXPECT_NE(w.terms()[i - 1].word, w.terms()[i].word);
  }
}

TEST(BuildHamiltonian, MatchesFermionOracleElementwise) {
  const ModelParams p = make(2, 1.0, {0.1, 0.1, 0.1}, {0.5, 0.0, -0.5});
  const auto dense = oracle::dense(build_hamiltonian(p));
  // The JW operator conserves weight, so the dense matrix is the direct sum
  // of the weight sectors; compare every sector block and the zero blocks.
  oracle::MatrixXcd assembled = oracle::MatrixXcd::Zero(64, 64);
  for (int w = 0; w <= 6; ++w) {
    SectorBasis basis(6, w);
    const auto block = oracle_hamiltonian(p, basis);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        assembled(static_cast<Eigen::Index>(basis.state(i)),
                  static_cast<Eigen::Index>(basis.state(j))) =
            block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  EXPECT_LT((dense - assembled).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildHamiltonian, SimplificationPreservesMatrix) {
  const ModelParams p = make(2, 0.7, {0.2, 0.1, 0.2}, {0.4, -0.3, 0.1});
  const PauliSum w = build_hamiltonian(p);
  PauliSum raw = w + w * Complex{-1.0, 0.0} + w;  // unsimplified, same operator
  EXPECT_EQ(raw.size(), 3 * w.size());
  const PauliSum s = simplify(raw);
  EXPECT_EQ(s.size(), w.size());
  EXPECT_LT((oracle::dense(raw) - oracle::dense(s)).norm(), 1e-12);
}

TEST(BuildHamiltonian, NuShiftAddsChargeOperator) {
  std::mt19937_64 rng(4);
  for (int n : {2, 4}) {
    const ModelParams p = random_model(n, rng);
    ModelParams q = p;
    const double c = 0.7;
    for (auto& v : q.nu) v += c;
    const PauliSum diff = simplify(build_hamiltonian(q) - build_hamiltonian(p), 1e-12);
    const int m = p.num_qubits();
    const PauliSum expect =
        simplify((total_charge_operator(p) + PauliSum::identity(m, 0.5 * m)) * c, 1e-12);
    EXPECT_LT(simplify(diff - expect, 1e-12).one_norm(), 1e-12);
  }
}

TEST(TotalCharge, BasisStateEigenvalues) {
  for (int n : {2, 4}) {
    const ModelParams p = make(n, 1.0, {0, 0, 0}, {0, 0, 0});
    const PauliSum q = total_charge_operator(p);
    for (const auto& t : q.terms()) ASSERT_TRUE(t.word.is_diagonal());
    // Diagonal words: <b|Z_j|b> = +1 where bit j is set.
    const auto value = [&](std::uint64_t b) {
      double v = 0.0;
      for (const auto& t : q.terms()) v += t.coeff.real() * (std::popcount(t.word.z & ~b) % 2 ? -1 : 1);
      return v;
    };
    const int m = p.num_qubits();
    const std::uint64_t neel = 0x5555555555555555ULL & ((std::uint64_t{1} << m) - 1);
    const std::uint64_t all_up = (std::uint64_t{1} << m) - 1;
    EXPECT_NEAR(value(neel), 0.0, 1e-14);
    EXPECT_NEAR(value(all_up), 1.5 * n, 1e-14);
    // n_up - M/2 on every basis state
    for (std::uint64_t b = 0; b <= all_up; ++b) {
      EXPECT_NEAR(value(b), std::popcount(b) - 0.5 * m, 1e-13);
    }
  }
}

TEST(TotalCharge, CommutesWithHamiltonian) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = random_model(trial < 5 ? 2 : 4, rng);
    EXPECT_TRUE(commutator(build_hamiltonian(p), total_charge_operator(p)).empty());
  }
}

TEST(DeltaN, ReferenceFlavorIsZero) {
  const ModelParams p = make(4, 1.0, {0, 0, 0}, {0, 0, 0});
  EXPECT_TRUE(delta_n_operator(p, 1).empty());
  EXPECT_THROW(delta_n_operator(p, 3), std::out_of_range);
  EXPECT_THROW(delta_n_operator(p, -1), std::out_of_range);
}

TEST(DeltaN, MatchesBitCounting) {
  const ModelParams p = make(2, 1.0, {0, 0, 0}, {0, 0, 0});
  for (int f : {0, 2}) {
    const auto d = oracle::dense(delta_n_operator(p, f));
    for (Eigen::Index b = 0; b < 64; ++b) {
      int count = 0;
      for (int n = 0; n < 2; ++n) {
        count += static_cast<int>((b >> (3 * n + f)) & 1) - static_cast<int>((b >> (3 * n + 1)) & 1);
      }
      EXPECT_NEAR(d(b, b).real(), count, 1e-14);
    }
  }
  const auto d0 = oracle::dense(delta_n_operator(p, 0));
  const auto at = [&](const char* s) {
    const auto b = static_cast<Eigen::Index>(oracle::bits(s));
    return d0(b, b).real();
  };
  EXPECT_NEAR(at("100110"), 1.0, 1e-14);
  // flavor 0 occupies qubits 0 and 3, flavor 1 only qubit 1
  EXPECT_NEAR(at("110100"), 1.0, 1e-14);
  EXPECT_NEAR(at("101010"), 0.0, 1e-14);  // Neel
}

TEST(FlipReflection, IsAnInvolutionFixingNeel) {
  for (int m : {2, 6, 12}) {
    FlipReflection s(m);
    std::uint64_t neel = 0;
    for (int j = 0; j < m; j += 2) neel |= std::uint64_t{1} << j;
    EXPECT_EQ(s.map_basis(neel), neel);
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << std::min(m, 10)); ++b) {
      EXPECT_EQ(s.map_basis(s.map_basis(b)), b);
    }
  }
  std::mt19937_64 rng(1);
  const PauliSum w = oracle::random_pauli_sum(4, 10, rng, false);
  FlipReflection s(4);
  EXPECT_TRUE(simplify(s.conjugate(s.conjugate(w)) - w).empty());
}

TEST(FlipReflection, ConjugationMatchesPermutationMatrix) {
  std::mt19937_64 rng(2);
  const PauliSum w = oracle::random_pauli_sum(4, 12, rng, false);
  const auto perm = flip_reflection_matrix(4);
  const FlipReflection s(4);
  EXPECT_LT((oracle::dense(s.conjugate(w)) - perm * oracle::dense(w) * perm.transpose()).norm(),
            1e-12);
  for (std::uint64_t b = 0; b < 16; ++b) {
    EXPECT_EQ(perm(static_cast<Eigen::Index>(s.map_basis(b)), static_cast<Eigen::Index>(b)),
              Complex(1.0, 0.0));
  }
}

TEST(FlipReflection, SymmetricParametersCommuteInZeroChargeSector) {
  for (int n : {2, 4}) {
    const ModelParams p = make(n, 1.3, {0.2, 0.2, 0.2}, {0.8, 0.0, -0.8});
    ASSERT_TRUE(p.has_flip_reflection_symmetry());
    const PauliSum w = build_hamiltonian(p);
    const int m = p.num_qubits();
    EXPECT_LT(FlipReflection(m).sector_commutator_norm(w, m / 2), 1e-12);
  }
  const ModelParams p = make(2, 1.3, {0.2, 0.2, 0.2}, {0.8, 0.0, -0.8});
  const auto dw = oracle::dense(build_hamiltonian(p));
  const auto s = flip_reflection_matrix(6);
  const oracle::MatrixXcd c = dw * s - s * dw;
  double in_sector = 0.0;
  for (Eigen::Index i = 0; i < 64; ++i) {
    for (Eigen::Index j = 0; j < 64; ++j) {
      if (std::popcount(static_cast<std::uint64_t>(i)) == 3 &&
          std::popcount(static_cast<std::uint64_t>(j)) == 3) {
        in_sector = std::max(in_sector, std::abs(c(i, j)));
      }
    }
  }
  EXPECT_LT(in_sector, 1e-12);
}

// S maps the left-edge field L_n to L_{N-2-n} - Q_tot, so the electric term
// is symmetric only where the total charge vanishes.
TEST(FlipReflection, ElectricTermBreaksSymmetryOutsideZeroCharge) {
  const ModelParams p = make(2, 0.0, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
  const PauliSum w = build_hamiltonian(p);
  const FlipReflection s(6);
  EXPECT_LT(s.sector_commutator_norm(w, 3), 1e-12);
  EXPECT_GT(s.sector_commutator_norm(w, 4), 0.5);
  EXPECT_GT(s.commutator_norm(w), 0.5);
  const PauliSum q = total_charge_operator(p);
  const PauliSum expect = simplify(q * q * Complex{-1.0, 0.0} + q * site_charge_operator(p, 0) * 2.0);
  EXPECT_LT(simplify(w - s.conjugate(w) - expect, 1e-12).one_norm(), 1e-12);
}

TEST(FlipReflection, BrokenSymmetryGivesNonzeroCommutator) {
  const ModelParams broken = make(2, 1.0, {0.0, 0.0, 0.0}, {0.8, 3.0, -0.8});
  EXPECT_FALSE(broken.has_flip_reflection_symmetry());
  EXPECT_GT(FlipReflection(6).sector_commutator_norm(build_hamiltonian(broken), 3), 1.0);
  const ModelParams asym_mass = make(2, 1.0, {0.1, 0.0, 0.3}, {0.0, 0.0, 0.0});
  EXPECT_GT(FlipReflection(6).sector_commutator_norm(build_hamiltonian(asym_mass), 3), 0.1);
}
