#include "csm/two_qubit.hpp"

#include "csm/measures.hpp"
#include "csm/oracle.hpp"
#include "csm/single_qubit.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace csm {
namespace {

constexpr double kPi = std::numbers::pi;

Mat4 exchange() {
  Mat4 m = Mat4::Zero();
  for (int a = 0; a < 3; ++a) m += spin::s1(a) * spin::s2(a);
  return m;
}

Mat4 expm_hermitian(const Mat4& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  Vec4c d;
  for (int k = 0; k < 4; ++k) d[k] = std::polar(1.0, -es.eigenvalues()[k] * t);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

TEST(CoupledBasis, IsUnitaryAndDiagonalizesExchange) {
  const Mat4& q = coupled_basis();
  EXPECT_LT((q.adjoint() * q - Mat4::Identity()).norm(), 1e-15);
  const Mat4 d = q.adjoint() * exchange() * q;
  const Vec4c expected(0.25, 0.25, 0.25, -0.75);
  EXPECT_LT((d - Mat4(expected.asDiagonal())).norm(), 1e-15);
}

TEST(RotatingFrameHamiltonian, SingletDecouples) {
  const auto cfg = TwoQubitFieldConfig::common({100.0, 10.0, 97.0}, 4.0);
  const Mat4 h = rotating_frame_hamiltonian(cfg, 1.5);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(h(3, k), cplx(0.0));
    EXPECT_EQ(h(k, 3), cplx(0.0));
  }
  EXPECT_DOUBLE_EQ(h(3, 3).real(), -3.0);
  // Same operator as the product-basis expression.
  const Mat4 hp = (100.0 + 1.5 - 97.0) * (spin::s1(2) + spin::s2(2)) + 10.0 * (spin::s1(0) + spin::s2(0)) +
                  4.0 * exchange();
  EXPECT_LT((coupled_basis() * h * coupled_basis().adjoint() - hp).norm(), 1e-13);
}

TEST(RotatingFrameHamiltonian, RequiresCommonFields) {
  const auto cfg = TwoQubitFieldConfig::separate({100.0, 10.0, 100.0}, {110.0, 10.0, 100.0}, 0.0);
  EXPECT_THROW(rotating_frame_hamiltonian(cfg, 0.0), ValidationError);
  EXPECT_THROW(TwoQubitFieldConfig::separate({100.0, 10.0, 100.0}, {100.0, 11.0, 100.0}, 0.0), ValidationError);
}

TEST(SectorUnitary2q, FactorsIntoLocalDriveTimesExchange) {
  // A common field commutes with S1.S2, so U = (u x u) exp(-i J S1.S2 t).
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int rep = 0; rep < 30; ++rep) {
    const FieldConfig f{100.0 + u(rng), std::abs(u(rng)), 100.0 + u(rng)};
    const double j = u(rng);
    const double shift = u(rng);
    const double t = std::abs(u(rng)) / 5.0;
    const Mat4 got = sector_unitary_2q(TwoQubitFieldConfig::common(f, j), shift, t);
    const Mat2 u1 = sector_unitary(f, shift, t).u;
    const Mat4 want = spin::kron(u1, u1) * expm_hermitian(j * exchange(), t);
    EXPECT_LT((got - want).norm(), 1e-12);
    EXPECT_LT((got * got.adjoint() - Mat4::Identity()).norm(), 1e-13);
  }
}

TEST(FreeTransitions, QuarterPrefactors) {
  for (double j : {0.0, 3.0, 10.0}) {
    const auto cfg = TwoQubitFieldConfig::common({100.0, 10.0, 100.0}, j);
    for (double t : {0.05, 0.2, kPi / 10.0, 0.77}) {
      const FreeTransitions tr = transition_probabilities_free(cfg, t);
      const double c = std::cos(10.0 * t);
      EXPECT_NEAR(tr.down_down, 0.25 * (1 - c) * (1 - c), 1e-12);
      EXPECT_NEAR(tr.down_up, 0.25 * std::norm(1.0 - std::polar(1.0, j * t) * c), 1e-12);
    }
  }
}

TEST(CommonBath, SingletIsProtected) {
  const SectorSpectrum s = collapse_uniform(20, 1.0, 0.3);
  const TwoQubitState singlet = bell_state(BellState::Singlet);
  for (double j : {0.0, 7.0}) {
    const auto cfg = TwoQubitFieldConfig::common({100.0, 10.0, 103.0}, j);
    for (double t : {0.1, 0.8, 2.0}) {
      const TwoQubitState rho = reduced_state_2q_common(cfg, s, singlet, t);
      EXPECT_LT((rho.matrix() - singlet.matrix()).norm(), 1e-12);
    }
  }
}

TEST(CommonBath, ProductInputsStayUnentangledWithoutExchange) {
  std::mt19937_64 rng(4);
  const SectorSpectrum s = enumerate_sectors(make_bath(8, 0.2, coupling::Explicit{testing::random_couplings(rng, 8)}));
  const auto cfg = TwoQubitFieldConfig::common({100.0, 10.0, 101.0}, 0.0);
  for (int rep = 0; rep < 5; ++rep) {
    const TwoQubitState rho0 = TwoQubitState::product(QubitState::from_matrix(testing::random_mixed2(rng)),
                                                      QubitState::from_matrix(testing::random_mixed2(rng)));
    for (double t : {0.3, 1.1}) EXPECT_LE(concurrence(reduced_state_2q_common(cfg, s, rho0, t)), 1e-8);
  }
}

TEST(CommonBath, MatchesOracle) {
  std::mt19937_64 rng(17);
  const BathConfig bath = make_bath(4, 0.5, coupling::Explicit{testing::random_couplings(rng, 4)});
  const auto cfg = TwoQubitFieldConfig::common({40.0, 6.0, 42.0}, 5.0);
  const Mat4 rho0 = testing::random_mixed4(rng);
  const std::vector<double> ts{0.3, 1.4};
  const auto ref = oracle_reduced_states(FullSystemSpec::common(cfg, bath), rho0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto rho = reduced_state_2q_common(cfg, enumerate_sectors(bath), TwoQubitState::from_matrix(rho0), ts[i]);
    EXPECT_LT(trace_distance(rho.matrix(), ref[i]), 1e-10);
  }
}

TEST(EtaMatrix, IsAProperRotation) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int rep = 0; rep < 30; ++rep) {
    const FieldConfig f{100.0 + u(rng), std::abs(u(rng)), 100.0 + u(rng)};
    const Mat3 e = eta_matrix(f, u(rng), std::abs(u(rng))).eta;
    EXPECT_LT((e * e.transpose() - Mat3::Identity()).norm(), 1e-13);
    EXPECT_NEAR(e.determinant(), 1.0, 1e-13);
  }
}

TEST(EtaMatrix, MapsBlochVectorsLikeThePropagator) {
  std::mt19937_64 rng(8);
  const SectorSpectrum s = enumerate_sectors(make_bath(6, 0.4, coupling::Explicit{testing::random_couplings(rng, 6)}));
  const FieldConfig f{100.0, 8.0, 102.0};
  for (int rep = 0; rep < 5; ++rep) {
    const QubitState rho0 = QubitState::from_matrix(testing::random_mixed2(rng));
    for (double t : {0.0, 0.4, 1.9}) {
      const Vec3 want = reduced_state(f, s, rho0, t).bloch();
      EXPECT_LT((averaged_eta(f, s, t) * rho0.bloch() - want).norm(), 1e-12);
    }
  }
}

TEST(SeparateBaths, EtaRouteMatchesFactorizedPropagators) {
  std::mt19937_64 rng(12);
  const SectorSpectrum s1 = enumerate_sectors(make_bath(5, 0.0, coupling::Explicit{testing::random_couplings(rng, 5)}));
  const SectorSpectrum s2 = collapse_uniform(7, 1.2, 0.5);
  const auto cfg = TwoQubitFieldConfig::separate({100.0, 10.0, 99.0}, {110.0, 10.0, 104.0}, 0.0);
  const std::pair<SectorSpectrum, SectorSpectrum> spectra{s1, s2};
  for (int rep = 0; rep < 3; ++rep) {
    const TwoQubitState rho0 = TwoQubitState::from_matrix(testing::random_mixed4(rng));
    for (double t : {0.2, 1.3}) {
      const TwoQubitState a = evolve_separate_baths_bell(cfg, spectra, rho0, t);
      const SeparateEvolution b = evolve_separate_baths_general(cfg, spectra, rho0, t);
      EXPECT_EQ(b.path, SeparatePath::Factorized);
      EXPECT_LT((a.matrix() - b.state.matrix()).norm(), 1e-12);
    }
  }
}

TEST(SeparateBaths, ExchangeWithSharedFrequencyMatchesOracle) {
  std::mt19937_64 rng(13);
  const BathConfig b1 = make_bath(2, 0.5, coupling::Explicit{testing::random_couplings(rng, 2)});
  const BathConfig b2 = make_bath(3, 0.0, coupling::Explicit{testing::random_couplings(rng, 3)});
  const auto cfg = TwoQubitFieldConfig::separate({40.0, 6.0, 41.0}, {44.0, 6.0, 41.0}, 9.0);
  const Mat4 rho0 = testing::random_mixed4(rng);
  const std::vector<double> ts{0.35, 1.2};
  const auto ref = oracle_reduced_states(FullSystemSpec::separate(cfg, b1, b2), rho0, ts);
  const std::pair<SectorSpectrum, SectorSpectrum> spectra{enumerate_sectors(b1), enumerate_sectors(b2)};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const SeparateEvolution ev = evolve_separate_baths_general(cfg, spectra, TwoQubitState::from_matrix(rho0), ts[i]);
    EXPECT_EQ(ev.path, SeparatePath::RotatingFrame);
    EXPECT_LT(trace_distance(ev.state.matrix(), ref[i]), 1e-10);
    // The Bell entry point forwards J != 0 to the same route.
    EXPECT_LT((evolve_separate_baths_bell(cfg, spectra, TwoQubitState::from_matrix(rho0), ts[i]).matrix() -
               ev.state.matrix())
                  .norm(),
              1e-14);
  }
}

TEST(SeparateBaths, SteppedPathForDifferentDriveFrequencies) {
  std::mt19937_64 rng(14);
  const BathConfig b1 = make_bath(1, 0.0, coupling::Explicit{{1.3}});
  const BathConfig b2 = make_bath(2, 0.0, coupling::Explicit{{0.7, 2.1}});
  const auto cfg = TwoQubitFieldConfig::separate({20.0, 5.0, 21.0}, {24.0, 5.0, 22.5}, 3.0);
  const Mat4 rho0 = testing::random_mixed4(rng);
  const std::vector<double> ts{0.6};
  const auto ref = oracle_reduced_states(FullSystemSpec::separate(cfg, b1, b2), rho0, ts, OracleMethod::Stepped);
  const std::pair<SectorSpectrum, SectorSpectrum> spectra{enumerate_sectors(b1), enumerate_sectors(b2)};
  const SeparateEvolution ev = evolve_separate_baths_general(cfg, spectra, TwoQubitState::from_matrix(rho0), ts[0]);
  EXPECT_EQ(ev.path, SeparatePath::Stepped);
  EXPECT_LT(trace_distance(ev.state.matrix(), ref[0]), 1e-8);
}

}  // namespace
}  // namespace csm
