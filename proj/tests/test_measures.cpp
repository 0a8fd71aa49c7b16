#include "csm/measures.hpp"

#include "csm/oracle.hpp"
#include "csm/single_qubit.hpp"
#include "csm/two_qubit.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace csm {
namespace {

constexpr double kPi = std::numbers::pi;

// max(0, (3p - 1)/2) for p singlet + (1 - p) I/4.
TEST(Concurrence, WernerStates) {
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const Mat4 rho = p * bell_state(BellState::Singlet).matrix() + (1.0 - p) * 0.25 * Mat4::Identity();
    EXPECT_NEAR(concurrence(rho), std::max(0.0, 0.5 * (3 * p - 1)), 1e-12) << p;
  }
  EXPECT_NEAR(concurrence(Mat4(0.25 * Mat4::Identity())), 0.0, 1e-15);
}

TEST(Concurrence, BellStatesAreMaximal) {
  for (BellState b : kAllBellStates) EXPECT_NEAR(concurrence(bell_state(b)), 1.0, 1e-12);
}

TEST(Concurrence, PureStatesMatchAmplitudeFormula) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec4c v = testing::random_pure4(rng);
    // v = (uu, ud, du, dd)
    EXPECT_NEAR(concurrence(TwoQubitState::pure(v)), pure_concurrence_amplitudes(v[0], v[2], v[1], v[3]), 1e-12);
  }
}

TEST(Concurrence, ProductStatesAreZero) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const TwoQubitState rho = TwoQubitState::product(QubitState::from_matrix(testing::random_mixed2(rng)),
                                                     QubitState::from_matrix(testing::random_mixed2(rng)));
    EXPECT_LE(concurrence(rho), 1e-10);
  }
  EXPECT_LE(concurrence(TwoQubitState::product(QubitState::up(), QubitState::down())), 1e-10);
}

TEST(Concurrence, InvariantUnderLocalUnitaries) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const Mat4 rho = rep % 2 ? testing::random_mixed4(rng) : Mat4(TwoQubitState::pure(testing::random_pure4(rng)).matrix());
    const Mat4 u = spin::kron(testing::random_unitary2(rng), testing::random_unitary2(rng));
    const Mat4 r2 = u * rho * u.adjoint();
    EXPECT_LE(std::abs(concurrence(rho) - concurrence(Mat4(0.5 * (r2 + r2.adjoint())))), 1e-10);
  }
}

TEST(Concurrence, RejectsNonPhysicalInput) {
  Mat4 m = Mat4::Zero();
  m(0, 0) = 1.1;
  m(1, 1) = -0.1;
  EXPECT_THROW(concurrence(m), ValidationError);
}

TEST(FreeConcurrence, ClosedFormMatchesPropagator) {
  for (double j : {0.0, 1.0, 5.0, 10.0})
    for (double w1 : {0.0, 3.0, 10.0})
      for (double t : {0.0, 0.1, kPi / 10.0, 0.9, 2.4}) {
        const Mat4 u = sector_unitary_2q(TwoQubitFieldConfig::common({100.0, w1, 100.0}, j), 0.0, t);
        const double c = concurrence(TwoQubitState::pure(u.col(1)));  // from |ud>
        EXPECT_NEAR(concurrence_free_formula(j, w1, t), c, 1e-10);
      }
}

TEST(FreeConcurrence, SpecialValues) {
  EXPECT_EQ(concurrence_free_formula(0.0, 10.0, 1.3), 0.0);
  EXPECT_EQ(concurrence_free_formula(10.0, 10.0, 0.0), 0.0);
  // J t = pi: the exchange phase returns |ud> to itself; the propagator agrees.
  EXPECT_NEAR(concurrence_free_formula(10.0, 10.0, kPi / 10.0), 0.0, 1e-15);
  EXPECT_NEAR(concurrence_free_formula(10.0, 10.0, kPi / 20.0), 1.0, 1e-15);
}

TEST(FreeConcurrence, UncorrectedVariantDiffersFromPropagator) {
  EXPECT_NEAR(concurrence_free_formula_uncorrected(10.0, 10.0, kPi / 10.0), 1.0, 1e-15);
  EXPECT_NEAR(concurrence_free_formula_uncorrected(0.0, 10.0, 0.7), 0.0, 1e-15);
}

TEST(PureConcurrence, Examples) {
  const double r = 1.0 / std::numbers::sqrt2;
  EXPECT_NEAR(pure_concurrence_amplitudes(r, 0.0, 0.0, r), 1.0, 1e-15);
  EXPECT_NEAR(pure_concurrence_amplitudes(r, 0.0, r, 0.0), 0.0, 1e-15);
  EXPECT_THROW(pure_concurrence_amplitudes(1.0, 1.0, 0.0, 0.0), ValidationError);
  EXPECT_NO_THROW(pure_concurrence_amplitudes(1.0 + 4e-9, 0.0, 0.0, 0.0));
}

TEST(Purity, Examples) {
  EXPECT_NEAR(purity(bell_state(BellState::PhiPlus)), 1.0, 1e-15);
  EXPECT_NEAR(purity(TwoQubitState::from_matrix(0.25 * Mat4::Identity())), 0.25, 1e-15);
  EXPECT_NEAR(purity(QubitState::from_bloch(Vec3::Zero())), 0.5, 1e-15);
  EXPECT_NEAR(purity(Eigen::MatrixXcd(bell_state(BellState::Singlet).matrix())), 1.0, 1e-15);
}

TEST(Purity, MatchesOracleMidDecay) {
  const BathConfig bath = make_bath(8, 0.0, coupling::GaussianProfile{40.0, 0.01});
  const FieldConfig f{1000.0, 10.0, 1000.0};
  const std::vector<double> ts{0.15, 0.4};
  const auto ref = oracle_reduced_states(FullSystemSpec::single(f, bath), QubitState::up().matrix(), ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const QubitState rho = reduced_state(f, enumerate_sectors(bath), QubitState::up(), ts[i]);
    EXPECT_NEAR(purity(rho), purity(ref[i]), 1e-10);
    EXPECT_LT(purity(rho), 0.999);
  }
}

TEST(Decoherence, IdentityWithPurity) {
  EXPECT_EQ(decoherence_measure(Vec3(0, 0, 1)), 0.0);
  EXPECT_EQ(decoherence_measure(Vec3::Zero()), 1.0);
  EXPECT_THROW(decoherence_measure(Vec3(0, 0, 1.1)), ValidationError);
  const SectorSpectrum s = collapse_uniform(20, 2.0, 0.0);
  const FieldConfig f{1000.0, 10.0, 1000.0};
  for (double t = 0.0; t < 2.0; t += 0.1) {
    const QubitState rho = reduced_state(f, s, QubitState::up(), t);
    const MeasureReport m = measure(rho);
    EXPECT_NEAR(m.decoherence, 2.0 * (1.0 - m.purity), 1e-12);
    EXPECT_NEAR(decoherence_measure(polarizations(f, s, t)), m.decoherence, 1e-12);
  }
}

TEST(TraceDistance, Basics) {
  const Eigen::MatrixXcd a = QubitState::up().matrix();
  const Eigen::MatrixXcd b = QubitState::down().matrix();
  EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
  EXPECT_THROW(trace_distance(a, Eigen::MatrixXcd::Identity(4, 4)), ValidationError);
}

}  // namespace
}  // namespace csm
