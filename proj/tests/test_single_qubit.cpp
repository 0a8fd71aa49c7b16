#include "csm/single_qubit.hpp"

#include "csm/measures.hpp"
#include "csm/oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace csm {
namespace {

constexpr double kPi = std::numbers::pi;

// exp(-i h t) for the 2x2 rotating-frame generator via its eigenbasis,
// followed by R(t) = exp(-i omega t S^z).
Mat2 reference_unitary(const FieldConfig& f, double shift, double t) {
  const double delta = f.omega - (f.omega0 + shift);
  Mat2 h = -delta * spin::sz() + f.omega1 * spin::sx();
  Eigen::SelfAdjointEigenSolver<Mat2> es(h);
  Mat2 d = Mat2::Zero();
  for (int k = 0; k < 2; ++k) d(k, k) = std::polar(1.0, -es.eigenvalues()[k] * t);
  Mat2 r = Mat2::Zero();
  r(0, 0) = std::polar(1.0, -0.5 * f.omega * t);
  r(1, 1) = std::polar(1.0, 0.5 * f.omega * t);
  return r * es.eigenvectors() * d * es.eigenvectors().adjoint();
}

TEST(SectorUnitary, MatchesEigenbasisExponential) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int rep = 0; rep < 50; ++rep) {
    const FieldConfig f{100.0 + u(rng), std::abs(u(rng)), 100.0 + u(rng)};
    const double shift = u(rng);
    const double t = std::abs(u(rng)) / 10.0;
    const SectorUnitary su = sector_unitary(f, shift, t);
    EXPECT_LT((su.u - reference_unitary(f, shift, t)).norm(), 1e-12);
    EXPECT_LT((su.u * su.u.adjoint() - Mat2::Identity()).norm(), 1e-13);
  }
}

TEST(SectorUnitary, ZeroRabiFrequencyIsContinuous) {
  const FieldConfig f{100.0, 0.0, 100.0};
  const SectorUnitary su = sector_unitary(f, 0.0, 0.7);
  EXPECT_EQ(su.rabi, 0.0);
  EXPECT_LT((su.u - reference_unitary(f, 0.0, 0.7)).norm(), 1e-14);
}

TEST(FreeRabi, PiPulseFlipsTheSpin) {
  const FieldConfig f{100.0, 10.0, 100.0};
  EXPECT_NEAR(free_transition_probability(f, kPi / 10.0), 1.0, 1e-12);
  EXPECT_NEAR(free_transition_probability(f, 0.0), 0.0, 1e-15);
}

TEST(FreeRabi, DetunedMaximum) {
  for (double d0 : {1.0, 5.0, 17.0}) {
    const FieldConfig f{100.0, 10.0, 100.0 + d0};
    const double rabi = std::hypot(10.0, d0);
    EXPECT_NEAR(free_transition_probability(f, kPi / rabi), 100.0 / (100.0 + d0 * d0), 1e-12);
  }
}

TEST(FreeRabi, RejectsNegativeTime) {
  EXPECT_THROW(free_transition_probability({100.0, 10.0, 100.0}, -1.0), ValidationError);
}

TEST(ReducedState, PolarizationsAndTransitionProbabilityAgree) {
  const BathConfig bath = make_bath(12, 0.3, coupling::GaussianProfile{15.0, 0.02});
  const SectorSpectrum s = enumerate_sectors(bath);
  const FieldConfig f{1000.0, 10.0, 1001.5};
  for (double t : {0.0, 0.05, 0.31, 1.7}) {
    const QubitState rho = reduced_state(f, s, QubitState::up(), t);
    const Vec3 p = polarizations(f, s, t);
    EXPECT_LT((rho.bloch() - p).norm(), 1e-12);
    EXPECT_NEAR(transition_probability(f, s, t), 0.5 * (1.0 - p[2]), 1e-13);
    EXPECT_NEAR(pz_offset(f, s) + pz_oscillation(f, s, t).real(), p[2], 1e-13);
  }
}

TEST(ReducedState, MatchesOracleOnRandomBaths) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {2, 6}) {
    for (double p : {0.0, 0.5, 1.0}) {
      const auto g = testing::random_couplings(rng, n);
      const BathConfig bath = make_bath(n, p, coupling::Explicit{g});
      const FieldConfig f{50.0, 6.0, 50.0 + 10.0 * (u(rng) - 0.5)};
      const QubitState rho0 = QubitState::from_matrix(testing::random_mixed2(rng));
      const std::vector<double> ts{0.2, 0.9, 2.3};
      const auto ref = oracle_reduced_states(FullSystemSpec::single(f, bath), rho0.matrix(), ts);
      const SectorSpectrum s = enumerate_sectors(bath);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        EXPECT_LT(trace_distance(reduced_state(f, s, rho0, ts[i]).matrix(), ref[i]), 1e-10);
      }
    }
  }
}

TEST(Asymptotic, RateAndInitialValue) {
  // gamma = N g^2 / (4 w1^2); gamma' = gamma w1
  EXPECT_NEAR(asymptotic_rate(10.0, 2000, std::sqrt(0.05)), 2.5, 1e-12);
  EXPECT_NEAR(pz_asymptotic(10.0, 2000, std::sqrt(0.05), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(pz_asymptotic_envelope(10.0, 2000, std::sqrt(0.05), 0.0), 0.75, 1e-15);
  EXPECT_THROW(asymptotic_rate(0.0, 10, 1.0), ValidationError);
}

TEST(Asymptotic, EnvelopeTracksExactLargeBath) {
  const int n = 2000;
  const double w1 = 10.0;
  const double g = 2.0 * w1 * std::sqrt(0.25 / n);
  const FieldConfig f{0.0, w1, 0.0};
  const SectorSpectrum s = collapse_uniform(n, g, 0.0);
  double worst = 0.0;
  for (double t = 2.0; t <= 20.0; t += 0.173) {
    const double exact = std::abs(pz_oscillation(f, s, t));
    worst = std::max(worst, std::abs(pz_asymptotic_envelope(w1, n, g, t) / exact - 1.0));
  }
  EXPECT_LT(worst, 0.01);
  // The constant part is only first order in gamma: <u/(1+u)> vs gamma.
  EXPECT_NEAR(pz_offset(f, s), 0.1573, 1e-3);
}

TEST(OneBathSpin, AmplitudesMatchFullPropagator) {
  const double w1 = 10.0;
  const double g1 = 100.0 * w1;
  for (double sign : {+1.0, -1.0}) {
    const FieldConfig f{2000.0, w1, 2000.0 + sign * 0.5 * g1};
    const double t = kPi / w1;
    const auto a = one_bath_spin_amplitudes(f, g1, t);

    // |up> (|up> + |down>)/sqrt2 evolved on the 4-dim space.
    const FullSystemSpec spec = FullSystemSpec::single(f, make_bath(1, 0.0, coupling::Explicit{{g1}}));
    const Eigen::MatrixXcd h = build_rotating_hamiltonian(spec).cast<cplx>();
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(4);
    psi0[0] = psi0[1] = 1.0 / std::numbers::sqrt2;
    Eigen::VectorXcd psi = evolve_exact(h, psi0, t);
    psi.head(2) *= std::polar(1.0, -0.5 * f.omega * t);  // qubit up
    psi.tail(2) *= std::polar(1.0, 0.5 * f.omega * t);   // qubit down
    EXPECT_LT(std::abs(psi[0] - a.a_plus), 1e-10);
    EXPECT_LT(std::abs(psi[1] - a.a_minus), 1e-10);
    EXPECT_LT(std::abs(psi[2] - a.b_plus), 1e-10);
    EXPECT_LT(std::abs(psi[3] - a.b_minus), 1e-10);
    EXPECT_GE(pure_concurrence_amplitudes(a.a_plus, a.b_plus, a.a_minus, a.b_minus), 0.99);
  }
}

TEST(OneBathSpin, ResonanceSelectsTheEntangledPair) {
  const double w1 = 10.0;
  const double g1 = 100.0 * w1;
  const double t = kPi / w1;
  // omega = omega0 + g1/2: the bath-up sector is resonant, giving |du> + |ud>.
  const auto up = one_bath_spin_amplitudes({500.0, w1, 500.0 + 0.5 * g1}, g1, t);
  EXPECT_NEAR(std::abs(up.b_plus), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(std::abs(up.a_minus), std::sqrt(0.5), 1e-4);
  EXPECT_LT(std::abs(up.a_plus), 1e-12);
  // omega = omega0 - g1/2: the bath-down sector is resonant, giving |uu> + |dd>.
  const auto dn = one_bath_spin_amplitudes({500.0, w1, 500.0 - 0.5 * g1}, g1, t);
  EXPECT_NEAR(std::abs(dn.b_minus), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(std::abs(dn.a_plus), std::sqrt(0.5), 1e-4);
  EXPECT_LT(std::abs(dn.a_minus), 1e-12);
}

}  // namespace
}  // namespace csm
