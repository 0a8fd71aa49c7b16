// oracle.hpp - brute-force reference dynamics on the full qubit + bath space.
//
// Nothing here uses the sector decomposition. The Hamiltonian is built on all
// 2^(n_q + N) basis states, evolved exactly (dense eigendecomposition) or by
// RK4 in the lab frame, and the bath is traced out at the end.
//
// Basis layout: positions 0..n_q-1 are the qubits, then the bath spins (bath 1
// before bath 2 for separate baths). Position p is bit (n_total - 1 - p) of the
// index, so the qubits are the most significant bits. Bit value 0 means up.

#pragma once

#include "csm/two_qubit.hpp"
#include "csm/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace csm {

/// Largest total dimension the oracle accepts.
inline constexpr int kOracleMaxQubitsTotal = 14;

enum class Frame { Lab, Rotating };

struct FullSystemSpec {
  int n_qubits = 1;
  /// One bath (single qubit, or shared by both qubits) or two (one per qubit).
  std::vector<BathConfig> baths;
  std::array<FieldConfig, 2> field{};
  double j = 0.0;
  Frame frame = Frame::Rotating;

  static FullSystemSpec single(const FieldConfig& field, const BathConfig& bath);
  static FullSystemSpec common(const TwoQubitFieldConfig& cfg, const BathConfig& bath);
  static FullSystemSpec separate(const TwoQubitFieldConfig& cfg, const BathConfig& bath1,
                                 const BathConfig& bath2);

  bool shared_bath() const noexcept { return n_qubits == 2 && baths.size() == 1; }
  int bath_spins() const;
  int total_spins() const { return n_qubits + bath_spins(); }
  long dimension() const { return 1L << total_spins(); }
};

/// Throws ValidationError for inconsistent fields and CapacityError above the cap.
void validate(const FullSystemSpec& spec);

/// H_rot = R^dag H R - sum_a omega_a S_a^z with R = exp(-i t sum_a omega_a S_a^z).
/// Time independent whenever J = 0 or both drive frequencies agree; throws
/// ValidationError otherwise. The matrix is real symmetric.
Eigen::MatrixXd build_rotating_hamiltonian(const FullSystemSpec& spec);

/// exp(-i h t) psi0 by full eigendecomposition of a Hermitian h.
Eigen::VectorXcd evolve_exact(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi0, double t);

/// Eigendecomposition of a real symmetric generator, reused across times and
/// initial vectors.
class EigenPropagator {
 public:
  explicit EigenPropagator(const Eigen::MatrixXd& h);
  /// exp(-i h t) applied to each column of psi0.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& psi0, double t) const;
  /// V^T psi0, the time-independent half of apply.
  Eigen::MatrixXcd project(const Eigen::MatrixXcd& psi0) const;
  /// V e^{-i E t} coeffs
  Eigen::MatrixXcd reconstruct(const Eigen::MatrixXcd& coeffs, double t) const;
  const Eigen::VectorXd& eigenvalues() const noexcept { return evals_; }

 private:
  Eigen::MatrixXd vecs_;
  Eigen::VectorXd evals_;
};

/// RK4 integration of the lab-frame Schroedinger equation with a uniform step
/// no larger than dt. Works on every column of psi0.
Eigen::MatrixXcd evolve_stepped_lab_frame(const FullSystemSpec& spec, const Eigen::MatrixXcd& psi0,
                                          double t, double dt);

/// Recommended RK4 step: 1e-3 * 2 pi / (largest frequency in the lab Hamiltonian).
double default_lab_step(const FullSystemSpec& spec);

/// Reduced system state of a pure state (or of an incoherent sum of the
/// columns of psi, each column a pure component with its weight folded into
/// the norm). The system occupies the top n_system_bits bits.
Eigen::MatrixXcd partial_trace_system(const Eigen::MatrixXcd& psi, int n_system_bits);
/// Same for a full density matrix.
Eigen::MatrixXcd partial_trace_system_density(const Eigen::MatrixXcd& rho, int n_system_bits);

enum class OracleMethod { Eigendecomposition, Stepped };

/// Rotating-frame eigendecomposition of one spec, reusable across initial
/// states, times and bath polarizations (the polarizations only enter the
/// initial state).
class ExactOracle {
 public:
  explicit ExactOracle(const FullSystemSpec& spec);
  /// Lab-frame reduced states. `polarizations`, if given, holds one value
  /// per bath and replaces the bath polarizations in spec().
  std::vector<Eigen::MatrixXcd> reduced_states(const Eigen::MatrixXcd& rho_sys0, std::span<const double> times,
                                               std::span<const double> polarizations = {}) const;
  /// Same for several polarization sets at once, indexed [set][time]. An
  /// empty set keeps the polarizations in spec().
  std::vector<std::vector<Eigen::MatrixXcd>> reduced_states_multi(
      const Eigen::MatrixXcd& rho_sys0, std::span<const double> times,
      std::span<const std::vector<double>> polarization_sets) const;
  const FullSystemSpec& spec() const noexcept { return spec_; }

 private:
  FullSystemSpec spec_;
  EigenPropagator prop_;
};

/// Lab-frame reduced system states at each time for the initial state
/// rho_sys0 (x) rho_bath, rho_bath the product of the per-spin bath states.
/// Eigendecomposition works in the rotating frame and rotates back; Stepped
/// integrates the lab frame directly (dt defaults to default_lab_step).
/// Without an explicit method, spec.frame picks one (Rotating -> eigen, Lab -> stepped).
std::vector<Eigen::MatrixXcd> oracle_reduced_states(const FullSystemSpec& spec,
                                                    const Eigen::MatrixXcd& rho_sys0,
                                                    std::span<const double> times,
                                                    std::optional<OracleMethod> method = {},
                                                    std::optional<double> dt = {});

}  // namespace csm
