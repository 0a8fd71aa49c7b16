// two_qubit.hpp - two driven qubits on a common bath or on separate baths.
//
// Lab Hamiltonian per bath sector:
//   H(t) = sum_a [(omega0_a + b_a) S_a^z + omega1 (cos(omega_a t) S_a^x + sin(omega_a t) S_a^y)]
//          + J S_1 . S_2
// A common bath has b_1 = b_2 = b and identical site fields; separate baths
// give independent shifts drawn from two spectra.
//
// Coupled (total-spin) basis, in this order: |1>_T = |uu>, |0>_T = (|ud>+|du>)/sqrt2,
// |-1>_T = |dd>, |0>_S = (|ud>-|du>)/sqrt2.

#pragma once

#include "csm/sectors.hpp"
#include "csm/types.hpp"

#include <array>
#include <utility>

namespace csm {

/// Site fields and exchange. site[0] and site[1] must share omega1.
struct TwoQubitFieldConfig {
  std::array<FieldConfig, 2> site{};
  double j = 0.0;

  static TwoQubitFieldConfig common(const FieldConfig& field, double j);
  static TwoQubitFieldConfig separate(const FieldConfig& site1, const FieldConfig& site2, double j);
  bool is_common() const noexcept { return site[0] == site[1]; }
};

void validate(const TwoQubitFieldConfig& cfg);

/// Columns are the coupled basis vectors expressed in the product basis.
const Mat4& coupled_basis();

/// Time-independent rotating-frame generator for a common bath sector with
/// shift b, in the coupled basis:
///   (omega0 + b - omega) S12^z + omega1 S12^x + J S1.S2.
/// The lab propagator is V12(t) exp(-i H t) with V12 = diag(e^{-i w t}, 1, e^{i w t}, 1).
Mat4 rotating_frame_hamiltonian(const TwoQubitFieldConfig& cfg, double shift);

/// Lab-frame propagator (product basis) for one common-bath sector.
Mat4 sector_unitary_2q(const TwoQubitFieldConfig& cfg, double shift, double t);

struct FreeTransitions {
  double down_down = 0.0;  // |<dd|U|uu>|^2
  double down_up = 0.0;    // |<du|U|ud>|^2
};

/// Zero-coupling transition probabilities, evaluated from the propagator.
/// At resonance they equal (1 - cos w1 t)^2 / 4 and |1 - e^{iJt} cos w1 t|^2 / 4.
FreeTransitions transition_probabilities_free(const TwoQubitFieldConfig& cfg, double t);

/// sum_i w_i U_i rho0 U_i^dagger over a common-bath spectrum.
TwoQubitState reduced_state_2q_common(const TwoQubitFieldConfig& cfg, const SectorSpectrum& spectrum,
                                      const TwoQubitState& rho0, double t);

/// Heisenberg-picture map of one qubit's Bloch vector in one bath sector:
/// P(t) = eta P(0), eta = R_z(omega t) M(t) with M the rotation by Omega t about
/// (omega1, 0, -Delta)/Omega.
struct EtaMatrix {
  Mat3 eta;
  double shift = 0.0;
  double rabi = 0.0;
};

EtaMatrix eta_matrix(const FieldConfig& local_field, double shift, double t);

/// sum_i w_i eta_i
Mat3 averaged_eta(const FieldConfig& local_field, const SectorSpectrum& spectrum, double t);

/// Separate baths, J = 0: P_a(t) = etabar_a P_a(0), Pi(t) = etabar_1 Pi(0) etabar_2^T,
/// reconstructed into a density matrix. Requests with J != 0 are forwarded to
/// evolve_separate_baths_general.
TwoQubitState evolve_separate_baths_bell(const TwoQubitFieldConfig& cfg,
                                         const std::pair<SectorSpectrum, SectorSpectrum>& spectra,
                                         const TwoQubitState& rho0, double t);

enum class SeparatePath {
  Factorized,     // J = 0: eta-matrix route
  RotatingFrame,  // shared drive frequency: exact 4x4 eigendecomposition per sector pair
  Stepped         // different drive frequencies and J != 0: RK4 per sector pair
};

const char* to_string(SeparatePath path) noexcept;

struct SeparateEvolution {
  TwoQubitState state;
  SeparatePath path;
};

/// sum_{ij} w_i w_j U_ij rho0 U_ij^dagger for separate baths and arbitrary J.
/// `steps_per_period` sets the RK4 resolution of the stepped fallback.
SeparateEvolution evolve_separate_baths_general(const TwoQubitFieldConfig& cfg,
                                                const std::pair<SectorSpectrum, SectorSpectrum>& spectra,
                                                const TwoQubitState& rho0, double t,
                                                int steps_per_period = 2000);

}  // namespace csm
