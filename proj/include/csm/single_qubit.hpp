// single_qubit.hpp - closed-form dynamics of one driven qubit on a spin bath.
//
// Lab-frame Hamiltonian for bath sector i (shift b_i):
//   H_i(t) = (omega0 + b_i) S^z + omega1 (cos(omega t) S^x + sin(omega t) S^y).
// With R(t) = exp(-i omega t S^z) the rotating-frame generator is
//   h_i = -Delta_i S^z + omega1 S^x,   Delta_i = omega - (omega0 + b_i),
// and the lab propagator is U_i(t) = R(t) exp(-i h_i t).

#pragma once

#include "csm/sectors.hpp"
#include "csm/types.hpp"

namespace csm {

struct SectorUnitary {
  Mat2 u;
  double detuning = 0.0;  // Delta_i
  double rabi = 0.0;      // Omega_i = sqrt(omega1^2 + Delta_i^2)
  double f = 0.0;         // (omega1 / Omega_i) sin(Omega_i t / 2)
};

/// Propagator of the uncoupled qubit.
Mat2 free_unitary(const FieldConfig& field, double t);

/// (omega1^2 / Omega^2) sin^2(Omega t / 2) with Omega = sqrt(omega1^2 + Delta0^2).
double free_transition_probability(const FieldConfig& field, double t);

/// free_unitary with omega0 replaced by omega0 + shift.
SectorUnitary sector_unitary(const FieldConfig& field, double shift, double t);

/// sum_i w_i U_i rho0 U_i^dagger
QubitState reduced_state(const FieldConfig& field, const SectorSpectrum& spectrum,
                         const QubitState& rho0, double t);

/// <down| rho(t) |down> for rho0 = |up><up|, evaluated as
/// sum_i w_i (omega1^2 / Omega_i^2) sin^2(Omega_i t / 2).
double transition_probability(const FieldConfig& field, const SectorSpectrum& spectrum, double t);

/// Lab-frame Bloch vector (P^x, P^y, P^z) for rho0 = |up><up|:
///   P^z = sum_i w_i (1 - 2 f_i^2)
///   P^x = -2 sum_i w_i f_i [(Delta_i/Omega_i) sin(Omega_i t/2) cos(omega t) - cos(Omega_i t/2) sin(omega t)]
///   P^y = -2 sum_i w_i f_i [(Delta_i/Omega_i) sin(Omega_i t/2) sin(omega t) + cos(Omega_i t/2) cos(omega t)]
Vec3 polarizations(const FieldConfig& field, const SectorSpectrum& spectrum, double t);

/// Time-independent part of P^z(t): sum_i w_i Delta_i^2 / Omega_i^2. What is left,
/// sum_i w_i (omega1^2/Omega_i^2) cos(Omega_i t), is the oscillating part.
double pz_offset(const FieldConfig& field, const SectorSpectrum& spectrum);

/// Complex amplitude A(t) = sum_i w_i (omega1^2/Omega_i^2) exp(i Omega_i t) of the
/// oscillating part of P^z, so P^z = pz_offset + Re A. |A| is its envelope.
cplx pz_oscillation(const FieldConfig& field, const SectorSpectrum& spectrum, double t);

/// Rate of the phase/envelope argument in the large-N law, gamma' = gamma * omega1
/// with gamma = N g^2 / (4 omega1^2).
double asymptotic_rate(double omega1, int n, double g);

/// Large-N resonant P^z(t) for an unpolarized uniform bath (per-spin coupling g):
///   cos(omega1 t + atan(x)/2) / (1+x^2)^{1/4}
///   + gamma (1 - cos(omega1 t + 3 atan(x)/2) / (1+x^2)^{3/4}),   x = gamma' t.
double pz_asymptotic(double omega1, int n, double g, double t);

/// Envelope of the oscillating part of pz_asymptotic:
///   | e^{i atan(x)/2} (1+x^2)^{-1/4} - gamma e^{3i atan(x)/2} (1+x^2)^{-3/4} |.
double pz_asymptotic_envelope(double omega1, int n, double g, double t);

struct OneBathSpinAmplitudes {
  cplx a_plus, b_plus, a_minus, b_minus;  // |uu>, |du>, |ud>, |dd> (qubit first)
};

/// Qubit plus one bath spin, initial state |up> (|up> + |down>)/sqrt(2).
/// a_(+/-) = <up|U_(+/-)|up>/sqrt(2), b_(+/-) = <down|U_(+/-)|up>/sqrt(2) with
/// U_(+/-) the sector propagator for shift +/- g1/2.
OneBathSpinAmplitudes one_bath_spin_amplitudes(const FieldConfig& field, double g1, double t);

}  // namespace csm
