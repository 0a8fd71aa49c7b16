// measures.hpp - concurrence, purity and decoherence of reduced states.

#pragma once

#include "csm/types.hpp"

namespace csm {

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), l_k the descending square
/// roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
double concurrence(const TwoQubitState& rho);
/// Validates m first (PSD dust down to -kPsdTol is accepted).
double concurrence(const Mat4& m);

/// Concurrence of the free pair started in |ud> at resonance, g = 0:
///   (1/2) |1 - e^{2iJt}| = |sin(J t)|.
/// The drive is a product of local unitaries that commutes with S1.S2, so
/// omega1 does not enter. Kept in the signature for symmetry with the
/// uncorrected variant below.
double concurrence_free_formula(double j, double omega1, double t);

/// (1/2) |1 - e^{iJt} cos^2(w1 t) - sin^2(w1 t)|, the uncorrected form. It
/// does not match the propagator (e.g. J = w1 = 10, t = pi/10 gives 1, the
/// true value is 0); kept only for the errata comparison.
double concurrence_free_formula_uncorrected(double j, double omega1, double t);

/// 2 |a_p b_m - a_m b_p| for the pure state
///   a_p |uu> + b_p |du> + a_m |ud> + b_m |dd>.
/// Throws ValidationError unless the squared norm is 1 within 1e-8.
double pure_concurrence_amplitudes(cplx a_p, cplx b_p, cplx a_m, cplx b_m);

/// Tr rho^2
double purity(const QubitState& rho);
double purity(const TwoQubitState& rho);
double purity(const Eigen::MatrixXcd& rho);

/// 1 - |p|^2, clamped to [0, 1]. Throws ValidationError when |p| > 1 + 1e-10.
double decoherence_measure(const Vec3& p);

/// (1/2) sum |eig(a - b)| for Hermitian a, b of equal size.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct MeasureReport {
  double concurrence = 0.0;  // two-qubit states only; 0 otherwise
  double purity = 1.0;
  double decoherence = 0.0;  // one-qubit states only; 0 otherwise
};

MeasureReport measure(const QubitState& rho);
MeasureReport measure(const TwoQubitState& rho);

}  // namespace csm
