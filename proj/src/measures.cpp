#include "csm/measures.hpp"

#include <algorithm>
#include <cmath>

namespace csm {

namespace {

const Mat4& sigma_yy() {
  static const Mat4 m = [] {
    Mat2 sy;
    sy << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return spin::kron(sy, sy);
  }();
  return m;
}

}  // namespace

double concurrence(const TwoQubitState& rho) {
  // With rho = W W^dag the l_k are the singular values of W^T (sy x sy) W,
  // which avoids square roots of eigenvalue dust. Eigenvalues of rho below
  // 1e-13 are treated as zero.
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho.matrix());
  Eigen::Vector4d root;
  for (int k = 0; k < 4; ++k) {
    const double ev = es.eigenvalues()[k];
    root[k] = ev > 1e-13 ? std::sqrt(ev) : 0.0;
  }
  const Mat4 w = es.eigenvectors() * root.cast<cplx>().asDiagonal();
  const Mat4 tau = w.transpose() * sigma_yy() * w;
  const Eigen::Vector4d lam = Eigen::JacobiSVD<Mat4>(tau).singularValues();  // descending
  return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

double concurrence(const Mat4& m) { return concurrence(TwoQubitState::from_matrix(m)); }

double concurrence_free_formula(double j, double /*omega1*/, double t) {
  return 0.5 * std::abs(1.0 - std::polar(1.0, 2.0 * j * t));
}

double concurrence_free_formula_uncorrected(double j, double omega1, double t) {
  const double c = std::cos(omega1 * t);
  const double s = std::sin(omega1 * t);
  return 0.5 * std::abs(1.0 - std::polar(1.0, j * t) * c * c - s * s);
}

double pure_concurrence_amplitudes(cplx a_p, cplx b_p, cplx a_m, cplx b_m) {
  const double norm = std::norm(a_p) + std::norm(b_p) + std::norm(a_m) + std::norm(b_m);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-8) {
    throw ValidationError("amplitudes", "squared norm must be 1 within 1e-8");
  }
  return 2.0 * std::abs(a_p * b_m - a_m * b_p);
}

double purity(const QubitState& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

double purity(const TwoQubitState& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

double purity(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ValidationError("rho", "must be square");
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.cwiseAbs2().sum();
}

double decoherence_measure(const Vec3& p) {
  const double n2 = p.squaredNorm();
  if (!std::isfinite(n2) || std::sqrt(n2) > 1.0 + 1e-10) {
    throw ValidationError("p", "polarization longer than 1");
  }
  return std::clamp(1.0 - n2, 0.0, 1.0);
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw ValidationError("trace_distance", "shape mismatch");
  }
  Eigen::MatrixXcd d = a - b;
  d = 0.5 * (d + d.adjoint()).eval();
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(d, Eigen::EigenvaluesOnly).eigenvalues();
  return 0.5 * ev.cwiseAbs().sum();
}

MeasureReport measure(const QubitState& rho) {
  return {0.0, purity(rho), decoherence_measure(rho.bloch())};
}

MeasureReport measure(const TwoQubitState& rho) { return {concurrence(rho), purity(rho), 0.0}; }

}  // namespace csm
