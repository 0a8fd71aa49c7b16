// types.hpp - domain types shared by the single- and two-qubit engines.
//
// Units: hbar = 1. Every frequency (omega0, omega1, omega, g, J) is an angular
// frequency in rad/us; times are in us. Spin operators are S = sigma / 2 and the
// single-qubit basis is ordered (|up>, |down>). Two-qubit matrices use the
// product basis (|uu>, |ud>, |du>, |dd>) with qubit 1 as the left factor.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace csm {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4cd;
using Vec3 = Eigen::Vector3d;
using Vec4c = Eigen::Vector4cd;

// Tolerances attached to the density-matrix invariants.
inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

// Largest bath accepted by make_bath. Exhaustive enumeration is limited
// separately (kMaxExhaustiveSpins in sectors.hpp).
inline constexpr int kMaxBathSpins = 100000;

/// Raised when an input violates a documented invariant. field() names the
/// offending parameter so front ends can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when a request exceeds a hard size limit of an exact code path.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Static longitudinal field omega0, rotating transverse amplitude omega1 and
/// drive frequency omega.
struct FieldConfig {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega = 0.0;

  /// omega - omega0
  double detuning() const noexcept { return omega - omega0; }
  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

/// Throws ValidationError unless omega1 >= 0 and all values are finite.
void validate(const FieldConfig& field);

namespace coupling {
/// g_k = g for every bath spin.
struct Uniform {
  double g = 0.0;
};
/// g_k proportional to exp(-alpha k^2), k = 1..N, normalized so sum_k g_k = g.
struct GaussianProfile {
  double g = 0.0;
  double alpha = 0.0;
};
/// One coupling per bath spin.
struct Explicit {
  std::vector<double> g_list;
};
}  // namespace coupling

using CouplingModel =
    std::variant<coupling::Uniform, coupling::GaussianProfile, coupling::Explicit>;

/// Validated bath description; construct with make_bath.
class BathConfig {
 public:
  int n_spins() const noexcept { return static_cast<int>(couplings_.size()); }
  double polarization() const noexcept { return polarization_; }
  const CouplingModel& model() const noexcept { return model_; }
  /// Materialized per-spin couplings g_k.
  const std::vector<double>& couplings() const noexcept { return couplings_; }
  /// True when every g_k is equal, i.e. the binomial collapse applies.
  bool is_uniform() const noexcept;
  double max_abs_coupling() const noexcept;
  double total_coupling() const noexcept;

 private:
  friend BathConfig make_bath(int n, double p, const CouplingModel& coupling);
  BathConfig(double p, CouplingModel model, std::vector<double> couplings)
      : polarization_(p), model_(std::move(model)), couplings_(std::move(couplings)) {}

  double polarization_;
  CouplingModel model_;
  std::vector<double> couplings_;
};

/// Builds a bath of n spin-1/2 particles, each in the product state
/// (1/2) I + p I^z. Requires 1 <= n <= kMaxBathSpins and |p| <= 1.
BathConfig make_bath(int n, double p, const CouplingModel& coupling);

/// Single-qubit density matrix (Hermitian, unit trace, PSD).
class QubitState {
 public:
  /// Validates the invariants and returns the Hermitian part of m.
  static QubitState from_matrix(const Mat2& m);
  static QubitState pure(cplx up, cplx down);
  static QubitState up() { return pure(1.0, 0.0); }
  static QubitState down() { return pure(0.0, 1.0); }
  /// rho = (I + p . sigma) / 2
  static QubitState from_bloch(const Vec3& p);

  const Mat2& matrix() const noexcept { return rho_; }
  /// P^i = 2 Tr(rho S^i)
  Vec3 bloch() const;

 private:
  explicit QubitState(const Mat2& m) : rho_(m) {}
  Mat2 rho_;
};

/// Two-qubit density matrix together with its polarization parametrization
///   rho = I/4 + P1.S1/2 + P2.S2/2 + sum_mn Pi^{mn} S1^m S2^n.
class TwoQubitState {
 public:
  static TwoQubitState from_matrix(const Mat4& m);
  static TwoQubitState pure(const Vec4c& psi);
  /// Reconstructs rho from (P1, P2, Pi). Eigenvalues in [-kPsdTol, 0) are
  /// accepted; anything more negative is rejected.
  static TwoQubitState from_polarizations(const Vec3& p1, const Vec3& p2, const Mat3& pi);
  static TwoQubitState product(const QubitState& a, const QubitState& b);

  const Mat4& matrix() const noexcept { return rho_; }
  Vec3 polarization1() const;
  Vec3 polarization2() const;
  /// Pi^{mn} = 4 Tr(rho S1^m S2^n)
  Mat3 tensor() const;

 private:
  explicit TwoQubitState(const Mat4& m) : rho_(m) {}
  Mat4 rho_;
};

enum class BellState { Singlet, TripletZero, PhiPlus, PhiMinus };

inline constexpr BellState kAllBellStates[] = {BellState::Singlet, BellState::TripletZero,
                                               BellState::PhiPlus, BellState::PhiMinus};

const char* to_string(BellState which) noexcept;
Vec4c bell_vector(BellState which);
TwoQubitState bell_state(BellState which);

namespace spin {
/// S^x, S^y, S^z for a spin-1/2 in the (|up>, |down>) basis.
const Mat2& sx();
const Mat2& sy();
const Mat2& sz();
/// S^m for m = 0, 1, 2 (x, y, z).
const Mat2& component(int m);
Mat4 kron(const Mat2& a, const Mat2& b);
/// Operators S1^m and S2^m on the two-qubit product space.
Mat4 s1(int m);
Mat4 s2(int m);
}  // namespace spin

namespace detail {
// Shared density-matrix checks. Throws ValidationError naming `what`.
template <typename M>
M validated_density(const M& m, const char* what);
double min_eigenvalue(const Eigen::MatrixXcd& m);
}  // namespace detail

}  // namespace csm
