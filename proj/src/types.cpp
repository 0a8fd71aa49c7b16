#include "csm/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace csm {

ValidationError::ValidationError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

void validate(const FieldConfig& field) {
  if (!std::isfinite(field.omega0)) throw ValidationError("omega0", "must be finite");
  if (!std::isfinite(field.omega)) throw ValidationError("omega", "must be finite");
  if (!std::isfinite(field.omega1) || field.omega1 < 0.0) {
    throw ValidationError("omega1", "must be finite and >= 0");
  }
}

namespace {

std::vector<double> materialize(int n, const CouplingModel& model) {
  return std::visit(
      [n](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, coupling::Uniform>) {
          if (!std::isfinite(m.g) || m.g < 0.0) throw ValidationError("g", "must be finite and >= 0");
          return std::vector<double>(static_cast<std::size_t>(n), m.g);
        } else if constexpr (std::is_same_v<T, coupling::GaussianProfile>) {
          if (!std::isfinite(m.g) || m.g < 0.0) throw ValidationError("g", "must be finite and >= 0");
          if (!std::isfinite(m.alpha) || m.alpha < 0.0) {
            throw ValidationError("alpha", "must be finite and >= 0");
          }
          std::vector<double> g(static_cast<std::size_t>(n));
          for (int k = 1; k <= n; ++k) g[k - 1] = std::exp(-m.alpha * double(k) * double(k));
          const double norm = std::accumulate(g.begin(), g.end(), 0.0);
          if (!(norm > 0.0)) throw ValidationError("alpha", "profile underflows to zero");
          for (auto& gk : g) gk *= m.g / norm;
          return g;
        } else {
          if (static_cast<int>(m.g_list.size()) != n) {
            std::ostringstream os;
            os << "expected " << n << " couplings, got " << m.g_list.size();
            throw ValidationError("g_list", os.str());
          }
          for (double gk : m.g_list) {
            if (!std::isfinite(gk)) throw ValidationError("g_list", "couplings must be finite");
          }
          return m.g_list;
        }
      },
      model);
}

}  // namespace

BathConfig make_bath(int n, double p, const CouplingModel& coupling) {
  if (n < 1 || n > kMaxBathSpins) {
    throw ValidationError("n", "must lie in [1, " + std::to_string(kMaxBathSpins) + "]");
  }
  if (!std::isfinite(p) || std::abs(p) > 1.0) throw ValidationError("p", "must lie in [-1, 1]");
  auto g = materialize(n, coupling);
  return BathConfig(p, coupling, std::move(g));
}

bool BathConfig::is_uniform() const noexcept {
  return std::all_of(couplings_.begin(), couplings_.end(),
                     [&](double g) { return g == couplings_.front(); });
}

double BathConfig::max_abs_coupling() const noexcept {
  double m = 0.0;
  for (double g : couplings_) m = std::max(m, std::abs(g));
  return m;
}

double BathConfig::total_coupling() const noexcept {
  return std::accumulate(couplings_.begin(), couplings_.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Spin operators

namespace spin {

const Mat2& sx() {
  static const Mat2 m = (Mat2() << 0.0, 0.5, 0.5, 0.0).finished();
  return m;
}
const Mat2& sy() {
  static const Mat2 m = (Mat2() << 0.0, cplx(0, -0.5), cplx(0, 0.5), 0.0).finished();
  return m;
}
const Mat2& sz() {
  static const Mat2 m = (Mat2() << 0.5, 0.0, 0.0, -0.5).finished();
  return m;
}
const Mat2& component(int m) {
  switch (m) {
    case 0: return sx();
    case 1: return sy();
    case 2: return sz();
  }
  throw std::out_of_range("spin component must be 0, 1 or 2");
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Mat4 s1(int m) { return kron(component(m), Mat2::Identity()); }
Mat4 s2(int m) { return kron(Mat2::Identity(), component(m)); }

}  // namespace spin

// ---------------------------------------------------------------------------
// Density matrices

namespace detail {

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <typename M>
M validated_density(const M& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(what, "non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermiticityTol) {
    std::ostringstream os;
    os << "not Hermitian (deviation " << herm << ")";
    throw ValidationError(what, os.str());
  }
  M h = 0.5 * (m + m.adjoint());
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "trace " << tr << " differs from 1";
    throw ValidationError(what, os.str());
  }
  const double lmin = min_eigenvalue(h);
  if (lmin < -kPsdTol) {
    std::ostringstream os;
    os << "negative eigenvalue " << lmin;
    throw ValidationError(what, os.str());
  }
  return h;
}

template Mat2 validated_density<Mat2>(const Mat2&, const char*);
template Mat4 validated_density<Mat4>(const Mat4&, const char*);

}  // namespace detail

QubitState QubitState::from_matrix(const Mat2& m) {
  return QubitState(detail::validated_density(m, "rho"));
}

QubitState QubitState::pure(cplx up, cplx down) {
  const double norm = std::sqrt(std::norm(up) + std::norm(down));
  if (!(norm > 0.0)) throw ValidationError("psi", "zero vector");
  Eigen::Vector2cd v(up / norm, down / norm);
  return QubitState(v * v.adjoint());
}

QubitState QubitState::from_bloch(const Vec3& p) {
  Mat2 m = 0.5 * Mat2::Identity();
  for (int i = 0; i < 3; ++i) m += p[i] * spin::component(i);
  return from_matrix(m);
}

Vec3 QubitState::bloch() const {
  Vec3 p;
  for (int i = 0; i < 3; ++i) p[i] = 2.0 * (rho_ * spin::component(i)).trace().real();
  return p;
}

TwoQubitState TwoQubitState::from_matrix(const Mat4& m) {
  return TwoQubitState(detail::validated_density(m, "rho"));
}

TwoQubitState TwoQubitState::pure(const Vec4c& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw ValidationError("psi", "zero vector");
  const Vec4c v = psi / norm;
  return TwoQubitState(v * v.adjoint());
}

TwoQubitState TwoQubitState::from_polarizations(const Vec3& p1, const Vec3& p2, const Mat3& pi) {
  Mat4 m = 0.25 * Mat4::Identity();
  for (int a = 0; a < 3; ++a) {
    m += 0.5 * p1[a] * spin::s1(a) + 0.5 * p2[a] * spin::s2(a);
    for (int b = 0; b < 3; ++b) m += pi(a, b) * spin::s1(a) * spin::s2(b);
  }
  return from_matrix(m);
}

TwoQubitState TwoQubitState::product(const QubitState& a, const QubitState& b) {
  return from_matrix(spin::kron(a.matrix(), b.matrix()));
}

Vec3 TwoQubitState::polarization1() const {
  Vec3 p;
  for (int i = 0; i < 3; ++i) p[i] = 2.0 * (rho_ * spin::s1(i)).trace().real();
  return p;
}

Vec3 TwoQubitState::polarization2() const {
  Vec3 p;
  for (int i = 0; i < 3; ++i) p[i] = 2.0 * (rho_ * spin::s2(i)).trace().real();
  return p;
}

Mat3 TwoQubitState::tensor() const {
  Mat3 t;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) t(a, b) = 4.0 * (rho_ * spin::s1(a) * spin::s2(b)).trace().real();
  return t;
}

const char* to_string(BellState which) noexcept {
  switch (which) {
    case BellState::Singlet: return "singlet";
    case BellState::TripletZero: return "triplet0";
    case BellState::PhiPlus: return "phi_plus";
    case BellState::PhiMinus: return "phi_minus";
  }
  return "?";
}

Vec4c bell_vector(BellState which) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (which) {
    case BellState::Singlet: return Vec4c(0.0, r, -r, 0.0);
    case BellState::TripletZero: return Vec4c(0.0, r, r, 0.0);
    case BellState::PhiPlus: return Vec4c(r, 0.0, 0.0, r);
    case BellState::PhiMinus: return Vec4c(r, 0.0, 0.0, -r);
  }
  throw std::invalid_argument("unknown Bell state");
}

TwoQubitState bell_state(BellState which) { return TwoQubitState::pure(bell_vector(which)); }

}  // namespace csm
