#include "csm/two_qubit.hpp"

#include "csm/single_qubit.hpp"

#include <cmath>
#include <numbers>

namespace csm {

TwoQubitFieldConfig TwoQubitFieldConfig::common(const FieldConfig& field, double j) {
  TwoQubitFieldConfig cfg{{field, field}, j};
  validate(cfg);
  return cfg;
}

TwoQubitFieldConfig TwoQubitFieldConfig::separate(const FieldConfig& site1, const FieldConfig& site2,
                                                  double j) {
  TwoQubitFieldConfig cfg{{site1, site2}, j};
  validate(cfg);
  return cfg;
}

void validate(const TwoQubitFieldConfig& cfg) {
  validate(cfg.site[0]);
  validate(cfg.site[1]);
  if (cfg.site[0].omega1 != cfg.site[1].omega1) {
    throw ValidationError("omega1", "both sites share one transverse amplitude");
  }
  if (!std::isfinite(cfg.j)) throw ValidationError("j", "must be finite");
}

namespace {

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("t", "must be finite and >= 0");
}

void require_common(const TwoQubitFieldConfig& cfg) {
  validate(cfg);
  if (!cfg.is_common()) {
    throw ValidationError("site", "common-bath dynamics needs identical site fields");
  }
}

// exp(-i h t) for a real symmetric generator.
template <int N>
Eigen::Matrix<cplx, N, N> expm_real_symmetric(const Eigen::Matrix<double, N, N>& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(h);
  const auto& v = es.eigenvectors();
  Eigen::Matrix<cplx, N, 1> phases;
  for (int k = 0; k < N; ++k) phases[k] = std::polar(1.0, -es.eigenvalues()[k] * t);
  return v.template cast<cplx>() * phases.asDiagonal() * v.transpose().template cast<cplx>();
}

Eigen::Matrix4d real_s1(int m) { return spin::s1(m).real(); }
Eigen::Matrix4d real_s2(int m) { return spin::s2(m).real(); }

// S1.S2 in the product basis (real: S^y S^y is real).
const Eigen::Matrix4d& exchange_product() {
  static const Eigen::Matrix4d m = [] {
    Mat4 acc = Mat4::Zero();
    for (int a = 0; a < 3; ++a) acc += spin::s1(a) * spin::s2(a);
    return Eigen::Matrix4d(acc.real());
  }();
  return m;
}

// Rotating-frame generator in the product basis for independent shifts on
// each site, shared drive frequency.
Eigen::Matrix4d product_generator(const TwoQubitFieldConfig& cfg, double b1, double b2) {
  const auto& s = cfg.site;
  return (s[0].omega0 + b1 - s[0].omega) * real_s1(2) + (s[1].omega0 + b2 - s[1].omega) * real_s2(2) +
         s[0].omega1 * (real_s1(0) + real_s2(0)) + cfg.j * exchange_product();
}

// exp(-i t (omega_1 S1^z + omega_2 S2^z)) as the diagonal of the product basis.
Vec4c frame_phases(double w1, double w2, double t) {
  const double m1[4] = {0.5, 0.5, -0.5, -0.5};
  const double m2[4] = {0.5, -0.5, 0.5, -0.5};
  Vec4c d;
  for (int k = 0; k < 4; ++k) d[k] = std::polar(1.0, -t * (w1 * m1[k] + w2 * m2[k]));
  return d;
}

Mat4 conjugate(const Mat4& u, const Mat4& rho) { return u * rho * u.adjoint(); }

}  // namespace

const Mat4& coupled_basis() {
  static const Mat4 q = [] {
    const double r = 1.0 / std::numbers::sqrt2;
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1.0;                // |1>_T
    m(1, 1) = r; m(2, 1) = r;     // |0>_T
    m(3, 2) = 1.0;                // |-1>_T
    m(1, 3) = r; m(2, 3) = -r;    // |0>_S
    return m;
  }();
  return q;
}

Mat4 rotating_frame_hamiltonian(const TwoQubitFieldConfig& cfg, double shift) {
  require_common(cfg);
  const FieldConfig& f = cfg.site[0];
  const double r = 1.0 / std::numbers::sqrt2;
  const double dz = f.omega0 + shift - f.omega;
  Mat4 h = Mat4::Zero();
  h(0, 0) = dz + 0.25 * cfg.j;
  h(1, 1) = 0.25 * cfg.j;
  h(2, 2) = -dz + 0.25 * cfg.j;
  h(3, 3) = -0.75 * cfg.j;
  h(0, 1) = h(1, 0) = f.omega1 * r;
  h(1, 2) = h(2, 1) = f.omega1 * r;
  return h;
}

Mat4 sector_unitary_2q(const TwoQubitFieldConfig& cfg, double shift, double t) {
  check_time(t);
  const Mat4 h = rotating_frame_hamiltonian(cfg, shift);
  // The singlet decouples; the triplet block is a real symmetric 3x3.
  const Eigen::Matrix3d triplet = h.topLeftCorner<3, 3>().real();
  Mat4 rot = Mat4::Zero();
  rot.topLeftCorner<3, 3>() = expm_real_symmetric<3>(triplet, t);
  rot(3, 3) = std::polar(1.0, -h(3, 3).real() * t);

  const double w = cfg.site[0].omega;
  const Vec4c v12(std::polar(1.0, -w * t), 1.0, std::polar(1.0, w * t), 1.0);
  const Mat4& q = coupled_basis();
  return q * (v12.asDiagonal() * rot) * q.adjoint();
}

FreeTransitions transition_probabilities_free(const TwoQubitFieldConfig& cfg, double t) {
  const Mat4 u = sector_unitary_2q(cfg, 0.0, t);
  // product basis: 0 = uu, 1 = ud, 2 = du, 3 = dd
  return {std::norm(u(3, 0)), std::norm(u(2, 1))};
}

TwoQubitState reduced_state_2q_common(const TwoQubitFieldConfig& cfg, const SectorSpectrum& spectrum,
                                      const TwoQubitState& rho0, double t) {
  Mat4 acc = Mat4::Zero();
  for (const auto& sec : spectrum.sectors()) {
    acc.noalias() += sec.weight * conjugate(sector_unitary_2q(cfg, sec.shift, t), rho0.matrix());
  }
  return TwoQubitState::from_matrix(acc);
}

EtaMatrix eta_matrix(const FieldConfig& local_field, double shift, double t) {
  validate(local_field);
  check_time(t);
  const double w1 = local_field.omega1;
  const double delta = local_field.omega - (local_field.omega0 + shift);
  const double rabi = std::hypot(w1, delta);
  Mat3 m = Mat3::Identity();
  if (rabi > 0.0) {
    const double th = rabi * t;
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double s2 = 2.0 * std::pow(std::sin(0.5 * th), 2);  // 1 - cos
    const double r2 = rabi * rabi;
    m << (w1 * w1 + delta * delta * c) / r2, delta * s / rabi, -delta * w1 * s2 / r2,
        -delta * s / rabi, c, -w1 * s / rabi,
        -delta * w1 * s2 / r2, w1 * s / rabi, (delta * delta + w1 * w1 * c) / r2;
  }
  const double phi = local_field.omega * t;
  Mat3 rz;
  rz << std::cos(phi), -std::sin(phi), 0.0,
        std::sin(phi), std::cos(phi), 0.0,
        0.0, 0.0, 1.0;
  return {rz * m, shift, rabi};
}

Mat3 averaged_eta(const FieldConfig& local_field, const SectorSpectrum& spectrum, double t) {
  Mat3 acc = Mat3::Zero();
  for (const auto& sec : spectrum.sectors()) acc += sec.weight * eta_matrix(local_field, sec.shift, t).eta;
  return acc;
}

TwoQubitState evolve_separate_baths_bell(const TwoQubitFieldConfig& cfg,
                                         const std::pair<SectorSpectrum, SectorSpectrum>& spectra,
                                         const TwoQubitState& rho0, double t) {
  validate(cfg);
  if (cfg.j != 0.0) return evolve_separate_baths_general(cfg, spectra, rho0, t).state;
  const Mat3 e1 = averaged_eta(cfg.site[0], spectra.first, t);
  const Mat3 e2 = averaged_eta(cfg.site[1], spectra.second, t);
  return TwoQubitState::from_polarizations(e1 * rho0.polarization1(), e2 * rho0.polarization2(),
                                           e1 * rho0.tensor() * e2.transpose());
}

const char* to_string(SeparatePath path) noexcept {
  switch (path) {
    case SeparatePath::Factorized: return "factorized";
    case SeparatePath::RotatingFrame: return "rotating-frame";
    case SeparatePath::Stepped: return "stepped";
  }
  return "?";
}

namespace {

// RK4 for dU/dt = -i H(t) U in the per-site rotating frame, where only the
// exchange term stays time dependent.
Mat4 stepped_sector_unitary(const TwoQubitFieldConfig& cfg, double b1, double b2, double t,
                            int steps_per_period) {
  const auto& s = cfg.site;
  const Mat4 local = (s[0].omega0 + b1 - s[0].omega) * spin::s1(2) +
                     (s[1].omega0 + b2 - s[1].omega) * spin::s2(2) +
                     s[0].omega1 * (spin::s1(0) + spin::s2(0));
  const Mat4 exch = cfg.j * exchange_product().cast<cplx>();
  auto generator = [&](double tau) -> Mat4 {
    const Vec4c r = frame_phases(s[0].omega, s[1].omega, tau);
    Mat4 e = exch;
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) e(k, l) *= std::conj(r[k]) * r[l];
    return local + e;
  };
  const double fmax = s[0].omega1 + std::abs(s[0].omega0 + b1 - s[0].omega) +
                      std::abs(s[1].omega0 + b2 - s[1].omega) + std::abs(cfg.j) +
                      std::abs(s[0].omega - s[1].omega) + 1.0;
  const int steps = std::max(1, static_cast<int>(std::ceil(t * fmax / (2.0 * std::numbers::pi) *
                                                           steps_per_period)));
  const double dt = t / steps;
  const cplx mi(0.0, -1.0);
  Mat4 u = Mat4::Identity();
  for (int n = 0; n < steps; ++n) {
    const double tau = n * dt;
    const Mat4 h0 = generator(tau);
    const Mat4 hm = generator(tau + 0.5 * dt);
    const Mat4 h1 = generator(tau + dt);
    const Mat4 k1 = mi * h0 * u;
    const Mat4 k2 = mi * hm * (u + 0.5 * dt * k1);
    const Mat4 k3 = mi * hm * (u + 0.5 * dt * k2);
    const Mat4 k4 = mi * h1 * (u + dt * k3);
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return frame_phases(s[0].omega, s[1].omega, t).asDiagonal() * u;
}

}  // namespace

SeparateEvolution evolve_separate_baths_general(const TwoQubitFieldConfig& cfg,
                                                const std::pair<SectorSpectrum, SectorSpectrum>& spectra,
                                                const TwoQubitState& rho0, double t,
                                                int steps_per_period) {
  validate(cfg);
  check_time(t);
  SeparatePath path = SeparatePath::Factorized;
  if (cfg.j != 0.0) {
    path = cfg.site[0].omega == cfg.site[1].omega ? SeparatePath::RotatingFrame : SeparatePath::Stepped;
  }
  const auto s1 = spectra.first.sectors();
  const auto s2 = spectra.second.sectors();

  // Site-1 factors are reused across the inner loop on the factorized path.
  std::vector<Mat2> u2;
  if (path == SeparatePath::Factorized) {
    u2.reserve(s2.size());
    for (const auto& b : s2) u2.push_back(sector_unitary(cfg.site[1], b.shift, t).u);
  }
  const Vec4c frame = frame_phases(cfg.site[0].omega, cfg.site[1].omega, t);

  Mat4 acc = Mat4::Zero();
  for (const auto& a : s1) {
    const Mat2 u1 = path == SeparatePath::Factorized ? sector_unitary(cfg.site[0], a.shift, t).u : Mat2();
    for (std::size_t jb = 0; jb < s2.size(); ++jb) {
      const auto& b = s2[jb];
      Mat4 u;
      switch (path) {
        case SeparatePath::Factorized:
          u = spin::kron(u1, u2[jb]);
          break;
        case SeparatePath::RotatingFrame:
          u = frame.asDiagonal() * expm_real_symmetric<4>(product_generator(cfg, a.shift, b.shift), t);
          break;
        case SeparatePath::Stepped:
          u = stepped_sector_unitary(cfg, a.shift, b.shift, t, steps_per_period);
          break;
      }
      acc.noalias() += a.weight * b.weight * conjugate(u, rho0.matrix());
    }
  }
  return {TwoQubitState::from_matrix(acc), path};
}

}  // namespace csm
