#include "csm/single_qubit.hpp"

#include <cmath>
#include <numbers>

namespace csm {

namespace {

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("t", "must be finite and >= 0");
}

// sin(Omega t / 2) / Omega, continuous at Omega = 0.
double half_sinc(double rabi, double t) {
  if (rabi * t < 1e-8) return 0.5 * t;
  return std::sin(0.5 * rabi * t) / rabi;
}

}  // namespace

SectorUnitary sector_unitary(const FieldConfig& field, double shift, double t) {
  validate(field);
  check_time(t);
  SectorUnitary out;
  out.detuning = field.omega - (field.omega0 + shift);
  out.rabi = std::hypot(field.omega1, out.detuning);
  const double c = std::cos(0.5 * out.rabi * t);
  const double s = half_sinc(out.rabi, t);
  out.f = field.omega1 * s;

  // exp(-i h t) = cos(Omega t/2) I - i (sin(Omega t/2)/Omega) (-Delta sigma_z + omega1 sigma_x)
  Mat2 rot;
  rot << cplx(c, out.detuning * s), cplx(0.0, -out.f),
         cplx(0.0, -out.f), cplx(c, -out.detuning * s);
  const double phase = 0.5 * field.omega * t;
  const cplx e_minus = std::polar(1.0, -phase);
  out.u.row(0) = e_minus * rot.row(0);
  out.u.row(1) = std::conj(e_minus) * rot.row(1);
  return out;
}

Mat2 free_unitary(const FieldConfig& field, double t) { return sector_unitary(field, 0.0, t).u; }

double free_transition_probability(const FieldConfig& field, double t) {
  validate(field);
  check_time(t);
  const double rabi = std::hypot(field.omega1, field.detuning());
  const double f = field.omega1 * half_sinc(rabi, t);
  return f * f;
}

QubitState reduced_state(const FieldConfig& field, const SectorSpectrum& spectrum,
                         const QubitState& rho0, double t) {
  Mat2 acc = Mat2::Zero();
  for (const auto& sec : spectrum.sectors()) {
    const Mat2 u = sector_unitary(field, sec.shift, t).u;
    acc.noalias() += sec.weight * (u * rho0.matrix() * u.adjoint());
  }
  return QubitState::from_matrix(acc);
}

double transition_probability(const FieldConfig& field, const SectorSpectrum& spectrum, double t) {
  validate(field);
  check_time(t);
  double p = 0.0;
  for (const auto& sec : spectrum.sectors()) {
    const double delta = field.omega - (field.omega0 + sec.shift);
    const double f = field.omega1 * half_sinc(std::hypot(field.omega1, delta), t);
    p += sec.weight * f * f;
  }
  return p;
}

Vec3 polarizations(const FieldConfig& field, const SectorSpectrum& spectrum, double t) {
  validate(field);
  check_time(t);
  const double cw = std::cos(field.omega * t);
  const double sw = std::sin(field.omega * t);
  Vec3 p = Vec3::Zero();
  for (const auto& sec : spectrum.sectors()) {
    const double delta = field.omega - (field.omega0 + sec.shift);
    const double rabi = std::hypot(field.omega1, delta);
    const double hs = half_sinc(rabi, t);
    const double f = field.omega1 * hs;
    const double c = std::cos(0.5 * rabi * t);
    const double ds = delta * hs;  // (Delta/Omega) sin(Omega t/2)
    p[0] += -2.0 * sec.weight * f * (ds * cw - c * sw);
    p[1] += -2.0 * sec.weight * f * (ds * sw + c * cw);
    p[2] += sec.weight * (1.0 - 2.0 * f * f);
  }
  return p;
}

double pz_offset(const FieldConfig& field, const SectorSpectrum& spectrum) {
  validate(field);
  double a0 = 0.0;
  for (const auto& sec : spectrum.sectors()) {
    const double delta = field.omega - (field.omega0 + sec.shift);
    const double r2 = field.omega1 * field.omega1 + delta * delta;
    a0 += r2 > 0.0 ? sec.weight * delta * delta / r2 : 0.0;
  }
  return a0;
}

cplx pz_oscillation(const FieldConfig& field, const SectorSpectrum& spectrum, double t) {
  validate(field);
  cplx a = 0.0;
  for (const auto& sec : spectrum.sectors()) {
    const double delta = field.omega - (field.omega0 + sec.shift);
    const double r2 = field.omega1 * field.omega1 + delta * delta;
    if (r2 == 0.0) {
      a += sec.weight;  // undriven, on resonance: P^z stays 1
      continue;
    }
    a += sec.weight * (field.omega1 * field.omega1 / r2) * std::polar(1.0, std::sqrt(r2) * t);
  }
  return a;
}

double asymptotic_rate(double omega1, int n, double g) {
  if (!(omega1 > 0.0)) throw ValidationError("omega1", "must be > 0");
  const double gamma = double(n) * g * g / (4.0 * omega1 * omega1);
  return gamma * omega1;
}

double pz_asymptotic(double omega1, int n, double g, double t) {
  const double rate = asymptotic_rate(omega1, n, g);
  const double gamma = rate / omega1;
  const double x = rate * t;
  const double phi = std::atan(x);
  const double q = 1.0 + x * x;
  return std::cos(omega1 * t + 0.5 * phi) / std::pow(q, 0.25) +
         gamma * (1.0 - std::cos(omega1 * t + 1.5 * phi) / std::pow(q, 0.75));
}

double pz_asymptotic_envelope(double omega1, int n, double g, double t) {
  const double rate = asymptotic_rate(omega1, n, g);
  const double gamma = rate / omega1;
  const double x = rate * t;
  const double phi = std::atan(x);
  const double q = 1.0 + x * x;
  return std::abs(std::polar(std::pow(q, -0.25), 0.5 * phi) -
                  gamma * std::polar(std::pow(q, -0.75), 1.5 * phi));
}

OneBathSpinAmplitudes one_bath_spin_amplitudes(const FieldConfig& field, double g1, double t) {
  const double r = 1.0 / std::numbers::sqrt2;
  const Mat2 up = sector_unitary(field, 0.5 * g1, t).u;
  const Mat2 dn = sector_unitary(field, -0.5 * g1, t).u;
  return {r * up(0, 0), r * up(1, 0), r * dn(0, 0), r * dn(1, 0)};
}

}  // namespace csm
