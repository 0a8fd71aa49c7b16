#include "csm/oracle.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace csm {

FullSystemSpec FullSystemSpec::single(const FieldConfig& field, const BathConfig& bath) {
  FullSystemSpec s;
  s.n_qubits = 1;
  s.baths = {bath};
  s.field = {field, field};
  validate(s);
  return s;
}

FullSystemSpec FullSystemSpec::common(const TwoQubitFieldConfig& cfg, const BathConfig& bath) {
  FullSystemSpec s;
  s.n_qubits = 2;
  s.baths = {bath};
  s.field = cfg.site;
  s.j = cfg.j;
  validate(s);
  return s;
}

FullSystemSpec FullSystemSpec::separate(const TwoQubitFieldConfig& cfg, const BathConfig& bath1,
                                        const BathConfig& bath2) {
  FullSystemSpec s;
  s.n_qubits = 2;
  s.baths = {bath1, bath2};
  s.field = cfg.site;
  s.j = cfg.j;
  validate(s);
  return s;
}

int FullSystemSpec::bath_spins() const {
  int n = 0;
  for (const auto& b : baths) n += b.n_spins();
  return n;
}

void validate(const FullSystemSpec& spec) {
  if (spec.n_qubits != 1 && spec.n_qubits != 2) throw ValidationError("n_qubits", "must be 1 or 2");
  const std::size_t max_baths = spec.n_qubits == 1 ? 1 : 2;
  if (spec.baths.empty() || spec.baths.size() > max_baths) {
    throw ValidationError("baths", "one bath, or one per qubit for two qubits");
  }
  validate(spec.field[0]);
  if (spec.n_qubits == 2) {
    validate(TwoQubitFieldConfig{spec.field, spec.j});
  } else if (spec.j != 0.0) {
    throw ValidationError("j", "exchange needs two qubits");
  }
  if (spec.total_spins() > kOracleMaxQubitsTotal) {
    throw CapacityError("oracle: 2^" + std::to_string(spec.total_spins()) + " exceeds the cap 2^" +
                        std::to_string(kOracleMaxQubitsTotal));
  }
}

namespace {

// Per-basis-state bookkeeping shared by the generators.
struct Layout {
  int nq = 0;
  int nb = 0;
  int nt = 0;
  std::array<std::vector<double>, 2> g;  // g[a][k]: coupling of qubit a to bath position k
  std::vector<double> up_prob;            // per bath position

  explicit Layout(const FullSystemSpec& spec) : nq(spec.n_qubits), nb(spec.bath_spins()), nt(nq + nb) {
    g[0].assign(nb, 0.0);
    g[1].assign(nb, 0.0);
    int offset = 0;
    for (std::size_t bi = 0; bi < spec.baths.size(); ++bi) {
      const auto& bath = spec.baths[bi];
      for (int k = 0; k < bath.n_spins(); ++k) {
        const double gk = bath.couplings()[k];
        if (spec.n_qubits == 1 || spec.shared_bath()) {
          for (int a = 0; a < nq; ++a) g[a][offset + k] = gk;
        } else {
          g[bi][offset + k] = gk;
        }
        up_prob.push_back(0.5 * (1.0 + bath.polarization()));
      }
      offset += bath.n_spins();
    }
  }

  long qubit_mask(int a) const { return 1L << (nt - 1 - a); }
  // m = +1/2 for bit 0 (up), -1/2 for bit 1.
  static double m_of(long idx, long mask) { return (idx & mask) ? -0.5 : 0.5; }
  double bath_m(long idx, int k) const { return m_of(idx, 1L << (nb - 1 - k)); }
};

// Diagonal of the Hamiltonian with qubit Zeeman frequencies zeeman[a].
Eigen::VectorXd diagonal(const Layout& l, const std::array<double, 2>& zeeman, double j) {
  const long dim = 1L << l.nt;
  Eigen::VectorXd d(dim);
  for (long idx = 0; idx < dim; ++idx) {
    double e = 0.0;
    double mq[2] = {0.0, 0.0};
    for (int a = 0; a < l.nq; ++a) {
      mq[a] = Layout::m_of(idx, l.qubit_mask(a));
      e += zeeman[a] * mq[a];
      for (int k = 0; k < l.nb; ++k) e += l.g[a][k] * mq[a] * l.bath_m(idx, k);
    }
    if (l.nq == 2) e += j * mq[0] * mq[1];
    d[idx] = e;
  }
  return d;
}

bool antiparallel(const Layout& l, long idx) {
  return l.nq == 2 && Layout::m_of(idx, l.qubit_mask(0)) != Layout::m_of(idx, l.qubit_mask(1));
}

}  // namespace

Eigen::MatrixXd build_rotating_hamiltonian(const FullSystemSpec& spec) {
  validate(spec);
  if (spec.n_qubits == 2 && spec.j != 0.0 && spec.field[0].omega != spec.field[1].omega) {
    throw ValidationError("omega", "one rotating frame needs equal drive frequencies when J != 0");
  }
  const Layout l(spec);
  const long dim = 1L << l.nt;
  const std::array<double, 2> zeeman{spec.field[0].omega0 - spec.field[0].omega,
                                     spec.field[1].omega0 - spec.field[1].omega};
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  h.diagonal() = diagonal(l, zeeman, spec.j);
  const double half_w1 = 0.5 * spec.field[0].omega1;
  const long pair = l.nq == 2 ? (l.qubit_mask(0) | l.qubit_mask(1)) : 0;
  for (long idx = 0; idx < dim; ++idx) {
    for (int a = 0; a < l.nq; ++a) h(idx ^ l.qubit_mask(a), idx) += half_w1;
    if (antiparallel(l, idx)) h(idx ^ pair, idx) += 0.5 * spec.j;
  }
  return h;
}

Eigen::VectorXcd evolve_exact(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi0, double t) {
  if (h.rows() != h.cols() || h.rows() != psi0.size()) throw ValidationError("h", "shape mismatch");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > kHermiticityTol * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw ValidationError("h", "not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi0;
  Eigen::VectorXcd phased(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) phased[k] = std::polar(1.0, -es.eigenvalues()[k] * t) * c[k];
  return es.eigenvectors() * phased;
}

namespace {

// c = a^T b (trans_a) or a b, all real column-major.
Eigen::MatrixXd gemm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, bool trans_a) {
  const int m = static_cast<int>(trans_a ? a.cols() : a.rows());
  const int k = static_cast<int>(trans_a ? a.rows() : a.cols());
  const int n = static_cast<int>(b.cols());
  Eigen::MatrixXd c(m, n);
  cblas_dgemm(CblasColMajor, trans_a ? CblasTrans : CblasNoTrans, CblasNoTrans, m, n, k, 1.0, a.data(),
              static_cast<int>(a.rows()), b.data(), static_cast<int>(b.rows()), 0.0, c.data(), m);
  return c;
}

Eigen::MatrixXcd real_times_complex(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& b, bool trans_a) {
  const Eigen::MatrixXd re = gemm(a, b.real(), trans_a);
  const Eigen::MatrixXd im = gemm(a, b.imag(), trans_a);
  Eigen::MatrixXcd out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

EigenPropagator::EigenPropagator(const Eigen::MatrixXd& h) : vecs_(h), evals_(h.rows()) {
  if (h.rows() != h.cols()) throw ValidationError("h", "must be square");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > kHermiticityTol * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw ValidationError("h", "not symmetric");
  }
  const auto n = static_cast<lapack_int>(h.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, vecs_.data(), n, evals_.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
}

Eigen::MatrixXcd EigenPropagator::project(const Eigen::MatrixXcd& psi0) const {
  return real_times_complex(vecs_, psi0, true);
}

Eigen::MatrixXcd EigenPropagator::reconstruct(const Eigen::MatrixXcd& coeffs, double t) const {
  Eigen::MatrixXcd phased = coeffs;
  for (Eigen::Index k = 0; k < phased.rows(); ++k) phased.row(k) *= std::polar(1.0, -evals_[k] * t);
  return real_times_complex(vecs_, phased, false);
}

Eigen::MatrixXcd EigenPropagator::apply(const Eigen::MatrixXcd& psi0, double t) const {
  if (psi0.rows() != vecs_.rows()) throw ValidationError("psi0", "dimension mismatch");
  return reconstruct(project(psi0), t);
}

namespace {

// y = -i H_lab(t) x, matrix-free.
class LabGenerator {
 public:
  explicit LabGenerator(const FullSystemSpec& spec) : l_(spec), spec_(spec) {
    diag_ = diagonal(l_, {spec.field[0].omega0, spec.field[1].omega0}, spec.j);
    pair_ = l_.nq == 2 ? (l_.qubit_mask(0) | l_.qubit_mask(1)) : 0;
  }

  void apply(double t, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) const {
    const long dim = 1L << l_.nt;
    const double half_w1 = 0.5 * spec_.field[0].omega1;
    // <up|H|down> = (w1/2) e^{-i w t}, <down|H|up> its conjugate.
    std::array<cplx, 2> raise{}, lower{};
    for (int a = 0; a < l_.nq; ++a) {
      raise[a] = half_w1 * std::polar(1.0, -spec_.field[a].omega * t);
      lower[a] = std::conj(raise[a]);
    }
    const cplx mi(0.0, -1.0);
    const double half_j = 0.5 * spec_.j;
    y.resize(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const cplx* xc = x.col(c).data();
      cplx* yc = y.col(c).data();
      for (long idx = 0; idx < dim; ++idx) {
        cplx acc = diag_[idx] * xc[idx];
        for (int a = 0; a < l_.nq; ++a) {
          const long mask = l_.qubit_mask(a);
          acc += ((idx & mask) ? lower[a] : raise[a]) * xc[idx ^ mask];
        }
        if (half_j != 0.0 && antiparallel(l_, idx)) acc += half_j * xc[idx ^ pair_];
        yc[idx] = mi * acc;
      }
    }
  }

 private:
  Layout l_;
  const FullSystemSpec& spec_;
  Eigen::VectorXd diag_;
  long pair_ = 0;
};

void rk4(const LabGenerator& gen, Eigen::MatrixXcd& psi, double t0, double t1, double dt) {
  if (t1 <= t0) return;
  const long steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / dt)));
  const double h = (t1 - t0) / double(steps);
  Eigen::MatrixXcd k1, k2, k3, k4, tmp;
  for (long n = 0; n < steps; ++n) {
    const double t = t0 + double(n) * h;
    gen.apply(t, psi, k1);
    tmp = psi + (0.5 * h) * k1;
    gen.apply(t + 0.5 * h, tmp, k2);
    tmp = psi + (0.5 * h) * k2;
    gen.apply(t + 0.5 * h, tmp, k3);
    tmp = psi + h * k3;
    gen.apply(t + h, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

}  // namespace

Eigen::MatrixXcd evolve_stepped_lab_frame(const FullSystemSpec& spec, const Eigen::MatrixXcd& psi0,
                                          double t, double dt) {
  validate(spec);
  if (psi0.rows() != spec.dimension()) throw ValidationError("psi0", "dimension mismatch");
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("t", "must be finite and >= 0");
  const LabGenerator gen(spec);
  Eigen::MatrixXcd psi = psi0;
  rk4(gen, psi, 0.0, t, dt);
  return psi;
}

double default_lab_step(const FullSystemSpec& spec) {
  const Layout l(spec);
  double fmax = std::abs(spec.j);
  for (int a = 0; a < l.nq; ++a) {
    double gsum = 0.0;
    for (double gk : l.g[a]) gsum += std::abs(gk);
    fmax = std::max(fmax, std::abs(spec.field[a].omega0) + 0.5 * gsum + spec.field[a].omega1 +
                              std::abs(spec.field[a].omega) + std::abs(spec.j));
  }
  if (fmax == 0.0) fmax = 1.0;
  return 1e-3 * 2.0 * std::numbers::pi / fmax;
}

Eigen::MatrixXcd partial_trace_system(const Eigen::MatrixXcd& psi, int n_system_bits) {
  if (n_system_bits < 0 || n_system_bits > 62) throw ValidationError("n_system_bits", "out of range");
  const long ds = 1L << n_system_bits;
  if (psi.rows() % ds != 0 || psi.rows() < ds) throw ValidationError("psi", "dimension mismatch");
  const long db = psi.rows() / ds;
  if ((db & (db - 1)) != 0) throw ValidationError("psi", "bath dimension is not a power of two");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ds, ds);
  for (Eigen::Index c = 0; c < psi.cols(); ++c) {
    const Eigen::Map<const Eigen::MatrixXcd> m(psi.col(c).data(), db, ds);  // m(b, s)
    rho.noalias() += m.transpose() * m.conjugate();
  }
  return rho;
}

Eigen::MatrixXcd partial_trace_system_density(const Eigen::MatrixXcd& rho, int n_system_bits) {
  if (rho.rows() != rho.cols()) throw ValidationError("rho", "must be square");
  if (n_system_bits < 0 || n_system_bits > 62) throw ValidationError("n_system_bits", "out of range");
  const long ds = 1L << n_system_bits;
  if (rho.rows() % ds != 0 || rho.rows() < ds) throw ValidationError("rho", "dimension mismatch");
  const long db = rho.rows() / ds;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(ds, ds);
  for (long s = 0; s < ds; ++s)
    for (long sp = 0; sp < ds; ++sp)
      for (long b = 0; b < db; ++b) out(s, sp) += rho(s * db + b, sp * db + b);
  return out;
}

namespace {

// Product-state weight of every bath basis state. `polarizations`, if given,
// replaces the per-bath polarizations stored in spec.
std::vector<double> bath_weights(const FullSystemSpec& spec, std::span<const double> polarizations) {
  Layout l(spec);
  if (!polarizations.empty()) {
    if (polarizations.size() != spec.baths.size()) throw ValidationError("polarizations", "one per bath");
    std::size_t pos = 0;
    for (std::size_t bi = 0; bi < spec.baths.size(); ++bi) {
      const double p = polarizations[bi];
      if (!(std::abs(p) <= 1.0)) throw ValidationError("polarizations", "must lie in [-1, 1]");
      for (int k = 0; k < spec.baths[bi].n_spins(); ++k) l.up_prob[pos++] = 0.5 * (1.0 + p);
    }
  }
  const long db = 1L << l.nb;
  std::vector<double> wb(static_cast<std::size_t>(db));
  for (long b = 0; b < db; ++b) {
    double w = 1.0;
    for (int k = 0; k < l.nb; ++k) {
      const bool down = (b >> (l.nb - 1 - k)) & 1L;
      w *= down ? 1.0 - l.up_prob[k] : l.up_prob[k];
    }
    wb[b] = w;
  }
  return wb;
}

// Columns sqrt(lambda_j) |phi_j> (x) |b> for every bath state b with
// include[b]; the bath weights are applied later. bath_of[c] is b for column c.
struct InitialColumns {
  Eigen::MatrixXcd cols;
  std::vector<long> bath_of;
};

InitialColumns initial_columns(const FullSystemSpec& spec, const Eigen::MatrixXcd& rho_sys0,
                               const std::vector<bool>& include) {
  const long ds = 1L << spec.n_qubits;
  const long db = static_cast<long>(include.size());
  if (rho_sys0.rows() != ds || rho_sys0.cols() != ds) throw ValidationError("rho_sys0", "dimension mismatch");
  const Eigen::MatrixXcd herm = 0.5 * (rho_sys0 + rho_sys0.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  if (es.eigenvalues().minCoeff() < -kPsdTol) throw ValidationError("rho_sys0", "not positive semidefinite");

  std::vector<std::pair<long, long>> keep;  // (eigen index, bath state)
  for (long j = 0; j < ds; ++j) {
    if (es.eigenvalues()[j] <= 1e-15) continue;
    for (long b = 0; b < db; ++b)
      if (include[b]) keep.emplace_back(j, b);
  }
  InitialColumns out;
  out.cols = Eigen::MatrixXcd::Zero(ds * db, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const auto [j, b] = keep[c];
    const double amp = std::sqrt(es.eigenvalues()[j]);
    for (long s = 0; s < ds; ++s) out.cols(s * db + b, static_cast<Eigen::Index>(c)) = amp * es.eigenvectors()(s, j);
    out.bath_of.push_back(b);
  }
  return out;
}

Eigen::MatrixXcd weighted_columns(Eigen::MatrixXcd cols, const std::vector<long>& bath_of,
                                  const std::vector<double>& wb) {
  for (Eigen::Index c = 0; c < cols.cols(); ++c) cols.col(c) *= std::sqrt(wb[bath_of[c]]);
  return cols;
}

// R rho R^dag, R = exp(-i t sum_a omega_a S_a^z) on the system indices.
Eigen::MatrixXcd to_lab(const FullSystemSpec& spec, const Eigen::MatrixXcd& rho, double t) {
  const long ds = rho.rows();
  Eigen::VectorXcd r(ds);
  for (long s = 0; s < ds; ++s) {
    double phase = 0.0;
    for (int a = 0; a < spec.n_qubits; ++a) {
      const double m = ((s >> (spec.n_qubits - 1 - a)) & 1L) ? -0.5 : 0.5;
      phase += spec.field[a].omega * m;
    }
    r[s] = std::polar(1.0, -phase * t);
  }
  return r.asDiagonal() * rho * r.conjugate().asDiagonal();
}

}  // namespace

ExactOracle::ExactOracle(const FullSystemSpec& spec) : spec_(spec), prop_(build_rotating_hamiltonian(spec)) {}

std::vector<Eigen::MatrixXcd> ExactOracle::reduced_states(const Eigen::MatrixXcd& rho_sys0,
                                                          std::span<const double> times,
                                                          std::span<const double> polarizations) const {
  const std::vector<std::vector<double>> sets{std::vector<double>(polarizations.begin(), polarizations.end())};
  return std::move(reduced_states_multi(rho_sys0, times, sets).front());
}

std::vector<std::vector<Eigen::MatrixXcd>> ExactOracle::reduced_states_multi(
    const Eigen::MatrixXcd& rho_sys0, std::span<const double> times,
    std::span<const std::vector<double>> polarization_sets) const {
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("t", "must be finite and >= 0");
  }
  if (polarization_sets.empty()) throw ValidationError("polarizations", "need at least one set");
  std::vector<std::vector<double>> weights;
  for (const auto& set : polarization_sets) weights.push_back(bath_weights(spec_, set));
  std::vector<bool> include(weights.front().size(), false);
  for (const auto& wb : weights)
    for (std::size_t b = 0; b < wb.size(); ++b) include[b] = include[b] || wb[b] > 0.0;

  // The weights only scale columns, so one propagation serves every set.
  const InitialColumns ic = initial_columns(spec_, rho_sys0, include);
  const Eigen::MatrixXcd coeffs = prop_.project(ic.cols);
  std::vector<std::vector<Eigen::MatrixXcd>> out(weights.size(), std::vector<Eigen::MatrixXcd>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Eigen::MatrixXcd psi = prop_.reconstruct(coeffs, times[i]);
    for (std::size_t w = 0; w < weights.size(); ++w) {
      out[w][i] = to_lab(spec_, partial_trace_system(weighted_columns(psi, ic.bath_of, weights[w]), spec_.n_qubits),
                         times[i]);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXcd> oracle_reduced_states(const FullSystemSpec& spec, const Eigen::MatrixXcd& rho_sys0,
                                                    std::span<const double> times,
                                                    std::optional<OracleMethod> method_opt,
                                                    std::optional<double> dt) {
  validate(spec);
  const OracleMethod method = method_opt.value_or(
      spec.frame == Frame::Rotating ? OracleMethod::Eigendecomposition : OracleMethod::Stepped);
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("t", "must be finite and >= 0");
  }
  if (method == OracleMethod::Eigendecomposition) return ExactOracle(spec).reduced_states(rho_sys0, times);

  const std::vector<double> wb = bath_weights(spec, {});
  std::vector<bool> include(wb.size());
  for (std::size_t b = 0; b < wb.size(); ++b) include[b] = wb[b] > 0.0;
  InitialColumns ic = initial_columns(spec, rho_sys0, include);
  const Eigen::MatrixXcd cols = weighted_columns(std::move(ic.cols), ic.bath_of, wb);
  std::vector<Eigen::MatrixXcd> out(times.size());
  const double step = dt.value_or(default_lab_step(spec));
  if (!(step > 0.0)) throw ValidationError("dt", "must be > 0");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  const LabGenerator gen(spec);
  Eigen::MatrixXcd psi = cols;
  double now = 0.0;
  for (std::size_t i : order) {
    rk4(gen, psi, now, times[i], step);
    now = std::max(now, times[i]);
    out[i] = partial_trace_system(psi, spec.n_qubits);
  }
  return out;
}

}  // namespace csm
