#include "cli.hpp"

#include "csm/csv.hpp"
#include "csm/measures.hpp"
#include "csm/oracle.hpp"
#include "csm/parallel.hpp"
#include "csm/sectors.hpp"
#include "csm/single_qubit.hpp"
#include "csm/two_qubit.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace csm::cli {

namespace {

struct ToleranceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KeyDef {
  std::string name;
  std::optional<std::string> value;  // default; nullopt means "unset"
  std::string help;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ValidationError(key, "expected a finite number, got '" + text + "'");
  }
  return v;
}

class Params {
 public:
  explicit Params(std::map<std::string, std::optional<std::string>> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return raw(key).has_value(); }

  std::string str(const std::string& key) const {
    const auto& v = raw(key);
    if (!v) throw ValidationError(key, "required");
    return *v;
  }
  double num(const std::string& key) const { return parse_double(key, str(key)); }
  std::optional<double> opt_num(const std::string& key) const {
    return has(key) ? std::optional<double>(num(key)) : std::nullopt;
  }
  int integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError(key, "expected an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(str(key), ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ValidationError(key, "empty list");
    return out;
  }

 private:
  const std::optional<std::string>& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::logic_error("undeclared key " + key);
    return it->second;
  }
  std::map<std::string, std::optional<std::string>> values_;
};

struct Context {
  const Params& params;
  std::ostream& out;
  int threads;
};

struct Command {
  std::string name;
  std::string description;
  std::vector<KeyDef> keys;
  std::function<void(const Context&)> run;
};

// ---- shared helpers -------------------------------------------------------

std::vector<double> grid(const Params& p, const std::string& prefix) {
  const double lo = p.num(prefix + "_start");
  const double hi = p.num(prefix + "_stop");
  const int steps = p.integer(prefix + "_steps");
  if (steps < 2) throw ValidationError(prefix + "_steps", "must be >= 2");
  if (!(hi > lo)) throw ValidationError(prefix + "_stop", "grid must be strictly increasing");
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) g[i] = lo + (hi - lo) * double(i) / double(steps - 1);
  return g;
}

std::vector<KeyDef> time_keys(const std::string& stop, const std::string& steps) {
  return {{"t_start", "0", "first time (us)"},
          {"t_stop", stop, "last time (us)"},
          {"t_steps", steps, "number of time samples (>= 2)"}};
}

std::vector<KeyDef> bath_keys(bool with_p) {
  std::vector<KeyDef> k = {
      {"n", std::nullopt, "bath spins (required unless coupling=explicit)"},
      {"coupling", "uniform", "uniform | gaussian | explicit"},
      {"g", std::nullopt, "per-spin coupling (uniform only; rad/us)"},
      {"g_total", std::nullopt, "sum of couplings (uniform or gaussian; rad/us)"},
      {"alpha", "0.01", "gaussian profile exponent, g_k ~ exp(-alpha k^2), k = 1..N"},
      {"g_list", std::nullopt, "comma-separated couplings (explicit)"},
      {"bins", "2001", "histogram bins for large non-uniform baths"},
  };
  if (with_p) k.push_back({"p", "0", "bath polarization in [-1, 1]"});
  return k;
}

std::vector<KeyDef> concat(std::vector<KeyDef> a, const std::vector<KeyDef>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

BathConfig bath_from(const Params& p, double polarization) {
  const std::string model = p.str("coupling");
  if (model == "explicit") {
    if (p.has("g") || p.has("g_total")) throw ValidationError("g_list", "explicit couplings take g_list only");
    const auto gs = p.list("g_list");
    if (p.has("n") && p.integer("n") != int(gs.size())) throw ValidationError("n", "does not match g_list");
    return make_bath(int(gs.size()), polarization, coupling::Explicit{gs});
  }
  if (p.has("g_list")) throw ValidationError("g_list", "only valid with coupling=explicit");
  const int n = p.integer("n");
  if (model == "uniform") {
    if (p.has("g") == p.has("g_total")) throw ValidationError("g", "set exactly one of g or g_total");
    const double g = p.has("g") ? p.num("g") : p.num("g_total") / std::max(n, 1);
    return make_bath(n, polarization, coupling::Uniform{g});
  }
  if (model == "gaussian") {
    if (p.has("g")) throw ValidationError("g", "gaussian couplings take g_total");
    return make_bath(n, polarization, coupling::GaussianProfile{p.num("g_total"), p.num("alpha")});
  }
  throw ValidationError("coupling", "expected uniform, gaussian or explicit, got '" + model + "'");
}

SectorSpectrum spectrum_from(const Params& p, double polarization) {
  const int bins = p.integer("bins");
  if (bins < 2) throw ValidationError("bins", "must be >= 2");
  return spectrum_for(bath_from(p, polarization), bins);
}

std::string label(double v) { return format_double(v); }

// Evaluates rows in parallel, writes them in order.
void emit(const Context& ctx, const std::vector<std::string>& header, std::size_t rows,
          const std::function<std::vector<double>(std::size_t)>& make_row) {
  std::vector<std::vector<double>> table(rows);
  parallel_for(rows, ctx.threads, [&](std::size_t i) { table[i] = make_row(i); });
  CsvWriter csv(ctx.out);
  csv.header(header);
  for (const auto& r : table) csv.row(r);
}

BellState parse_bell(const std::string& key, const std::string& name) {
  for (BellState b : kAllBellStates)
    if (name == to_string(b)) return b;
  throw ValidationError(key, "unknown Bell state '" + name + "' (singlet, triplet0, phi_plus, phi_minus)");
}

// ---- subcommands ----------------------------------------------------------

void run_shift_dist(const Context& ctx) {
  const Params& p = ctx.params;
  const int n = p.integer("n");
  const double pol = p.num("p");
  const double g_total = p.num("g_total");
  const double omega0 = p.num("omega0");
  const FieldConfig field{omega0, 0.0, p.opt_num("omega").value_or(omega0)};
  validate(field);
  const int bins = p.integer("hist_bins");
  const int spectrum_bins = p.integer("bins");
  const SectorSpectrum uni = spectrum_for(make_bath(n, pol, coupling::Uniform{g_total / n}), spectrum_bins);
  const SectorSpectrum gau =
      spectrum_for(make_bath(n, pol, coupling::GaussianProfile{g_total, p.num("alpha")}), spectrum_bins);

  std::pair<double, double> range;
  if (p.has("range_lo") || p.has("range_hi")) {
    range = {p.num("range_lo"), p.num("range_hi")};
  } else {
    auto delta = [&](double b) { return field.omega - (field.omega0 + b); };
    const double lo = std::min(delta(uni.sectors().back().shift), delta(gau.sectors().back().shift));
    const double hi = std::max(delta(uni.sectors().front().shift), delta(gau.sectors().front().shift));
    const double pad = hi > lo ? 0.5 * (hi - lo) / std::max(bins - 1, 1) : 0.5;
    range = {lo - pad, hi + pad};
  }
  const auto hu = shift_histogram(uni, field, bins, range);
  const auto hg = shift_histogram(gau, field, bins, range);
  emit(ctx, {"delta", "p_uniform", "p_gaussian"}, hu.size(),
       [&](std::size_t i) { return std::vector<double>{hu[i].center, hu[i].probability, hg[i].probability}; });
}

void run_rabi_sweep(const Context& ctx) {
  const Params& p = ctx.params;
  const double omega0 = p.num("omega0");
  const double omega1 = p.num("omega1");
  if (!(omega1 > 0.0)) throw ValidationError("omega1", "must be > 0");
  const double t = p.opt_num("t").value_or(std::numbers::pi / omega1);
  const auto omegas = grid(p, "omega");
  const auto pbs = p.list("p_list");
  std::vector<SectorSpectrum> spectra;
  std::vector<std::string> header{"omega"};
  for (double pb : pbs) {
    spectra.push_back(spectrum_from(p, pb));
    header.push_back("p_down_pb" + label(pb));
  }
  emit(ctx, header, omegas.size(), [&](std::size_t i) {
    std::vector<double> row{omegas[i]};
    const FieldConfig field{omega0, omega1, omegas[i]};
    for (const auto& s : spectra) row.push_back(transition_probability(field, s, t));
    return row;
  });
}

void run_polarization(const Context& ctx) {
  const Params& p = ctx.params;
  const double omega0 = p.num("omega0");
  const FieldConfig field{omega0, p.num("omega1"), p.opt_num("omega").value_or(omega0)};
  validate(field);
  const SectorSpectrum spectrum = spectrum_from(p, p.num("p"));
  const auto ts = grid(p, "t");
  emit(ctx, {"t", "px", "py", "pz", "p_norm", "decoherence"}, ts.size(), [&](std::size_t i) {
    const Vec3 v = polarizations(field, spectrum, ts[i]);
    return std::vector<double>{ts[i], v[0], v[1], v[2], v.norm(), decoherence_measure(v)};
  });
}

void run_asymptote(const Context& ctx) {
  const Params& p = ctx.params;
  const int n = p.integer("n");
  if (n < 1) throw ValidationError("n", "must be >= 1");
  const double omega1 = p.num("omega1");
  if (!(omega1 > 0.0)) throw ValidationError("omega1", "must be > 0");
  if (p.has("g") && p.has("gamma")) throw ValidationError("g", "set g or gamma, not both");
  double g;
  if (p.has("g")) {
    g = p.num("g");
  } else {
    const double gamma = p.has("gamma") ? p.num("gamma") : 0.25;
    if (gamma < 0.0) throw ValidationError("gamma", "must be >= 0");
    g = 2.0 * omega1 * std::sqrt(gamma / n);
  }
  const double omega0 = p.num("omega0");
  const FieldConfig field{omega0, omega1, omega0};
  const SectorSpectrum spectrum = collapse_uniform(n, g, 0.0);
  const auto ts = grid(p, "t");
  emit(ctx, {"t", "pz_exact", "pz_asymptotic", "envelope_exact", "envelope_asymptotic"}, ts.size(),
       [&](std::size_t i) {
         const double t = ts[i];
         return std::vector<double>{t, polarizations(field, spectrum, t)[2], pz_asymptotic(omega1, n, g, t),
                                    std::abs(pz_oscillation(field, spectrum, t)),
                                    pz_asymptotic_envelope(omega1, n, g, t)};
       });
}

void run_bell_common(const Context& ctx) {
  const Params& p = ctx.params;
  const double omega = p.num("omega");
  const double omega1 = p.num("omega1");
  const double j = p.num("j");
  const auto dws = p.list("dw_list");
  std::vector<BellState> states;
  for (const auto& s : split(p.str("states"), ',')) states.push_back(parse_bell("states", s));
  if (states.empty()) throw ValidationError("states", "empty list");
  const SectorSpectrum spectrum = spectrum_from(p, p.num("p"));

  std::vector<TwoQubitFieldConfig> cfgs;
  std::vector<std::string> header{"t"};
  for (double dw : dws) {
    cfgs.push_back(TwoQubitFieldConfig::common({omega - dw, omega1, omega}, j));
    for (BellState b : states) {
      header.push_back(std::string("c_") + to_string(b) + "_dw" + label(dw));
      header.push_back(std::string("purity_") + to_string(b) + "_dw" + label(dw));
    }
  }
  const auto ts = grid(p, "t");
  emit(ctx, header, ts.size(), [&](std::size_t i) {
    std::vector<double> row{ts[i]};
    for (const auto& cfg : cfgs) {
      for (BellState b : states) {
        const TwoQubitState rho = reduced_state_2q_common(cfg, spectrum, bell_state(b), ts[i]);
        row.push_back(concurrence(rho));
        row.push_back(purity(rho));
      }
    }
    return row;
  });
}

void run_bell_separate(const Context& ctx) {
  const Params& p = ctx.params;
  const auto bath = [&](const std::string& suffix) {
    return make_bath(p.integer("n" + suffix), p.num("p" + suffix), coupling::Uniform{p.num("g" + suffix)});
  };
  const std::pair<SectorSpectrum, SectorSpectrum> spectra{spectrum_for(bath("1")), spectrum_for(bath("2"))};
  const double w01 = p.num("omega0_1");
  const double w02 = p.num("omega0_2");
  const double omega1 = p.num("omega1");
  const double j = p.num("j");
  const TwoQubitState rho0 = bell_state(parse_bell("state", p.str("state")));

  std::vector<TwoQubitFieldConfig> cfgs;
  std::vector<std::string> header{"t"};
  for (const auto& item : split(p.str("detuning_pairs"), ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ValidationError("detuning_pairs", "expected d1:d2 items, got '" + item + "'");
    const double d1 = parse_double("detuning_pairs", parts[0]);
    const double d2 = parse_double("detuning_pairs", parts[1]);
    // detuning = omega0 - omega at each site
    cfgs.push_back(TwoQubitFieldConfig::separate({w01, omega1, w01 - d1}, {w02, omega1, w02 - d2}, j));
    header.push_back("c_d" + label(d1) + "_" + label(d2));
  }
  if (cfgs.empty()) throw ValidationError("detuning_pairs", "empty list");
  const auto ts = grid(p, "t");
  emit(ctx, header, ts.size(), [&](std::size_t i) {
    std::vector<double> row{ts[i]};
    for (const auto& cfg : cfgs) row.push_back(concurrence(evolve_separate_baths_bell(cfg, spectra, rho0, ts[i])));
    return row;
  });
}

// ---- oracle-check ---------------------------------------------------------

struct CheckResult {
  std::string name;
  double deviation;
  double tolerance;
};

Eigen::Matrix4cd random_pure_4(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec4c v;
  for (int k = 0; k < 4; ++k) v[k] = cplx(nd(rng), nd(rng));
  v.normalize();
  return v * v.adjoint();
}

std::vector<double> random_couplings(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> ud(0.5, 3.0);
  std::vector<double> g(static_cast<std::size_t>(n));
  for (auto& x : g) x = ud(rng);
  return g;
}

void run_oracle_check(const Context& ctx) {
  const Params& p = ctx.params;
  std::mt19937_64 rng(static_cast<std::uint64_t>(p.integer("seed")));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double tol = p.num("tolerance");
  const int n1 = p.integer("n_single");
  const int n2 = p.integer("n_pair");
  std::vector<CheckResult> results;

  {  // one qubit, explicit couplings, mixed bath
    const BathConfig bath = make_bath(n1, 0.5, coupling::Explicit{random_couplings(rng, n1)});
    const SectorSpectrum spectrum = enumerate_sectors(bath);
    const FieldConfig field{20.0, 4.0, 20.0 + 6.0 * (unit(rng) - 0.5)};
    const std::vector<double> ts{0.3, 1.1, 2.9};
    const QubitState rho0 = QubitState::from_bloch(Vec3(0.3, -0.4, 0.5));
    const auto ref = oracle_reduced_states(FullSystemSpec::single(field, bath), rho0.matrix(), ts);
    double dev = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      dev = std::max(dev, trace_distance(reduced_state(field, spectrum, rho0, ts[i]).matrix(), ref[i]));
    results.push_back({"single_qubit_vs_oracle", dev, tol});

    const auto stepped = oracle_reduced_states(FullSystemSpec::single(field, bath), rho0.matrix(), ts,
                                               OracleMethod::Stepped);
    double dev2 = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) dev2 = std::max(dev2, trace_distance(stepped[i], ref[i]));
    results.push_back({"stepped_vs_eigendecomposition", dev2, 1e-8});
  }
  {  // two qubits on one bath
    const BathConfig bath = make_bath(n2, 0.0, coupling::Explicit{random_couplings(rng, n2)});
    const auto cfg = TwoQubitFieldConfig::common({30.0, 5.0, 31.0}, 7.0);
    const Mat4 rho0 = random_pure_4(rng);
    const std::vector<double> ts{0.4, 1.7};
    const auto ref = oracle_reduced_states(FullSystemSpec::common(cfg, bath), rho0, ts);
    double dev = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto rho = reduced_state_2q_common(cfg, enumerate_sectors(bath), TwoQubitState::from_matrix(rho0), ts[i]);
      dev = std::max(dev, trace_distance(rho.matrix(), ref[i]));
    }
    results.push_back({"common_bath_vs_oracle", dev, tol});
  }
  for (double j : {0.0, 6.0}) {  // two qubits on separate baths
    const BathConfig b1 = make_bath(n2, 0.5, coupling::Explicit{random_couplings(rng, n2)});
    const BathConfig b2 = make_bath(n2, 0.0, coupling::Explicit{random_couplings(rng, n2)});
    const auto cfg = TwoQubitFieldConfig::separate({30.0, 5.0, 29.0}, {35.0, 5.0, 29.0}, j);
    const TwoQubitState rho0 = bell_state(BellState::Singlet);
    const std::vector<double> ts{0.5, 1.3};
    const auto ref = oracle_reduced_states(FullSystemSpec::separate(cfg, b1, b2), rho0.matrix(), ts);
    const std::pair<SectorSpectrum, SectorSpectrum> spectra{enumerate_sectors(b1), enumerate_sectors(b2)};
    double dev = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
      dev = std::max(dev, trace_distance(evolve_separate_baths_bell(cfg, spectra, rho0, ts[i]).matrix(), ref[i]));
    results.push_back({j == 0.0 ? "separate_baths_vs_oracle_j0" : "separate_baths_vs_oracle_j", dev, tol});
  }
  {  // collapsed vs exhaustive spectrum
    const int n = 12;
    const FieldConfig field{50.0, 8.0, 52.0};
    const SectorSpectrum a = collapse_uniform(n, 1.5, 0.3);
    const SectorSpectrum b = enumerate_sectors(make_bath(n, 0.3, coupling::Uniform{1.5}));
    double dev = 0.0;
    for (double t : {0.2, 0.9, 2.5})
      dev = std::max(dev, trace_distance(reduced_state(field, a, QubitState::up(), t).matrix(),
                                         reduced_state(field, b, QubitState::up(), t).matrix()));
    results.push_back({"collapsed_vs_enumerated", dev, 1e-12});
  }
  {  // free concurrence closed form vs propagator
    double dev = 0.0;
    for (double j : {1.0, 4.0, 10.0})
      for (double w1 : {2.0, 10.0})
        for (double t : {0.1, 0.37, 1.3}) {
          const auto cfg = TwoQubitFieldConfig::common({100.0, w1, 100.0}, j);
          const Mat4 u = sector_unitary_2q(cfg, 0.0, t);
          const Vec4c psi = u.col(1);  // from |ud>
          const double c = concurrence(TwoQubitState::pure(psi));
          dev = std::max(dev, std::abs(c - concurrence_free_formula(j, w1, t)));
        }
    results.push_back({"free_concurrence_formula", dev, 1e-8});
  }

  ctx.out << "check,max_deviation,tolerance,pass\n";
  bool ok = true;
  for (const auto& r : results) {
    const bool pass = r.deviation <= r.tolerance;
    ok = ok && pass;
    ctx.out << r.name << ',' << format_double(r.deviation) << ',' << format_double(r.tolerance) << ','
            << (pass ? 1 : 0) << '\n';
  }
  if (!ok) throw ToleranceFailure("oracle-check: deviation above tolerance");
}

std::vector<Command> commands() {
  std::vector<Command> cmds;
  cmds.push_back({"shift-dist",
                  "histogram of resonance offsets Delta_i for uniform vs gaussian couplings",
                  {{"n", "20", "bath spins"},
                   {"p", "0", "bath polarization"},
                   {"g_total", "20", "sum of couplings (rad/us)"},
                   {"alpha", "0.01", "gaussian profile exponent"},
                   {"omega0", "1000", "static field (rad/us)"},
                   {"omega", std::nullopt, "drive frequency (default omega0)"},
                   {"hist_bins", "41", "histogram bins"},
                   {"bins", "2001", "spectrum bins for large non-uniform baths"},
                   {"range_lo", std::nullopt, "histogram lower edge"},
                   {"range_hi", std::nullopt, "histogram upper edge"}},
                  run_shift_dist});
  cmds.push_back({"rabi-sweep", "P_down(t) versus drive frequency, one column per bath polarization",
                  concat(bath_keys(false),
                         {{"p_list", "0", "comma-separated bath polarizations"},
                          {"omega0", "100", "static field (rad/us)"},
                          {"omega1", "10", "drive amplitude (rad/us)"},
                          {"t", std::nullopt, "evaluation time (default pi/omega1)"},
                          {"omega_start", "80", "first drive frequency"},
                          {"omega_stop", "130", "last drive frequency"},
                          {"omega_steps", "201", "number of drive frequencies (>= 2)"}}),
                  run_rabi_sweep});
  cmds.push_back({"polarization", "qubit Bloch vector, its length and 1 - |P|^2 versus time",
                  concat(concat(bath_keys(true), {{"omega0", "1000", "static field (rad/us)"},
                                                  {"omega1", "10", "drive amplitude (rad/us)"},
                                                  {"omega", std::nullopt, "drive frequency (default omega0)"}}),
                         time_keys("2", "401")),
                  run_polarization});
  cmds.push_back({"asymptote", "exact resonant P^z for a large unpolarized uniform bath vs the power-law form",
                  concat({{"n", "2000", "bath spins"},
                          {"omega1", "10", "drive amplitude (rad/us)"},
                          {"omega0", "0", "static field (rad/us); the drive is resonant"},
                          {"gamma", std::nullopt, "N g^2 / (4 omega1^2) (default 0.25)"},
                          {"g", std::nullopt, "per-spin coupling instead of gamma"}},
                         time_keys("20", "2001")),
                  run_asymptote});
  cmds.push_back({"bell-common", "concurrence and purity of Bell states on a common bath",
                  concat(concat(bath_keys(true), {{"omega", "100", "drive frequency (rad/us)"},
                                                  {"omega1", "10", "drive amplitude (rad/us)"},
                                                  {"j", "0", "exchange coupling (rad/us)"},
                                                  {"dw_list", "0,5", "omega - omega0 values"},
                                                  {"states", "singlet,triplet0,phi_plus,phi_minus", "Bell states"}}),
                         time_keys("1", "201")),
                  run_bell_common});
  cmds.push_back({"bell-separate", "concurrence of a Bell state with each qubit on its own uniform bath",
                  concat({{"n1", "20", "spins in bath 1"},
                          {"n2", "20", "spins in bath 2"},
                          {"p1", "0", "polarization of bath 1"},
                          {"p2", "0", "polarization of bath 2"},
                          {"g1", "1", "per-spin coupling, bath 1"},
                          {"g2", "1", "per-spin coupling, bath 2"},
                          {"omega0_1", "100", "static field at qubit 1"},
                          {"omega0_2", "110", "static field at qubit 2"},
                          {"omega1", "10", "drive amplitude (rad/us)"},
                          {"j", "0", "exchange coupling (rad/us)"},
                          {"detuning_pairs", "0:0,5:5,20:20", "omega0 - omega per site, d1:d2 items"},
                          {"state", "singlet", "initial Bell state"}},
                         time_keys("1", "201")),
                  run_bell_separate});
  cmds.push_back({"oracle-check", "cross-checks the fast engines against the brute-force oracle",
                  {{"seed", "1", "random seed"},
                   {"tolerance", "1e-9", "trace-distance tolerance for engine vs oracle"},
                   {"n_single", "6", "bath spins for the one-qubit check"},
                   {"n_pair", "3", "bath spins per bath for the two-qubit checks"}},
                  run_oracle_check});
  return cmds;
}

std::string key_list(const Command& cmd) {
  std::string s;
  for (const auto& k : cmd.keys) s += (s.empty() ? "" : ", ") + k.name;
  return s;
}

const KeyDef* find_key(const Command& cmd, const std::string& name) {
  for (const auto& k : cmd.keys)
    if (k.name == name) return &k;
  return nullptr;
}

void load_config(const std::string& path, const Command& cmd,
                 std::map<std::string, std::optional<std::string>>& values) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config", path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!find_key(cmd, key)) {
      throw ValidationError(key, "unknown key in " + path + "; valid keys: " + key_list(cmd));
    }
    values[key] = value;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const std::vector<Command> cmds = commands();
  CLI::App app{"Driven central-spin decoherence experiments; CSV on stdout or --out"};
  app.require_subcommand(1, 1);

  struct Slot {
    std::string config, out_path;
    int threads = 0;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<Slot> slots(cmds.size());
  std::vector<CLI::App*> subs;
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    auto* sub = app.add_subcommand(cmds[c].name, cmds[c].description);
    Slot& slot = slots[c];
    sub->add_option("--config", slot.config, "flat key = value file; flags override it");
    sub->add_option("--out", slot.out_path, "write CSV here instead of stdout");
    sub->add_option("--threads", slot.threads, "worker threads (default: CSM_THREADS or all cores)");
    for (const auto& k : cmds[c].keys) {
      std::string help = k.help;
      if (k.value) help += " [" + *k.value + "]";
      slot.options[k.name] = sub->add_option("--" + k.name, slot.flags[k.name], help);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    for (std::size_t c = 0; c < cmds.size(); ++c) {
      if (subs[c]->parsed()) err << "valid keys for " << cmds[c].name << ": " << key_list(cmds[c]) << '\n';
    }
    return kExitValidation;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const Command& cmd = cmds[which];
  const Slot& slot = slots[which];

  try {
    std::map<std::string, std::optional<std::string>> values;
    for (const auto& k : cmd.keys) values[k.name] = k.value;
    if (!slot.config.empty()) load_config(slot.config, cmd, values);
    for (const auto& [name, opt] : slot.options)
      if (opt->count() > 0) values[name] = slot.flags.at(name);
    const Params params(std::move(values));

    if (slot.threads < 0) throw ValidationError("threads", "must be >= 0");
    const int threads = resolve_threads(slot.threads > 0 ? std::optional<int>(slot.threads) : std::nullopt);

    std::ostringstream buffer;
    int code = kExitOk;
    try {
      cmd.run({params, buffer, threads});
    } catch (const ToleranceFailure& e) {
      err << "error: " << e.what() << '\n';
      code = kExitTolerance;
    }
    if (slot.out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(slot.out_path, std::ios::binary);
      if (!file) throw ValidationError("out", "cannot write '" + slot.out_path + "'");
      file << buffer.str();
    }
    return code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace csm::cli
