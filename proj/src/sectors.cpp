#include "csm/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace csm {

const char* to_string(SpectrumKind kind) noexcept {
  switch (kind) {
    case SpectrumKind::Exhaustive: return "exhaustive";
    case SpectrumKind::UniformCollapsed: return "uniform-collapsed";
    case SpectrumKind::Binned: return "binned";
  }
  return "?";
}

namespace {

// Merge runs of sorted sectors whose shifts lie within tol of the run's first
// element. The merged shift is the first one of the run.
std::vector<Sector> merge_sorted(std::vector<Sector> in, double tol) {
  std::vector<Sector> out;
  out.reserve(in.size());
  for (const auto& s : in) {
    if (!out.empty() && s.shift - out.back().shift <= tol) {
      out.back().weight += s.weight;
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

SectorSpectrum::SectorSpectrum(std::vector<Sector> sectors, SpectrumKind kind, double merge_tol)
    : kind_(kind) {
  if (sectors.empty()) throw ValidationError("spectrum", "no sectors");
  for (const auto& s : sectors) {
    if (!std::isfinite(s.shift) || !std::isfinite(s.weight)) {
      throw ValidationError("spectrum", "non-finite sector");
    }
    if (s.weight < 0.0) throw ValidationError("spectrum", "negative weight");
  }
  std::stable_sort(sectors.begin(), sectors.end(),
                   [](const Sector& a, const Sector& b) { return a.shift < b.shift; });
  sectors = merge_sorted(std::move(sectors), merge_tol);
  std::erase_if(sectors, [](const Sector& s) { return s.weight == 0.0; });

  double total = 0.0;
  for (const auto& s : sectors) total += s.weight;
  if (sectors.empty() || std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "weights sum to " << total;
    throw ValidationError("spectrum", os.str());
  }
  for (auto& s : sectors) s.weight /= total;
  sectors_ = std::move(sectors);
}

SectorSpectrum SectorSpectrum::single(double shift) {
  return SectorSpectrum({{shift, 1.0}}, SpectrumKind::Exhaustive);
}

double SectorSpectrum::mean_shift() const noexcept {
  double m = 0.0;
  for (const auto& s : sectors_) m += s.weight * s.shift;
  return m;
}

double sector_weight(double p, int n_up, int n_down) {
  if (n_up < 0) throw ValidationError("n_up", "must be >= 0");
  if (n_down < 0) throw ValidationError("n_down", "must be >= 0");
  if (!(std::abs(p) <= 1.0)) throw ValidationError("p", "must lie in [-1, 1]");
  return std::pow(0.5 * (1.0 + p), n_up) * std::pow(0.5 * (1.0 - p), n_down);
}

SectorSpectrum enumerate_sectors(const BathConfig& bath) {
  const int n = bath.n_spins();
  if (n > kMaxExhaustiveSpins) {
    throw CapacityError("enumerate_sectors: N = " + std::to_string(n) + " exceeds the exhaustive cap of " +
                        std::to_string(kMaxExhaustiveSpins) +
                        "; use collapse_uniform or binned_spectrum");
  }
  const double tol = 1e-12 * bath.max_abs_coupling();
  const double up = 0.5 * (1.0 + bath.polarization());
  const double down = 0.5 * (1.0 - bath.polarization());

  // Spins are added one at a time. Each step maps the sorted list L to the
  // merge of (L - g/2) and (L + g/2); both halves stay sorted, so a linear
  // merge keeps the whole list sorted and equal shifts are folded as they
  // appear. The result is the weighted list of all 2^N sign patterns.
  std::vector<Sector> list{{0.0, 1.0}};
  std::vector<Sector> lower, upper, next;
  for (double g : bath.couplings()) {
    lower.clear();
    upper.clear();
    for (const auto& s : list) {
      lower.push_back({s.shift - 0.5 * g, s.weight * down});
      upper.push_back({s.shift + 0.5 * g, s.weight * up});
    }
    next.clear();
    next.reserve(2 * list.size());
    auto push = [&](const Sector& s) {
      if (!next.empty() && s.shift - next.back().shift <= tol) {
        next.back().weight += s.weight;
      } else {
        next.push_back(s);
      }
    };
    std::size_t i = 0, j = 0;
    while (i < lower.size() || j < upper.size()) {
      if (j == upper.size() || (i < lower.size() && lower[i].shift <= upper[j].shift)) {
        push(lower[i++]);
      } else {
        push(upper[j++]);
      }
    }
    list.swap(next);
  }
  return SectorSpectrum(std::move(list), SpectrumKind::Exhaustive, tol);
}

namespace {

// log C(n, k) exactly for small n, via lgamma otherwise.
double log_binomial(int n, int k) {
  if (n <= 60) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * double(n - k + i) / double(i);
    return std::log(c);
  }
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

SectorSpectrum collapse_uniform(int n, double g, double p) {
  if (n < 0) throw ValidationError("n", "must be >= 0");
  if (!std::isfinite(g) || g < 0.0) throw ValidationError("g", "must be finite and >= 0");
  if (!(std::abs(p) <= 1.0)) throw ValidationError("p", "must lie in [-1, 1]");
  std::vector<Sector> sectors;
  sectors.reserve(static_cast<std::size_t>(n) + 1);
  const double up = 0.5 * (1.0 + p);
  const double down = 0.5 * (1.0 - p);
  for (int k = 0; k <= n; ++k) {  // k spins up, m = k - N/2
    const double shift = 0.5 * double(2 * k - n) * g;
    double w;
    if (up == 0.0 || down == 0.0) {
      w = (up == 0.0 ? k == 0 : k == n) ? 1.0 : 0.0;
    } else if (n <= 60) {
      w = std::exp(log_binomial(n, k)) * std::pow(up, k) * std::pow(down, n - k);
    } else {
      w = std::exp(log_binomial(n, k) + k * std::log(up) + (n - k) * std::log(down));
    }
    sectors.push_back({shift, w});
  }
  return SectorSpectrum(std::move(sectors), SpectrumKind::UniformCollapsed, 1e-12 * g);
}

namespace {

SectorSpectrum bin_exact(const SectorSpectrum& exact, int n_bins) {
  const auto s = exact.sectors();
  const double lo = s.front().shift;
  const double hi = s.back().shift;
  if (hi == lo) return SectorSpectrum({{lo, 1.0}}, SpectrumKind::Binned);
  const double width = (hi - lo) / n_bins;
  std::vector<double> mass(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> moment(static_cast<std::size_t>(n_bins), 0.0);
  for (const auto& sec : s) {
    auto b = static_cast<long>(std::floor((sec.shift - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(n_bins) - 1);
    mass[b] += sec.weight;
    moment[b] += sec.weight * sec.shift;
  }
  std::vector<Sector> out;
  for (int b = 0; b < n_bins; ++b) {
    if (mass[b] > 0.0) out.push_back({moment[b] / mass[b], mass[b]});
  }
  return SectorSpectrum(std::move(out), SpectrumKind::Binned);
}

SectorSpectrum bin_by_convolution(const BathConfig& bath, int n_bins) {
  double span = 0.0;
  for (double g : bath.couplings()) span += std::abs(g);
  if (span == 0.0) return SectorSpectrum({{0.0, 1.0}}, SpectrumKind::Binned);
  const double lo = -0.5 * span;
  const double pitch = span / (n_bins - 1);
  const double up = 0.5 * (1.0 + bath.polarization());
  const double down = 0.5 * (1.0 - bath.polarization());

  std::vector<double> mass(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> next(mass.size());
  auto deposit = [&](std::vector<double>& into, double x, double m) {
    const double pos = (x - lo) / pitch;
    long i = static_cast<long>(std::floor(pos));
    double frac = pos - double(i);
    if (i < 0) {
      i = 0;
      frac = 0.0;
    } else if (i >= n_bins - 1) {
      i = n_bins - 1;
      frac = 0.0;
    }
    into[i] += (1.0 - frac) * m;
    if (frac > 0.0) into[i + 1] += frac * m;
  };
  deposit(mass, 0.0, 1.0);
  for (double g : bath.couplings()) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int j = 0; j < n_bins; ++j) {
      if (mass[j] == 0.0) continue;
      const double x = lo + j * pitch;
      deposit(next, x - 0.5 * g, mass[j] * down);
      deposit(next, x + 0.5 * g, mass[j] * up);
    }
    mass.swap(next);
  }
  std::vector<Sector> out;
  for (int j = 0; j < n_bins; ++j) {
    if (mass[j] > 0.0) out.push_back({lo + j * pitch, mass[j]});
  }
  return SectorSpectrum(std::move(out), SpectrumKind::Binned);
}

}  // namespace

SectorSpectrum binned_spectrum(const BathConfig& bath, int n_bins) {
  if (n_bins < 2) throw ValidationError("n_bins", "must be >= 2");
  if (bath.n_spins() <= kMaxExhaustiveSpins) return bin_exact(enumerate_sectors(bath), n_bins);
  return bin_by_convolution(bath, n_bins);
}

SectorSpectrum spectrum_for(const BathConfig& bath, int default_bins) {
  if (bath.is_uniform()) {
    return collapse_uniform(bath.n_spins(), bath.couplings().front(), bath.polarization());
  }
  if (bath.n_spins() <= kMaxExhaustiveSpins) return enumerate_sectors(bath);
  return binned_spectrum(bath, default_bins);
}

double gaussian_m_distribution(int n, double p, double m) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (!(std::abs(p) < 1.0)) {
    throw ValidationError("p", "|p| = 1 gives a degenerate (delta) distribution");
  }
  const double var = double(n) * (1.0 - p * p);
  const double d = m - 0.5 * n * p;
  return std::sqrt(2.0 / (std::numbers::pi * var)) * std::exp(-2.0 * d * d / var);
}

std::vector<HistogramBin> shift_histogram(const SectorSpectrum& spectrum, const FieldConfig& field,
                                          int bins, std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw ValidationError("bins", "must be >= 1");
  const auto s = spectrum.sectors();
  auto delta = [&](const Sector& sec) { return field.omega - (field.omega0 + sec.shift); };
  // Delta decreases with the shift.
  const double dmin = delta(s.back());
  const double dmax = delta(s.front());
  double lo, hi;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(hi > lo)) throw ValidationError("range", "empty histogram range");
    if (dmin < lo || dmax > hi) throw ValidationError("range", "does not cover the spectrum support");
  } else if (dmax == dmin) {
    lo = dmin - 0.5;
    hi = dmax + 0.5;
  } else {
    const double pad = 0.5 * (dmax - dmin) / std::max(bins - 1, 1);
    lo = dmin - pad;
    hi = dmax + pad;
  }
  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) out[b].center = lo + (b + 0.5) * width;
  for (const auto& sec : s) {
    auto b = static_cast<long>(std::floor((delta(sec) - lo) / width));
    b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
    out[b].probability += sec.weight;
  }
  return out;
}

}  // namespace csm
