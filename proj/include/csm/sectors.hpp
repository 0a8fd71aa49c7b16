// sectors.hpp - bath I^z sectors collapsed to a weighted list of frequency shifts.
//
// The Hamiltonian commutes with every bath I_k^z, so each bath basis state |i>
// only shifts the qubit's static field by b_i = <i| sum_k g_k I_k^z |i>. Every
// engine works from the distribution {(b_i, w_i)} instead of the 2^N basis.

#pragma once

#include "csm/types.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace csm {

/// Exhaustive enumeration visits 2^N sign patterns; above this it refuses.
inline constexpr int kMaxExhaustiveSpins = 24;

struct Sector {
  double shift = 0.0;   // b_i in rad/us
  double weight = 0.0;  // probability of b_i under the bath state
};

enum class SpectrumKind { Exhaustive, UniformCollapsed, Binned };

const char* to_string(SpectrumKind kind) noexcept;

/// Normalized, deduplicated, strictly increasing list of sectors.
class SectorSpectrum {
 public:
  /// Sorts by shift, merges shifts closer than merge_tol (summing weights),
  /// drops exactly-zero weights and renormalizes. Throws ValidationError for
  /// negative weights or a total that is off by more than 1e-9.
  SectorSpectrum(std::vector<Sector> sectors, SpectrumKind kind, double merge_tol = 0.0);

  /// A single sector with weight 1 (zero coupling or a pure bath).
  static SectorSpectrum single(double shift = 0.0);

  std::span<const Sector> sectors() const noexcept { return sectors_; }
  std::size_t size() const noexcept { return sectors_.size(); }
  SpectrumKind kind() const noexcept { return kind_; }
  double mean_shift() const noexcept;
  const Sector& operator[](std::size_t i) const { return sectors_[i]; }

 private:
  std::vector<Sector> sectors_;
  SpectrumKind kind_;
};

/// ((1+p)/2)^n_up ((1-p)/2)^n_down: probability of one bath basis state with
/// n_up spins up in the product state (1/2) I + p I^z.
double sector_weight(double p, int n_up, int n_down);

/// All 2^N sign patterns, merged by equal shift (tolerance 1e-12 max|g_k|).
/// Throws CapacityError when N > kMaxExhaustiveSpins.
SectorSpectrum enumerate_sectors(const BathConfig& bath);

/// Binomial collapse for uniform couplings: N+1 shifts m g,
/// m = -N/2 .. N/2, weights C(N, N/2-m) ((1+p)/2)^{N/2+m} ((1-p)/2)^{N/2-m}.
/// Sectors with zero weight (|p| = 1) are dropped.
SectorSpectrum collapse_uniform(int n, double g, double p);

/// Histogram of the exact shift distribution with n_bins equal-width bins.
/// For N <= kMaxExhaustiveSpins the exact sectors are binned (each bin is
/// represented by its weighted mean shift); beyond that the distribution is
/// built by iterated convolution of the two-point laws {-g_k/2, +g_k/2} on a
/// fixed grid with mass-preserving linear redistribution.
SectorSpectrum binned_spectrum(const BathConfig& bath, int n_bins);

/// Picks the exact collapsed path when couplings are uniform, exhaustive
/// enumeration when N is small enough, and binning (default_bins) otherwise.
SectorSpectrum spectrum_for(const BathConfig& bath, int default_bins = 2001);

/// Large-N Gaussian law of the bath I^z eigenvalue m for polarization p:
/// sqrt(2 / (pi N (1-p^2))) exp(-2 (m - N p/2)^2 / (N (1-p^2))).
double gaussian_m_distribution(int n, double p, double m);

struct HistogramBin {
  double center = 0.0;
  double probability = 0.0;
};

/// Probability histogram of the resonance offsets Delta_i = omega - (omega0 + b_i).
/// Without an explicit range the support is padded by half a bin on each side.
/// An explicit range must contain every Delta_i.
std::vector<HistogramBin> shift_histogram(const SectorSpectrum& spectrum, const FieldConfig& field,
                                          int bins,
                                          std::optional<std::pair<double, double>> range = {});

}  // namespace csm
