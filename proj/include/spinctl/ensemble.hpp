#pragma once

#include <cstddef>
#include <vector>

#include "spinctl/operator_kernel.hpp"
#include "spinctl/propagator.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl {

struct RfBin {
  double scale = 1.0;   // dimensionless RF amplitude factor
  double weight = 0.0;  // fraction of the sample
};

// Discrete histogram of RF amplitude factors. Weights sum to one within 1e-12,
// are non-negative, and scales are positive and strictly increasing.
class RfDistribution {
 public:
  explicit RfDistribution(std::vector<RfBin> bins);

  // Rescales weights to unit sum before validating.
  static RfDistribution normalized(std::vector<RfBin> bins);
  static RfDistribution delta(double scale = 1.0);

  const std::vector<RfBin>& bins() const { return bins_; }
  std::size_t size() const { return bins_.size(); }
  double mean_scale() const;
  double scale_variance() const;
  // Largest weight; ties go to the scale nearest 1.
  std::size_t peak_index() const;
  // Mirror-equal weights and scales about the mean, within `tol`.
  bool is_symmetric(double tol = 1e-12) const;

 private:
  std::vector<RfBin> bins_;
};

// Synthetic 9-bin profile with its peak at 1.0 and a longer tail toward low
// scales. Illustrative only; it is not a measured profile.
RfDistribution synthetic_profile();
// n equal-weight bins spanning 1 +/- half_width.
RfDistribution uniform_profile(std::size_t n, double half_width);
// n bins spanning 1 +/- half_width with triangular weights peaked at 1.
RfDistribution triangular_profile(std::size_t n, double half_width);

// Weighted unitaries {(p_k, U_k)} acting as rho -> sum_k p_k U_k rho U_k^dagger.
struct KrausSet {
  std::vector<double> weights;
  std::vector<Operator> unitaries;

  long dim() const { return unitaries.empty() ? 0 : unitaries.front().rows(); }
  std::size_t size() const { return unitaries.size(); }
  // Same-sized square elements, weights summing to one, sum p_k U_k^dag U_k = I.
  void validate(double tol = 1e-10) const;
};

KrausSet single_unitary(const Operator& u);

// Element k is the sequence propagator at RF scale f_k.
KrausSet kraus_set(const SpinSystem& sys, const PulseSequence& seq, const RfDistribution& dist);
KrausSet kraus_set(const Propagator& prop, const PulseSequence& seq, const RfDistribution& dist);

StateMatrix apply_kraus(const KrausSet& ks, const StateMatrix& rho);

// sum_k p_k conj(U_k) (x) U_k.
Superoperator superoperator(const KrausSet& ks);

// Ensemble-averaged transverse magnetization after on-resonance pulses of
// duration j * dwell starting from Iz: sum_k p_k sin(2 pi amplitude f_k j dwell).
std::vector<double> simulate_nutation(double amplitude_hz, const RfDistribution& dist,
                                      double dwell_s, std::size_t n_points);

struct ProfileExtractionOptions {
  // Spectral points below this fraction of the peak magnitude are ignored.
  double support_threshold = 1e-3;
  // Local maxima below this fraction of the peak are not treated as resolved lines.
  double peak_threshold = 1e-2;
};

// Recover an RF profile from a nutation signal.
//
// The signal is Blackman-Harris windowed and transformed; positive-frequency
// magnitudes above the support threshold are summed into `n_bins` equal-width
// intervals (area conserving). When several spectral lines are resolved the
// intervals are centred on an even grid running from the lowest to the highest
// line; otherwise they partition the support. Each bin's scale is the
// magnitude-weighted mean frequency of its interval divided by the nominal
// amplitude. Empty intervals are dropped, and a single isolated line yields a
// one-bin distribution.
RfDistribution extract_profile(const std::vector<double>& signal, double dwell_s,
                               std::size_t n_bins, double nominal_amplitude_hz,
                               const ProfileExtractionOptions& opts = {});

// Maps f_k -> mean + width_factor (f_k - mean) with weights unchanged. Bins
// that land on the same scale merge, so width 0 gives the coherent limit.
RfDistribution rescale_distribution(const RfDistribution& dist, double width_factor);

// 0.5 sum |p - q| after assigning each bin of `b` to the nearest scale in `a`.
double total_variation(const RfDistribution& a, const RfDistribution& b);

}  // namespace spinctl
