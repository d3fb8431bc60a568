#include "spinctl/ensemble.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "spinctl/errors.hpp"

namespace spinctl {

RfDistribution::RfDistribution(std::vector<RfBin> bins) : bins_(std::move(bins)) {
  if (bins_.empty()) throw ValidationError("RF distribution needs at least one bin");
  double total = 0.0;
  for (std::size_t k = 0; k < bins_.size(); ++k) {
    const auto& b = bins_[k];
    if (!std::isfinite(b.scale) || !(b.scale > 0.0)) {
      throw ValidationError("RF distribution bin " + std::to_string(k) + ": scale must be positive");
    }
    if (!std::isfinite(b.weight) || b.weight < 0.0) {
      throw ValidationError("RF distribution bin " + std::to_string(k) + ": weight must be non-negative");
    }
    if (k > 0 && !(b.scale > bins_[k - 1].scale)) {
      throw ValidationError("RF distribution scales must be strictly increasing");
    }
    total += b.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("RF distribution weights sum to " + std::to_string(total) + ", not 1");
  }
}

RfDistribution RfDistribution::normalized(std::vector<RfBin> bins) {
  double total = 0.0;
  for (const auto& b : bins) total += b.weight;
  if (!(total > 0.0)) throw ValidationError("RF distribution has no positive weight");
  for (auto& b : bins) b.weight /= total;
  return RfDistribution(std::move(bins));
}

RfDistribution RfDistribution::delta(double scale) { return RfDistribution({{scale, 1.0}}); }

double RfDistribution::mean_scale() const {
  double m = 0.0;
  for (const auto& b : bins_) m += b.weight * b.scale;
  return m;
}

double RfDistribution::scale_variance() const {
  const double m = mean_scale();
  double v = 0.0;
  for (const auto& b : bins_) v += b.weight * (b.scale - m) * (b.scale - m);
  return v;
}

std::size_t RfDistribution::peak_index() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < bins_.size(); ++k) {
    const auto& b = bins_[k];
    const auto& c = bins_[best];
    if (b.weight > c.weight ||
        (b.weight == c.weight && std::abs(b.scale - 1.0) < std::abs(c.scale - 1.0))) {
      best = k;
    }
  }
  return best;
}

bool RfDistribution::is_symmetric(double tol) const {
  const double m = mean_scale();
  const std::size_t n = bins_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& lo = bins_[k];
    const auto& hi = bins_[n - 1 - k];
    if (std::abs((lo.scale - m) + (hi.scale - m)) > tol) return false;
    if (std::abs(lo.weight - hi.weight) > tol) return false;
  }
  return true;
}

RfDistribution synthetic_profile() {
  return RfDistribution::normalized({{0.88, 0.03},
                                     {0.90, 0.04},
                                     {0.92, 0.06},
                                     {0.94, 0.08},
                                     {0.96, 0.11},
                                     {0.98, 0.16},
                                     {1.00, 0.24},
                                     {1.02, 0.17},
                                     {1.04, 0.11}});
}

RfDistribution uniform_profile(std::size_t n, double half_width) {
  if (n == 0 || (n > 1 && !(half_width > 0.0)) || half_width >= 1.0) {
    throw ValidationError("uniform_profile: need n >= 1 and 0 < half_width < 1");
  }
  if (n == 1) return RfDistribution::delta(1.0);
  std::vector<RfBin> bins;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
    bins.push_back({1.0 + half_width * x, 1.0});
  }
  return RfDistribution::normalized(std::move(bins));
}

RfDistribution triangular_profile(std::size_t n, double half_width) {
  if (n < 3 || !(half_width > 0.0) || half_width >= 1.0) {
    throw ValidationError("triangular_profile: need n >= 3 and 0 < half_width < 1");
  }
  std::vector<RfBin> bins;
  // Edge bins keep a small weight so the support is exactly +/- half_width.
  const double edge = 1.0 / static_cast<double>(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
    bins.push_back({1.0 + half_width * x, std::max(1.0 - std::abs(x), 0.0) + edge});
  }
  return RfDistribution::normalized(std::move(bins));
}

void KrausSet::validate(double tol) const {
  if (unitaries.empty()) throw ValidationError("Kraus set is empty");
  if (weights.size() != unitaries.size()) throw ValidationError("Kraus set: weight/unitary count mismatch");
  const long d = dim();
  double total = 0.0;
  Operator acc = Operator::Zero(d, d);
  for (std::size_t k = 0; k < unitaries.size(); ++k) {
    if (unitaries[k].rows() != d || unitaries[k].cols() != d) {
      throw ValidationError("Kraus set: element dimensions differ");
    }
    if (weights[k] < 0.0) throw ValidationError("Kraus set: negative weight");
    total += weights[k];
    acc += weights[k] * unitaries[k].adjoint() * unitaries[k];
  }
  if (std::abs(total - 1.0) > tol) throw ValidationError("Kraus set: weights do not sum to one");
  if (max_abs(acc - identity(d)) > tol) throw ValidationError("Kraus set is not trace preserving");
}

KrausSet single_unitary(const Operator& u) { return KrausSet{{1.0}, {u}}; }

KrausSet kraus_set(const Propagator& prop, const PulseSequence& seq, const RfDistribution& dist) {
  seq.validate();
  KrausSet ks;
  ks.weights.reserve(dist.size());
  ks.unitaries.reserve(dist.size());
  for (const auto& b : dist.bins()) {
    ks.weights.push_back(b.weight);
    ks.unitaries.push_back(prop.sequence(seq, b.scale));
  }
  return ks;
}

KrausSet kraus_set(const SpinSystem& sys, const PulseSequence& seq, const RfDistribution& dist) {
  return kraus_set(Propagator(sys), seq, dist);
}

StateMatrix apply_kraus(const KrausSet& ks, const StateMatrix& rho) {
  const long d = ks.dim();
  if (rho.rows() != d || rho.cols() != d) {
    throw ValidationError("apply_kraus: state is " + std::to_string(rho.rows()) + "x" +
                          std::to_string(rho.cols()) + ", channel acts on dimension " +
                          std::to_string(d));
  }
  StateMatrix out = StateMatrix::Zero(d, d);
  for (std::size_t k = 0; k < ks.size(); ++k) {
    out += ks.weights[k] * ks.unitaries[k] * rho * ks.unitaries[k].adjoint();
  }
  return out;
}

Superoperator superoperator(const KrausSet& ks) {
  const long d = ks.dim();
  Superoperator s = Superoperator::Zero(d * d, d * d);
  for (std::size_t k = 0; k < ks.size(); ++k) {
    s += ks.weights[k] * superop_of_unitary(ks.unitaries[k]);
  }
  return s;
}

std::vector<double> simulate_nutation(double amplitude_hz, const RfDistribution& dist,
                                      double dwell_s, std::size_t n_points) {
  if (!(amplitude_hz > 0.0) || !(dwell_s > 0.0)) {
    throw ValidationError("simulate_nutation: amplitude and dwell must be positive");
  }
  if (n_points < 2 || (n_points & (n_points - 1)) != 0) {
    throw ValidationError("simulate_nutation: point count must be a power of two");
  }
  std::vector<double> out(n_points, 0.0);
  for (std::size_t j = 0; j < n_points; ++j) {
    const double t = static_cast<double>(j) * dwell_s;
    double s = 0.0;
    for (const auto& b : dist.bins()) s += b.weight * std::sin(kTwoPi * amplitude_hz * b.scale * t);
    out[j] = s;
  }
  return out;
}

namespace {

// Windowed magnitude spectrum at k = 0 .. n/2.
std::vector<double> magnitude_spectrum(const std::vector<double>& signal) {
  const std::size_t n = signal.size();
  std::vector<double> in(n);
  for (std::size_t j = 0; j < n; ++j) {
    // 4-term Blackman-Harris; sidelobes near -92 dB.
    const double x = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    const double w = 0.35875 - 0.48829 * std::cos(x) + 0.14128 * std::cos(2 * x) -
                     0.01168 * std::cos(3 * x);
    in[j] = w * signal[j];
  }
  const std::size_t n_out = n / 2 + 1;
  // The FFTW planner is not thread safe.
  static std::mutex planner_mutex;
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_out));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::vector<double> mag(n_out);
  for (std::size_t k = 0; k < n_out; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
  {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  return mag;
}

// Vertex offset of a parabola through log magnitudes at k-1, k, k+1.
double refine_peak(const std::vector<double>& mag, std::size_t k) {
  if (k == 0 || k + 1 >= mag.size()) return static_cast<double>(k);
  const double a = std::log(mag[k - 1]);
  const double b = std::log(mag[k]);
  const double c = std::log(mag[k + 1]);
  const double denom = a - 2.0 * b + c;
  if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) return static_cast<double>(k);
  return static_cast<double>(k) + 0.5 * (a - c) / denom;
}

}  // namespace

RfDistribution extract_profile(const std::vector<double>& signal, double dwell_s,
                               std::size_t n_bins, double nominal_amplitude_hz,
                               const ProfileExtractionOptions& opts) {
  const std::size_t n = signal.size();
  if (n < 16) throw ValidationError("extract_profile: need at least 16 samples");
  if (!(dwell_s > 0.0) || !(nominal_amplitude_hz > 0.0) || n_bins == 0) {
    throw ValidationError("extract_profile: dwell, nominal amplitude and bin count must be positive");
  }
  const std::vector<double> mag = magnitude_spectrum(signal);
  const double df = 1.0 / (static_cast<double>(n) * dwell_s);

  // DC carries window leakage, not nutation.
  std::size_t k_peak = 1;
  for (std::size_t k = 1; k < mag.size(); ++k) {
    if (mag[k] > mag[k_peak]) k_peak = k;
  }
  const double peak = mag[k_peak];
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw ValidationError("extract_profile: no discernible spectral peak");
  }

  std::vector<std::size_t> support;
  for (std::size_t k = 1; k < mag.size(); ++k) {
    if (mag[k] >= opts.support_threshold * peak) support.push_back(k);
  }
  std::vector<double> lines;  // refined line positions, in spectral-index units
  for (std::size_t k = 2; k + 1 < mag.size(); ++k) {
    if (mag[k] >= opts.peak_threshold * peak && mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) {
      lines.push_back(refine_peak(mag, k));
    }
  }

  const double k_lo_support = static_cast<double>(support.front());
  const double k_hi_support = static_cast<double>(support.back());
  // An isolated line occupies only the window's main lobe (+/- 4 points).
  const bool single_line = lines.size() <= 1 && (k_hi_support - k_lo_support) <= 9.0;
  if (single_line || n_bins == 1) {
    double wsum = 0.0;
    double fsum = 0.0;
    for (std::size_t k : support) {
      wsum += mag[k];
      fsum += mag[k] * static_cast<double>(k);
    }
    const double k_center = single_line ? refine_peak(mag, k_peak) : fsum / wsum;
    return RfDistribution({{k_center * df / nominal_amplitude_hz, 1.0}});
  }

  double start;  // lower edge of the first interval, spectral-index units
  double width;
  if (lines.size() >= 2) {
    const double lo = lines.front();
    const double hi = lines.back();
    width = (hi - lo) / static_cast<double>(n_bins - 1);
    start = lo - 0.5 * width;
  } else {
    start = k_lo_support - 0.5;
    width = (k_hi_support - k_lo_support + 1.0) / static_cast<double>(n_bins);
  }

  std::vector<double> wsum(n_bins, 0.0);
  std::vector<double> fsum(n_bins, 0.0);
  for (std::size_t k : support) {
    const double pos = (static_cast<double>(k) - start) / width;
    const auto idx = static_cast<std::size_t>(
        std::clamp(std::floor(pos), 0.0, static_cast<double>(n_bins - 1)));
    wsum[idx] += mag[k];
    fsum[idx] += mag[k] * static_cast<double>(k);
  }
  std::vector<RfBin> bins;
  for (std::size_t i = 0; i < n_bins; ++i) {
    if (wsum[i] <= 0.0) continue;
    bins.push_back({fsum[i] / wsum[i] * df / nominal_amplitude_hz, wsum[i]});
  }
  return RfDistribution::normalized(std::move(bins));
}

RfDistribution rescale_distribution(const RfDistribution& dist, double width_factor) {
  if (!(width_factor >= 0.0) || !std::isfinite(width_factor)) {
    throw ValidationError("width factor must be non-negative");
  }
  const double mean = dist.mean_scale();
  std::vector<RfBin> bins;
  for (const auto& b : dist.bins()) {
    const double s = mean + width_factor * (b.scale - mean);
    if (!(s > 0.0)) {
      throw ValidationError("rescaled distribution has non-positive scale " + std::to_string(s));
    }
    if (!bins.empty() && s == bins.back().scale) {
      bins.back().weight += b.weight;
    } else {
      bins.push_back({s, b.weight});
    }
  }
  return RfDistribution::normalized(std::move(bins));
}

double total_variation(const RfDistribution& a, const RfDistribution& b) {
  std::vector<double> q(a.size(), 0.0);
  for (const auto& bb : b.bins()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (std::abs(a.bins()[i].scale - bb.scale) < std::abs(a.bins()[best].scale - bb.scale)) best = i;
    }
    q[best] += bb.weight;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a.bins()[i].weight - q[i]);
  return 0.5 * tv;
}

}  // namespace spinctl
