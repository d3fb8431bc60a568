#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spinctl/ensemble.hpp"
#include "spinctl/nelder_mead.hpp"
#include "spinctl/propagator.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl {

struct SearchConfig {
  int n_segments = 4;
  double max_amplitude_hz = 10000.0;
  double max_duration_s = 1e-3;
  int n_restarts = 4;
  int max_iterations = 2000;       // per restart
  double convergence_tol = 1e-10;  // objective spread
  std::uint64_t rng_seed = 1;
  double duration_penalty_weight = 0.01;
  double fidelity_floor = 0.98;
  // Axis step (in encoded units) of the simplex rebuilt around the best point
  // when a run converges early.
  double restart_step = 0.5;
  // 0 picks the SPINCTL_THREADS environment variable, else hardware concurrency.
  int threads = 0;

  void validate() const;
};

// Maps pulse parameters to an unconstrained vector, four entries per segment:
//   amplitude = A_max sigmoid(x0)          in (0, A_max]
//   duration  = (T_max / M) sigmoid(x1)    in (0, T_max / M]
//   phase     = x2                         unconstrained
//   carrier   = 10 |offset|_max tanh(x3)   bounded by ten times the largest offset
class ParameterCodec {
 public:
  ParameterCodec(const SearchConfig& config, const SpinSystem& sys);

  std::size_t size() const { return 4 * static_cast<std::size_t>(n_segments_); }
  double carrier_bound_hz() const { return carrier_bound_; }

  Eigen::VectorXd encode(const PulseSequence& seq) const;
  PulseSequence decode(const Eigen::VectorXd& v) const;

 private:
  int n_segments_;
  double max_amplitude_;
  double max_segment_duration_;
  double carrier_bound_;
};

// 1 - F + penalty * T / T_max. F is the trace-form fidelity over the Kraus set
// for `dist`, or for the scale-1 unitary when there is no distribution.
class DesignObjective {
 public:
  DesignObjective(Operator target, const SpinSystem& sys, std::optional<RfDistribution> dist,
                  const SearchConfig& config);

  double operator()(const Eigen::VectorXd& v) const;
  double fidelity(const PulseSequence& seq) const;
  const ParameterCodec& codec() const { return codec_; }
  bool compensated() const { return dist_.has_value(); }

 private:
  Operator target_;
  Propagator prop_;
  std::optional<RfDistribution> dist_;
  SearchConfig config_;
  ParameterCodec codec_;
};

struct DesignResult {
  PulseSequence sequence;
  double fidelity = 0.0;   // no duration penalty
  double objective = 0.0;  // with penalty
  bool compensated = false;
  bool converged = false;  // fidelity >= fidelity floor
  std::vector<double> objective_history;  // of the winning restart
  int restarts_used = 0;
  int best_restart = 0;
  long evaluations = 0;
};

// Best of `n_restarts` independent Nelder-Mead runs from random starting
// simplices. Run r draws from its own generator seeded by (rng_seed, r), so
// the result does not depend on how runs are scheduled across threads.
DesignResult design_pulse(const Operator& target, const SpinSystem& sys,
                          const std::optional<RfDistribution>& dist, const SearchConfig& config);

using Curve = std::vector<std::pair<double, double>>;

// Single-unitary fidelity at each RF scale.
Curve sweep_rf_scale(const PulseSequence& seq, const Operator& target, const SpinSystem& sys,
                     const std::vector<double>& scales);

// Ensemble fidelity against rescale_distribution(dist, width) for each width.
Curve sweep_profile_width(const PulseSequence& seq, const Operator& target, const SpinSystem& sys,
                          const RfDistribution& dist, const std::vector<double>& widths);

struct PowerFieldPoint {
  double b0_factor = 1.0;
  double max_amplitude_hz = 0.0;
  double fidelity = 0.0;
};

struct PowerFieldGrid {
  std::vector<PowerFieldPoint> points;  // b0-major order
  // Observed trends; expected but not guaranteed for a finite search.
  bool nondecreasing_in_power = true;
  bool nondecreasing_in_b0 = true;
};

// Coherent design at every (B0 factor, RF cap) pair.
PowerFieldGrid sweep_power_field(const Operator& target, const SpinSystem& sys,
                                 const std::vector<double>& b0_factors,
                                 const std::vector<double>& power_caps_hz,
                                 const SearchConfig& config);

int resolve_thread_count(int requested);

}  // namespace spinctl
