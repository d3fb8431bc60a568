#include "spinctl/designer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <random>
#include <thread>

#include "spinctl/errors.hpp"
#include "spinctl/metrics.hpp"

namespace spinctl {

void SearchConfig::validate() const {
  if (n_segments < 1 || static_cast<std::size_t>(n_segments) > kMaxSegments) {
    throw ValidationError("search config: n_segments must be in [1, " + std::to_string(kMaxSegments) + "]");
  }
  if (!(max_amplitude_hz > 0.0)) throw ValidationError("search config: max_amplitude_hz must be positive");
  if (!(max_duration_s > 0.0)) throw ValidationError("search config: max_duration_s must be positive");
  if (n_restarts < 1) throw ValidationError("search config: n_restarts must be positive");
  if (max_iterations < 1) throw ValidationError("search config: max_iterations must be positive");
  if (!(convergence_tol > 0.0) || !(convergence_tol < 1e-3)) {
    throw ValidationError("search config: convergence_tol must be in (0, 1e-3)");
  }
  if (duration_penalty_weight < 0.0) {
    throw ValidationError("search config: duration_penalty_weight must be non-negative");
  }
  if (!(fidelity_floor >= 0.0 && fidelity_floor <= 1.0)) {
    throw ValidationError("search config: fidelity_floor must be in [0, 1]");
  }
  if (restart_step < 0.0) throw ValidationError("search config: restart_step must be non-negative");
  if (threads < 0) throw ValidationError("search config: threads must be non-negative");
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double y) {
  y = std::clamp(y, 1e-15, 1.0 - 1e-16);
  return std::log(y / (1.0 - y));
}

}  // namespace

ParameterCodec::ParameterCodec(const SearchConfig& config, const SpinSystem& sys)
    : n_segments_(config.n_segments),
      max_amplitude_(config.max_amplitude_hz),
      max_segment_duration_(config.max_duration_s / config.n_segments),
      carrier_bound_(10.0 * sys.max_abs_offset_hz()) {
  config.validate();
}

Eigen::VectorXd ParameterCodec::encode(const PulseSequence& seq) const {
  if (static_cast<int>(seq.segments.size()) != n_segments_) {
    throw ValidationError("encode: sequence has " + std::to_string(seq.segments.size()) +
                          " segments, codec expects " + std::to_string(n_segments_));
  }
  Eigen::VectorXd v(size());
  for (int m = 0; m < n_segments_; ++m) {
    const auto& s = seq.segments[m];
    v(4 * m + 0) = logit(s.amplitude_hz / max_amplitude_);
    v(4 * m + 1) = logit(s.duration_s / max_segment_duration_);
    v(4 * m + 2) = s.phase_rad;
    v(4 * m + 3) = carrier_bound_ > 0.0
                       ? std::atanh(std::clamp(s.carrier_offset_hz / carrier_bound_, -1.0 + 1e-16, 1.0 - 1e-16))
                       : 0.0;
  }
  return v;
}

PulseSequence ParameterCodec::decode(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != size()) {
    throw ValidationError("decode: vector has length " + std::to_string(v.size()) + ", expected " +
                          std::to_string(size()));
  }
  PulseSequence seq;
  seq.segments.resize(n_segments_);
  for (int m = 0; m < n_segments_; ++m) {
    auto& s = seq.segments[m];
    s.amplitude_hz = max_amplitude_ * sigmoid(v(4 * m + 0));
    s.duration_s = max_segment_duration_ * sigmoid(v(4 * m + 1));
    s.phase_rad = v(4 * m + 2);
    s.carrier_offset_hz = carrier_bound_ * std::tanh(v(4 * m + 3));
  }
  return seq;
}

DesignObjective::DesignObjective(Operator target, const SpinSystem& sys,
                                 std::optional<RfDistribution> dist, const SearchConfig& config)
    : target_(std::move(target)),
      prop_(sys),
      dist_(std::move(dist)),
      config_(config),
      codec_(config, sys) {
  if (target_.rows() != sys.dim() || target_.cols() != sys.dim()) {
    throw ValidationError("design target dimension does not match the spin system");
  }
  if (unitarity_error(target_) > 1e-10) throw ValidationError("design target is not unitary");
}

double DesignObjective::fidelity(const PulseSequence& seq) const {
  const KrausSet ks = dist_ ? kraus_set(prop_, seq, *dist_) : single_unitary(prop_.sequence(seq, 1.0));
  return gate_fidelity_trace(target_, ks);
}

double DesignObjective::operator()(const Eigen::VectorXd& v) const {
  const PulseSequence seq = codec_.decode(v);
  // Segments with vanishing duration would fail validation; treat as infeasible.
  for (const auto& s : seq.segments) {
    if (!(s.duration_s > 0.0)) return std::numeric_limits<double>::infinity();
  }
  return 1.0 - fidelity(seq) +
         config_.duration_penalty_weight * seq.total_duration() / config_.max_duration_s;
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPINCTL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<Eigen::VectorXd> random_simplex(const ParameterCodec& codec, const SearchConfig& cfg,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> signed_frac(-0.9, 0.9);
  std::vector<Eigen::VectorXd> simplex;
  for (std::size_t i = 0; i <= codec.size(); ++i) {
    PulseSequence seq;
    for (int m = 0; m < cfg.n_segments; ++m) {
      PulseSegment s;
      s.amplitude_hz = frac(rng) * cfg.max_amplitude_hz;
      s.duration_s = frac(rng) * cfg.max_duration_s / cfg.n_segments;
      s.phase_rad = phase(rng);
      s.carrier_offset_hz = signed_frac(rng) * codec.carrier_bound_hz();
      seq.segments.push_back(s);
    }
    simplex.push_back(codec.encode(seq));
  }
  return simplex;
}

NelderMeadResult run_restart(const DesignObjective& objective, const SearchConfig& cfg, int r) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.rng_seed >> 32), static_cast<std::uint32_t>(r)};
  std::mt19937_64 rng(seq);
  NelderMeadOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.tolerance = cfg.convergence_tol;
  opts.restart_step = cfg.restart_step;
  return nelder_mead(std::cref(objective), random_simplex(objective.codec(), cfg, rng), opts);
}

}  // namespace

DesignResult design_pulse(const Operator& target, const SpinSystem& sys,
                          const std::optional<RfDistribution>& dist, const SearchConfig& config) {
  config.validate();
  const DesignObjective objective(target, sys, dist, config);

  std::vector<NelderMeadResult> runs(config.n_restarts);
  const int threads = std::min(resolve_thread_count(config.threads), config.n_restarts);
  if (threads <= 1) {
    for (int r = 0; r < config.n_restarts; ++r) runs[r] = run_restart(objective, config, r);
  } else {
    for (int first = 0; first < config.n_restarts; first += threads) {
      std::vector<std::future<NelderMeadResult>> batch;
      const int last = std::min(config.n_restarts, first + threads);
      for (int r = first; r < last; ++r) {
        batch.push_back(std::async(std::launch::async, run_restart, std::cref(objective),
                                   std::cref(config), r));
      }
      for (int r = first; r < last; ++r) runs[r] = batch[r - first].get();
    }
  }

  int best = 0;
  for (int r = 1; r < config.n_restarts; ++r) {
    if (runs[r].value < runs[best].value) best = r;
  }
  DesignResult out;
  out.sequence = objective.codec().decode(runs[best].x);
  out.fidelity = objective.fidelity(out.sequence);
  out.objective = runs[best].value;
  out.compensated = dist.has_value();
  out.converged = out.fidelity >= config.fidelity_floor;
  out.objective_history = runs[best].history;
  out.restarts_used = config.n_restarts;
  out.best_restart = best;
  for (const auto& r : runs) out.evaluations += r.evaluations;
  return out;
}

Curve sweep_rf_scale(const PulseSequence& seq, const Operator& target, const SpinSystem& sys,
                     const std::vector<double>& scales) {
  const Propagator prop(sys);
  Curve out;
  for (double s : scales) {
    if (!(s > 0.0)) throw ValidationError("sweep_rf_scale: scales must be positive");
    out.emplace_back(s, gate_fidelity_trace(target, single_unitary(prop.sequence(seq, s))));
  }
  return out;
}

Curve sweep_profile_width(const PulseSequence& seq, const Operator& target, const SpinSystem& sys,
                          const RfDistribution& dist, const std::vector<double>& widths) {
  const Propagator prop(sys);
  Curve out;
  for (double w : widths) {
    const RfDistribution scaled = rescale_distribution(dist, w);
    out.emplace_back(w, gate_fidelity_trace(target, kraus_set(prop, seq, scaled)));
  }
  return out;
}

PowerFieldGrid sweep_power_field(const Operator& target, const SpinSystem& sys,
                                 const std::vector<double>& b0_factors,
                                 const std::vector<double>& power_caps_hz,
                                 const SearchConfig& config) {
  PowerFieldGrid grid;
  for (double b0 : b0_factors) {
    const SpinSystem scaled = sys.with_field_factor(b0);
    for (double cap : power_caps_hz) {
      SearchConfig c = config;
      c.max_amplitude_hz = cap;
      const DesignResult r = design_pulse(target, scaled, std::nullopt, c);
      grid.points.push_back({b0, cap, r.fidelity});
    }
  }
  const std::size_t np = power_caps_hz.size();
  for (std::size_t i = 0; i < b0_factors.size(); ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double f = grid.points[i * np + j].fidelity;
      if (j > 0 && f < grid.points[i * np + j - 1].fidelity) grid.nondecreasing_in_power = false;
      if (i > 0 && f < grid.points[(i - 1) * np + j].fidelity) grid.nondecreasing_in_b0 = false;
    }
  }
  return grid;
}

}  // namespace spinctl
