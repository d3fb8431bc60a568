#pragma once

#include <string>
#include <vector>

#include "spinctl/operator_kernel.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl {

// One square RF period: constant amplitude, phase and carrier.
struct PulseSegment {
  double duration_s = 0.0;
  double amplitude_hz = 0.0;
  double phase_rad = 0.0;
  double carrier_offset_hz = 0.0;
};

inline constexpr std::size_t kMaxSegments = 100;

struct PulseSequence {
  std::string name;
  std::vector<PulseSegment> segments;
  // Gate this sequence approximates, in gate-string form (see gates.hpp);
  // empty when unspecified.
  std::string target;

  double total_duration() const;
  double min_duration() const;
  // Non-empty, at most kMaxSegments, durations > 0, amplitudes >= 0, all finite.
  void validate() const;
};

// Exact propagators for piecewise-constant RF trains.
//
// Each segment is evaluated in the frame rotating at its carrier, where the
// Hamiltonian H_eff = H_int - 2 pi nu Fz + H_rf(phase) is time independent:
//
//   U_seg = exp(-i 2 pi nu tau Fz) exp(-i H_eff tau)
//
// The leading factor undoes the frame change at the end of the segment. Frames
// do not carry phase across segment boundaries. Later segments multiply on the
// left.
class Propagator {
 public:
  explicit Propagator(const SpinSystem& sys);

  const SpinSystem& system() const { return sys_; }
  const Operator& internal() const { return h_int_; }

  Operator effective_hamiltonian(const PulseSegment& seg, double scale) const;
  Operator segment(const PulseSegment& seg, double scale) const;
  Operator sequence(const PulseSequence& seq, double scale) const;

  // Lab-frame Hamiltonian at time `t` into the segment: H_int plus the RF term
  // with phase phi + 2 pi nu t.
  Operator lab_hamiltonian(const PulseSegment& seg, double scale, double t) const;

 private:
  SpinSystem sys_;
  Operator h_int_;
  Operator fx_, fy_;
  Eigen::VectorXd fz_diag_;
};

Operator segment_propagator(const SpinSystem& sys, const PulseSegment& seg, double scale);
Operator sequence_propagator(const SpinSystem& sys, const PulseSequence& seq, double scale);

// Where each time step samples the time-dependent RF phase.
enum class StepRule {
  midpoint,  // second-order accurate within a segment
  left,      // first-order accurate; used to measure convergence order
};

// Direct time-ordered product of exp(-i H_lab(t) dt) steps. The step is shrunk
// per segment so that it divides the segment duration. Requires
// dt <= min segment duration / 10.
Operator trotter_propagator(const SpinSystem& sys, const PulseSequence& seq, double scale,
                            double dt, StepRule rule = StepRule::midpoint);

}  // namespace spinctl
