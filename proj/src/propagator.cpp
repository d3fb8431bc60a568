#include "spinctl/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinctl/errors.hpp"

namespace spinctl {

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration_s;
  return t;
}

double PulseSequence::min_duration() const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) t = std::min(t, s.duration_s);
  return t;
}

void PulseSequence::validate() const {
  if (segments.empty()) throw ValidationError("pulse sequence '" + name + "' has no segments");
  if (segments.size() > kMaxSegments) {
    throw ValidationError("pulse sequence '" + name + "' exceeds " +
                          std::to_string(kMaxSegments) + " segments");
  }
  for (std::size_t m = 0; m < segments.size(); ++m) {
    const auto& s = segments[m];
    const std::string where = "segment " + std::to_string(m) + " of '" + name + "'";
    if (!std::isfinite(s.duration_s) || !(s.duration_s > 0.0)) {
      throw ValidationError(where + ": duration must be positive");
    }
    if (!std::isfinite(s.amplitude_hz) || s.amplitude_hz < 0.0) {
      throw ValidationError(where + ": amplitude must be non-negative");
    }
    if (!std::isfinite(s.phase_rad) || !std::isfinite(s.carrier_offset_hz)) {
      throw ValidationError(where + ": phase and carrier must be finite");
    }
  }
}

Propagator::Propagator(const SpinSystem& sys)
    : sys_(sys),
      h_int_(internal_hamiltonian(sys)),
      fx_(total_spin(Axis::x, sys.n_spins())),
      fy_(total_spin(Axis::y, sys.n_spins())),
      fz_diag_(total_spin(Axis::z, sys.n_spins()).diagonal().real()) {}

Operator Propagator::effective_hamiltonian(const PulseSegment& seg, double scale) const {
  if (!(scale > 0.0)) throw ValidationError("RF scale must be positive");
  const double w_rf = kTwoPi * scale * seg.amplitude_hz;
  Operator h = h_int_;
  h += w_rf * (std::cos(seg.phase_rad) * fx_ + std::sin(seg.phase_rad) * fy_);
  h.diagonal() -= (kTwoPi * seg.carrier_offset_hz * fz_diag_).cast<cplx>();
  return h;
}

Operator Propagator::segment(const PulseSegment& seg, double scale) const {
  Operator u = exp_hermitian(effective_hamiltonian(seg, scale), seg.duration_s);
  // Fz is diagonal in the Zeeman basis, so the frame factor scales rows.
  const double angle = kTwoPi * seg.carrier_offset_hz * seg.duration_s;
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    u.row(r) *= std::exp(-kI * (angle * fz_diag_(r)));
  }
  return u;
}

Operator Propagator::sequence(const PulseSequence& seq, double scale) const {
  seq.validate();
  Operator u = identity(sys_.dim());
  for (const auto& seg : seq.segments) u = segment(seg, scale) * u;
  return u;
}

Operator Propagator::lab_hamiltonian(const PulseSegment& seg, double scale, double t) const {
  const double w_rf = kTwoPi * scale * seg.amplitude_hz;
  const double phase = seg.phase_rad + kTwoPi * seg.carrier_offset_hz * t;
  return h_int_ + w_rf * (std::cos(phase) * fx_ + std::sin(phase) * fy_);
}

Operator segment_propagator(const SpinSystem& sys, const PulseSegment& seg, double scale) {
  return Propagator(sys).segment(seg, scale);
}

Operator sequence_propagator(const SpinSystem& sys, const PulseSequence& seq, double scale) {
  return Propagator(sys).sequence(seq, scale);
}

Operator trotter_propagator(const SpinSystem& sys, const PulseSequence& seq, double scale,
                            double dt, StepRule rule) {
  seq.validate();
  if (!(scale > 0.0)) throw ValidationError("RF scale must be positive");
  if (!(dt > 0.0) || dt > seq.min_duration() / 10.0 * (1.0 + 1e-12)) {
    throw ValidationError("trotter_propagator: dt too coarse (must be <= min segment duration / 10)");
  }
  const Propagator prop(sys);
  const double offset = rule == StepRule::midpoint ? 0.5 : 0.0;
  Operator u = identity(sys.dim());
  for (const auto& seg : seq.segments) {
    const auto steps = static_cast<long>(std::ceil(seg.duration_s / dt - 1e-9));
    const double h = seg.duration_s / static_cast<double>(steps);
    for (long n = 0; n < steps; ++n) {
      const double t = (static_cast<double>(n) + offset) * h;
      u = exp_hermitian(prop.lab_hamiltonian(seg, scale, t), h) * u;
    }
  }
  return u;
}

}  // namespace spinctl
