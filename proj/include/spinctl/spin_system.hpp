#pragma once

#include <string>
#include <vector>

#include "spinctl/operator_kernel.hpp"

namespace spinctl {

// Homonuclear spin-1/2 system in the base rotating frame. Frequencies are in
// Hz; the Hamiltonian builders convert to rad/s.
//
// Offsets are signed rotating-frame chemical-shift frequencies. Flipping the
// sign of every offset conjugates all propagators.
class SpinSystem {
 public:
  // Validates: at least one spin, finite offsets, symmetric couplings with zero
  // diagonal. An empty label list gets "S1", "S2", ...
  SpinSystem(std::vector<double> offsets_hz, Eigen::MatrixXd j_hz,
             std::vector<std::string> labels = {});

  // Uncoupled spins.
  static SpinSystem uncoupled(std::vector<double> offsets_hz);

  int n_spins() const { return static_cast<int>(offsets_hz_.size()); }
  int dim() const { return 1 << n_spins(); }
  const std::vector<double>& offsets_hz() const { return offsets_hz_; }
  const Eigen::MatrixXd& j_hz() const { return j_hz_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double max_abs_offset_hz() const;

  // Chemical shifts scale with B0, scalar couplings do not.
  SpinSystem with_field_factor(double b0_factor) const;

 private:
  std::vector<double> offsets_hz_;
  Eigen::MatrixXd j_hz_;
  std::vector<std::string> labels_;
};

// One RF channel setting. Amplitude is the nutation frequency in Hz; `scale`
// is the local inhomogeneity factor.
struct RfField {
  double amplitude_hz = 0.0;
  double phase_rad = 0.0;
  double carrier_offset_hz = 0.0;
  double scale = 1.0;
};

// sum_k 2 pi offset_k Iz^k + 2 pi sum_{j>k} J_kj (I^k . I^j), full isotropic coupling.
Operator internal_hamiltonian(const SpinSystem& sys);

// 2 pi scale amplitude sum_k (cos(phase) Ix^k + sin(phase) Iy^k). The carrier
// offset is handled by the propagator's frame change, not here.
Operator rf_hamiltonian(const SpinSystem& sys, const RfField& rf);

}  // namespace spinctl
