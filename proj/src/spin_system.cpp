#include "spinctl/spin_system.hpp"

#include <cmath>

#include "spinctl/errors.hpp"

namespace spinctl {

SpinSystem::SpinSystem(std::vector<double> offsets_hz, Eigen::MatrixXd j_hz,
                       std::vector<std::string> labels)
    : offsets_hz_(std::move(offsets_hz)), j_hz_(std::move(j_hz)), labels_(std::move(labels)) {
  const auto n = static_cast<Eigen::Index>(offsets_hz_.size());
  if (n < 1) throw ValidationError("spin system needs at least one spin");
  hilbert_dim(static_cast<int>(n));
  for (double w : offsets_hz_) {
    if (!std::isfinite(w)) throw ValidationError("spin offsets must be finite");
  }
  if (j_hz_.size() == 0) j_hz_ = Eigen::MatrixXd::Zero(n, n);
  if (j_hz_.rows() != n || j_hz_.cols() != n) {
    throw ValidationError("coupling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    if (j_hz_(a, a) != 0.0) throw ValidationError("coupling matrix diagonal must be zero");
    for (Eigen::Index b = 0; b < n; ++b) {
      if (!std::isfinite(j_hz_(a, b))) throw ValidationError("couplings must be finite");
      if (j_hz_(a, b) != j_hz_(b, a)) throw ValidationError("coupling matrix must be symmetric");
    }
  }
  if (labels_.empty()) {
    for (Eigen::Index k = 0; k < n; ++k) labels_.push_back("S" + std::to_string(k + 1));
  }
  if (static_cast<Eigen::Index>(labels_.size()) != n) {
    throw ValidationError("one label per spin required");
  }
}

SpinSystem SpinSystem::uncoupled(std::vector<double> offsets_hz) {
  const auto n = static_cast<Eigen::Index>(offsets_hz.size());
  return SpinSystem(std::move(offsets_hz), Eigen::MatrixXd::Zero(n, n));
}

double SpinSystem::max_abs_offset_hz() const {
  double m = 0.0;
  for (double w : offsets_hz_) m = std::max(m, std::abs(w));
  return m;
}

SpinSystem SpinSystem::with_field_factor(double b0_factor) const {
  if (!(b0_factor > 0.0)) throw ValidationError("B0 factor must be positive");
  std::vector<double> scaled = offsets_hz_;
  for (double& w : scaled) w *= b0_factor;
  return SpinSystem(std::move(scaled), j_hz_, labels_);
}

Operator internal_hamiltonian(const SpinSystem& sys) {
  const int n = sys.n_spins();
  Operator h = Operator::Zero(sys.dim(), sys.dim());
  for (int k = 1; k <= n; ++k) {
    h += kTwoPi * sys.offsets_hz()[k - 1] * spin_operator(Axis::z, k, n);
  }
  for (int k = 1; k <= n; ++k) {
    for (int j = k + 1; j <= n; ++j) {
      const double jkj = sys.j_hz()(k - 1, j - 1);
      if (jkj == 0.0) continue;
      Operator dot = Operator::Zero(sys.dim(), sys.dim());
      for (Axis a : {Axis::x, Axis::y, Axis::z}) {
        dot += spin_operator(a, k, n) * spin_operator(a, j, n);
      }
      h += kTwoPi * jkj * dot;
    }
  }
  return h;
}

Operator rf_hamiltonian(const SpinSystem& sys, const RfField& rf) {
  if (rf.amplitude_hz < 0.0) throw ValidationError("RF amplitude must be non-negative");
  if (!(rf.scale > 0.0)) throw ValidationError("RF scale must be positive");
  const int n = sys.n_spins();
  const double w = kTwoPi * rf.scale * rf.amplitude_hz;
  return w * (std::cos(rf.phase_rad) * total_spin(Axis::x, n) +
              std::sin(rf.phase_rad) * total_spin(Axis::y, n));
}

}  // namespace spinctl
