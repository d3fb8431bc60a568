#pragma once

#include <string>
#include <vector>

#include "spinctl/operator_kernel.hpp"

namespace spinctl {

// Rotation gates written as "<axis><degrees>:<spin>[,<spin>...]", e.g.
// "x90:1", "x180:2,3", "y90:1,2,3"; "identity" is also accepted.
struct GateSpec {
  Axis axis = Axis::x;
  double angle_deg = 0.0;
  std::vector<int> spins;  // 1-based; empty for the identity

  static GateSpec parse(const std::string& text);
  std::string str() const;
};

// exp(-i angle sum_{k in spins} I_axis^k).
Operator gate_unitary(const GateSpec& gate, int n_spins);
Operator gate_unitary(const std::string& text, int n_spins);

// The seven spin rotations of the experimental gate set.
std::vector<std::string> protocol_gate_set();

}  // namespace spinctl
