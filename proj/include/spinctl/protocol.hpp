#pragma once

#include <string>
#include <vector>

#include "spinctl/ensemble.hpp"
#include "spinctl/metrics.hpp"
#include "spinctl/propagator.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl {

// One gate applied through the Kraus channel to one input state.
struct ProtocolRow {
  std::string gate;
  std::string input;  // "x", "y" or "z" for sum_k I_axis^k
  MetricReport metrics;
};

struct ProtocolMeans {
  double correlation = 0.0;
  double attenuation = 0.0;
  double attenuated_correlation = 0.0;
};

struct ProtocolVariant {
  std::string label;  // e.g. "compensated"
  std::vector<ProtocolRow> rows;
  std::vector<std::pair<std::string, ProtocolMeans>> gate_means;  // in input order
  ProtocolMeans grand;
};

struct ProtocolGate {
  std::string gate;  // gate string, also the ideal target
  PulseSequence sequence;
};

// Applies each gate to the three inputs sum I_x, sum I_y, sum I_z. Outputs
// are compared with the ideal gate action; attenuation is measured against
// the thermal reference sum I_z. Means are arithmetic over the three inputs,
// and an undefined correlation counts as 0 in them.
ProtocolVariant run_protocol(const std::string& label, const SpinSystem& sys,
                             const std::vector<ProtocolGate>& gates, const RfDistribution& dist);

// variant,gate,input,C,A,C_A rows, then per-gate means (input "mean") and a
// grand mean (gate "all") for each variant.
std::string protocol_csv(const std::vector<ProtocolVariant>& variants);

}  // namespace spinctl
