#pragma once

#include <optional>

#include "spinctl/ensemble.hpp"
#include "spinctl/operator_kernel.hpp"

namespace spinctl {

// All state metrics act on traceless parts; the identity component of an NMR
// density matrix is unobservable.

// tr(a b) / sqrt(tr(a^2) tr(b^2)) on traceless parts, in [-1, 1].
// Throws UndefinedCorrelation when either traceless part vanishes.
double correlation(const StateMatrix& ideal, const StateMatrix& out);

// sqrt(tr(out^2) / tr(in^2)) on traceless parts.
double attenuation(const StateMatrix& out, const StateMatrix& in);

// tr(ideal out) / sqrt(tr(ideal^2) tr(in^2)) on traceless parts; equals
// correlation * attenuation whenever the correlation is defined.
double attenuated_correlation(const StateMatrix& ideal, const StateMatrix& out,
                              const StateMatrix& in);

// Mean attenuated correlation over the normalized Pauli-product basis
// P / sqrt(2^N). The identity element has no traceless part; it contributes
// 1, which is what any trace-preserving channel does to it.
double gate_fidelity_basis_average(const Operator& u_ideal, const KrausSet& ks);

// (1 / 4^N) sum_k p_k |tr(U_ideal^dagger U_k)|^2. Same value as the basis
// average at a fraction of the cost.
double gate_fidelity_trace(const Operator& u_ideal, const KrausSet& ks);

struct MetricReport {
  std::optional<double> correlation;  // empty when the output has no traceless part
  double attenuation = 0.0;
  double attenuated_correlation = 0.0;
};

// C, A and C_A for one input state. C_A is computed directly and checked
// against C * A to 1e-12.
MetricReport metric_report(const StateMatrix& ideal, const StateMatrix& out, const StateMatrix& in);

}  // namespace spinctl
