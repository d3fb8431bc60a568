#include "spinctl/protocol.hpp"

#include <sstream>

#include "spinctl/errors.hpp"
#include "spinctl/gates.hpp"
#include "spinctl/io.hpp"

namespace spinctl {

ProtocolVariant run_protocol(const std::string& label, const SpinSystem& sys,
                             const std::vector<ProtocolGate>& gates, const RfDistribution& dist) {
  if (gates.empty()) throw ValidationError("protocol: no gates given");
  const Propagator prop(sys);
  const int n = sys.n_spins();
  const StateMatrix reference = total_spin(Axis::z, n);

  ProtocolVariant v;
  v.label = label;
  for (const auto& g : gates) {
    const Operator ideal_u = gate_unitary(g.gate, n);
    const KrausSet ks = kraus_set(prop, g.sequence, dist);
    ProtocolMeans m;
    for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
      const StateMatrix in = total_spin(axis, n);
      const StateMatrix ideal = ideal_u * in * ideal_u.adjoint();
      ProtocolRow row{g.gate, std::string(1, axis_name(axis)), metric_report(ideal, apply_kraus(ks, in), reference)};
      m.correlation += row.metrics.correlation.value_or(0.0) / 3.0;
      m.attenuation += row.metrics.attenuation / 3.0;
      m.attenuated_correlation += row.metrics.attenuated_correlation / 3.0;
      v.rows.push_back(std::move(row));
    }
    v.gate_means.emplace_back(g.gate, m);
  }
  const double k = static_cast<double>(gates.size());
  for (const auto& [name, m] : v.gate_means) {
    v.grand.correlation += m.correlation / k;
    v.grand.attenuation += m.attenuation / k;
    v.grand.attenuated_correlation += m.attenuated_correlation / k;
  }
  return v;
}

std::string protocol_csv(const std::vector<ProtocolVariant>& variants) {
  std::ostringstream out;
  out << "variant,gate,input,C,A,C_A\n";
  for (const auto& v : variants) {
    for (const auto& r : v.rows) {
      out << io::csv_field(v.label) << ',' << io::csv_field(r.gate) << ',' << r.input << ','
          << (r.metrics.correlation ? io::num(*r.metrics.correlation) : "") << ','
          << io::num(r.metrics.attenuation) << ',' << io::num(r.metrics.attenuated_correlation) << '\n';
    }
    for (const auto& [gate, m] : v.gate_means) {
      out << io::csv_field(v.label) << ',' << io::csv_field(gate) << ",mean," << io::num(m.correlation) << ',' << io::num(m.attenuation)
          << ',' << io::num(m.attenuated_correlation) << '\n';
    }
    out << io::csv_field(v.label) << ",all,mean," << io::num(v.grand.correlation) << ',' << io::num(v.grand.attenuation)
        << ',' << io::num(v.grand.attenuated_correlation) << '\n';
  }
  return out.str();
}

}  // namespace spinctl
