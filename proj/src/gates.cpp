#include "spinctl/gates.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "spinctl/errors.hpp"

namespace spinctl {

GateSpec GateSpec::parse(const std::string& text) {
  if (text == "identity" || text == "I") return GateSpec{Axis::x, 0.0, {}};
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon < 2) {
    throw ValidationError("gate '" + text + "': expected <axis><degrees>:<spins>");
  }
  GateSpec g;
  g.axis = parse_axis(text[0]);
  const std::string angle = text.substr(1, colon - 1);
  const auto* first = angle.data();
  const auto* last = angle.data() + angle.size();
  if (auto [p, ec] = std::from_chars(first, last, g.angle_deg); ec != std::errc() || p != last) {
    throw ValidationError("gate '" + text + "': bad angle '" + angle + "'");
  }
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    int spin = 0;
    const auto* b = item.data();
    const auto* e = item.data() + item.size();
    if (auto [p, ec] = std::from_chars(b, e, spin); ec != std::errc() || p != e || spin < 1) {
      throw ValidationError("gate '" + text + "': bad spin index '" + item + "'");
    }
    if (std::find(g.spins.begin(), g.spins.end(), spin) != g.spins.end()) {
      throw ValidationError("gate '" + text + "': spin " + item + " listed twice");
    }
    g.spins.push_back(spin);
  }
  if (g.spins.empty()) throw ValidationError("gate '" + text + "': no spins given");
  return g;
}

std::string GateSpec::str() const {
  if (spins.empty()) return "identity";
  std::ostringstream out;
  out << axis_name(axis) << angle_deg << ':';
  for (std::size_t i = 0; i < spins.size(); ++i) out << (i ? "," : "") << spins[i];
  return out.str();
}

Operator gate_unitary(const GateSpec& gate, int n_spins) {
  const int d = hilbert_dim(n_spins);
  Operator gen = Operator::Zero(d, d);
  for (int s : gate.spins) gen += spin_operator(gate.axis, s, n_spins);
  return exp_hermitian(gen, gate.angle_deg * kPi / 180.0);
}

Operator gate_unitary(const std::string& text, int n_spins) {
  return gate_unitary(GateSpec::parse(text), n_spins);
}

std::vector<std::string> protocol_gate_set() {
  return {"x90:1", "x90:3", "x90:1,2", "x90:2,3", "x90:1,2,3", "x180:1,2", "x180:2,3"};
}

}  // namespace spinctl
