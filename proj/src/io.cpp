#include "spinctl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinctl/errors.hpp"
#include "spinctl/gates.hpp"

namespace spinctl::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& field, const std::string& what) {
  throw ValidationError(where + ": " + field + ": " + what);
}

const json& member(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, key, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, key, "missing");
  return *it;
}

double number(const json& j, const std::string& key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_number()) fail(where, key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, key, "not finite");
  return d;
}

std::string text(const json& j, const std::string& key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_string()) fail(where, key, "expected a string");
  return v.get<std::string>();
}

const json& array(const json& j, const std::string& key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_array()) fail(where, key, "expected an array");
  return v;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail(where, it.key(), "unknown field");
  }
}

std::string at(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

// Rewrap errors from domain constructors with the source location.
template <typename F>
auto with_context(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path.string() + ": cannot write file");
  out << content;
  if (!out) throw ValidationError(path.string() + ": write failed");
}

std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

SpinSystem spin_system_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "(root)", "expected an object");
  reject_unknown(j, {"spins", "j_hz", "note", "manifest"}, where);
  const json& spins = array(j, "spins", where);
  if (spins.empty()) fail(where, "spins", "at least one spin required");
  std::vector<double> offsets;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const std::string w = where + ": " + at("spins", i);
    reject_unknown(spins[i], {"label", "offset_hz"}, w);
    offsets.push_back(number(spins[i], "offset_hz", w));
    labels.push_back(spins[i].contains("label") ? text(spins[i], "label", w) : "S" + std::to_string(i + 1));
  }
  const std::size_t n = spins.size();
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  if (j.contains("j_hz")) {
    const json& rows = array(j, "j_hz", where);
    if (rows.size() != n) fail(where, "j_hz", "expected " + std::to_string(n) + " rows");
    for (std::size_t r = 0; r < n; ++r) {
      if (!rows[r].is_array() || rows[r].size() != n) {
        fail(where, at("j_hz", r), "expected " + std::to_string(n) + " entries");
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (!rows[r][c].is_number()) fail(where, at(at("j_hz", r), c), "expected a number");
        jm(static_cast<long>(r), static_cast<long>(c)) = rows[r][c].get<double>();
      }
    }
  }
  return with_context(where, [&] { return SpinSystem(offsets, jm, labels); });
}

json to_json(const SpinSystem& sys) {
  json spins = json::array();
  for (int i = 0; i < sys.n_spins(); ++i) {
    spins.push_back({{"label", sys.labels()[i]}, {"offset_hz", sys.offsets_hz()[i]}});
  }
  json rows = json::array();
  for (long r = 0; r < sys.j_hz().rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < sys.j_hz().cols(); ++c) row.push_back(sys.j_hz()(r, c));
    rows.push_back(row);
  }
  return {{"spins", spins}, {"j_hz", rows}};
}

PulseSequence pulse_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "(root)", "expected an object");
  reject_unknown(j, {"name", "segments", "target", "manifest"}, where);
  PulseSequence seq;
  if (j.contains("name")) seq.name = text(j, "name", where);
  if (j.contains("target") && !j.at("target").is_null()) {
    seq.target = text(j, "target", where);
    with_context(where + ": target", [&] { return GateSpec::parse(seq.target); });
  }
  const json& segs = array(j, "segments", where);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string w = where + ": " + at("segments", i);
    reject_unknown(segs[i], {"duration_s", "amplitude_hz", "phase_rad", "carrier_offset_hz"}, w);
    PulseSegment s;
    s.duration_s = number(segs[i], "duration_s", w);
    s.amplitude_hz = number(segs[i], "amplitude_hz", w);
    s.phase_rad = number(segs[i], "phase_rad", w);
    s.carrier_offset_hz = segs[i].contains("carrier_offset_hz") ? number(segs[i], "carrier_offset_hz", w) : 0.0;
    seq.segments.push_back(s);
  }
  with_context(where, [&] {
    seq.validate();
    return 0;
  });
  return seq;
}

json to_json(const PulseSequence& seq) {
  json segs = json::array();
  for (const auto& s : seq.segments) {
    segs.push_back({{"duration_s", s.duration_s},
                    {"amplitude_hz", s.amplitude_hz},
                    {"phase_rad", s.phase_rad},
                    {"carrier_offset_hz", s.carrier_offset_hz}});
  }
  json out = {{"name", seq.name}, {"segments", segs}};
  if (!seq.target.empty()) out["target"] = seq.target;
  return out;
}

RfDistribution distribution_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "(root)", "expected an object");
  reject_unknown(j, {"bins", "note", "manifest"}, where);
  const json& bins = array(j, "bins", where);
  std::vector<RfBin> out;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const std::string w = where + ": " + at("bins", i);
    reject_unknown(bins[i], {"scale", "weight"}, w);
    out.push_back({number(bins[i], "scale", w), number(bins[i], "weight", w)});
  }
  return with_context(where, [&] { return RfDistribution(out); });
}

json to_json(const RfDistribution& dist) {
  json bins = json::array();
  for (const auto& b : dist.bins()) bins.push_back({{"scale", b.scale}, {"weight", b.weight}});
  return {{"bins", bins}};
}

SearchConfig search_config_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "(root)", "expected an object");
  reject_unknown(j,
                 {"n_segments", "max_amplitude_hz", "max_duration_s", "n_restarts", "max_iterations",
                  "convergence_tol", "rng_seed", "duration_penalty_weight", "fidelity_floor", "restart_step",
                  "threads"},
                 where);
  SearchConfig c;
  auto integer = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) fail(where, key, "expected an integer");
    if (v.is_number_unsigned()) {
      dst = static_cast<std::decay_t<decltype(dst)>>(v.get<std::uint64_t>());
    } else {
      const auto x = v.get<std::int64_t>();
      if (x < 0 && std::is_unsigned_v<std::decay_t<decltype(dst)>>) fail(where, key, "must be non-negative");
      dst = static_cast<std::decay_t<decltype(dst)>>(x);
    }
  };
  auto real = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = number(j, key, where);
  };
  integer("n_segments", c.n_segments);
  real("max_amplitude_hz", c.max_amplitude_hz);
  real("max_duration_s", c.max_duration_s);
  integer("n_restarts", c.n_restarts);
  integer("max_iterations", c.max_iterations);
  real("convergence_tol", c.convergence_tol);
  integer("rng_seed", c.rng_seed);
  real("duration_penalty_weight", c.duration_penalty_weight);
  real("fidelity_floor", c.fidelity_floor);
  real("restart_step", c.restart_step);
  integer("threads", c.threads);
  with_context(where, [&] {
    c.validate();
    return 0;
  });
  return c;
}

json to_json(const SearchConfig& c) {
  return {{"n_segments", c.n_segments},
          {"max_amplitude_hz", c.max_amplitude_hz},
          {"max_duration_s", c.max_duration_s},
          {"n_restarts", c.n_restarts},
          {"max_iterations", c.max_iterations},
          {"convergence_tol", c.convergence_tol},
          {"rng_seed", c.rng_seed},
          {"duration_penalty_weight", c.duration_penalty_weight},
          {"fidelity_floor", c.fidelity_floor},
          {"restart_step", c.restart_step}};
}

json to_json(const DesignResult& r) {
  return {{"sequence", to_json(r.sequence)},
          {"fidelity", r.fidelity},
          {"objective", r.objective},
          {"compensated", r.compensated},
          {"converged", r.converged},
          {"objective_history", r.objective_history},
          {"restarts_used", r.restarts_used},
          {"best_restart", r.best_restart},
          {"evaluations", r.evaluations}};
}

json to_json(const MetricReport& r) {
  json out = {{"attenuation", r.attenuation}, {"attenuated_correlation", r.attenuated_correlation}};
  out["correlation"] = r.correlation ? json(*r.correlation) : json(nullptr);
  return out;
}

json to_json(const SpectrumReport& r) {
  auto list = [](const Spectrum& s) {
    json a = json::array();
    for (const auto& l : s) a.push_back({l.real(), l.imag()});
    return a;
  };
  return {{"exact", list(r.exact)},
          {"approx", list(r.approx)},
          {"pairing", r.pairing},
          {"max_modulus_deviation", r.max_modulus_deviation},
          {"mean_modulus_deviation", r.mean_modulus_deviation},
          {"max_phase_deviation", r.max_phase_deviation},
          {"mean_phase_deviation", r.mean_phase_deviation},
          {"excluded_pairs", r.excluded_pairs}};
}

NutationData read_nutation_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  NutationData d;
  std::vector<double> times;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("t_s", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    const std::string where = path.string() + ": line " + std::to_string(line_no);
    if (comma == std::string::npos) throw ValidationError(where + ": expected 't_s,amplitude'");
    auto parse = [&](const std::string& s, const char* field) {
      double v = 0.0;
      const char* b = s.data();
      const char* e = s.data() + s.size();
      while (b < e && *b == ' ') ++b;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || p != e || !std::isfinite(v)) {
        throw ValidationError(where + ": " + field + ": not a number");
      }
      return v;
    };
    times.push_back(parse(line.substr(0, comma), "t_s"));
    d.signal.push_back(parse(line.substr(comma + 1), "amplitude"));
  }
  if (times.size() < 2) throw ValidationError(path.string() + ": need at least two samples");
  d.dwell_s = times[1] - times[0];
  if (!(d.dwell_s > 0.0)) throw ValidationError(path.string() + ": t_s must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double expect = times[0] + static_cast<double>(i) * d.dwell_s;
    if (std::abs(times[i] - expect) > 1e-6 * d.dwell_s + 1e-15) {
      throw ValidationError(path.string() + ": t_s: samples are not uniformly spaced");
    }
  }
  return d;
}

std::string nutation_csv(const std::vector<double>& signal, double dwell_s) {
  std::ostringstream out;
  out << "t_s,amplitude\n";
  for (std::size_t i = 0; i < signal.size(); ++i) {
    out << num(static_cast<double>(i) * dwell_s) << ',' << num(signal[i]) << '\n';
  }
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string comment_block(const std::string& comment) {
  std::ostringstream out;
  std::istringstream in(comment);
  std::string line;
  while (std::getline(in, line)) out << "# " << line << '\n';
  return out.str();
}

std::string spectrum_csv(const SpectrumReport& r) {
  std::ostringstream out;
  out << "re_exact,im_exact,re_approx,im_approx,pair_index\n";
  for (std::size_t i = 0; i < r.exact.size(); ++i) {
    const int a = r.pairing.empty() ? -1 : r.pairing[i];
    out << num(r.exact[i].real()) << ',' << num(r.exact[i].imag()) << ',';
    if (a >= 0) {
      out << num(r.approx[a].real()) << ',' << num(r.approx[a].imag());
    } else {
      out << ',';
    }
    out << ',' << a << '\n';
  }
  return out.str();
}

}  // namespace spinctl::io
