#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "spinctl/designer.hpp"
#include "spinctl/ensemble.hpp"
#include "spinctl/metrics.hpp"
#include "spinctl/propagator.hpp"
#include "spinctl/spectra.hpp"
#include "spinctl/spin_system.hpp"

namespace spinctl::io {

using json = nlohmann::json;

// Parse failures throw ValidationError with the message "<where>: <field>: <problem>".

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// { "spins": [{ "label": str, "offset_hz": number }], "j_hz": [[...]] }
SpinSystem spin_system_from_json(const json& j, const std::string& where = "spin system");
json to_json(const SpinSystem& sys);

// { "name": str, "segments": [{ "duration_s", "amplitude_hz", "phase_rad",
//   "carrier_offset_hz" }], "target": gate string (optional) }
PulseSequence pulse_from_json(const json& j, const std::string& where = "pulse");
json to_json(const PulseSequence& seq);

// { "bins": [{ "scale": number, "weight": number }] }
RfDistribution distribution_from_json(const json& j, const std::string& where = "distribution");
json to_json(const RfDistribution& dist);

// Any subset of the SearchConfig fields; unknown keys are rejected.
SearchConfig search_config_from_json(const json& j, const std::string& where = "search config");
json to_json(const SearchConfig& cfg);

json to_json(const DesignResult& r);
json to_json(const MetricReport& r);
json to_json(const SpectrumReport& r);

// Two columns t_s, amplitude with a header row; '#' lines are comments.
struct NutationData {
  double dwell_s = 0.0;
  std::vector<double> signal;
};
NutationData read_nutation_csv(const std::filesystem::path& path);
std::string nutation_csv(const std::vector<double>& signal, double dwell_s);

// Shortest decimal form that reads back to the same double.
std::string num(double v);

// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(const std::string& s);

// Prefix every line of `comment` with "# ".
std::string comment_block(const std::string& comment);

// re_exact, im_exact, re_approx, im_approx, pair_index
std::string spectrum_csv(const SpectrumReport& r);

}  // namespace spinctl::io
