#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "spinctl/designer.hpp"
#include "spinctl/ensemble.hpp"
#include "spinctl/errors.hpp"
#include "spinctl/gates.hpp"
#include "spinctl/io.hpp"
#include "spinctl/metrics.hpp"
#include "spinctl/protocol.hpp"
#include "spinctl/spectra.hpp"

namespace spinctl::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Everything needed to reproduce an artifact; copied verbatim into each output.
struct Manifest {
  std::string command;
  std::map<std::string, std::string> inputs;
  json parameters = json::object();
  std::string output_dir = ".";
  std::uint64_t seed = 1;

  json to_json() const {
    return {{"command", command},
            {"inputs", inputs},
            {"parameters", parameters},
            {"output_dir", output_dir},
            {"seed", seed},
            {"version", std::string("spinctl ") + kVersion}};
  }
};

struct Common {
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 0;
};

struct Inputs {
  std::string system, pulse, distribution, config, gates, signal;
  std::string target;
};

std::string csv_with_manifest(const Manifest& m, const std::string& body) {
  return io::comment_block("manifest: " + m.to_json().dump()) + body;
}

void write_json(const Manifest& m, const std::string& name, json body, std::ostream& out) {
  body["manifest"] = m.to_json();
  const fs::path p = fs::path(m.output_dir) / name;
  io::write_text(p, body.dump(2) + "\n");
  out << "wrote " << p.string() << "\n";
}

void write_csv(const Manifest& m, const std::string& name, const std::string& body, std::ostream& out) {
  const fs::path p = fs::path(m.output_dir) / name;
  io::write_text(p, csv_with_manifest(m, body));
  out << "wrote " << p.string() << "\n";
}

Manifest start(const std::string& command, const Common& c) {
  if (!fs::is_directory(c.out_dir)) {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) throw ValidationError("--out: cannot create directory '" + c.out_dir + "'");
  }
  Manifest m;
  m.command = command;
  m.output_dir = c.out_dir;
  m.seed = c.seed;
  return m;
}

SpinSystem load_system(Manifest& m, const std::string& path) {
  m.inputs["system"] = path;
  return io::spin_system_from_json(io::read_json(path), path);
}

PulseSequence load_pulse(Manifest& m, const std::string& path, const std::string& key = "pulse") {
  m.inputs[key] = path;
  return io::pulse_from_json(io::read_json(path), path);
}

std::optional<RfDistribution> load_distribution(Manifest& m, const std::string& path) {
  if (path.empty()) return std::nullopt;
  m.inputs["distribution"] = path;
  return io::distribution_from_json(io::read_json(path), path);
}

std::string resolve_target(const std::string& flag, const PulseSequence& seq) {
  if (!flag.empty()) return flag;
  if (!seq.target.empty()) return seq.target;
  throw ValidationError("--target: required when the pulse file names no target");
}

std::string curve_csv(const std::string& x_name, const Curve& curve) {
  std::ostringstream s;
  s << x_name << ",fidelity\n";
  for (const auto& [x, f] : curve) s << io::num(x) << ',' << io::num(f) << '\n';
  return s.str();
}

std::string default_name(const std::string& target, bool compensated) {
  std::string n;
  for (char ch : target) n += (std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
  return n + (compensated ? ".comp" : ".uncomp");
}

const char* kFooter =
    "Exit codes: 0 success, 1 validation error, 2 unconverged design, 3 numerical failure.\n"
    "Every JSON output carries a \"manifest\" object; every CSV starts with a '# manifest:' line.\n"
    "SPINCTL_THREADS sets the default thread count when --threads is 0.";

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and analysis of RF-inhomogeneity compensated control pulses for small spin systems",
               "spinctl"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("spinctl ") + kVersion);

  Common common;
  Inputs in;
  SearchConfig cfg;
  std::string name;
  std::vector<double> scales, widths, b0s, caps;
  double width = 1.0;
  double amplitude = 10000.0, dwell = 2e-5;
  std::size_t points = 4096, bins = 9;
  bool no_dist = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--out", common.out_dir, "Output directory (created if missing)")->capture_default_str();
    sub->add_option("--seed", common.seed, "Random seed recorded in the manifest and used by searches")
        ->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads for independent restarts; 0 = automatic")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--config", in.config, "SearchConfig JSON; flags below override its fields")
        ->check(CLI::ExistingFile);
    sub->add_option("--segments", cfg.n_segments, "Number of pulse segments")->check(CLI::PositiveNumber);
    sub->add_option("--restarts", cfg.n_restarts, "Independent Nelder-Mead runs")->check(CLI::PositiveNumber);
    sub->add_option("--iterations", cfg.max_iterations, "Iteration budget per run")->check(CLI::PositiveNumber);
    sub->add_option("--max-amplitude", cfg.max_amplitude_hz, "RF amplitude cap in Hz")->check(CLI::PositiveNumber);
    sub->add_option("--max-duration", cfg.max_duration_s, "Total duration cap in s")->check(CLI::PositiveNumber);
    sub->add_option("--penalty", cfg.duration_penalty_weight, "Duration penalty weight");
    sub->add_option("--floor", cfg.fidelity_floor, "Fidelity below which the design counts as unconverged");
  };

  // design
  auto* design = app.add_subcommand("design", "Search for a pulse implementing a target gate");
  add_common(design);
  design->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  design->add_option("--target", in.target, "Target gate, e.g. x90:1 or x180:2,3")->required();
  design->add_option("--distribution", in.distribution, "RF profile JSON; enables compensated design")
      ->check(CLI::ExistingFile);
  design->add_option("--name", name, "Output stem; files are <name>.result.json and <name>.pulse.json");
  add_search(design);
  design->footer("Writes the DesignResult and the pulse as JSON. Exits 2 when the fidelity floor is not reached.");

  // score
  auto* score = app.add_subcommand("score", "Gate fidelity of a pulse, coherent or over an RF profile");
  add_common(score);
  score->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--pulse", in.pulse, "Pulse JSON")->required()->check(CLI::ExistingFile);
  score->add_option("--target", in.target, "Target gate; defaults to the pulse's own target");
  score->add_option("--distribution", in.distribution, "RF profile JSON")->check(CLI::ExistingFile);
  score->footer("Writes score.json with the coherent and (if given) ensemble fidelities.");

  // sweep-scale
  auto* sweep_scale = app.add_subcommand("sweep-scale", "Coherent fidelity versus RF scale");
  add_common(sweep_scale);
  sweep_scale->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  sweep_scale->add_option("--pulse", in.pulse, "Pulse JSON")->required()->check(CLI::ExistingFile);
  sweep_scale->add_option("--target", in.target, "Target gate; defaults to the pulse's own target");
  sweep_scale->add_option("--scales", scales, "Comma-separated RF scales")->required()->delimiter(',');
  sweep_scale->footer("Writes sweep_scale.csv with columns: scale,fidelity (one row per scale).");

  // sweep-width
  auto* sweep_width = app.add_subcommand("sweep-width", "Ensemble fidelity versus scaled profile width");
  add_common(sweep_width);
  sweep_width->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  sweep_width->add_option("--pulse", in.pulse, "Pulse JSON")->required()->check(CLI::ExistingFile);
  sweep_width->add_option("--target", in.target, "Target gate; defaults to the pulse's own target");
  sweep_width->add_option("--distribution", in.distribution, "RF profile JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_width->add_option("--widths", widths, "Comma-separated width factors (0 = coherent at the mean scale)")
      ->required()
      ->delimiter(',');
  sweep_width->footer("Writes sweep_width.csv with columns: width,fidelity.");

  // sweep-power
  auto* sweep_power = app.add_subcommand("sweep-power", "Best coherent fidelity over B0 factors and RF caps");
  add_common(sweep_power);
  sweep_power->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  sweep_power->add_option("--target", in.target, "Target gate")->required();
  sweep_power->add_option("--b0", b0s, "Comma-separated field factors applied to the offsets")
      ->required()
      ->delimiter(',');
  sweep_power->add_option("--caps", caps, "Comma-separated RF amplitude caps in Hz")->required()->delimiter(',');
  add_search(sweep_power);
  sweep_power->footer("Writes sweep_power.csv with columns: b0,power,fidelity.");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Exact and first-order superoperator eigenvalues");
  add_common(spectrum);
  spectrum->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  auto* pulse_opt = spectrum->add_option("--pulse", in.pulse, "Pulse JSON")->check(CLI::ExistingFile);
  spectrum->add_option("--gate", in.target, "Use the ideal gate unitary instead of a pulse, e.g. identity")
      ->excludes(pulse_opt);
  spectrum->add_option("--distribution", in.distribution, "RF profile JSON; omitted means a single unitary")
      ->check(CLI::ExistingFile);
  spectrum->add_option("--width", width, "Width factor applied to the profile")->capture_default_str();
  spectrum->footer(
      "Writes spectrum.csv with columns: re_exact,im_exact,re_approx,im_approx,pair_index\n"
      "and spectrum.json with the full SpectrumReport.");

  // nutation
  auto* nutation = app.add_subcommand("nutation", "Simulate a nutation signal and recover the RF profile");
  add_common(nutation);
  auto* dist_opt = nutation->add_option("--distribution", in.distribution, "RF profile JSON to simulate")
                       ->check(CLI::ExistingFile);
  nutation->add_option("--signal", in.signal, "Nutation CSV (t_s,amplitude) to analyse instead")
      ->check(CLI::ExistingFile)
      ->excludes(dist_opt);
  nutation->add_option("--amplitude", amplitude, "Nominal RF amplitude in Hz")->capture_default_str();
  nutation->add_option("--dwell", dwell, "Sample spacing in s")->capture_default_str();
  nutation->add_option("--points", points, "Number of samples (power of two)")->capture_default_str();
  nutation->add_option("--bins", bins, "Bins in the recovered profile")->capture_default_str();
  nutation->footer(
      "Writes nutation.csv with columns: t_s,amplitude (when simulating) and profile.json with the\n"
      "recovered distribution and, when a reference profile was given, the total-variation distance.");

  // protocol
  auto* protocol = app.add_subcommand("protocol", "Simulated C/A/C_A report for a compensated and uncompensated gate set");
  add_common(protocol);
  protocol->add_option("--system", in.system, "Spin system JSON")->required()->check(CLI::ExistingFile);
  protocol->add_option("--gates", in.gates,
                       "Gate set JSON: {\"gates\": [{\"gate\", \"compensated\", \"uncompensated\"}]}, pulse "
                       "paths relative to this file")
      ->required()
      ->check(CLI::ExistingFile);
  protocol->add_option("--distribution", in.distribution, "RF profile JSON")->check(CLI::ExistingFile);
  protocol->add_flag("--no-distribution", no_dist, "Run with a single RF scale of 1");
  protocol->footer(
      "Writes protocol.csv with columns: variant,gate,input,C,A,C_A (per-gate rows have input 'mean';\n"
      "the grand mean has gate 'all') and protocol.json.");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      const auto subs = app.get_subcommands();
      out << (subs.empty() ? app.help() : subs.front()->help());
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::CallForVersion&) {
      out << "spinctl " << kVersion << "\n";
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    }

    auto search_config = [&](Manifest& m, CLI::App* sub) {
      SearchConfig c;
      if (!in.config.empty()) {
        m.inputs["config"] = in.config;
        c = io::search_config_from_json(io::read_json(in.config), in.config);
      }
      auto set = [&](const char* flag, auto& dst, const auto& src) {
        if (sub->count(flag) > 0) dst = src;
      };
      set("--segments", c.n_segments, cfg.n_segments);
      set("--restarts", c.n_restarts, cfg.n_restarts);
      set("--iterations", c.max_iterations, cfg.max_iterations);
      set("--max-amplitude", c.max_amplitude_hz, cfg.max_amplitude_hz);
      set("--max-duration", c.max_duration_s, cfg.max_duration_s);
      set("--penalty", c.duration_penalty_weight, cfg.duration_penalty_weight);
      set("--floor", c.fidelity_floor, cfg.fidelity_floor);
      c.rng_seed = common.seed;
      c.threads = common.threads;
      c.validate();
      m.parameters["search"] = io::to_json(c);
      return c;
    };

    if (design->parsed()) {
      Manifest m = start("design", common);
      const SpinSystem sys = load_system(m, in.system);
      const auto dist = load_distribution(m, in.distribution);
      const SearchConfig c = search_config(m, design);
      m.parameters["target"] = in.target;
      const Operator target = gate_unitary(in.target, sys.n_spins());
      DesignResult r = design_pulse(target, sys, dist, c);
      const std::string stem = name.empty() ? default_name(in.target, dist.has_value()) : name;
      r.sequence.name = stem;
      r.sequence.target = in.target;
      write_json(m, stem + ".result.json", io::to_json(r), out);
      write_json(m, stem + ".pulse.json", io::to_json(r.sequence), out);
      out << "fidelity " << io::num(r.fidelity) << (r.converged ? "" : " (below floor)") << "\n";
      return r.converged ? kExitOk : kExitUnconverged;
    }

    if (score->parsed()) {
      Manifest m = start("score", common);
      const SpinSystem sys = load_system(m, in.system);
      const PulseSequence seq = load_pulse(m, in.pulse);
      const auto dist = load_distribution(m, in.distribution);
      const std::string tgt = resolve_target(in.target, seq);
      m.parameters["target"] = tgt;
      const Operator target = gate_unitary(tgt, sys.n_spins());
      json body = {{"target", tgt},
                   {"coherent_fidelity", gate_fidelity_trace(target, single_unitary(sequence_propagator(sys, seq, 1.0)))}};
      if (dist) body["ensemble_fidelity"] = gate_fidelity_trace(target, kraus_set(sys, seq, *dist));
      write_json(m, "score.json", body, out);
      return kExitOk;
    }

    if (sweep_scale->parsed()) {
      Manifest m = start("sweep-scale", common);
      const SpinSystem sys = load_system(m, in.system);
      const PulseSequence seq = load_pulse(m, in.pulse);
      const std::string tgt = resolve_target(in.target, seq);
      m.parameters["target"] = tgt;
      m.parameters["scales"] = scales;
      const Curve c = sweep_rf_scale(seq, gate_unitary(tgt, sys.n_spins()), sys, scales);
      write_csv(m, "sweep_scale.csv", curve_csv("scale", c), out);
      return kExitOk;
    }

    if (sweep_width->parsed()) {
      Manifest m = start("sweep-width", common);
      const SpinSystem sys = load_system(m, in.system);
      const PulseSequence seq = load_pulse(m, in.pulse);
      const auto dist = load_distribution(m, in.distribution);
      const std::string tgt = resolve_target(in.target, seq);
      m.parameters["target"] = tgt;
      m.parameters["widths"] = widths;
      for (double w : widths) {
        if (w < 0.0) throw ValidationError("--widths: width factors must be non-negative");
      }
      const Curve c = sweep_profile_width(seq, gate_unitary(tgt, sys.n_spins()), sys, *dist, widths);
      write_csv(m, "sweep_width.csv", curve_csv("width", c), out);
      return kExitOk;
    }

    if (sweep_power->parsed()) {
      Manifest m = start("sweep-power", common);
      const SpinSystem sys = load_system(m, in.system);
      const SearchConfig c = search_config(m, sweep_power);
      m.parameters["target"] = in.target;
      m.parameters["b0"] = b0s;
      m.parameters["caps"] = caps;
      for (double b : b0s) {
        if (!(b > 0.0)) throw ValidationError("--b0: factors must be positive");
      }
      for (double a : caps) {
        if (!(a > 0.0)) throw ValidationError("--caps: amplitude caps must be positive");
      }
      const PowerFieldGrid g = sweep_power_field(gate_unitary(in.target, sys.n_spins()), sys, b0s, caps, c);
      std::ostringstream s;
      s << "b0,power,fidelity\n";
      for (const auto& p : g.points) {
        s << io::num(p.b0_factor) << ',' << io::num(p.max_amplitude_hz) << ',' << io::num(p.fidelity) << '\n';
      }
      write_csv(m, "sweep_power.csv", s.str(), out);
      out << "nondecreasing in power: " << (g.nondecreasing_in_power ? "yes" : "no")
          << ", in b0: " << (g.nondecreasing_in_b0 ? "yes" : "no") << "\n";
      return kExitOk;
    }

    if (spectrum->parsed()) {
      Manifest m = start("spectrum", common);
      const SpinSystem sys = load_system(m, in.system);
      const auto dist_in = load_distribution(m, in.distribution);
      m.parameters["width"] = width;
      if (width < 0.0) throw ValidationError("--width: must be non-negative");
      const RfDistribution dist = dist_in ? rescale_distribution(*dist_in, width) : RfDistribution::delta(1.0);

      KrausSet ks;
      double t = 1.0;
      if (!in.pulse.empty()) {
        const PulseSequence seq = load_pulse(m, in.pulse);
        ks = kraus_set(sys, seq, dist);
        t = seq.total_duration();
      } else if (!in.target.empty()) {
        m.parameters["gate"] = in.target;
        ks = single_unitary(gate_unitary(in.target, sys.n_spins()));
        if (dist_in) throw ValidationError("--gate: an ideal gate has no RF dependence; drop --distribution");
      } else {
        throw ValidationError("spectrum: one of --pulse or --gate is required");
      }
      const Spectrum exact = exact_spectrum(superoperator(ks));
      const int ref = ks.size() > 1 ? static_cast<int>(dist.peak_index()) : 0;
      const PerturbationDecomposition pd = extract_perturbations(ks, ref, t);
      const PerturbativeSpectrum ps = perturbative_spectrum(pd, ks.weights);
      const SpectrumReport rep = match_spectra(exact, ps.values, ps.degenerate);
      json body = io::to_json(rep);
      body["mean_unit_circle_distance"] = mean_unit_circle_distance(exact);
      body["degenerate_reference"] = pd.degenerate;
      write_csv(m, "spectrum.csv", io::spectrum_csv(rep), out);
      write_json(m, "spectrum.json", body, out);
      return kExitOk;
    }

    if (nutation->parsed()) {
      Manifest m = start("nutation", common);
      m.parameters["amplitude_hz"] = amplitude;
      m.parameters["bins"] = bins;
      std::vector<double> signal;
      double dt = dwell;
      const auto dist = load_distribution(m, in.distribution);
      if (dist) {
        m.parameters["dwell_s"] = dwell;
        m.parameters["points"] = points;
        signal = simulate_nutation(amplitude, *dist, dwell, points);
        write_csv(m, "nutation.csv", io::nutation_csv(signal, dwell), out);
      } else if (!in.signal.empty()) {
        m.inputs["signal"] = in.signal;
        const io::NutationData d = io::read_nutation_csv(in.signal);
        signal = d.signal;
        dt = d.dwell_s;
      } else {
        throw ValidationError("nutation: one of --distribution or --signal is required");
      }
      const RfDistribution recovered = extract_profile(signal, dt, bins, amplitude);
      json body = io::to_json(recovered);
      if (dist) {
        body["total_variation"] = total_variation(*dist, recovered);
        body["reference_peak_scale"] = dist->bins()[dist->peak_index()].scale;
        body["recovered_peak_scale"] = recovered.bins()[recovered.peak_index()].scale;
      }
      write_json(m, "profile.json", body, out);
      return kExitOk;
    }

    if (protocol->parsed()) {
      Manifest m = start("protocol", common);
      const SpinSystem sys = load_system(m, in.system);
      if (in.distribution.empty() && !no_dist) {
        throw ValidationError("protocol: --distribution is required (or pass --no-distribution)");
      }
      const RfDistribution dist = no_dist ? RfDistribution::delta(1.0) : *load_distribution(m, in.distribution);
      m.inputs["gates"] = in.gates;
      const json gs = io::read_json(in.gates);
      if (!gs.contains("gates") || !gs.at("gates").is_array() || gs.at("gates").empty()) {
        throw ValidationError(in.gates + ": gates: expected a non-empty array");
      }
      const fs::path base = fs::path(in.gates).parent_path();
      std::vector<ProtocolGate> comp, uncomp;
      for (std::size_t i = 0; i < gs.at("gates").size(); ++i) {
        const json& g = gs.at("gates")[i];
        const std::string where = in.gates + ": gates[" + std::to_string(i) + "]";
        if (!g.is_object() || !g.contains("gate") || !g.at("gate").is_string()) {
          throw ValidationError(where + ": gate: missing");
        }
        const std::string gate = g.at("gate").get<std::string>();
        gate_unitary(gate, sys.n_spins());
        for (const char* variant : {"compensated", "uncompensated"}) {
          if (!g.contains(variant) || !g.at(variant).is_string()) {
            throw ValidationError(where + ": " + variant + ": missing pulse file");
          }
          const fs::path p = base / g.at(variant).get<std::string>();
          if (!fs::exists(p)) throw ValidationError(where + ": " + variant + ": no such file " + p.string());
          const PulseSequence seq = io::pulse_from_json(io::read_json(p), p.string());
          (std::string(variant) == "compensated" ? comp : uncomp).push_back({gate, seq});
        }
      }
      const std::vector<ProtocolVariant> variants = {run_protocol("compensated", sys, comp, dist),
                                                     run_protocol("uncompensated", sys, uncomp, dist)};
      write_csv(m, "protocol.csv", protocol_csv(variants), out);
      json body = json::object();
      for (const auto& v : variants) {
        body[v.label] = {{"mean_C", v.grand.correlation},
                         {"mean_A", v.grand.attenuation},
                         {"mean_C_A", v.grand.attenuated_correlation}};
      }
      write_json(m, "protocol.json", body, out);
      for (const auto& v : variants) {
        out << v.label << ": mean A " << io::num(v.grand.attenuation) << ", mean C_A "
            << io::num(v.grand.attenuated_correlation) << "\n";
      }
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UndefinedCorrelation& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const BranchCutError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace spinctl::cli
