#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "spinctl/errors.hpp"
#include "spinctl/io.hpp"

using namespace spinctl;
using namespace spinctl::io;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("spinctl_io_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(SpinSystemJson, RoundTrip) {
  Eigen::MatrixXd j(2, 2);
  j << 0, 54.5, 54.5, 0;
  const SpinSystem s({6100.25, -3300.0}, j, {"C1", "C2"});
  const SpinSystem back = spin_system_from_json(to_json(s));
  EXPECT_EQ(back.offsets_hz(), s.offsets_hz());
  EXPECT_EQ(back.j_hz(), s.j_hz());
  EXPECT_EQ(back.labels(), s.labels());
}

TEST(SpinSystemJson, BundledFilesParse) {
  for (const char* f : {"three_spin.json", "two_spin.json"}) {
    EXPECT_NO_THROW(spin_system_from_json(read_json(fs::path(SPINCTL_DATA_DIR) / f))) << f;
  }
  EXPECT_EQ(spin_system_from_json(read_json(fs::path(SPINCTL_DATA_DIR) / "three_spin.json")).n_spins(), 3);
}

TEST(SpinSystemJson, Diagnostics) {
  EXPECT_EQ(error_of([] { spin_system_from_json(json::parse(R"({"spins": []})"), "sys.json"); }),
            "sys.json: spins: at least one spin required");
  EXPECT_EQ(error_of([] {
              spin_system_from_json(json::parse(R"({"spins": [{"label": "a", "offset_hz": "x"}]})"), "sys.json");
            }).rfind("sys.json: spins[0]: offset_hz: expected a number", 0),
            0u);
  EXPECT_NE(error_of([] {
              spin_system_from_json(json::parse(R"({"spins": [{"label": "a", "offset_hz": 1}], "bogus": 1})"), "s");
            }).find("bogus: unknown field"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              spin_system_from_json(json::parse(
                  R"({"spins": [{"label": "a", "offset_hz": 1}, {"label": "b", "offset_hz": 2}],
                      "j_hz": [[0, 1], [2, 0]]})"));
            }).find("symmetric"),
            std::string::npos);
}

TEST(PulseJson, RoundTripIsExact) {
  PulseSequence seq;
  seq.name = "p";
  seq.target = "x90:1,2";
  seq.segments = {{1.234567890123e-5, 8765.4321, 2.718281828459045, -123.456}, {3e-5, 0.1, 0.0, 0.0}};
  const PulseSequence back = pulse_from_json(json::parse(to_json(seq).dump()));
  EXPECT_EQ(back.name, seq.name);
  EXPECT_EQ(back.target, seq.target);
  ASSERT_EQ(back.segments.size(), 2u);
  EXPECT_EQ(back.segments[0].duration_s, seq.segments[0].duration_s);
  EXPECT_EQ(back.segments[0].phase_rad, seq.segments[0].phase_rad);
  EXPECT_EQ(back.segments[0].carrier_offset_hz, seq.segments[0].carrier_offset_hz);
}

TEST(PulseJson, Diagnostics) {
  EXPECT_EQ(error_of([] { pulse_from_json(json::parse(R"({"name": "p"})"), "p.json"); }),
            "p.json: segments: missing");
  EXPECT_EQ(error_of([] {
              pulse_from_json(json::parse(R"({"segments": [{"duration_s": 1e-5, "amplitude_hz": 1}]})"), "p.json");
            }),
            "p.json: segments[0]: phase_rad: missing");
  EXPECT_NE(error_of([] {
              pulse_from_json(json::parse(
                                  R"({"target": "q90:1", "segments": [{"duration_s": 1e-5, "amplitude_hz": 1, "phase_rad": 0}]})"),
                              "p.json");
            }).find("p.json: target"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              pulse_from_json(json::parse(R"({"segments": [{"duration_s": -1, "amplitude_hz": 1, "phase_rad": 0}]})"),
                              "p.json");
            }).find("p.json"),
            std::string::npos);
}

TEST(DistributionJson, RoundTripAndBundledProfile) {
  const RfDistribution d = synthetic_profile();
  const RfDistribution back = distribution_from_json(to_json(d));
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.bins()[i].scale, d.bins()[i].scale);
    EXPECT_EQ(back.bins()[i].weight, d.bins()[i].weight);
  }
  const RfDistribution file = distribution_from_json(read_json(fs::path(SPINCTL_DATA_DIR) / "synthetic_profile.json"));
  EXPECT_LT(total_variation(d, file), 1e-12);
  EXPECT_NE(error_of([] { distribution_from_json(json::parse(R"({"bins": [{"scale": 1, "weight": 0.5}]})"), "d"); })
                .find("d: "),
            std::string::npos);
}

TEST(SearchConfigJson, RoundTripAndUnknownKeys) {
  SearchConfig c;
  c.n_segments = 7;
  c.rng_seed = 0xfedcba9876543210ull;
  c.fidelity_floor = 0.95;
  const SearchConfig back = search_config_from_json(to_json(c));
  EXPECT_EQ(back.n_segments, 7);
  EXPECT_EQ(back.rng_seed, c.rng_seed);
  EXPECT_EQ(back.fidelity_floor, 0.95);
  EXPECT_EQ(error_of([] { search_config_from_json(json::parse(R"({"segmnts": 3})"), "cfg"); }),
            "cfg: segmnts: unknown field");
  EXPECT_EQ(error_of([] { search_config_from_json(json::parse(R"({"n_segments": 2.5})"), "cfg"); }),
            "cfg: n_segments: expected an integer");
  for (const char* f : {"search_two_spin.json", "search_three_spin.json"}) {
    EXPECT_NO_THROW(search_config_from_json(read_json(fs::path(SPINCTL_DATA_DIR) / f))) << f;
  }
}

TEST(ReportJson, NullCorrelation) {
  MetricReport r;
  r.attenuation = 0.5;
  EXPECT_TRUE(to_json(r).at("correlation").is_null());
  r.correlation = 0.25;
  EXPECT_DOUBLE_EQ(to_json(r).at("correlation").get<double>(), 0.25);
}

TEST(Files, ReadJsonErrors) {
  const fs::path d = temp_dir();
  EXPECT_NE(error_of([&] { read_json(d / "missing.json"); }).find("cannot open"), std::string::npos);
  write_text(d / "bad.json", "{ nope");
  EXPECT_NE(error_of([&] { read_json(d / "bad.json"); }).find("invalid JSON"), std::string::npos);
  fs::remove_all(d);
}

TEST(Nutation, CsvRoundTrip) {
  const fs::path d = temp_dir();
  const std::vector<double> sig = {0.0, 0.25, -0.125, 1e-17};
  write_text(d / "n.csv", comment_block("made here") + nutation_csv(sig, 2e-6));
  const NutationData back = read_nutation_csv(d / "n.csv");
  EXPECT_EQ(back.signal, sig);
  EXPECT_NEAR(back.dwell_s, 2e-6, 1e-18);
  write_text(d / "uneven.csv", "t_s,amplitude\n0,1\n1e-6,2\n3e-6,3\n");
  EXPECT_NE(error_of([&] { read_nutation_csv(d / "uneven.csv"); }).find("uniformly"), std::string::npos);
  write_text(d / "junk.csv", "t_s,amplitude\n0,1\n1e-6,abc\n");
  EXPECT_NE(error_of([&] { read_nutation_csv(d / "junk.csv"); }).find("line 3"), std::string::npos);
  fs::remove_all(d);
}

TEST(Text, Helpers) {
  EXPECT_EQ(num(0.1), "0.1");
  EXPECT_EQ(std::stod(num(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(csv_field("x90:1"), "x90:1");
  EXPECT_EQ(csv_field("x90:1,2"), "\"x90:1,2\"");
  EXPECT_EQ(csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(comment_block("a\nb"), "# a\n# b\n");
}

TEST(Text, SpectrumCsv) {
  SpectrumReport r;
  r.exact = {cplx(1, 0), cplx(0.5, -0.5)};
  r.approx = {cplx(0.5, -0.5), cplx(1, 0)};
  r.pairing = {1, 0};
  const std::string csv = spectrum_csv(r);
  EXPECT_EQ(csv, "re_exact,im_exact,re_approx,im_approx,pair_index\n1,0,1,0,1\n0.5,-0.5,0.5,-0.5,0\n");
}
