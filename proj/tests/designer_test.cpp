#include <gtest/gtest.h>

#include <cstdlib>

#include "spinctl/designer.hpp"
#include "spinctl/errors.hpp"
#include "spinctl/gates.hpp"
#include "spinctl/metrics.hpp"
#include "test_support.hpp"

using namespace spinctl;

namespace {

SearchConfig small_config() {
  SearchConfig c;
  c.n_segments = 2;
  c.n_restarts = 3;
  c.max_iterations = 300;
  c.threads = 1;
  return c;
}

bool same_sequence(const PulseSequence& a, const PulseSequence& b) {
  if (a.segments.size() != b.segments.size()) return false;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    const auto& x = a.segments[i];
    const auto& y = b.segments[i];
    if (x.duration_s != y.duration_s || x.amplitude_hz != y.amplitude_hz || x.phase_rad != y.phase_rad ||
        x.carrier_offset_hz != y.carrier_offset_hz) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(SearchConfig, Validation) {
  SearchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_segments = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.convergence_tol = 1e-2;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.fidelity_floor = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.max_amplitude_hz = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.threads = -1;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Codec, RoundTrip) {
  SearchConfig c;
  c.n_segments = 3;
  const SpinSystem sys = SpinSystem::uncoupled({800.0, -1200.0});
  const ParameterCodec codec(c, sys);
  EXPECT_EQ(codec.size(), 12u);
  EXPECT_DOUBLE_EQ(codec.carrier_bound_hz(), 12000.0);
  PulseSequence seq;
  seq.segments = {{1e-4, 2500.0, 0.4, -3000.0}, {2.5e-4, 9000.0, 5.9, 100.0}, {3e-5, 10.0, -1.0, 11000.0}};
  const PulseSequence back = codec.decode(codec.encode(seq));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(back.segments[i].duration_s / seq.segments[i].duration_s, 1.0, 1e-12);
    EXPECT_NEAR(back.segments[i].amplitude_hz / seq.segments[i].amplitude_hz, 1.0, 1e-12);
    EXPECT_NEAR(back.segments[i].phase_rad, seq.segments[i].phase_rad, 1e-12);
    EXPECT_NEAR(back.segments[i].carrier_offset_hz / seq.segments[i].carrier_offset_hz, 1.0, 1e-12);
  }
  EXPECT_THROW(codec.encode(PulseSequence{}), ValidationError);
  EXPECT_THROW(codec.decode(Eigen::VectorXd::Zero(5)), ValidationError);
}

TEST(Codec, DecodedValuesStayInBounds) {
  SearchConfig c;
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  const ParameterCodec codec(c, sys);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(codec.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
    for (const auto& s : codec.decode(v).segments) {
      EXPECT_GE(s.amplitude_hz, 0.0);
      EXPECT_LE(s.amplitude_hz, c.max_amplitude_hz);
      EXPECT_GE(s.duration_s, 0.0);
      EXPECT_LE(s.duration_s, c.max_duration_s / c.n_segments);
      EXPECT_LE(std::abs(s.carrier_offset_hz), codec.carrier_bound_hz());
    }
  }
}

TEST(Objective, ContinuousInParameters) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  const SearchConfig c = small_config();
  const DesignObjective obj(gate_unitary("x90:1", 1), sys, synthetic_profile(), c);
  EXPECT_TRUE(obj.compensated());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(obj.codec().size(), 0.3);
  const double f0 = obj(v);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Eigen::VectorXd w = v;
    w(i) += 1e-7;
    EXPECT_LT(std::abs(obj(w) - f0), 1e-4);
  }
}

TEST(Objective, PenaltyAndFidelity) {
  const SpinSystem sys = SpinSystem::uncoupled({0.0});
  SearchConfig c = small_config();
  c.duration_penalty_weight = 0.5;
  const DesignObjective obj(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  // Two on-resonance eighth turns make an exact x90.
  PulseSequence seq;
  seq.segments = {{2e-4, 625.0, 0.0, 0.0}, {2e-4, 625.0, 0.0, 0.0}};
  EXPECT_NEAR(obj.fidelity(seq), 1.0, 1e-12);
  EXPECT_NEAR(obj(obj.codec().encode(seq)), 0.5 * 4e-4 / c.max_duration_s, 1e-9);
  EXPECT_THROW(DesignObjective(identity(4), sys, std::nullopt, c), ValidationError);
  EXPECT_THROW(DesignObjective(2.0 * identity(2), sys, std::nullopt, c), ValidationError);
}

TEST(Design, DeterministicForSeed) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  const SearchConfig c = small_config();
  const auto a = design_pulse(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  const auto b = design_pulse(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  EXPECT_TRUE(same_sequence(a.sequence, b.sequence));
  EXPECT_EQ(a.fidelity, b.fidelity);
  EXPECT_EQ(a.objective_history, b.objective_history);
}

TEST(Design, IndependentOfThreadCount) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  SearchConfig c = small_config();
  const auto serial = design_pulse(gate_unitary("y90:1", 1), sys, std::nullopt, c);
  c.threads = 3;
  const auto parallel = design_pulse(gate_unitary("y90:1", 1), sys, std::nullopt, c);
  EXPECT_TRUE(same_sequence(serial.sequence, parallel.sequence));
  EXPECT_EQ(serial.best_restart, parallel.best_restart);
  EXPECT_EQ(serial.evaluations, parallel.evaluations);
}

TEST(Design, SeedChangesResult) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  SearchConfig c = small_config();
  const auto a = design_pulse(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  c.rng_seed = 99;
  const auto b = design_pulse(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  EXPECT_FALSE(same_sequence(a.sequence, b.sequence));
}

TEST(Design, SingleBinMatchesCoherentDesign) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  const SearchConfig c = small_config();
  const auto coherent = design_pulse(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  const auto one_bin = design_pulse(gate_unitary("x90:1", 1), sys, RfDistribution::delta(1.0), c);
  EXPECT_TRUE(same_sequence(coherent.sequence, one_bin.sequence));
  EXPECT_NEAR(coherent.fidelity, one_bin.fidelity, 1e-14);
  EXPECT_FALSE(coherent.compensated);
  EXPECT_TRUE(one_bin.compensated);
}

TEST(Design, ReportedFidelityIsReproducible) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  const SearchConfig c = small_config();
  const RfDistribution dist = synthetic_profile();
  const auto r = design_pulse(gate_unitary("x90:1", 1), sys, dist, c);
  EXPECT_NEAR(gate_fidelity_trace(gate_unitary("x90:1", 1), kraus_set(sys, r.sequence, dist)), r.fidelity, 1e-12);
  EXPECT_EQ(r.converged, r.fidelity >= c.fidelity_floor);
  EXPECT_EQ(r.restarts_used, c.n_restarts);
  for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
    EXPECT_LE(r.objective_history[i], r.objective_history[i - 1]);
  }
}

TEST(Design, OneSpinReachesHighFidelity) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  SearchConfig c;
  c.threads = 1;
  const auto r = design_pulse(gate_unitary("x90:1", 1), sys, std::nullopt, c);
  EXPECT_GE(r.fidelity, 0.999);
  EXPECT_TRUE(r.converged);
}

TEST(Threads, Resolution) {
  EXPECT_EQ(resolve_thread_count(3), 3);
  ::setenv("SPINCTL_THREADS", "5", 1);
  EXPECT_EQ(resolve_thread_count(0), 5);
  ::unsetenv("SPINCTL_THREADS");
  EXPECT_GE(resolve_thread_count(0), 1);
}

TEST(Sweeps, RfScale) {
  const SpinSystem sys = SpinSystem::uncoupled({0.0});
  PulseSequence seq;
  seq.segments = {{2e-4, 625.0, 0.0, 0.0}, {2e-4, 625.0, 0.0, 0.0}};
  const auto curve = sweep_rf_scale(seq, gate_unitary("x90:1", 1), sys, {0.9, 1.0, 1.1});
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_NEAR(curve[1].second, 1.0, 1e-12);
  // Rotation error of 0.1 * pi/2 gives cos^2(pi / 40).
  EXPECT_NEAR(curve[0].second, std::pow(std::cos(kPi / 40), 2), 1e-12);
  EXPECT_NEAR(curve[2].second, curve[0].second, 1e-12);
  EXPECT_THROW(sweep_rf_scale(seq, gate_unitary("x90:1", 1), sys, {0.0}), ValidationError);
}

TEST(Sweeps, ProfileWidth) {
  const SpinSystem sys = SpinSystem::uncoupled({0.0});
  PulseSequence seq;
  seq.segments = {{4e-4, 625.0, 0.0, 0.0}};
  const RfDistribution dist = synthetic_profile();
  const auto curve = sweep_profile_width(seq, gate_unitary("x90:1", 1), sys, dist, {0.0, 1.0, 2.0});
  ASSERT_EQ(curve.size(), 3u);
  const double mean = dist.mean_scale();
  EXPECT_NEAR(curve[0].second, std::pow(std::cos((mean - 1.0) * kPi / 4), 2), 1e-12);
  EXPECT_GT(curve[1].second, curve[2].second);
}

TEST(Sweeps, PowerFieldGrid) {
  const SpinSystem sys = SpinSystem::uncoupled({500.0});
  SearchConfig c = small_config();
  c.n_restarts = 1;
  c.max_iterations = 100;
  const auto grid = sweep_power_field(gate_unitary("x90:1", 1), sys, {0.5, 1.0}, {2000.0, 8000.0}, c);
  ASSERT_EQ(grid.points.size(), 4u);
  EXPECT_DOUBLE_EQ(grid.points[1].b0_factor, 0.5);
  EXPECT_DOUBLE_EQ(grid.points[1].max_amplitude_hz, 8000.0);
  EXPECT_DOUBLE_EQ(grid.points[2].b0_factor, 1.0);
}
