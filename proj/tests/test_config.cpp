#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ioncv/analysis.hpp"
#include "ioncv/config.hpp"
#include "ioncv/error.hpp"

using namespace ioncv;
using nlohmann::json;

TEST(Config, HzConvertedToAngular) {
  const auto c = parse_bench_gate(json::parse(R"({"ion": {"trap_frequency_hz": 2.0e6, "rabi_frequency_hz": 5.0e4}})"));
  EXPECT_NEAR(c.spec.ion.modes[0].nu, 2.0 * kPi * 2.0e6, 1e-6);
  EXPECT_NEAR(c.spec.ion.rabi0, 2.0 * kPi * 5.0e4, 1e-9);
}

TEST(Config, Defaults) {
  const auto c = parse_bench_gate(json::object());
  EXPECT_EQ(c.spec.cutoff, 40);
  EXPECT_EQ(c.etas, (std::vector<double>{0.02, 0.05, 0.1, 0.15}));
  EXPECT_NEAR(default_ion().modes[0].nu, 2.0 * kPi * 3.0e6, 1e-6);
  const auto r = parse_regression(json::object());
  EXPECT_EQ(r.spec.layer_counts, (std::vector<int>{1, 2, 3, 4, 6}));
  EXPECT_EQ(r.spec.seeds, 11);
  EXPECT_EQ(r.spec.train.learning_rate, 0.001);
  const auto s = parse_state_prep(json::object());
  EXPECT_EQ(s.spec.inits, 30);
  EXPECT_EQ(s.spec.cutoff, 20);
}

TEST(Config, UnknownKeyRejected) {
  try {
    parse_bench_gate(json::parse(R"({"cutof": 40})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cutof"), std::string::npos);
  }
  EXPECT_THROW(parse_bench_gate(json::parse(R"({"ion": {"trap_freq": 1.0}})")), ConfigError);
  EXPECT_THROW(parse_regression(json::parse(R"({"train": {"lr": 0.1}})")), ConfigError);
  EXPECT_THROW(parse_wigner(json::parse(R"({"state": {"kind": "fock", "m": 2}})")), ConfigError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_gate(json::parse(R"({"kind": "teleport"})")), ConfigError);
  EXPECT_THROW(parse_bench_gate(json::parse(R"({"cutoff": "forty"})")), ConfigError);
  EXPECT_THROW(parse_regression(json::parse(R"({"target": "cosine"})")), ConfigError);
  EXPECT_THROW(parse_bench_gate(json::parse(R"({"experiment": "wigner"})")), ConfigError);
  EXPECT_THROW(parse_bench_gate(json::parse(R"({"mode": "quantum"})")), ConfigError);
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_config_file("/nonexistent/run.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/run.json"), std::string::npos);
  }
}

TEST(Config, GateKinds) {
  EXPECT_EQ(gate_name(parse_gate(json::parse(R"({"kind": "kerr", "tau": 1.0})"))), gate_name(gate::Kerr{1.0}));
  const GateSpec d = parse_gate(json::parse(R"({"kind": "displace", "alpha_re": 1.0, "alpha_im": -2.0})"));
  ASSERT_TRUE(std::holds_alternative<gate::Displace>(d));
  EXPECT_EQ(std::get<gate::Displace>(d).alpha, cplx(1.0, -2.0));
}

TEST(Config, WignerStates) {
  const auto w = parse_wigner(json::parse(R"({"state": {"kind": "fock", "n": 2}, "cutoff": 10})"));
  EXPECT_NEAR(mean_phonon(w.state.state(w.cutoff)), 2.0, 1e-15);
  const auto c = parse_wigner(json::parse(R"({"state": {"kind": "cat", "alpha_re": 2.0, "parity": "odd"}})"));
  const FockVector cat = c.state.state(c.cutoff);
  EXPECT_NEAR(std::norm(cat[0]), 0.0, 1e-20);
  EXPECT_NEAR(cat.norm(), 1.0, 1e-12);
}
