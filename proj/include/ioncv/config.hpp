#pragma once

// Run configuration files. JSON objects; unknown keys are rejected.
// Frequencies are given in Hz and converted to rad/s on load.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioncv/experiments.hpp"

namespace ioncv {

struct CommonOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_dir = ".";
  std::optional<std::string> mode;  // ideal | effective | physical
};

struct BenchGateConfig {
  CommonOptions common;
  BenchmarkSpec spec;
  std::vector<double> etas;  // empty: single run at the configured η
};

struct RegressionConfig {
  CommonOptions common;
  RegressionSpec spec;
  IonConfig ion;
  int physical_points = 11;
};

struct StatePrepConfig {
  CommonOptions common;
  StatePrepSpec spec;
  IonConfig ion;
};

struct StateDescription {
  std::string kind = "vacuum";  // vacuum | fock | coherent | cat | squeezed | random
  int n = 0;
  cplx alpha = 0.0;
  double r = 0.0;
  double phi = 0.0;
  std::string parity = "even";
  std::uint64_t seed = 1;
  double envelope_sigma = 5.0;

  FockVector state(int cutoff) const;
  nlohmann::json to_json() const;
};

struct WignerConfig {
  CommonOptions common;
  StateDescription state;
  int cutoff = 40;
  GridSpec grid;
};

struct ValidateConfig {
  CommonOptions common;
};

// Throws ConfigError naming the path when the file is missing or malformed.
nlohmann::json load_config_file(const std::string& path);

BenchGateConfig parse_bench_gate(const nlohmann::json& j);
RegressionConfig parse_regression(const nlohmann::json& j);
StatePrepConfig parse_state_prep(const nlohmann::json& j);
WignerConfig parse_wigner(const nlohmann::json& j);
ValidateConfig parse_validate(const nlohmann::json& j);

IonConfig default_ion();
GateSpec parse_gate(const nlohmann::json& j);

// Reference text for every accepted key.
const char* config_reference();

}  // namespace ioncv
