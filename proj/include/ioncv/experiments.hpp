#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioncv/analysis.hpp"
#include "ioncv/fock.hpp"
#include "ioncv/ion_model.hpp"
#include "ioncv/qnn.hpp"

namespace ioncv {

// splitmix64 over the base seed and cell indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> cell);

// Runs fn(0..n−1) on up to `threads` workers. Exceptions are rethrown
// after all workers finish (lowest index first).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

struct TargetStateSpec {
  Vector amplitudes;
  std::uint64_t seed = 0;
  double envelope_sigma = 5.0;

  FockVector state(int cutoff) const;
};

// c_i = u_i·exp(−i²/(2σ²)), u_i uniform on [−1, 1]², normalized.
TargetStateSpec random_target_state(std::uint64_t seed, double envelope_sigma = 5.0, int size = 20);

struct RunRecord {
  std::string experiment;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  nlohmann::json traces = nlohmann::json::object();
  nlohmann::json metrics = nlohmann::json::object();
  double wall_time = 0.0;

  nlohmann::json to_json() const;
  // Everything except wall_time.
  nlohmann::json reproducible_json() const;
};

enum class Dynamics { Full, Effective };

struct BenchmarkSpec {
  GateSpec gate;
  IonConfig ion;
  std::string initial = "vacuum";  // "vacuum" or "coherent"
  cplx initial_alpha = 0.0;
  int cutoff = 40;
  int samples = 20;
  Dynamics dynamics = Dynamics::Full;
  bool with_wigner = false;
  GridSpec grid;
  long long initial_substeps = 256;
  double tolerance = 1e-9;
};

struct BenchmarkResult {
  RunRecord record;
  double final_fidelity = 0.0;
  double max_leakage = 0.0;
  bool reliable = true;
  std::optional<WignerGrid> wigner_final;
  std::optional<WignerGrid> wigner_target;
};

nlohmann::json benchmark_config_json(const BenchmarkSpec& spec);

// Evolves |+> ⊗ initial for the gate's pulse and samples the fidelity of
// the spin-reduced state against the ideal gate scaled by t/duration.
BenchmarkResult gate_benchmark(const BenchmarkSpec& spec);

// One benchmark per η (applied to every mode).
std::vector<BenchmarkResult> gate_benchmark_sweep(const BenchmarkSpec& spec,
                                                  const std::vector<double>& etas, int threads = 1);

enum class TargetFunction { Sine, Heaviside };
TargetFunction parse_target_function(const std::string& s);
std::string to_string(TargetFunction f);
double evaluate_target(TargetFunction f, double x);

struct RegressionSpec {
  TargetFunction target = TargetFunction::Sine;
  std::vector<int> layer_counts{1, 2, 3, 4, 6};
  int seeds = 11;
  int n_train = 50;
  int n_test = 50;
  double x_min = -1.0;
  double x_max = 1.0;
  int cutoff = 30;
  TrainConfig train;  // seed field is the base seed
  int threads = 1;
};

struct RegressionSummary {
  std::vector<int> layer_counts;
  std::vector<double> mean_mse;
  std::vector<double> std_mse;
  std::vector<std::vector<double>> mse;  // [layer][seed]
  std::vector<QnnModel> best_models;     // lowest test MSE per layer count
  std::vector<std::uint64_t> best_seeds;
};

RunRecord regression_experiment(const RegressionSpec& spec, RegressionSummary* summary = nullptr);

struct StatePrepSpec {
  std::vector<std::uint64_t> target_seeds{1};
  double envelope_sigma = 5.0;
  bool vacuum_target = false;
  std::vector<int> layer_counts{1, 2, 3};
  int inits = 30;
  int cutoff = 20;
  TrainConfig train;  // seed field is the base seed
  int threads = 1;
  bool with_wigner = true;
  GridSpec grid;
};

struct StatePrepSummary {
  std::vector<int> layer_counts;
  std::vector<std::vector<std::vector<double>>> fidelity;  // [target][layer][init]
  std::vector<double> max_fidelity;                        // [layer], over targets and inits
  double best_fidelity = 0.0;
  QnnModel best_model;
  std::uint64_t best_seed = 0;
  Vector best_target;
  Vector best_state;
  std::optional<WignerGrid> wigner_target;
  std::optional<WignerGrid> wigner_prepared;
};

RunRecord state_prep_experiment(const StatePrepSpec& spec, StatePrepSummary* summary = nullptr);

}  // namespace ioncv
