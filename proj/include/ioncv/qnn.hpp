#pragma once

// Single-mode continuous-variable neural network: displacement encoding,
// layers of Phase → Squeeze → Phase → Displace → Kerr, quadrature readout.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ioncv/fock.hpp"
#include "ioncv/ion_model.hpp"

namespace ioncv {

struct QnnLayerParams {
  double theta = 0.0;
  double beta_r = 0.0;
  double beta_phi = 0.0;
  double phi = 0.0;
  double alpha_re = 0.0;
  double alpha_im = 0.0;
  double tau = 0.0;

  static constexpr std::size_t kCount = 7;
  static const char* name(std::size_t i);
  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;

  // Gates of the layer in application order.
  std::vector<GateSpec> gates() const;
};

enum class Readout { ExpectationX, State };

struct QnnModel {
  std::vector<QnnLayerParams> layers;
  int cutoff = 30;
  Readout readout = Readout::ExpectationX;

  std::size_t parameter_count() const { return layers.size() * QnnLayerParams::kCount; }
  Eigen::VectorXd flat() const;
  void set_flat(const Eigen::VectorXd& p);
  // Negative squeeze magnitudes folded into the squeeze phase.
  QnnModel canonical() const;
  void validate() const;
};

// Draws layer parameters uniformly: phases in [−π, π], r in [0, 0.2],
// displacement components in [−0.5, 0.5], τ in [−0.2, 0.2].
QnnModel random_model(std::size_t layers, int cutoff, std::uint64_t seed);

enum class ForwardMode { Ideal, Effective, Full };

ForwardMode parse_forward_mode(const std::string& s);
std::string to_string(ForwardMode m);

struct PhysicalOptions {
  IonConfig ion;
  long long initial_substeps = 256;
  double tolerance = 1e-9;
};

struct ForwardResult {
  FockVector state;  // mode state (ideal) or spin ⊗ mode state
  double max_leakage = 0.0;
  std::vector<std::string> warnings;
};

// coherent(x); throws CutoffTooSmall when the encoding leaks.
FockVector encode(double x, int cutoff);

ForwardResult forward(const QnnModel& model, const FockVector& input,
                      ForwardMode mode = ForwardMode::Ideal,
                      const std::optional<PhysicalOptions>& physical = std::nullopt);

// <X> of the output of forward(model, encode(x)).
double predict(const QnnModel& model, double x, ForwardMode mode = ForwardMode::Ideal,
               const std::optional<PhysicalOptions>& physical = std::nullopt);

double mse_loss(const Eigen::VectorXd& preds, const Eigen::VectorXd& targets);
double fidelity_loss(const FockVector& state, const FockVector& target);

// Central differences; throws NonFiniteLoss naming the coordinate.
Eigen::VectorXd grad_fd(const std::function<double(const Eigen::VectorXd&)>& loss_at,
                        const Eigen::VectorXd& params, double fd_step);

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iters = 2000;
  double fd_step = 1e-4;
  std::uint64_t seed = 0;
  bool random_init = true;  // draw initial parameters from seed

  void validate() const;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long long t = 0;
};

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
               const TrainConfig& cfg);

struct RegressionData {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

struct StatePrepTarget {
  FockVector target;
};

using Objective = std::variant<RegressionData, StatePrepTarget>;

// Loss of the ideal-mode model on the objective.
double objective_loss(const QnnModel& model, const Objective& objective);
// FD gradient of objective_loss, evaluated with cached partial products.
Eigen::VectorXd objective_gradient(const QnnModel& model, const Objective& objective,
                                   double fd_step, double* loss = nullptr);

struct TrainResult {
  QnnModel model;
  std::vector<double> loss_history;  // loss before each update, then the final loss
};

// Throws TrainingDiverged when the loss becomes non-finite.
TrainResult train(const QnnModel& model, const Objective& objective, const TrainConfig& cfg);

nlohmann::json model_to_json(const QnnModel& model, std::uint64_t seed, long long iterations);
QnnModel model_from_json(const nlohmann::json& j);

}  // namespace ioncv
