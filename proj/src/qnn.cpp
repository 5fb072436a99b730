#include "ioncv/qnn.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "ioncv/analysis.hpp"
#include "ioncv/error.hpp"
#include "ioncv/evolution.hpp"
#include "ioncv/gates.hpp"

namespace ioncv {

namespace {

constexpr const char* kParamNames[QnnLayerParams::kCount] = {"theta", "beta_r", "beta_phi", "phi",
                                                            "alpha_re", "alpha_im", "tau"};
constexpr double kLeakWarn = 1e-3;

}  // namespace

const char* QnnLayerParams::name(std::size_t i) { return kParamNames[i]; }

double& QnnLayerParams::operator[](std::size_t i) {
  switch (i) {
    case 0: return theta;
    case 1: return beta_r;
    case 2: return beta_phi;
    case 3: return phi;
    case 4: return alpha_re;
    case 5: return alpha_im;
    case 6: return tau;
  }
  throw InvalidDimension("layer parameter index out of range");
}

double QnnLayerParams::operator[](std::size_t i) const {
  return const_cast<QnnLayerParams&>(*this)[i];
}

std::vector<GateSpec> QnnLayerParams::gates() const {
  return {gate::Phase{theta}, gate::Squeeze{beta_r, beta_phi}, gate::Phase{phi},
          gate::Displace{cplx(alpha_re, alpha_im)}, gate::Kerr{tau}};
}

Eigen::VectorXd QnnModel::flat() const {
  Eigen::VectorXd p(parameter_count());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t j = 0; j < QnnLayerParams::kCount; ++j) p[l * QnnLayerParams::kCount + j] = layers[l][j];
  }
  return p;
}

void QnnModel::set_flat(const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != parameter_count()) {
    throw InvalidDimension("parameter vector length does not match the model");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t j = 0; j < QnnLayerParams::kCount; ++j) layers[l][j] = p[l * QnnLayerParams::kCount + j];
  }
}

QnnModel QnnModel::canonical() const {
  QnnModel m = *this;
  for (auto& l : m.layers) {
    if (l.beta_r < 0.0) {
      l.beta_r = -l.beta_r;
      l.beta_phi = std::remainder(l.beta_phi + kPi, 2.0 * kPi);
    }
  }
  return m;
}

void QnnModel::validate() const {
  if (layers.empty()) throw ConfigError("model needs at least one layer");
  if (cutoff < 2) throw InvalidDimension("cutoff must be at least 2");
  for (const auto& l : layers) {
    for (std::size_t j = 0; j < QnnLayerParams::kCount; ++j) {
      if (!std::isfinite(l[j])) throw ConfigError("layer parameters must be finite");
    }
  }
}

QnnModel random_model(std::size_t layers, int cutoff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::uniform_real_distribution<double> squeeze(0.0, 0.2);
  std::uniform_real_distribution<double> disp(-0.5, 0.5);
  std::uniform_real_distribution<double> kerr(-0.2, 0.2);
  QnnModel m;
  m.cutoff = cutoff;
  for (std::size_t l = 0; l < layers; ++l) {
    QnnLayerParams p;
    p.theta = phase(rng);
    p.beta_r = squeeze(rng);
    p.beta_phi = phase(rng);
    p.phi = phase(rng);
    p.alpha_re = disp(rng);
    p.alpha_im = disp(rng);
    p.tau = kerr(rng);
    m.layers.push_back(p);
  }
  return m;
}

ForwardMode parse_forward_mode(const std::string& s) {
  if (s == "ideal") return ForwardMode::Ideal;
  if (s == "effective") return ForwardMode::Effective;
  if (s == "physical" || s == "full") return ForwardMode::Full;
  throw ConfigError("unknown forward mode '" + s + "' (expected ideal, effective or physical)");
}

std::string to_string(ForwardMode m) {
  switch (m) {
    case ForwardMode::Ideal: return "ideal";
    case ForwardMode::Effective: return "effective";
    case ForwardMode::Full: return "physical";
  }
  return "?";
}

FockVector encode(double x, int cutoff) { return coherent(cplx(x, 0.0), cutoff); }

namespace {

// One of the five gates of a layer, as a diagonal or dense matrix.
struct Factor {
  bool diagonal = true;
  Vector d;
  Matrix m;

  void apply(Matrix& x) const {
    if (diagonal) {
      x = d.asDiagonal() * x;
    } else {
      x = m * x;
    }
  }
  // G† S G for an observable, G† w for a bra column.
  Matrix pull_back(const Matrix& s, bool observable) const {
    if (diagonal) {
      if (!observable) return d.conjugate().asDiagonal() * s;
      return d.conjugate().asDiagonal() * s * d.asDiagonal();
    }
    if (!observable) return m.adjoint() * s;
    return m.adjoint() * s * m;
  }
};

constexpr int kFactorsPerLayer = 5;
constexpr int kFactorOf[QnnLayerParams::kCount] = {0, 1, 1, 2, 3, 3, 4};

Factor build_factor(const SingleModeGates& kit, const QnnLayerParams& p, int which) {
  Factor f;
  switch (which) {
    case 0: f.d = kit.phase(p.theta); break;
    case 1: f.diagonal = false; f.m = kit.squeeze(p.beta_r, p.beta_phi); break;
    case 2: f.d = kit.phase(p.phi); break;
    case 3: f.diagonal = false; f.m = kit.displace(cplx(p.alpha_re, p.alpha_im)); break;
    default: f.d = kit.kerr(p.tau); break;
  }
  return f;
}

Matrix quadrature_x(int n) { return quadrature(n, Quadrature::X).matrix; }

// Objective-specific pieces: batch of inputs, terminal suffix and loss.
class Evaluator {
 public:
  Evaluator(const QnnModel& model, const Objective& objective)
      : objective_(objective), kit_(model.cutoff) {
    model.validate();
    if (const auto* r = std::get_if<RegressionData>(&objective)) {
      if (r->x.size() != r->y.size() || r->x.size() == 0) {
        throw InvalidDimension("regression inputs and targets must be non-empty and equal length");
      }
      input_.resize(model.cutoff, r->x.size());
      for (Eigen::Index i = 0; i < r->x.size(); ++i) input_.col(i) = encode(r->x[i], model.cutoff).amplitudes();
      observable_ = true;
      terminal_ = quadrature_x(model.cutoff);
    } else {
      const auto& t = std::get<StatePrepTarget>(objective).target;
      if (!(t.layout() == Layout::mode(model.cutoff))) {
        throw LayoutMismatch("target state does not match the model cutoff");
      }
      input_ = fock_state(0, model.cutoff).amplitudes();
      observable_ = false;
      terminal_ = t.amplitudes();
    }
  }

  const SingleModeGates& kit() const { return kit_; }
  const Matrix& input() const { return input_; }
  const Matrix& terminal() const { return terminal_; }
  bool observable() const { return observable_; }

  // Loss of states `x` measured with suffix `s`.
  double loss(const Matrix& x, const Matrix& s) const {
    if (observable_) {
      const auto& y = std::get<RegressionData>(objective_).y;
      const Matrix sx = s * x;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.cols(); ++i) {
        const double pred = x.col(i).dot(sx.col(i)).real();
        const double e = pred - y[i];
        acc += e * e;
      }
      return acc / static_cast<double>(x.cols());
    }
    const double f = std::norm(s.col(0).dot(x.col(0)));
    return (1.0 - f) * (1.0 - f);
  }

 private:
  const Objective& objective_;
  SingleModeGates kit_;
  Matrix input_;
  Matrix terminal_;
  bool observable_ = false;
};

double loss_with(const Evaluator& ev, const QnnModel& model) {
  Matrix x = ev.input();
  for (const auto& layer : model.layers) {
    for (int k = 0; k < kFactorsPerLayer; ++k) build_factor(ev.kit(), layer, k).apply(x);
  }
  return ev.loss(x, ev.terminal());
}

Eigen::VectorXd gradient_with(const Evaluator& ev, const QnnModel& model, double fd_step,
                              double* loss) {
  const std::size_t nf = model.layers.size() * kFactorsPerLayer;
  std::vector<Factor> factors;
  factors.reserve(nf);
  for (const auto& layer : model.layers) {
    for (int k = 0; k < kFactorsPerLayer; ++k) factors.push_back(build_factor(ev.kit(), layer, k));
  }
  // states[f]: input to factor f; suffix[f]: measurement after factor f.
  std::vector<Matrix> states(nf + 1);
  states[0] = ev.input();
  for (std::size_t f = 0; f < nf; ++f) {
    states[f + 1] = states[f];
    factors[f].apply(states[f + 1]);
  }
  std::vector<Matrix> suffix(nf);
  suffix[nf - 1] = ev.terminal();
  for (std::size_t f = nf - 1; f > 0; --f) suffix[f - 1] = factors[f].pull_back(suffix[f], ev.observable());
  if (loss) *loss = ev.loss(states[nf], suffix[nf - 1]);

  Eigen::VectorXd g(model.parameter_count());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (std::size_t j = 0; j < QnnLayerParams::kCount; ++j) {
      const std::size_t f = l * kFactorsPerLayer + kFactorOf[j];
      double side[2];
      for (int s = 0; s < 2; ++s) {
        QnnLayerParams p = model.layers[l];
        p[j] += (s == 0 ? fd_step : -fd_step);
        Matrix x = states[f];
        build_factor(ev.kit(), p, kFactorOf[j]).apply(x);
        side[s] = ev.loss(x, suffix[f]);
      }
      const std::size_t idx = l * QnnLayerParams::kCount + j;
      if (!std::isfinite(side[0]) || !std::isfinite(side[1])) {
        throw NonFiniteLoss("non-finite loss at coordinate " + std::to_string(idx), idx);
      }
      g[idx] = (side[0] - side[1]) / (2.0 * fd_step);
    }
  }
  return g;
}

}  // namespace

double objective_loss(const QnnModel& model, const Objective& objective) {
  return loss_with(Evaluator(model, objective), model);
}

Eigen::VectorXd objective_gradient(const QnnModel& model, const Objective& objective,
                                   double fd_step, double* loss) {
  return gradient_with(Evaluator(model, objective), model, fd_step, loss);
}

namespace {

FockVector plus_spin() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return FockVector(v, Layout({2}, true));
}

// exp(iωt·n) on the mode factor of a spin ⊗ mode state.
FockVector rotate_mode(const FockVector& psi, double angle) {
  const int n = psi.layout().cutoff();
  Vector v = psi.amplitudes();
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < n; ++k) v[s * n + k] *= std::polar(1.0, angle * k);
  }
  return FockVector(v, psi.layout());
}

FockVector apply_physical_gate(const GateSpec& g, const FockVector& psi, ForwardMode mode,
                               const PhysicalOptions& opts) {
  const GatePulse pulse = gate_time_and_drive(g, opts.ion);
  if (pulse.duration == 0.0) return psi;
  const std::vector<int> cutoffs{psi.layout().cutoff()};
  if (mode == ForwardMode::Effective) {
    return propagate_const(effective_hamiltonian(g, opts.ion, cutoffs), pulse.duration, psi);
  }
  IonKernel kernel(std::make_shared<IonStepper>(opts.ion, pulse.drive, cutoffs));
  const auto ev = evolve_periodic(kernel, {pulse.duration}, psi, opts.initial_substeps, opts.tolerance);
  if (!std::holds_alternative<gate::Kerr>(g)) return ev.states.back();
  // Kerr pulses are read out in the frame of the dressed phonon frequency.
  const double w = dressed_phonon_frequency(kernel, ev.substeps);
  return rotate_mode(ev.states.back(), w * pulse.duration);
}

}  // namespace

ForwardResult forward(const QnnModel& model, const FockVector& input, ForwardMode mode,
                      const std::optional<PhysicalOptions>& physical) {
  model.validate();
  if (!(input.layout() == Layout::mode(model.cutoff))) {
    throw LayoutMismatch("input state does not match the model cutoff");
  }
  if (mode == ForwardMode::Ideal) {
    SingleModeGates kit(model.cutoff);
    Matrix x = input.amplitudes();
    ForwardResult res{input, 0.0, {}};
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      for (int k = 0; k < kFactorsPerLayer; ++k) build_factor(kit, model.layers[l], k).apply(x);
      const double leak = top_level_population(x.col(0), input.layout());
      res.max_leakage = std::max(res.max_leakage, leak);
      if (leak > kLeakWarn) {
        res.warnings.push_back("layer " + std::to_string(l) + ": leakage " + std::to_string(leak));
      }
    }
    res.state = FockVector(x.col(0), input.layout());
    return res;
  }
  if (!physical) throw ConfigError("physical forward modes need ion parameters");
  physical->ion.validate();
  FockVector psi = tensor(plus_spin(), input);
  ForwardResult res{psi, 0.0, {}};
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (const auto& g : model.layers[l].gates()) psi = apply_physical_gate(g, psi, mode, *physical);
    const double leak = top_level_population(psi.amplitudes(), psi.layout());
    res.max_leakage = std::max(res.max_leakage, leak);
    if (leak > kLeakWarn) {
      res.warnings.push_back("layer " + std::to_string(l) + ": leakage " + std::to_string(leak));
    }
  }
  res.state = psi;
  return res;
}

double predict(const QnnModel& model, double x, ForwardMode mode,
               const std::optional<PhysicalOptions>& physical) {
  const ForwardResult r = forward(model, encode(x, model.cutoff), mode, physical);
  const DenseOperator xq = quadrature(model.cutoff, Quadrature::X);
  if (mode == ForwardMode::Ideal) return expectation(xq, r.state).real();
  return expectation(xq, reduce_to_mode(r.state)).real();
}

double mse_loss(const Eigen::VectorXd& preds, const Eigen::VectorXd& targets) {
  if (preds.size() != targets.size() || preds.size() == 0) {
    throw InvalidDimension("predictions and targets must be non-empty and equal length");
  }
  return (preds - targets).squaredNorm() / static_cast<double>(preds.size());
}

double fidelity_loss(const FockVector& state, const FockVector& target) {
  const double f = fidelity(state, target);
  return (1.0 - f) * (1.0 - f);
}

Eigen::VectorXd grad_fd(const std::function<double(const Eigen::VectorXd&)>& loss_at,
                        const Eigen::VectorXd& params, double fd_step) {
  Eigen::VectorXd g(params.size());
  Eigen::VectorXd p = params;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    p[i] = params[i] + fd_step;
    const double up = loss_at(p);
    p[i] = params[i] - fd_step;
    const double down = loss_at(p);
    p[i] = params[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NonFiniteLoss("non-finite loss at coordinate " + std::to_string(i),
                          static_cast<std::size_t>(i));
    }
    g[i] = (up - down) / (2.0 * fd_step);
  }
  return g;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam decay rates must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
  if (!(fd_step > 0.0)) throw ConfigError("fd_step must be positive");
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state,
               const TrainConfig& cfg) {
  if (grads.size() != params.size()) throw InvalidDimension("gradient length does not match parameters");
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const Eigen::ArrayXd mhat = state.m.array() / c1;
  const Eigen::ArrayXd vhat = state.v.array() / c2;
  params.array() -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.epsilon);
}

TrainResult train(const QnnModel& model, const Objective& objective, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult res;
  res.model = cfg.random_init ? random_model(model.layers.size(), model.cutoff, cfg.seed) : model;
  res.model.readout = model.readout;
  res.model.validate();
  Eigen::VectorXd p = res.model.flat();
  AdamState adam;
  const Evaluator ev(res.model, objective);
  res.loss_history.reserve(cfg.max_iters + 1);
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.model.set_flat(p);
    double loss = 0.0;
    Eigen::VectorXd g;
    try {
      g = gradient_with(ev, res.model, cfg.fd_step, &loss);
    } catch (const NonFiniteLoss&) {
      throw TrainingDiverged("training diverged at iteration " + std::to_string(it), it);
    }
    if (!std::isfinite(loss)) throw TrainingDiverged("training diverged at iteration " + std::to_string(it), it);
    res.loss_history.push_back(loss);
    adam_step(p, g, adam, cfg);
  }
  res.model.set_flat(p);
  const double final_loss = loss_with(ev, res.model);
  if (!std::isfinite(final_loss) || !p.allFinite()) {
    throw TrainingDiverged("training diverged at iteration " + std::to_string(cfg.max_iters), cfg.max_iters);
  }
  res.loss_history.push_back(final_loss);
  return res;
}

nlohmann::json model_to_json(const QnnModel& model, std::uint64_t seed, long long iterations) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["convention"] = kQuadratureConvention;
  j["layer_order"] = "phase(theta),squeeze(beta_r,beta_phi),phase(phi),displace(alpha),kerr(tau)";
  j["cutoff"] = model.cutoff;
  j["readout"] = model.readout == Readout::ExpectationX ? "expectation_x" : "state";
  j["seed"] = seed;
  j["iterations"] = iterations;
  auto layers = nlohmann::json::array();
  for (const auto& l : model.layers) {
    nlohmann::json o;
    for (std::size_t k = 0; k < QnnLayerParams::kCount; ++k) o[QnnLayerParams::name(k)] = l[k];
    layers.push_back(o);
  }
  j["layers"] = layers;
  return j;
}

QnnModel model_from_json(const nlohmann::json& j) {
  try {
    QnnModel m;
    m.cutoff = j.at("cutoff").get<int>();
    m.readout = j.value("readout", std::string("expectation_x")) == "state" ? Readout::State
                                                                          : Readout::ExpectationX;
    for (const auto& o : j.at("layers")) {
      QnnLayerParams p;
      for (std::size_t k = 0; k < QnnLayerParams::kCount; ++k) p[k] = o.at(QnnLayerParams::name(k)).get<double>();
      m.layers.push_back(p);
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model checkpoint: ") + e.what());
  }
}

}  // namespace ioncv
