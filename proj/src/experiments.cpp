#include "ioncv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "ioncv/error.hpp"
#include "ioncv/evolution.hpp"
#include "ioncv/gates.hpp"

namespace ioncv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json gate_json(const GateSpec& g) {
  nlohmann::json j;
  j["kind"] = gate_name(g);
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, gate::Phase>) j["theta"] = p.theta;
        if constexpr (std::is_same_v<T, gate::Displace>) {
          j["alpha_re"] = p.alpha.real();
          j["alpha_im"] = p.alpha.imag();
        }
        if constexpr (std::is_same_v<T, gate::Squeeze> || std::is_same_v<T, gate::TwoModeSqueeze> ||
                      std::is_same_v<T, gate::Trisqueeze>) {
          j["r"] = p.r;
          j["phi"] = p.phi;
        }
        if constexpr (std::is_same_v<T, gate::BeamSplitter>) {
          j["theta"] = p.theta;
          j["phi"] = p.phi;
        }
        if constexpr (std::is_same_v<T, gate::Kerr>) j["tau"] = p.tau;
      },
      g);
  return j;
}

nlohmann::json ion_json(const IonConfig& ion) {
  nlohmann::json j;
  auto modes = nlohmann::json::array();
  for (const auto& m : ion.modes) modes.push_back({{"nu_rad_s", m.nu}, {"eta", m.eta}});
  j["modes"] = modes;
  j["rabi0_rad_s"] = ion.rabi0;
  j["detuning_rad_s"] = ion.detuning;
  j["phase"] = ion.phase;
  j["lamb_dicke_correction"] = ion.lamb_dicke_correction;
  return j;
}

nlohmann::json train_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"beta1", c.beta1}, {"beta2", c.beta2},
          {"epsilon", c.epsilon},             {"max_iters", c.max_iters}, {"fd_step", c.fd_step},
          {"seed", c.seed}};
}

FockVector plus_spin() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return FockVector(v, Layout({2}, true));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  int n = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      s += x;
      ++n;
    }
  }
  return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  int n = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      s += (x - m) * (x - m);
      ++n;
    }
  }
  return n ? std::sqrt(s / n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> cell) {
  std::uint64_t x = splitmix64(base);
  for (std::uint64_t c : cell) x = splitmix64(x ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return x;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

FockVector TargetStateSpec::state(int cutoff) const {
  if (cutoff < amplitudes.size()) throw InvalidDimension("cutoff smaller than the target support");
  Vector v = Vector::Zero(cutoff);
  v.head(amplitudes.size()) = amplitudes;
  return FockVector(v, Layout::mode(cutoff));
}

TargetStateSpec random_target_state(std::uint64_t seed, double envelope_sigma, int size) {
  if (size < 1) throw InvalidDimension("target size must be positive");
  if (!(envelope_sigma > 0.0)) throw ConfigError("envelope sigma must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TargetStateSpec t;
  t.seed = seed;
  t.envelope_sigma = envelope_sigma;
  t.amplitudes.resize(size);
  for (int i = 0; i < size; ++i) {
    const double re = u(rng);
    const double im = u(rng);
    t.amplitudes[i] = cplx(re, im) * std::exp(-double(i) * i / (2.0 * envelope_sigma * envelope_sigma));
  }
  t.amplitudes.normalize();
  return t;
}

nlohmann::json RunRecord::reproducible_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = experiment;
  j["config"] = config;
  j["seeds"] = seeds;
  j["traces"] = traces;
  j["metrics"] = metrics;
  return j;
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json j = reproducible_json();
  j["wall_time"] = wall_time;
  return j;
}

nlohmann::json benchmark_config_json(const BenchmarkSpec& spec) {
  nlohmann::json j;
  j["gate"] = gate_json(spec.gate);
  j["ion"] = ion_json(spec.ion);
  j["initial"] = spec.initial;
  j["initial_alpha_re"] = spec.initial_alpha.real();
  j["initial_alpha_im"] = spec.initial_alpha.imag();
  j["cutoff"] = spec.cutoff;
  j["samples"] = spec.samples;
  j["dynamics"] = spec.dynamics == Dynamics::Full ? "full" : "effective";
  j["initial_substeps"] = spec.initial_substeps;
  j["tolerance"] = spec.tolerance;
  return j;
}

namespace {

FockVector benchmark_initial(const BenchmarkSpec& spec, std::size_t modes) {
  FockVector first = spec.initial == "coherent" ? coherent(spec.initial_alpha, spec.cutoff)
                                                : fock_state(0, spec.cutoff);
  if (spec.initial != "coherent" && spec.initial != "vacuum") {
    throw ConfigError("initial state must be 'vacuum' or 'coherent'");
  }
  if (modes == 2) return tensor(first, fock_state(0, spec.cutoff));
  return first;
}

}  // namespace

BenchmarkResult gate_benchmark(const BenchmarkSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto warnings = spec.ion.validate();
  validate_gate(spec.gate);
  if (spec.samples < 1) throw ConfigError("samples must be >= 1");
  const std::size_t modes = spec.ion.mode_count();
  const std::vector<int> cutoffs(modes, spec.cutoff);
  const GateSpec g = canonical_gate(spec.gate);
  const FockVector init = benchmark_initial(spec, modes);
  const FockVector psi0 = tensor(plus_spin(), init);
  const GatePulse pulse = gate_time_and_drive(g, spec.ion);

  std::vector<double> times;
  for (int j = 0; j <= spec.samples; ++j) times.push_back(pulse.duration * j / spec.samples);

  std::vector<FockVector> states;
  long long substeps = 0;
  double frame = 0.0;
  if (pulse.duration == 0.0) {
    states.assign(times.size(), psi0);
  } else if (spec.dynamics == Dynamics::Effective) {
    const DenseOperator h = effective_hamiltonian(g, spec.ion, cutoffs);
    for (double t : times) states.push_back(propagate_const(h, t, psi0));
  } else {
    IonKernel kernel(std::make_shared<IonStepper>(spec.ion, pulse.drive, cutoffs));
    if (kernel.period()) {
      SampledEvolution ev = evolve_periodic(kernel, times, psi0, spec.initial_substeps, spec.tolerance);
      states = std::move(ev.states);
      substeps = ev.substeps;
      if (std::holds_alternative<gate::Kerr>(g)) frame = dressed_phonon_frequency(kernel, substeps);
    } else {
      StepControl ctrl;
      ctrl.tolerance = spec.tolerance;
      states.push_back(psi0);
      for (std::size_t j = 1; j < times.size(); ++j) {
        states.push_back(propagate_tdep(kernel, times[j], psi0, ctrl).final_state);
      }
    }
  }

  BenchmarkResult res;
  std::vector<double> fid;
  std::vector<double> leak;
  const Eigen::Index n0 = spec.cutoff;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double s = pulse.duration > 0.0 ? times[j] / pulse.duration : 1.0;
    Vector target = ideal_unitary(scale_gate(g, s), cutoffs).apply(init).amplitudes();
    if (frame != 0.0) {
      for (Eigen::Index k = 0; k < n0; ++k) target[k] *= std::polar(1.0, -frame * times[j] * k);
    }
    const DensityMatrix rho = trace_out_spin(states[j]);
    fid.push_back(fidelity(rho, FockVector(target, rho.layout())));
    leak.push_back(top_level_population(states[j].amplitudes(), states[j].layout()));
    if (j + 1 == times.size() && modes == 1) {
      std::vector<double> pt;
      std::vector<double> pp;
      for (Eigen::Index k = 0; k < n0; ++k) {
        pt.push_back(std::norm(target[k]));
        pp.push_back(rho.matrix()(k, k).real());
      }
      res.record.traces["final_populations"] = {{"target", pt}, {"prepared", pp}};
      if (spec.with_wigner) {
        res.wigner_final = wigner(rho, spec.grid);
        res.wigner_target = wigner(FockVector(target, rho.layout()), spec.grid);
      }
    }
  }
  res.final_fidelity = fid.back();
  res.max_leakage = *std::max_element(leak.begin(), leak.end());
  res.reliable = res.max_leakage < 1e-3;

  RunRecord& r = res.record;
  r.experiment = "gate_benchmark";
  r.config = benchmark_config_json(spec);
  r.traces["time"] = times;
  r.traces["fidelity"] = fid;
  r.traces["leakage"] = leak;
  r.metrics["final_fidelity"] = res.final_fidelity;
  r.metrics["max_leakage"] = res.max_leakage;
  r.metrics["reliable"] = res.reliable;
  r.metrics["duration"] = pulse.duration;
  r.metrics["start_time"] = pulse.drive.start_time;
  r.metrics["substeps_per_period"] = substeps;
  r.metrics["frame_frequency"] = frame;
  r.metrics["rabi"] = spec.ion.rabi();
  r.metrics["warnings"] = warnings;
  if (res.wigner_target) r.metrics["target_wigner_min"] = res.wigner_target->min();
  if (res.wigner_final) r.metrics["final_wigner_min"] = res.wigner_final->min();
  r.wall_time = seconds_since(t0);
  return res;
}

std::vector<BenchmarkResult> gate_benchmark_sweep(const BenchmarkSpec& spec,
                                                  const std::vector<double>& etas, int threads) {
  std::vector<std::optional<BenchmarkResult>> out(etas.size());
  parallel_for(etas.size(), threads, [&](std::size_t i) {
    BenchmarkSpec s = spec;
    for (auto& m : s.ion.modes) m.eta = etas[i];
    out[i] = gate_benchmark(s);
  });
  std::vector<BenchmarkResult> res;
  for (auto& o : out) res.push_back(std::move(*o));
  return res;
}

TargetFunction parse_target_function(const std::string& s) {
  if (s == "sine") return TargetFunction::Sine;
  if (s == "heaviside") return TargetFunction::Heaviside;
  throw ConfigError("unknown target function '" + s + "' (expected sine or heaviside)");
}

std::string to_string(TargetFunction f) { return f == TargetFunction::Sine ? "sine" : "heaviside"; }

double evaluate_target(TargetFunction f, double x) {
  if (f == TargetFunction::Sine) return std::sin(kPi * x);
  return x >= 0.0 ? 1.0 : 0.0;
}

RunRecord regression_experiment(const RegressionSpec& spec, RegressionSummary* summary) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.train.validate();
  if (spec.layer_counts.empty() || spec.seeds < 1 || spec.n_train < 1 || spec.n_test < 1) {
    throw ConfigError("regression needs layer counts, seeds and data points");
  }
  std::mt19937_64 data_rng(derive_seed(spec.train.seed, {0}));
  std::uniform_real_distribution<double> ux(spec.x_min, spec.x_max);
  RegressionData train_set;
  RegressionData test_set;
  train_set.x.resize(spec.n_train);
  test_set.x.resize(spec.n_test);
  for (auto& x : train_set.x) x = ux(data_rng);
  for (auto& x : test_set.x) x = ux(data_rng);
  std::sort(train_set.x.begin(), train_set.x.end());
  std::sort(test_set.x.begin(), test_set.x.end());
  train_set.y = train_set.x.unaryExpr([&](double x) { return evaluate_target(spec.target, x); });
  test_set.y = test_set.x.unaryExpr([&](double x) { return evaluate_target(spec.target, x); });

  const std::size_t nl = spec.layer_counts.size();
  const std::size_t ns = spec.seeds;
  struct Cell {
    double test_mse = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> history;
    std::vector<double> preds;
    std::optional<QnnModel> model;
    std::uint64_t seed = 0;
    std::string error;
  };
  std::vector<Cell> cells(nl * ns);
  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    const int layers = spec.layer_counts[i / ns];
    Cell& c = cells[i];
    TrainConfig cfg = spec.train;
    cfg.seed = derive_seed(spec.train.seed, {1, static_cast<std::uint64_t>(layers), i % ns});
    cfg.random_init = true;
    c.seed = cfg.seed;
    QnnModel shape;
    shape.layers.resize(layers);
    shape.cutoff = spec.cutoff;
    try {
      TrainResult tr = train(shape, train_set, cfg);
      c.history = tr.loss_history;
      c.test_mse = objective_loss(tr.model, test_set);
      c.model = tr.model.canonical();
      for (Eigen::Index k = 0; k < test_set.x.size(); ++k) c.preds.push_back(predict(tr.model, test_set.x[k]));
    } catch (const TrainingDiverged& e) {
      c.error = e.what();
    }
  });

  RunRecord r;
  r.experiment = "regression";
  r.config = {{"target", to_string(spec.target)}, {"layer_counts", spec.layer_counts},
              {"seeds", spec.seeds},               {"n_train", spec.n_train},
              {"n_test", spec.n_test},             {"x_min", spec.x_min},
              {"x_max", spec.x_max},               {"cutoff", spec.cutoff},
              {"train", train_json(spec.train)}};
  r.traces["x_train"] = to_std(train_set.x);
  r.traces["x_test"] = to_std(test_set.x);
  r.traces["y_test"] = to_std(test_set.y);
  RegressionSummary sum;
  sum.layer_counts = spec.layer_counts;
  auto per_layer = nlohmann::json::array();
  for (std::size_t l = 0; l < nl; ++l) {
    std::vector<double> mse;
    nlohmann::json runs = nlohmann::json::array();
    std::vector<double> mean_pred(spec.n_test, 0.0);
    std::vector<double> sq_pred(spec.n_test, 0.0);
    int ok = 0;
    int best = -1;
    for (std::size_t s = 0; s < ns; ++s) {
      const Cell& c = cells[l * ns + s];
      r.seeds.push_back(c.seed);
      mse.push_back(c.test_mse);
      runs.push_back({{"seed", c.seed}, {"test_mse", c.error.empty() ? nlohmann::json(c.test_mse) : nlohmann::json()},
                      {"error", c.error}, {"loss_history", c.history},
                      {"model", c.model ? model_to_json(*c.model, c.seed, spec.train.max_iters) : nlohmann::json()}});
      if (c.error.empty()) {
        if (best < 0 || c.test_mse < cells[l * ns + best].test_mse) best = static_cast<int>(s);
        ++ok;
        for (int k = 0; k < spec.n_test; ++k) {
          mean_pred[k] += c.preds[k];
          sq_pred[k] += c.preds[k] * c.preds[k];
        }
      }
    }
    std::vector<double> band(spec.n_test, 0.0);
    for (int k = 0; k < spec.n_test && ok > 0; ++k) {
      mean_pred[k] /= ok;
      band[k] = std::sqrt(std::max(0.0, sq_pred[k] / ok - mean_pred[k] * mean_pred[k]));
    }
    if (best >= 0) {
      sum.best_models.push_back(*cells[l * ns + best].model);
      sum.best_seeds.push_back(cells[l * ns + best].seed);
    } else {
      sum.best_models.emplace_back();
      sum.best_seeds.push_back(0);
    }
    sum.mse.push_back(mse);
    sum.mean_mse.push_back(mean_of(mse));
    sum.std_mse.push_back(std_of(mse));
    per_layer.push_back({{"layers", spec.layer_counts[l]},
                         {"mean_test_mse", sum.mean_mse.back()},
                         {"std_test_mse", sum.std_mse.back()},
                         {"mean_prediction", mean_pred},
                         {"prediction_std", band},
                         {"runs", runs}});
  }
  r.traces["per_layer"] = per_layer;
  r.metrics["mean_test_mse"] = sum.mean_mse;
  r.metrics["std_test_mse"] = sum.std_mse;
  r.metrics["best_mean_test_mse"] = *std::min_element(sum.mean_mse.begin(), sum.mean_mse.end());
  r.wall_time = seconds_since(t0);
  if (summary) *summary = std::move(sum);
  return r;
}

RunRecord state_prep_experiment(const StatePrepSpec& spec, StatePrepSummary* summary) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.train.validate();
  if (spec.layer_counts.empty() || spec.inits < 1 || spec.target_seeds.empty()) {
    throw ConfigError("state preparation needs targets, layer counts and inits");
  }
  std::vector<FockVector> targets;
  for (auto seed : spec.target_seeds) {
    if (spec.vacuum_target) {
      targets.push_back(fock_state(0, spec.cutoff));
    } else {
      targets.push_back(random_target_state(seed, spec.envelope_sigma).state(spec.cutoff));
    }
  }
  const std::size_t nt = targets.size();
  const std::size_t nl = spec.layer_counts.size();
  const std::size_t ni = spec.inits;
  struct Cell {
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> history;
    std::optional<QnnModel> model;
    std::uint64_t seed = 0;
    std::string error;
  };
  std::vector<Cell> cells(nt * nl * ni);
  parallel_for(cells.size(), spec.threads, [&](std::size_t i) {
    const std::size_t ti = i / (nl * ni);
    const std::size_t li = (i / ni) % nl;
    const std::size_t k = i % ni;
    Cell& c = cells[i];
    TrainConfig cfg = spec.train;
    cfg.seed = derive_seed(spec.train.seed,
                           {2, ti, static_cast<std::uint64_t>(spec.layer_counts[li]), k});
    cfg.random_init = true;
    c.seed = cfg.seed;
    QnnModel shape;
    shape.layers.resize(spec.layer_counts[li]);
    shape.cutoff = spec.cutoff;
    shape.readout = Readout::State;
    try {
      TrainResult tr = train(shape, StatePrepTarget{targets[ti]}, cfg);
      c.history = tr.loss_history;
      c.fidelity = fidelity(forward(tr.model, fock_state(0, spec.cutoff)).state, targets[ti]);
      c.model = tr.model.canonical();
    } catch (const TrainingDiverged& e) {
      c.error = e.what();
    }
  });

  RunRecord r;
  r.experiment = "state_prep";
  r.config = {{"target_seeds", spec.target_seeds}, {"envelope_sigma", spec.envelope_sigma},
              {"vacuum_target", spec.vacuum_target}, {"layer_counts", spec.layer_counts},
              {"inits", spec.inits},                 {"cutoff", spec.cutoff},
              {"train", train_json(spec.train)}};
  StatePrepSummary sum;
  sum.layer_counts = spec.layer_counts;
  sum.fidelity.assign(nt, std::vector<std::vector<double>>(nl));
  sum.max_fidelity.assign(nl, 0.0);
  const Cell* best = nullptr;
  std::size_t best_target = 0;
  auto runs = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::size_t ti = i / (nl * ni);
    const std::size_t li = (i / ni) % nl;
    const Cell& c = cells[i];
    r.seeds.push_back(c.seed);
    sum.fidelity[ti][li].push_back(c.fidelity);
    if (std::isfinite(c.fidelity)) {
      sum.max_fidelity[li] = std::max(sum.max_fidelity[li], c.fidelity);
      if (!best || c.fidelity > best->fidelity) {
        best = &c;
        best_target = ti;
      }
    }
    runs.push_back({{"target", ti},
                    {"layers", spec.layer_counts[li]},
                    {"seed", c.seed},
                    {"fidelity", c.error.empty() ? nlohmann::json(c.fidelity) : nlohmann::json()},
                    {"error", c.error},
                    {"loss_history", c.history}});
  }
  r.traces["runs"] = runs;
  r.metrics["max_fidelity_per_layer"] = sum.max_fidelity;
  nlohmann::json dist = nlohmann::json::array();
  for (std::size_t ti = 0; ti < nt; ++ti) dist.push_back(sum.fidelity[ti]);
  r.metrics["fidelity_distribution"] = dist;
  if (best) {
    sum.best_fidelity = best->fidelity;
    sum.best_model = *best->model;
    sum.best_seed = best->seed;
    sum.best_target = targets[best_target].amplitudes();
    sum.best_state = forward(sum.best_model, fock_state(0, spec.cutoff)).state.amplitudes();
    r.metrics["best_fidelity"] = sum.best_fidelity;
    r.metrics["best_model"] = model_to_json(sum.best_model, best->seed, spec.train.max_iters);
    std::vector<double> pt;
    std::vector<double> pp;
    for (Eigen::Index k = 0; k < sum.best_target.size(); ++k) {
      pt.push_back(std::norm(sum.best_target[k]));
      pp.push_back(std::norm(sum.best_state[k]));
    }
    r.traces["best_populations"] = {{"target", pt}, {"prepared", pp}};
    if (spec.with_wigner) {
      const Layout layout = Layout::mode(spec.cutoff);
      sum.wigner_target = wigner(FockVector(sum.best_target, layout), spec.grid);
      sum.wigner_prepared = wigner(FockVector(sum.best_state, layout), spec.grid);
    }
  }
  r.wall_time = seconds_since(t0);
  if (summary) *summary = std::move(sum);
  return r;
}

}  // namespace ioncv
