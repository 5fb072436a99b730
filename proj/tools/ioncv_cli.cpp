// ioncv command-line entry point.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ioncv/analysis.hpp"
#include "ioncv/config.hpp"
#include "ioncv/error.hpp"
#include "ioncv/experiments.hpp"
#include "ioncv/qnn.hpp"
#include "ioncv/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ioncv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<int> threads;
};

json read_config(const Flags& f) {
  if (f.config.empty()) return json::object();
  return load_config_file(f.config);
}

void apply_flags(const Flags& f, CommonOptions& c) {
  if (f.seed) c.seed = *f.seed;
  if (f.out_dir) c.output_dir = *f.out_dir;
  if (f.mode) c.mode = *f.mode;
  if (f.threads) {
    if (*f.threads < 1) throw ConfigError("--threads must be >= 1");
    c.threads = *f.threads;
  }
}

json common_json(const CommonOptions& c, const std::string& mode) {
  return {{"seed", c.seed}, {"threads", c.threads}, {"mode", mode}};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory '" + dir + "'");
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void write_record(const fs::path& dir, const RunRecord& r) {
  write_text(dir / "record.json", r.to_json().dump(2) + "\n");
}

std::string csv_header(const std::string& columns) {
  return "# schema_version=" + std::to_string(kSchemaVersion) + "\n" + columns + "\n";
}

void write_populations(const fs::path& dir, const std::vector<double>& target,
                       const std::vector<double>& prepared) {
  std::string s = csv_header("fock_index,target_prob,prepared_prob");
  for (std::size_t k = 0; k < target.size(); ++k) {
    s += std::to_string(k) + "," + num(target[k]) + "," + num(prepared[k]) + "\n";
  }
  write_text(dir / "populations.csv", s);
}

std::string eta_tag(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eta%g", eta);
  return buf;
}

int run_bench_gate(const Flags& flags) {
  BenchGateConfig c = parse_bench_gate(read_config(flags));
  apply_flags(flags, c.common);
  const ForwardMode mode = parse_forward_mode(c.common.mode.value_or("physical"));
  c.spec.dynamics = mode == ForwardMode::Full ? Dynamics::Full : Dynamics::Effective;
  std::vector<double> etas = c.etas;
  if (etas.empty()) etas.push_back(c.spec.ion.modes.front().eta);
  const fs::path dir = prepare_dir(c.common.output_dir);

  const auto results = gate_benchmark_sweep(c.spec, etas, c.common.threads);
  RunRecord r;
  r.experiment = "bench-gate";
  r.config = benchmark_config_json(c.spec);
  r.config["eta_sweep"] = etas;
  r.config["common"] = common_json(c.common, to_string(mode));
  r.seeds.push_back(c.common.seed);
  std::size_t best = 0;
  auto runs = json::array();
  std::string trace = csv_header("eta,time,fidelity,leakage");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    if (res.final_fidelity > results[best].final_fidelity) best = i;
    json run = res.record.reproducible_json();
    run["eta"] = etas[i];
    runs.push_back(run);
    r.wall_time += res.record.wall_time;
    const auto& tr = res.record.traces;
    for (std::size_t j = 0; j < tr["time"].size(); ++j) {
      trace += num(etas[i]) + "," + num(tr["time"][j].get<double>()) + "," +
               num(tr["fidelity"][j].get<double>()) + "," + num(tr["leakage"][j].get<double>()) + "\n";
    }
    if (res.wigner_final) {
      write_wigner_csv((dir / ("wigner_final_" + eta_tag(etas[i]) + ".csv")).string(), *res.wigner_final);
      write_wigner_csv((dir / ("wigner_target_" + eta_tag(etas[i]) + ".csv")).string(), *res.wigner_target);
    }
  }
  const auto& top = results[best];
  r.traces["runs"] = runs;
  r.metrics["best_eta"] = etas[best];
  r.metrics["final_fidelity"] = top.final_fidelity;
  r.metrics["max_leakage"] = top.max_leakage;
  r.metrics["reliable"] = top.reliable;
  write_record(dir, r);
  write_text(dir / "trace.csv", trace);
  if (top.record.traces.contains("final_populations")) {
    const auto& pop = top.record.traces["final_populations"];
    write_populations(dir, pop["target"].get<std::vector<double>>(),
                      pop["prepared"].get<std::vector<double>>());
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::printf("eta=%-6g final_fidelity=%.6f max_leakage=%.2e%s\n", etas[i], results[i].final_fidelity,
                results[i].max_leakage, results[i].reliable ? "" : " (unreliable: leakage >= 1e-3)");
  }
  std::printf("best eta=%g final_fidelity=%.6f -> %s\n", etas[best], top.final_fidelity,
              (dir / "record.json").c_str());
  return kExitOk;
}

int run_regression(const Flags& flags) {
  RegressionConfig c = parse_regression(read_config(flags));
  apply_flags(flags, c.common);
  c.spec.train.seed = c.common.seed;
  c.spec.threads = c.common.threads;
  const ForwardMode mode = parse_forward_mode(c.common.mode.value_or("ideal"));
  const fs::path dir = prepare_dir(c.common.output_dir);

  RegressionSummary sum;
  RunRecord r = regression_experiment(c.spec, &sum);
  r.experiment = "train-regression";
  r.config["common"] = common_json(c.common, to_string(mode));

  if (mode != ForwardMode::Ideal) {
    const PhysicalOptions opts{c.ion, 256, 1e-9};
    const auto xs = r.traces["x_test"].get<std::vector<double>>();
    const int pts = std::min<int>(c.physical_points, static_cast<int>(xs.size()));
    auto evals = json::array();
    for (std::size_t l = 0; l < sum.layer_counts.size(); ++l) {
      if (sum.best_models[l].layers.empty()) continue;
      std::vector<double> x;
      std::vector<double> ideal;
      std::vector<double> phys;
      double mse = 0.0;
      for (int k = 0; k < pts; ++k) {
        const std::size_t idx = pts == 1 ? 0 : k * (xs.size() - 1) / (pts - 1);
        x.push_back(xs[idx]);
        ideal.push_back(predict(sum.best_models[l], xs[idx]));
        phys.push_back(predict(sum.best_models[l], xs[idx], mode, opts));
        const double y = evaluate_target(c.spec.target, xs[idx]);
        mse += (phys.back() - y) * (phys.back() - y) / pts;
      }
      evals.push_back({{"layers", sum.layer_counts[l]}, {"seed", sum.best_seeds[l]}, {"x", x},
                       {"ideal_prediction", ideal}, {"prediction", phys}, {"test_mse", mse}});
    }
    auto modes = json::array();
    for (const auto& m : c.ion.modes) modes.push_back({{"nu_rad_s", m.nu}, {"eta", m.eta}});
    r.config["ion"] = {{"modes", modes},
                       {"rabi0_rad_s", c.ion.rabi0},
                       {"lamb_dicke_correction", c.ion.lamb_dicke_correction}};
    r.config["physical_points"] = pts;
    r.metrics[to_string(mode) + "_evaluation"] = evals;
  }

  write_record(dir, r);
  std::string trace = csv_header("layers,seed,iteration,loss");
  for (const auto& pl : r.traces["per_layer"]) {
    for (const auto& run : pl["runs"]) {
      const auto& h = run["loss_history"];
      for (std::size_t it = 0; it < h.size(); ++it) {
        trace += std::to_string(pl["layers"].get<int>()) + "," +
                 std::to_string(run["seed"].get<std::uint64_t>()) + "," + std::to_string(it) + "," +
                 num(h[it].get<double>()) + "\n";
      }
    }
  }
  write_text(dir / "trace.csv", trace);
  std::string pred = csv_header("layers,x,target,mean_prediction,prediction_std");
  const auto& xt = r.traces["x_test"];
  const auto& yt = r.traces["y_test"];
  for (const auto& pl : r.traces["per_layer"]) {
    for (std::size_t k = 0; k < xt.size(); ++k) {
      pred += std::to_string(pl["layers"].get<int>()) + "," + num(xt[k].get<double>()) + "," +
              num(yt[k].get<double>()) + "," + num(pl["mean_prediction"][k].get<double>()) + "," +
              num(pl["prediction_std"][k].get<double>()) + "\n";
    }
  }
  write_text(dir / "predictions.csv", pred);
  for (std::size_t l = 0; l < sum.layer_counts.size(); ++l) {
    std::printf("layers=%d mean_test_mse=%.6g std=%.6g\n", sum.layer_counts[l], sum.mean_mse[l],
                sum.std_mse[l]);
  }
  return kExitOk;
}

int run_state_prep(const Flags& flags) {
  StatePrepConfig c = parse_state_prep(read_config(flags));
  apply_flags(flags, c.common);
  c.spec.train.seed = c.common.seed;
  c.spec.threads = c.common.threads;
  const ForwardMode mode = parse_forward_mode(c.common.mode.value_or("ideal"));
  const fs::path dir = prepare_dir(c.common.output_dir);

  StatePrepSummary sum;
  RunRecord r = state_prep_experiment(c.spec, &sum);
  r.experiment = "prepare-state";
  r.config["common"] = common_json(c.common, to_string(mode));

  if (mode != ForwardMode::Ideal && !sum.best_model.layers.empty()) {
    const PhysicalOptions opts{c.ion, 256, 1e-9};
    const ForwardResult fr = forward(sum.best_model, fock_state(0, c.spec.cutoff), mode, opts);
    const DensityMatrix rho = reduce_to_mode(fr.state);
    const double f = fidelity(rho, FockVector(sum.best_target, Layout::mode(c.spec.cutoff)));
    r.metrics["best_fidelity_" + to_string(mode)] = f;
    r.metrics["max_leakage_" + to_string(mode)] = fr.max_leakage;
    r.metrics["warnings_" + to_string(mode)] = fr.warnings;
    std::printf("best model fidelity in %s mode: %.6f\n", to_string(mode).c_str(), f);
  }

  write_record(dir, r);
  std::string trace = csv_header("target,layers,seed,iteration,loss");
  for (const auto& run : r.traces["runs"]) {
    const auto& h = run["loss_history"];
    for (std::size_t it = 0; it < h.size(); ++it) {
      trace += std::to_string(run["target"].get<int>()) + "," + std::to_string(run["layers"].get<int>()) +
               "," + std::to_string(run["seed"].get<std::uint64_t>()) + "," + std::to_string(it) + "," +
               num(h[it].get<double>()) + "\n";
    }
  }
  write_text(dir / "trace.csv", trace);
  if (r.traces.contains("best_populations")) {
    const auto& pop = r.traces["best_populations"];
    write_populations(dir, pop["target"].get<std::vector<double>>(),
                      pop["prepared"].get<std::vector<double>>());
  }
  if (sum.wigner_target) write_wigner_csv((dir / "wigner_target.csv").string(), *sum.wigner_target);
  if (sum.wigner_prepared) write_wigner_csv((dir / "wigner_prepared.csv").string(), *sum.wigner_prepared);
  for (std::size_t l = 0; l < sum.layer_counts.size(); ++l) {
    std::printf("layers=%d max_fidelity=%.6f\n", sum.layer_counts[l], sum.max_fidelity[l]);
  }
  return kExitOk;
}

int run_wigner(const Flags& flags) {
  WignerConfig c = parse_wigner(read_config(flags));
  apply_flags(flags, c.common);
  const fs::path dir = prepare_dir(c.common.output_dir);
  const FockVector psi = c.state.state(c.cutoff);
  const WignerGrid g = wigner(psi, c.grid);
  RunRecord r;
  r.experiment = "wigner";
  r.config = {{"state", c.state.to_json()},
              {"cutoff", c.cutoff},
              {"grid",
               {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"p_min", c.grid.p_min},
                {"p_max", c.grid.p_max}, {"resolution", c.grid.resolution}}}};
  r.seeds.push_back(c.common.seed);
  r.metrics["integral"] = g.integral();
  r.metrics["min"] = g.min();
  r.metrics["value_at_origin"] = wigner_point(DensityMatrix::pure(psi), 0.0, 0.0);
  r.metrics["mean_phonon"] = mean_phonon(psi);
  write_record(dir, r);
  write_wigner_csv((dir / "wigner_state.csv").string(), g);
  std::vector<double> pop;
  for (Eigen::Index k = 0; k < psi.amplitudes().size(); ++k) pop.push_back(std::norm(psi[k]));
  write_populations(dir, pop, pop);
  std::printf("W(0,0)=%.9f integral=%.6f min=%.6f -> %s\n", r.metrics["value_at_origin"].get<double>(),
              g.integral(), g.min(), (dir / "wigner_state.csv").c_str());
  return kExitOk;
}

int run_validate(const Flags& flags) {
  ValidateConfig c = parse_validate(read_config(flags));
  apply_flags(flags, c.common);
  bool ok = true;
  for (const auto& check : run_invariant_suite()) {
    std::puts(format_check(check).c_str());
    ok = ok && check.passed;
  }
  std::printf("%s\n", ok ? "all invariants hold" : "invariant suite FAILED");
  return ok ? kExitOk : kExitConvergence;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config, "JSON config file (keys listed below)");
  sub->add_option("--seed", f.seed, "base seed");
  sub->add_option("--out-dir", f.out_dir, "output directory");
  sub->add_option("--mode", f.mode, "ideal | effective | physical")
      ->check(CLI::IsMember({"ideal", "effective", "physical"}));
  sub->add_option("--threads", f.threads, "worker pool size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion continuous-variable gate simulator and quantum neural network trainer"};
  app.footer(config_reference());
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Sub subs[] = {
      {"bench-gate", "gate fidelity benchmark under the full ion Hamiltonian", run_bench_gate},
      {"train-regression", "train regression models over layer counts and seeds", run_regression},
      {"prepare-state", "train state-preparation models from vacuum", run_state_prep},
      {"wigner", "Wigner grid of a described state", run_wigner},
      {"validate", "run the oracle and invariant suite", run_validate},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> cmds;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->footer(config_reference());
    add_common(sub, flags);
    cmds.emplace_back(sub, &s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    for (const auto& [sub, s] : cmds) {
      if (sub->parsed()) return s->run(flags);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CutoffTooSmall& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidDimension& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const TrainingDiverged& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const NonFiniteLoss& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
