#include "ioncv/validation.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "ioncv/analysis.hpp"
#include "ioncv/evolution.hpp"
#include "ioncv/expm.hpp"
#include "ioncv/experiments.hpp"
#include "ioncv/qnn.hpp"

namespace ioncv {

namespace {

CheckResult below(std::string name, double value, double threshold, std::string detail = "") {
  return {std::move(name), value, threshold, std::isfinite(value) && value < threshold,
          std::move(detail)};
}

// exp(A) by scaling, a truncated Taylor series and repeated squaring.
Matrix taylor_exp(const Matrix& a) {
  int s = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm /= 2.0;
    ++s;
  }
  const Matrix b = a / std::ldexp(1.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

CheckResult check_expm() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  const int d = 24;
  Matrix h(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) h(i, j) = cplx(n01(rng), n01(rng));
  }
  h = 0.5 * (h + h.adjoint()).eval();
  const double t = 0.37;
  const Matrix ref = taylor_exp(cplx(0.0, -t) * h);
  const double err = (expm_hermitian(h, t) - ref).cwiseAbs().maxCoeff();
  return below("expm_vs_taylor", err, 1e-9, "24x24 random Hermitian, t=0.37");
}

// Detuned two-level drive in the atom frame.
DenseOperator detuned_drive(double t, double rabi, double delta) {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 0) = 0.5 * rabi * std::polar(1.0, -delta * t);
  h(0, 1) = std::conj(h(1, 0));
  return {h, Layout({2}, true)};
}

std::vector<CheckResult> check_rabi() {
  const double rabi = 1.0;
  const double delta = 0.6;
  const double t = 7.0;
  StepControl ctrl;
  ctrl.initial_steps = 64;
  ctrl.tolerance = 1e-11;
  const auto rep = propagate_tdep([&](double s) { return detuned_drive(s, rabi, delta); }, t,
                                  FockVector::basis(Layout({2}, true), {0}), ctrl);
  const double w = std::hypot(rabi, delta);
  const double pe = rabi * rabi / (w * w) * std::pow(std::sin(0.5 * w * t), 2);
  const double err = std::abs(std::norm(rep.final_state[1]) - pe);

  ctrl.initial_steps = rep.steps_used * 2;
  ctrl.max_rounds = 1;
  const auto finer = propagate_tdep([&](double s) { return detuned_drive(s, rabi, delta); }, t,
                                    FockVector::basis(Layout({2}, true), {0}), ctrl);
  const double self = (finer.final_state.amplitudes() - rep.final_state.amplitudes()).norm();

  char buf[96];
  std::snprintf(buf, sizeof buf, "%lld steps, %d refinements", rep.steps_used, rep.refinements);
  return {below("integrator_self_convergence", self, 1e-6, buf),
          below("rabi_formula", err, 1e-6, "Omega=1, delta=0.6, t=7"),
          below("unitarity_drift_two_level", rep.norm_drift, 1e-8)};
}

CheckResult check_ion_unitarity() {
  IonConfig ion = IonConfig::single(2.0 * kPi * 3.0e6, 2.0 * kPi * 1.0e5, 0.05);
  const GatePulse pulse = gate_time_and_drive(gate::Displace{1.0}, ion);
  IonKernel kernel(std::make_shared<IonStepper>(ion, pulse.drive, std::vector<int>{20}));
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const FockVector psi =
      tensor(FockVector(plus, Layout({2}, true)), fock_state(0, 20));
  const auto ev = evolve_periodic(kernel, {0.5 * pulse.duration, pulse.duration}, psi);
  return below("unitarity_drift_ion", ev.norm_drift, 1e-8, "full Hamiltonian, displacement pulse");
}

std::vector<CheckResult> check_effective() {
  const double nu = 2.0 * kPi * 3.0e6;
  const double rabi = 2.0 * kPi * 1.0e5;
  struct Case {
    GateSpec g;
    int cutoff;
  };
  const std::vector<Case> cases{
      {gate::Phase{1.1}, 24},           {gate::Displace{cplx(0.6, 0.3)}, 24},
      {gate::Squeeze{0.3, 0.4}, 24},    {gate::BeamSplitter{0.7, 0.3}, 10},
      {gate::TwoModeSqueeze{0.2, 0.5}, 10}, {gate::Trisqueeze{0.1, 0.2}, 24},
      {gate::Kerr{0.8}, 24}};
  std::vector<CheckResult> out;
  for (const auto& c : cases) {
    BenchmarkSpec spec;
    spec.gate = c.g;
    spec.ion = gate_modes(c.g) == 2
                   ? IonConfig::pair({nu, 0.05}, {0.8 * nu, 0.05}, rabi)
                   : IonConfig::single(nu, rabi, 0.05);
    spec.initial = "coherent";
    spec.initial_alpha = cplx(0.4, 0.2);
    spec.cutoff = c.cutoff;
    spec.samples = 8;
    spec.dynamics = Dynamics::Effective;
    const BenchmarkResult r = gate_benchmark(spec);
    double worst = 0.0;
    for (double f : r.record.traces["fidelity"]) worst = std::max(worst, 1.0 - f);
    out.push_back(below("effective_equals_ideal_" + gate_name(c.g), worst, 1e-9, "1-F, worst sample"));
  }
  return out;
}

std::vector<CheckResult> check_wigner() {
  const double w0 = wigner_point(DensityMatrix::pure(fock_state(0, 10)), 0.0, 0.0);
  std::vector<CheckResult> out{below("wigner_vacuum", std::abs(w0 - 1.0 / kPi), 1e-6, "W(0,0) vs 1/pi")};
  const FockVector coh = coherent(cplx(1.0, 0.5), 40);
  out.push_back(below("wigner_normalization_coherent", std::abs(wigner(coh).integral() - 1.0), 1e-2));
  Vector cat = coherent(2.0, 40).amplitudes() + coherent(-2.0, 40).amplitudes();
  const FockVector c(cat.normalized(), Layout::mode(40));
  out.push_back(below("wigner_normalization_cat", std::abs(wigner(c).integral() - 1.0), 1e-2));
  return out;
}

CheckResult check_fd() {
  QnnModel model = random_model(2, 20, 11);
  RegressionData data;
  data.x = Eigen::VectorXd::LinSpaced(9, -1.0, 1.0);
  data.y = data.x.unaryExpr([](double x) { return std::sin(kPi * x); });
  const Eigen::VectorXd g1 = objective_gradient(model, data, 1e-3);
  const Eigen::VectorXd g2 = objective_gradient(model, data, 5e-4);
  const double rel = (g1 - g2).norm() / g2.norm();
  return below("fd_step_halving", rel, 1e-4, "h=1e-3 vs 5e-4, relative");
}

}  // namespace

std::vector<CheckResult> run_invariant_suite() {
  std::vector<CheckResult> out{check_expm()};
  for (auto& c : check_rabi()) out.push_back(std::move(c));
  out.push_back(check_ion_unitarity());
  for (auto& c : check_effective()) out.push_back(std::move(c));
  for (auto& c : check_wigner()) out.push_back(std::move(c));
  out.push_back(check_fd());
  return out;
}

std::string format_check(const CheckResult& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s value=%.3e threshold=%.1e", c.passed ? "PASS" : "FAIL",
                c.name.c_str(), c.value, c.threshold);
  std::string s = buf;
  if (!c.detail.empty()) s += " (" + c.detail + ")";
  return s;
}

}  // namespace ioncv
