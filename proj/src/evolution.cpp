#include "ioncv/evolution.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ioncv/error.hpp"
#include "ioncv/expm.hpp"
#include "ioncv/ion_model.hpp"

namespace ioncv {

namespace {

constexpr double kHermitianTol = 1e-9;

double state_fidelity(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

Matrix polar_unitary(const Matrix& u) {
  Eigen::BDCSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

FockVector propagate_const(const DenseOperator& h, double t, const FockVector& psi) {
  if (!(h.layout == psi.layout())) throw LayoutMismatch("Hamiltonian and state layouts differ");
  require_hermitian(h.matrix, kHermitianTol, "propagate_const");
  if (t == 0.0) return psi;
  return FockVector(HermitianSpectrum(h.matrix).apply_exp(cplx(0.0, -t), psi.amplitudes()),
                    psi.layout());
}

DenseKernel::DenseKernel(std::function<DenseOperator(double)> h, Layout layout)
    : h_(std::move(h)), layout_(std::move(layout)) {}

void DenseKernel::step(double t_mid, double dt, Matrix& x) const {
  const DenseOperator h = h_(t_mid);
  if (!(h.layout == layout_)) throw LayoutMismatch("Hamiltonian layout changed during evolution");
  require_hermitian(h.matrix, kHermitianTol, "propagate_tdep");
  x = HermitianSpectrum(h.matrix).apply_exp(cplx(0.0, -dt), x);
}

IonKernel::IonKernel(std::shared_ptr<const IonStepper> stepper) : stepper_(std::move(stepper)) {}

const Layout& IonKernel::layout() const { return stepper_->layout(); }

void IonKernel::step(double t_mid, double dt, Matrix& x) const {
  stepper_->step(t_mid, dt, x);
}

std::optional<double> IonKernel::period() const { return stepper_->period(); }

double top_level_population(const Vector& psi, const Layout& layout, double fraction) {
  const std::size_t nsub = layout.dims.size();
  std::vector<int> threshold(nsub, layout.dims.empty() ? 0 : 1 << 30);
  for (std::size_t k = 0; k < layout.mode_count(); ++k) {
    const std::size_t s = layout.mode_subsystem(k);
    const int n = layout.dims[s];
    const int top = static_cast<int>(std::ceil(fraction * n - 1e-12));
    threshold[s] = n - top;
  }
  double pop = 0.0;
  std::vector<int> idx(nsub, 0);
  for (Eigen::Index flat = 0; flat < psi.size(); ++flat) {
    bool in_top = false;
    for (std::size_t s = 0; s < nsub; ++s) in_top = in_top || idx[s] >= threshold[s];
    if (in_top) pop += std::norm(psi[flat]);
    for (std::size_t s = nsub; s-- > 0;) {
      if (++idx[s] < layout.dims[s]) break;
      idx[s] = 0;
    }
  }
  return pop;
}

namespace {

struct Run {
  Vector state;
  double max_leakage = 0.0;
};

Run run_midpoint(const StepKernel& kernel, double t_end, const Vector& psi, long long steps) {
  Matrix x = psi;
  const double dt = t_end / static_cast<double>(steps);
  Run r;
  r.max_leakage = top_level_population(psi, kernel.layout());
  for (long long k = 0; k < steps; ++k) {
    kernel.step((static_cast<double>(k) + 0.5) * dt, dt, x);
    r.max_leakage = std::max(r.max_leakage, top_level_population(x.col(0), kernel.layout()));
  }
  r.state = x.col(0);
  return r;
}

}  // namespace

EvolutionReport propagate_tdep(const std::function<DenseOperator(double)>& h, double t_end,
                               const FockVector& psi, const StepControl& ctrl) {
  return propagate_tdep(DenseKernel(h, psi.layout()), t_end, psi, ctrl);
}

EvolutionReport propagate_tdep(const StepKernel& kernel, double t_end, const FockVector& psi,
                               const StepControl& ctrl) {
  if (!(t_end > 0.0)) throw Error("evolution time must be positive");
  if (!(kernel.layout() == psi.layout())) throw LayoutMismatch("kernel and state layouts differ");
  long long steps = ctrl.initial_steps;
  if (steps <= 0) {
    if (auto p = kernel.period()) {
      steps = std::max<long long>(1, static_cast<long long>(std::ceil(t_end / (*p / 40.0))));
    } else {
      steps = 64;
    }
  }
  Run prev = run_midpoint(kernel, t_end, psi.amplitudes(), steps);
  double f_prev = 0.0;
  double f_last = 0.0;
  for (int round = 1; round <= ctrl.max_rounds; ++round) {
    steps *= 2;
    Run cur = run_midpoint(kernel, t_end, psi.amplitudes(), steps);
    f_prev = f_last;
    f_last = state_fidelity(prev.state, cur.state);
    if (1.0 - f_last < ctrl.tolerance) {
      EvolutionReport rep{FockVector(cur.state, psi.layout()), 0.0, 0, 0.0, 0, 0.0};
      rep.norm_drift = std::abs(cur.state.norm() - psi.norm());
      rep.steps_used = steps;
      rep.max_leakage = cur.max_leakage;
      rep.refinements = round;
      rep.last_fidelity_change = 1.0 - f_last;
      return rep;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("time-dependent evolution did not converge", f_prev, f_last);
}

PeriodicPropagator::PeriodicPropagator(const StepKernel& kernel, double period, long long substeps)
    : kernel_(kernel), period_(period), substeps_(substeps) {
  if (!(period > 0.0) || substeps < 1) throw Error("invalid period or substep count");
  const Eigen::Index d = kernel.layout().total();
  Matrix u = Matrix::Identity(d, d);
  const double dt = period / static_cast<double>(substeps);
  for (long long k = 0; k < substeps; ++k) kernel.step((static_cast<double>(k) + 0.5) * dt, dt, u);
  powers_.push_back(polar_unitary(u));
}

void PeriodicPropagator::ensure_power(int k) const {
  while (static_cast<int>(powers_.size()) <= k) {
    const Matrix& last = powers_.back();
    powers_.push_back(polar_unitary(last * last));
  }
}

void PeriodicPropagator::partial_period(double s, Matrix& x) const {
  const double dt = period_ / static_cast<double>(substeps_);
  const long long full = std::min<long long>(substeps_, static_cast<long long>(std::floor(s / dt)));
  for (long long k = 0; k < full; ++k) kernel_.step((static_cast<double>(k) + 0.5) * dt, dt, x);
  const double rest = s - static_cast<double>(full) * dt;
  if (rest > 0.0) kernel_.step(static_cast<double>(full) * dt + 0.5 * rest, rest, x);
}

Matrix PeriodicPropagator::evolve(double t, const Matrix& x) const {
  if (t < 0.0) throw Error("evolution time must be >= 0");
  long long n = static_cast<long long>(std::floor(t / period_));
  double s = t - static_cast<double>(n) * period_;
  if (s < 0.0) {
    --n;
    s += period_;
  }
  Matrix y = x;
  for (int bit = 0; n > 0; ++bit, n >>= 1) {
    if (n & 1) {
      ensure_power(bit);
      y = powers_[bit] * y;
    }
  }
  partial_period(s, y);
  return y;
}

std::pair<double, Vector> PeriodicPropagator::floquet_mode(const Vector& probe) const {
  Eigen::ComplexEigenSolver<Matrix> es(powers_.front());
  Eigen::Index best = 0;
  double best_overlap = -1.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const Vector v = es.eigenvectors().col(k).normalized();
    const double o = std::norm(v.dot(probe));
    if (o > best_overlap) {
      best_overlap = o;
      best = k;
    }
  }
  const double eps = -std::arg(es.eigenvalues()[best]) / period_;
  return {eps, es.eigenvectors().col(best).normalized()};
}

SampledEvolution evolve_periodic(const StepKernel& kernel, const std::vector<double>& times,
                                 const FockVector& psi, long long initial_substeps,
                                 double tolerance, int max_rounds) {
  const auto period = kernel.period();
  if (!period) throw Error("kernel is not periodic");
  if (times.empty()) throw Error("no sample times");
  if (!(kernel.layout() == psi.layout())) throw LayoutMismatch("kernel and state layouts differ");
  const double t_last = *std::max_element(times.begin(), times.end());

  long long m = initial_substeps;
  Vector prev_end;
  double f_prev = 0.0;
  double f_last = 0.0;
  for (int round = 0; round <= max_rounds; ++round, m *= 2) {
    PeriodicPropagator prop(kernel, *period, m);
    const Vector end = prop.evolve(t_last, psi.amplitudes()).col(0);
    if (round > 0) {
      f_prev = f_last;
      f_last = state_fidelity(prev_end, end);
      if (1.0 - f_last < tolerance) {
        SampledEvolution out;
        out.substeps = m;
        out.last_fidelity_change = 1.0 - f_last;
        out.times = times;
        for (double t : times) {
          const Vector v = prop.evolve(t, psi.amplitudes()).col(0);
          out.max_leakage = std::max(out.max_leakage, top_level_population(v, psi.layout()));
          out.norm_drift = std::max(out.norm_drift, std::abs(v.norm() - psi.norm()));
          out.states.emplace_back(v, psi.layout());
        }
        return out;
      }
    }
    prev_end = end;
  }
  throw ConvergenceError("periodic evolution did not converge", f_prev, f_last);
}

double dressed_phonon_frequency(const StepKernel& kernel, long long substeps) {
  const Layout& layout = kernel.layout();
  if (!layout.spin || layout.dims.size() != 2) throw LayoutMismatch("need a spin ⊗ mode kernel");
  const auto period = kernel.period();
  if (!period) throw Error("kernel is not periodic");
  PeriodicPropagator prop(kernel, *period, substeps);
  const double r = 1.0 / std::sqrt(2.0);
  auto probe = [&](int n) {
    Vector v = Vector::Zero(layout.total());
    v[n] = r;
    v[layout.dims[1] + n] = r;
    return v;
  };
  const double gap = prop.floquet_mode(probe(1)).first - prop.floquet_mode(probe(0)).first;
  const double w = 2.0 * kPi / *period;
  return gap - w * std::round(gap / w);
}

}  // namespace ioncv
