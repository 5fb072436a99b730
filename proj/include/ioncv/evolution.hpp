#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ioncv/fock.hpp"

namespace ioncv {

class IonStepper;

struct EvolutionReport {
  FockVector final_state;
  double norm_drift = 0.0;
  long long steps_used = 0;
  double max_leakage = 0.0;  // peak population in the top 10% of Fock levels
  int refinements = 0;
  double last_fidelity_change = 0.0;
};

struct StepControl {
  long long initial_steps = 0;  // 0: derive from the kernel's natural timescale
  double tolerance = 1e-9;
  int max_rounds = 20;
};

// exp(−iHt)ψ. H must be Hermitian to relative tolerance 1e-9.
FockVector propagate_const(const DenseOperator& h, double t, const FockVector& psi);

// One midpoint substep: columns of x advanced by exp(−i H(t_mid) dt).
class StepKernel {
 public:
  virtual ~StepKernel() = default;
  virtual const Layout& layout() const = 0;
  virtual void step(double t_mid, double dt, Matrix& x) const = 0;
  // Common period of H(t), if any.
  virtual std::optional<double> period() const { return std::nullopt; }
};

// Kernel that builds H(t) and exponentiates it exactly at each substep.
class DenseKernel : public StepKernel {
 public:
  DenseKernel(std::function<DenseOperator(double)> h, Layout layout);
  const Layout& layout() const override { return layout_; }
  void step(double t_mid, double dt, Matrix& x) const override;

 private:
  std::function<DenseOperator(double)> h_;
  Layout layout_;
};

// Kernel over the closed-form full ion Hamiltonian step.
class IonKernel : public StepKernel {
 public:
  explicit IonKernel(std::shared_ptr<const IonStepper> stepper);
  const Layout& layout() const override;
  void step(double t_mid, double dt, Matrix& x) const override;
  std::optional<double> period() const override;

 private:
  std::shared_ptr<const IonStepper> stepper_;
};

// Piecewise-constant midpoint integration over [0, T] with global step
// halving until successive end states agree to 1 − tolerance in fidelity.
// Throws ConvergenceError after max_rounds refinements.
EvolutionReport propagate_tdep(const std::function<DenseOperator(double)>& h, double t_end,
                               const FockVector& psi, const StepControl& ctrl = {});
EvolutionReport propagate_tdep(const StepKernel& kernel, double t_end, const FockVector& psi,
                               const StepControl& ctrl = {});

// Evolution under a periodic Hamiltonian: one period is integrated with a
// fixed midpoint grid and reused by repeated squaring.
class PeriodicPropagator {
 public:
  PeriodicPropagator(const StepKernel& kernel, double period, long long substeps);

  long long substeps() const { return substeps_; }
  double period() const { return period_; }
  const Matrix& one_period() const { return powers_.front(); }

  // U(t, 0) applied to columns of x.
  Matrix evolve(double t, const Matrix& x) const;
  // Quasi-energy (in (−π/T, π/T]) and Floquet vector of the mode that
  // overlaps most with `probe`.
  std::pair<double, Vector> floquet_mode(const Vector& probe) const;

 private:
  void ensure_power(int k) const;
  // Advance columns of x from the start of a period by s ∈ [0, T).
  void partial_period(double s, Matrix& x) const;

  const StepKernel& kernel_;
  double period_;
  long long substeps_;
  mutable std::vector<Matrix> powers_;  // U_T^(2^k)
};

struct SampledEvolution {
  std::vector<double> times;
  std::vector<FockVector> states;
  long long substeps = 0;  // per period of the accepted grid
  double max_leakage = 0.0;
  double norm_drift = 0.0;
  double last_fidelity_change = 0.0;
};

// States at the given times under a periodic kernel. The substep count per
// period starts at `initial_substeps` and doubles until the final states
// of two successive grids agree to 1 − tolerance.
SampledEvolution evolve_periodic(const StepKernel& kernel, const std::vector<double>& times,
                                 const FockVector& psi, long long initial_substeps = 256,
                                 double tolerance = 1e-9, int max_rounds = 12);

// ε(|+,1>) − ε(|+,0>) for a periodic kernel on spin ⊗ one mode, wrapped
// into (−π/T, π/T].
double dressed_phonon_frequency(const StepKernel& kernel, long long substeps);

// Population in the top ⌈fraction·N⌉ levels of any mode.
double top_level_population(const Vector& psi, const Layout& layout, double fraction = 0.1);

}  // namespace ioncv
