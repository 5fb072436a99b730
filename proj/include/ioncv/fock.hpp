#pragma once

// Truncated Fock-space linear algebra: states, operators, tensor products and
// partial traces. Basis ordering is spin first (|g> = 0, |e> = 1), then the
// bosonic modes in order; the last subsystem varies fastest.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace ioncv {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Ordered subsystem dimensions. When `spin` is set the first entry is the
// two-level electronic system and every other entry is a bosonic mode.
struct Layout {
  std::vector<int> dims;
  bool spin = false;

  Layout() = default;
  Layout(std::initializer_list<int> d, bool has_spin = false)
      : dims(d), spin(has_spin) {}
  Layout(std::vector<int> d, bool has_spin) : dims(std::move(d)), spin(has_spin) {}

  static Layout mode(int cutoff) { return Layout({cutoff}, false); }
  static Layout spin_mode(int cutoff) { return Layout({2, cutoff}, true); }

  Eigen::Index total() const;
  std::size_t subsystems() const { return dims.size(); }
  std::size_t mode_count() const { return dims.size() - (spin ? 1 : 0); }
  // Subsystem index of the k-th bosonic mode.
  std::size_t mode_subsystem(std::size_t k) const { return k + (spin ? 1 : 0); }
  int cutoff(std::size_t k = 0) const { return dims.at(mode_subsystem(k)); }

  friend bool operator==(const Layout&, const Layout&) = default;
};

Layout concat(const Layout& a, const Layout& b);

// Pure state on a (spin ⊗) product of truncated Fock spaces.
class FockVector {
 public:
  FockVector(Vector amplitudes, Layout layout);

  static FockVector basis(const Layout& layout, const std::vector<int>& indices);

  const Vector& amplitudes() const { return amplitudes_; }
  const Layout& layout() const { return layout_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  cplx operator[](Eigen::Index i) const { return amplitudes_[i]; }

  double norm() const { return amplitudes_.norm(); }
  FockVector normalized() const;

 private:
  Vector amplitudes_;
  Layout layout_;
};

struct DenseOperator {
  Matrix matrix;
  Layout layout;

  DenseOperator(Matrix m, Layout l);

  Eigen::Index dim() const { return matrix.rows(); }
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }
  DenseOperator adjoint() const { return {matrix.adjoint(), layout}; }
  FockVector apply(const FockVector& psi) const;
};

class DensityMatrix {
 public:
  DensityMatrix(Matrix entries, Layout layout);
  static DensityMatrix pure(const FockVector& psi);

  const Matrix& matrix() const { return entries_; }
  const Layout& layout() const { return layout_; }
  Eigen::Index dim() const { return entries_.rows(); }
  double trace() const { return entries_.trace().real(); }
  // Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

 private:
  Matrix entries_;
  Layout layout_;
};

enum class Ladder { Annihilate, Create, Number };
enum class Quadrature { X, P };
enum class Pauli { X, Y, Z, Raise, Lower };

DenseOperator ladder(int cutoff, Ladder kind);
// X = (a + a†)/√2, P = i(a† − a)/√2.
DenseOperator quadrature(int cutoff, Quadrature kind);
DenseOperator identity(const Layout& layout);
// σ+ = |e><g|, σ− = |g><e|; σ_y = i(σ+ − σ−).
DenseOperator pauli(Pauli kind);
// cos φ σ_x + sin φ σ_y = e^{iφ} σ+ + e^{−iφ} σ−.
DenseOperator sigma_phi(double phi);

FockVector fock_state(int n, int cutoff);

// Population a coherent state of amplitude alpha keeps above the cutoff.
double coherent_tail(cplx alpha, int cutoff);
// Throws CutoffTooSmall when coherent_tail exceeds max_leak.
FockVector coherent(cplx alpha, int cutoff, double max_leak = 1e-6);

FockVector tensor(const FockVector& a, const FockVector& b);
DenseOperator tensor(const DenseOperator& a, const DenseOperator& b);

// Reduced state on subsystem `keep` (index into layout.dims).
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep);
DensityMatrix partial_trace(const FockVector& psi, std::size_t keep);

// State of all bosonic modes with the spin traced out.
DensityMatrix trace_out_spin(const FockVector& psi);

// Single-mode state of the first bosonic mode: the vector itself when there is
// no other subsystem, otherwise the reduced density matrix.
DensityMatrix reduce_to_mode(const FockVector& psi, std::size_t mode = 0);

cplx expectation(const DenseOperator& op, const FockVector& psi);
cplx expectation(const DenseOperator& op, const DensityMatrix& rho);

Matrix commutator(const Matrix& a, const Matrix& b);

}  // namespace ioncv
