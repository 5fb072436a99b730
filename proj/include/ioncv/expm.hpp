#pragma once

#include <Eigen/Dense>

#include "ioncv/fock.hpp"

namespace ioncv {

// Eigendecomposition of a Hermitian matrix, reused for exp(c·H) at many c.
class HermitianSpectrum {
 public:
  HermitianSpectrum() = default;
  explicit HermitianSpectrum(const Matrix& h);

  const Eigen::VectorXd& values() const { return values_; }
  const Matrix& vectors() const { return vectors_; }
  Eigen::Index dim() const { return values_.size(); }

  // exp(c·H).
  Matrix exp(cplx c) const;
  // exp(c·H)·x for a vector or a block of columns.
  Matrix apply_exp(cplx c, const Matrix& x) const;

 private:
  Eigen::VectorXd values_;
  Matrix vectors_;
};

// Max |H − H†| scaled by max(1, max|H|).
double relative_hermiticity_error(const Matrix& h);

// Throws NotHermitian when the relative deviation exceeds tol.
void require_hermitian(const Matrix& h, double tol, const char* what);

// exp(−i·H·t) for Hermitian H.
Matrix expm_hermitian(const Matrix& h, double t);

}  // namespace ioncv
