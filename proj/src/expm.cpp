#include "ioncv/expm.hpp"

#include <algorithm>
#include <string>

#include "ioncv/error.hpp"

namespace ioncv {

HermitianSpectrum::HermitianSpectrum(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Matrix HermitianSpectrum::exp(cplx c) const {
  const Vector phases = (c * values_.cast<cplx>()).array().exp();
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Matrix HermitianSpectrum::apply_exp(cplx c, const Matrix& x) const {
  const Vector phases = (c * values_.cast<cplx>()).array().exp();
  Matrix y = vectors_.adjoint() * x;
  y = phases.asDiagonal() * y;
  return vectors_ * y;
}

double relative_hermiticity_error(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void require_hermitian(const Matrix& h, double tol, const char* what) {
  if (h.rows() != h.cols()) throw InvalidDimension(std::string(what) + ": matrix is not square");
  const double dev = relative_hermiticity_error(h);
  if (dev > tol) {
    throw NotHermitian(std::string(what) + ": matrix is not Hermitian (deviation " +
                           std::to_string(dev) + ")",
                       dev);
  }
}

Matrix expm_hermitian(const Matrix& h, double t) {
  return HermitianSpectrum(h).exp(cplx(0.0, -t));
}

}  // namespace ioncv
