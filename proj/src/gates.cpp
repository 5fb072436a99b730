#include "ioncv/gates.hpp"

#include <cmath>
#include <string>

#include "ioncv/error.hpp"

namespace ioncv {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix lower(int n) { return ladder(n, Ladder::Annihilate).matrix; }

Vector number_diag(int n) {
  Vector d(n);
  for (int k = 0; k < n; ++k) d[k] = static_cast<double>(k);
  return d;
}

void check_modes(const GateSpec& g, const std::vector<int>& cutoffs) {
  if (cutoffs.size() != gate_modes(g)) {
    throw IncompatibleGate(gate_name(g) + " acts on " + std::to_string(gate_modes(g)) +
                           " mode(s), got " + std::to_string(cutoffs.size()));
  }
  for (int n : cutoffs) {
    if (n < 2) throw InvalidDimension("cutoff must be at least 2");
  }
}

}  // namespace

Matrix gate_generator(const GateSpec& g, const std::vector<int>& cutoffs) {
  check_modes(g, cutoffs);
  const cplx i(0.0, 1.0);
  if (const auto* p = std::get_if<gate::Phase>(&g)) {
    return Matrix(p->theta * number_diag(cutoffs[0]).asDiagonal());
  }
  if (const auto* k = std::get_if<gate::Kerr>(&g)) {
    const Vector n = number_diag(cutoffs[0]);
    return Matrix((-0.5 * k->tau * n.array() * (n.array() - 1.0)).matrix().asDiagonal());
  }
  if (const auto* d = std::get_if<gate::Displace>(&g)) {
    const Matrix a = lower(cutoffs[0]);
    return i * (d->alpha * a.adjoint() - std::conj(d->alpha) * a);
  }
  if (const auto* s = std::get_if<gate::Squeeze>(&g)) {
    const Matrix a2 = lower(cutoffs[0]) * lower(cutoffs[0]);
    const cplx z = std::polar(s->r, s->phi);
    return 0.5 * i * (std::conj(z) * a2 - z * a2.adjoint());
  }
  if (const auto* t = std::get_if<gate::Trisqueeze>(&g)) {
    const Matrix a = lower(cutoffs[0]);
    const Matrix a3 = a * a * a;
    return t->r * (std::polar(1.0, t->phi) * a3.adjoint() + std::polar(1.0, -t->phi) * a3);
  }
  const Matrix a = kron(lower(cutoffs[0]), Matrix::Identity(cutoffs[1], cutoffs[1]));
  const Matrix b = kron(Matrix::Identity(cutoffs[0], cutoffs[0]), lower(cutoffs[1]));
  if (const auto* bs = std::get_if<gate::BeamSplitter>(&g)) {
    const Matrix ab = a * b.adjoint();
    return bs->theta * (std::polar(1.0, bs->phi) * ab + std::polar(1.0, -bs->phi) * ab.adjoint());
  }
  const auto& tms = std::get<gate::TwoModeSqueeze>(g);
  const Matrix ab = a * b;
  return -tms.r * (std::polar(1.0, tms.phi) * ab + std::polar(1.0, -tms.phi) * ab.adjoint());
}

DenseOperator ideal_unitary(const GateSpec& g, const std::vector<int>& cutoffs) {
  check_modes(g, cutoffs);
  Layout layout(cutoffs, false);
  if (const auto* p = std::get_if<gate::Phase>(&g)) {
    const Vector n = number_diag(cutoffs[0]);
    return {Matrix((cplx(0.0, -p->theta) * n).array().exp().matrix().asDiagonal()), layout};
  }
  if (const auto* k = std::get_if<gate::Kerr>(&g)) {
    const Vector n = number_diag(cutoffs[0]);
    const Vector ph = (cplx(0.0, 0.5 * k->tau) * n.array() * (n.array() - 1.0)).exp();
    return {Matrix(ph.asDiagonal()), layout};
  }
  return {HermitianSpectrum(gate_generator(g, cutoffs)).exp(cplx(0.0, -1.0)), layout};
}

SingleModeGates::SingleModeGates(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 2) throw InvalidDimension("cutoff must be at least 2");
  const Matrix a = lower(cutoff);
  const cplx i(0.0, 1.0);
  displace_ = HermitianSpectrum(i * (a.adjoint() - a));
  squeeze_ = HermitianSpectrum(0.5 * i * (a * a - a.adjoint() * a.adjoint()));
}

Vector SingleModeGates::phase(double theta) const {
  return (cplx(0.0, -theta) * number_diag(cutoff_)).array().exp();
}

Vector SingleModeGates::kerr(double tau) const {
  const Vector n = number_diag(cutoff_);
  return (cplx(0.0, 0.5 * tau) * n.array() * (n.array() - 1.0)).exp();
}

// D(α) = R D(|α|) R†, R = exp(i arg(α) n).
Matrix SingleModeGates::displace(cplx alpha) const {
  const Vector r = phase(-std::arg(alpha));
  const Matrix d = displace_.exp(cplx(0.0, -std::abs(alpha)));
  return r.asDiagonal() * d * r.conjugate().asDiagonal();
}

// S(r e^{iφ}) = R S(r) R†, R = exp(iφn/2).
Matrix SingleModeGates::squeeze(double r, double phi) const {
  const Vector rot = phase(-0.5 * phi);
  const Matrix s = squeeze_.exp(cplx(0.0, -r));
  return rot.asDiagonal() * s * rot.conjugate().asDiagonal();
}

}  // namespace ioncv
