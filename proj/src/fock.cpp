#include "ioncv/fock.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ioncv/error.hpp"

namespace ioncv {

Eigen::Index Layout::total() const {
  Eigen::Index n = 1;
  for (int d : dims) n *= d;
  return n;
}

Layout concat(const Layout& a, const Layout& b) {
  if (b.spin && !a.dims.empty()) {
    throw LayoutMismatch("spin subsystem must come first in a layout");
  }
  Layout out = a;
  out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
  out.spin = a.spin || (a.dims.empty() && b.spin);
  return out;
}

namespace {

void check_layout(const Layout& layout) {
  if (layout.dims.empty()) throw InvalidDimension("empty layout");
  for (std::size_t i = 0; i < layout.dims.size(); ++i) {
    if (layout.dims[i] < 1) throw InvalidDimension("subsystem dimension must be positive");
  }
  if (layout.spin && layout.dims.front() != 2) {
    throw InvalidDimension("spin subsystem must have dimension 2");
  }
}

// Row-major strides of the product index.
std::vector<Eigen::Index> strides(const Layout& layout) {
  std::vector<Eigen::Index> s(layout.dims.size(), 1);
  for (std::size_t i = layout.dims.size(); i-- > 1;) s[i - 1] = s[i] * layout.dims[i];
  return s;
}

}  // namespace

FockVector::FockVector(Vector amplitudes, Layout layout)
    : amplitudes_(std::move(amplitudes)), layout_(std::move(layout)) {
  check_layout(layout_);
  if (amplitudes_.size() != layout_.total()) {
    throw InvalidDimension("amplitude count " + std::to_string(amplitudes_.size()) +
                           " does not match layout size " + std::to_string(layout_.total()));
  }
}

FockVector FockVector::basis(const Layout& layout, const std::vector<int>& indices) {
  check_layout(layout);
  if (indices.size() != layout.dims.size()) {
    throw InvalidDimension("basis index count does not match layout");
  }
  const auto s = strides(layout);
  Eigen::Index flat = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= layout.dims[i]) {
      throw InvalidDimension("basis index out of range");
    }
    flat += indices[i] * s[i];
  }
  Vector v = Vector::Zero(layout.total());
  v[flat] = 1.0;
  return FockVector(std::move(v), layout);
}

FockVector FockVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw InvalidDimension("cannot normalize the zero vector");
  return FockVector(amplitudes_ / n, layout_);
}

DenseOperator::DenseOperator(Matrix m, Layout l) : matrix(std::move(m)), layout(std::move(l)) {
  check_layout(layout);
  if (matrix.rows() != matrix.cols() || matrix.rows() != layout.total()) {
    throw InvalidDimension("operator must be square with dimension equal to the layout size");
  }
}

double DenseOperator::hermiticity_error() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

FockVector DenseOperator::apply(const FockVector& psi) const {
  if (!(psi.layout() == layout)) throw LayoutMismatch("operator and state layouts differ");
  return FockVector(matrix * psi.amplitudes(), layout);
}

DensityMatrix::DensityMatrix(Matrix entries, Layout layout)
    : entries_(std::move(entries)), layout_(std::move(layout)) {
  check_layout(layout_);
  if (entries_.rows() != entries_.cols() || entries_.rows() != layout_.total()) {
    throw InvalidDimension("density matrix dimension does not match layout");
  }
}

DensityMatrix DensityMatrix::pure(const FockVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.layout());
}

double DensityMatrix::min_eigenvalue() const {
  Matrix h = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DenseOperator ladder(int cutoff, Ladder kind) {
  if (cutoff < 2) throw InvalidDimension("cutoff must be at least 2");
  Matrix m = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) {
    const double s = std::sqrt(static_cast<double>(n));
    switch (kind) {
      case Ladder::Annihilate: m(n - 1, n) = s; break;
      case Ladder::Create: m(n, n - 1) = s; break;
      case Ladder::Number: m(n, n) = n; break;
    }
  }
  return {std::move(m), Layout::mode(cutoff)};
}

DenseOperator quadrature(int cutoff, Quadrature kind) {
  const Matrix a = ladder(cutoff, Ladder::Annihilate).matrix;
  const Matrix ad = a.adjoint();
  const double r = 1.0 / std::sqrt(2.0);
  if (kind == Quadrature::X) return {r * (a + ad), Layout::mode(cutoff)};
  return {cplx(0.0, r) * (ad - a), Layout::mode(cutoff)};
}

DenseOperator identity(const Layout& layout) {
  check_layout(layout);
  return {Matrix::Identity(layout.total(), layout.total()), layout};
}

DenseOperator pauli(Pauli kind) {
  Matrix m = Matrix::Zero(2, 2);
  const cplx i(0.0, 1.0);
  switch (kind) {
    case Pauli::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case Pauli::Y: m(0, 1) = -i; m(1, 0) = i; break;
    case Pauli::Z: m(0, 0) = -1.0; m(1, 1) = 1.0; break;
    case Pauli::Raise: m(1, 0) = 1.0; break;
    case Pauli::Lower: m(0, 1) = 1.0; break;
  }
  return {std::move(m), Layout({2}, true)};
}

DenseOperator sigma_phi(double phi) {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = std::polar(1.0, phi);
  m(0, 1) = std::polar(1.0, -phi);
  return {std::move(m), Layout({2}, true)};
}

FockVector fock_state(int n, int cutoff) {
  if (cutoff < 2) throw InvalidDimension("cutoff must be at least 2");
  return FockVector::basis(Layout::mode(cutoff), {n});
}

double coherent_tail(cplx alpha, int cutoff) {
  const double x = std::norm(alpha);
  if (x == 0.0) return 0.0;
  // Sum the kept Poisson weights in log space.
  double kept = 0.0;
  for (int n = 0; n < cutoff; ++n) {
    kept += std::exp(-x + n * std::log(x) - std::lgamma(n + 1.0));
  }
  return std::max(0.0, 1.0 - kept);
}

FockVector coherent(cplx alpha, int cutoff, double max_leak) {
  if (cutoff < 2) throw InvalidDimension("cutoff must be at least 2");
  const double leaked = coherent_tail(alpha, cutoff);
  if (leaked > max_leak) {
    throw CutoffTooSmall("coherent state leaks " + std::to_string(leaked) +
                             " above cutoff " + std::to_string(cutoff),
                         leaked);
  }
  Vector v(cutoff);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cutoff; ++n) v[n] = v[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  v /= v.norm();
  return FockVector(std::move(v), Layout::mode(cutoff));
}

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

}  // namespace

FockVector tensor(const FockVector& a, const FockVector& b) {
  return FockVector(kron(a.amplitudes(), b.amplitudes()), concat(a.layout(), b.layout()));
}

DenseOperator tensor(const DenseOperator& a, const DenseOperator& b) {
  return {kron(a.matrix, b.matrix), concat(a.layout, b.layout)};
}

namespace {

Layout kept_layout(const Layout& layout, std::size_t keep) {
  const bool spin = layout.spin && keep == 0;
  return Layout({layout.dims[keep]}, spin);
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep) {
  const Layout& layout = rho.layout();
  if (layout.dims.size() < 2) throw InvalidDimension("partial trace needs at least two subsystems");
  if (keep >= layout.dims.size()) throw InvalidDimension("subsystem index out of range");
  const auto s = strides(layout);
  const Eigen::Index dk = layout.dims[keep];
  const Eigen::Index inner = s[keep];
  const Eigen::Index outer = layout.total() / (inner * dk);
  Matrix red = Matrix::Zero(dk, dk);
  // flat = (o * dk + i) * inner + r
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index r = 0; r < inner; ++r) {
      for (Eigen::Index i = 0; i < dk; ++i) {
        const Eigen::Index fi = (o * dk + i) * inner + r;
        for (Eigen::Index j = 0; j < dk; ++j) {
          red(i, j) += rho.matrix()(fi, (o * dk + j) * inner + r);
        }
      }
    }
  }
  return DensityMatrix(std::move(red), kept_layout(layout, keep));
}

DensityMatrix partial_trace(const FockVector& psi, std::size_t keep) {
  const Layout& layout = psi.layout();
  if (layout.dims.size() < 2) throw InvalidDimension("partial trace needs at least two subsystems");
  if (keep >= layout.dims.size()) throw InvalidDimension("subsystem index out of range");
  const auto s = strides(layout);
  const Eigen::Index dk = layout.dims[keep];
  const Eigen::Index inner = s[keep];
  const Eigen::Index outer = layout.total() / (inner * dk);
  // Columns of `m` enumerate the traced-out configurations.
  Matrix m(dk, outer * inner);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index i = 0; i < dk; ++i) {
      for (Eigen::Index r = 0; r < inner; ++r) {
        m(i, o * inner + r) = psi[(o * dk + i) * inner + r];
      }
    }
  }
  return DensityMatrix(m * m.adjoint(), kept_layout(layout, keep));
}

DensityMatrix trace_out_spin(const FockVector& psi) {
  const Layout& layout = psi.layout();
  if (!layout.spin) return DensityMatrix::pure(psi);
  if (layout.dims.size() < 2) throw InvalidDimension("state has no bosonic mode");
  const Eigen::Index d = layout.total() / 2;
  const auto g = psi.amplitudes().head(d);
  const auto e = psi.amplitudes().tail(d);
  Matrix rho = g * g.adjoint() + e * e.adjoint();
  std::vector<int> dims(layout.dims.begin() + 1, layout.dims.end());
  return DensityMatrix(std::move(rho), Layout(std::move(dims), false));
}

DensityMatrix reduce_to_mode(const FockVector& psi, std::size_t mode) {
  const Layout& layout = psi.layout();
  if (layout.dims.size() == 1 && !layout.spin) return DensityMatrix::pure(psi);
  return partial_trace(psi, layout.mode_subsystem(mode));
}

cplx expectation(const DenseOperator& op, const FockVector& psi) {
  if (!(psi.layout() == op.layout)) throw LayoutMismatch("operator and state layouts differ");
  return psi.amplitudes().dot(op.matrix * psi.amplitudes());
}

cplx expectation(const DenseOperator& op, const DensityMatrix& rho) {
  if (!(rho.layout() == op.layout)) throw LayoutMismatch("operator and state layouts differ");
  return (op.matrix * rho.matrix()).trace();
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace ioncv
