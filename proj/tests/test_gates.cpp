#include <gtest/gtest.h>

#include <cmath>

#include "ioncv/analysis.hpp"
#include "ioncv/error.hpp"
#include "ioncv/gates.hpp"

using namespace ioncv;

namespace {

double unitarity_error_low(const Matrix& u, double keep = 0.8) {
  const Eigen::Index k = static_cast<Eigen::Index>(keep * u.rows());
  const Matrix p = (u.adjoint() * u).topLeftCorner(k, k);
  return (p - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(IdealUnitary, DisplaceMakesCoherent) {
  const FockVector out = ideal_unitary(gate::Displace{3.0}, {40}).apply(fock_state(0, 40));
  EXPECT_GT(fidelity(out, coherent(3.0, 40)), 1.0 - 1e-8);
  const cplx a(-0.8, 1.1);
  EXPECT_GT(fidelity(ideal_unitary(gate::Displace{a}, {40}).apply(fock_state(0, 40)), coherent(a, 40)),
            1.0 - 1e-8);
}

TEST(IdealUnitary, BeamSplitterFullSwap) {
  const FockVector in = FockVector::basis(Layout({6, 6}, false), {1, 0});
  const FockVector want = FockVector::basis(Layout({6, 6}, false), {0, 1});
  const FockVector out = ideal_unitary(gate::BeamSplitter{kPi / 2, 0.0}, {6, 6}).apply(in);
  EXPECT_NEAR(fidelity(out, want), 1.0, 1e-10);
}

TEST(IdealUnitary, TwoModeSqueezedVacuumIsThermal) {
  const double r = 0.5;
  const int n = 20;
  const FockVector out =
      ideal_unitary(gate::TwoModeSqueeze{r, 0.3}, {n, n}).apply(FockVector::basis(Layout({n, n}, false), {0, 0}));
  const DensityMatrix red = partial_trace(out, 0);
  EXPECT_NEAR(mean_phonon(red), std::sinh(r) * std::sinh(r), 1e-4);
  const double t2 = std::tanh(r) * std::tanh(r);
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(red.matrix()(k, k).real(), std::pow(t2, k) / std::pow(std::cosh(r), 2), 1e-6);
  }
  EXPECT_LT((red.matrix() - Matrix(red.matrix().diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(IdealUnitary, KerrCommutesWithNumber) {
  const Matrix u = ideal_unitary(gate::Kerr{0.9}, {15}).matrix;
  EXPECT_LT(commutator(u, ladder(15, Ladder::Number).matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IdealUnitary, SqueezedVacuumVariance) {
  // At N=60 even the exact amplitudes truncated to 60 levels miss e^{-2r}/2 by 3.8%.
  const double r = 1.4;
  const int n = 120;
  const FockVector s = ideal_unitary(gate::Squeeze{r, 0.0}, {n}).apply(fock_state(0, n));
  const DenseOperator x = quadrature(n, Quadrature::X);
  const double mean = expectation(x, s).real();
  const double var = expectation(DenseOperator(x.matrix * x.matrix, x.layout), s).real() - mean * mean;
  EXPECT_NEAR(var / (std::exp(-2.0 * r) / 2.0), 1.0, 0.02);
}

TEST(IdealUnitary, UnitaryOnLowSubspace) {
  const std::vector<GateSpec> gates{gate::Phase{0.4},         gate::Displace{cplx(1.0, 0.5)},
                                    gate::Squeeze{0.8, 0.3},   gate::Trisqueeze{0.1, 0.2},
                                    gate::Kerr{kPi}};
  for (const auto& g : gates) EXPECT_LT(unitarity_error_low(ideal_unitary(g, {30}).matrix), 1e-9) << gate_name(g);
  EXPECT_LT(unitarity_error_low(ideal_unitary(gate::BeamSplitter{0.7, 0.2}, {8, 8}).matrix), 1e-9);
  EXPECT_LT(unitarity_error_low(ideal_unitary(gate::TwoModeSqueeze{0.3, 0.2}, {8, 8}).matrix), 1e-9);
}

TEST(IdealUnitary, DisplaceInverse) {
  const Matrix p = ideal_unitary(gate::Displace{cplx(0.7, -0.4)}, {30}).matrix *
                   ideal_unitary(gate::Displace{cplx(-0.7, 0.4)}, {30}).matrix;
  EXPECT_LT((p - Matrix::Identity(30, 30)).topLeftCorner(24, 24).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(IdealUnitary, DiagonalGates) {
  for (const GateSpec g : {GateSpec{gate::Phase{1.2}}, GateSpec{gate::Kerr{0.7}}}) {
    const Matrix u = ideal_unitary(g, {12}).matrix;
    EXPECT_EQ((u - Matrix(u.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
  }
  const Vector d = ideal_unitary(gate::Phase{0.5}, {4}).matrix.diagonal();
  EXPECT_LT(std::abs(d[3] - std::polar(1.0, -1.5)), 1e-15);
  const Vector k = ideal_unitary(gate::Kerr{0.5}, {4}).matrix.diagonal();
  EXPECT_LT(std::abs(k[3] - std::polar(1.0, 0.5 * 6.0 / 2.0)), 1e-15);
}

TEST(IdealUnitary, TrisqueezeFirstOrderSupport) {
  const double r = 1e-5;
  const Matrix d = ideal_unitary(gate::Trisqueeze{r, 0.0}, {12}).matrix - Matrix::Identity(12, 12);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      // Second-order terms are r² times matrix elements of order n³.
      if (std::abs(i - j) != 3) EXPECT_LT(std::abs(d(i, j)), r * r * 2000.0) << i << "," << j;
    }
  }
  EXPECT_NEAR(std::abs(d(3, 0)), r * std::sqrt(6.0), 1e-9);
}

TEST(IdealUnitary, KerrPiMakesCat) {
  const FockVector cat = ideal_unitary(gate::Kerr{kPi}, {32}).apply(coherent(1.5, 32));
  EXPECT_LT(wigner(cat).min(), -0.01);
}

TEST(IdealUnitary, RejectsModeMismatch) {
  EXPECT_THROW(ideal_unitary(gate::BeamSplitter{0.3, 0.0}, {6}), IncompatibleGate);
  EXPECT_THROW(ideal_unitary(gate::Squeeze{0.3, 0.0}, {6, 6}), IncompatibleGate);
}

TEST(SingleModeGates, MatchIdealUnitary) {
  const SingleModeGates kit(18);
  EXPECT_LT((Matrix(kit.phase(0.9).asDiagonal()) - ideal_unitary(gate::Phase{0.9}, {18}).matrix).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((Matrix(kit.kerr(-0.4).asDiagonal()) - ideal_unitary(gate::Kerr{-0.4}, {18}).matrix).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((kit.displace(cplx(0.3, -0.8)) - ideal_unitary(gate::Displace{cplx(0.3, -0.8)}, {18}).matrix).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((kit.squeeze(0.6, 2.2) - ideal_unitary(gate::Squeeze{0.6, 2.2}, {18}).matrix).cwiseAbs().maxCoeff(), 1e-12);
}
