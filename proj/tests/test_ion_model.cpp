#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ioncv/analysis.hpp"
#include "ioncv/error.hpp"
#include "ioncv/evolution.hpp"
#include "ioncv/expm.hpp"
#include "ioncv/gates.hpp"
#include "ioncv/ion_model.hpp"

using namespace ioncv;

namespace {

const double kNu = 2.0 * kPi * 3.0e6;
const double kRabi = 2.0 * kPi * 1.0e5;

FockVector plus_times(const FockVector& psi) {
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return tensor(FockVector(plus, Layout({2}, true)), psi);
}

}  // namespace

TEST(IonConfig, ValidateRanges) {
  EXPECT_NO_THROW(IonConfig::single(kNu, kRabi, 0.05).validate());
  EXPECT_THROW(IonConfig::single(-kNu, kRabi, 0.05).validate(), ConfigError);
  EXPECT_THROW(IonConfig::single(kNu, 0.0, 0.05).validate(), ConfigError);
  EXPECT_THROW(IonConfig::single(kNu, kRabi, 1.2).validate(), ConfigError);
  EXPECT_FALSE(IonConfig::single(kNu, kRabi, 0.4).validate().empty());
  EXPECT_TRUE(IonConfig::single(kNu, kRabi, 0.1).validate().empty());
}

TEST(CorrectedRabi, Formula) {
  EXPECT_EQ(corrected_rabi(kRabi, 0.0), kRabi);
  EXPECT_NEAR(corrected_rabi(kRabi, 0.3), kRabi * std::exp(-0.09), 1e-9);
  double prev = corrected_rabi(kRabi, 0.0);
  for (int i = 1; i <= 50; ++i) {
    const double r = corrected_rabi(kRabi, 0.01 * i);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(FullHamiltonian, VanishingEtaIsCarrier) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 1e-9);
  const DenseOperator h = full_hamiltonian(1.7e-7, ion, DriveSpec::single(0.0, 0.0), {6});
  const Matrix expect = tensor(pauli(Pauli::X), identity(Layout::mode(6))).matrix * (0.5 * kRabi);
  EXPECT_LT((h.matrix - expect).cwiseAbs().maxCoeff() / kRabi, 1e-7);
}

TEST(FullHamiltonian, HermitianRandomDraws) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const IonConfig ion = IonConfig::single(kNu * (0.5 + u(rng)), kRabi * (0.5 + u(rng)), 0.3 * u(rng) + 0.01);
    DriveSpec d;
    d.tones = {{kNu * (2.0 * u(rng) - 1.0), 6.0 * u(rng), 1.0}, {-kNu * u(rng), -2.0 * u(rng), 1.0}};
    const DenseOperator h = full_hamiltonian(1e-5 * u(rng), ion, d, {8});
    EXPECT_LT(h.hermiticity_error(), 1e-12 * kRabi);
  }
}

TEST(FullHamiltonian, LambDickeExpansion) {
  // Residual against the first-order expansion of exp(iγ) scales as η².
  auto residual = [](double eta) {
    const IonConfig ion = IonConfig::single(kNu, kRabi, eta);
    const int n = 12;
    const DenseOperator h = full_hamiltonian(0.0, ion, DriveSpec::single(kNu, 0.0), {n});
    const Matrix a = ladder(n, Ladder::Annihilate).matrix;
    const Matrix first = Matrix::Identity(n, n) + cplx(0.0, eta) * (a + a.adjoint());
    Matrix approx = Matrix::Zero(2 * n, 2 * n);
    approx.bottomLeftCorner(n, n) = 0.5 * kRabi * first;
    approx.topRightCorner(n, n) = 0.5 * kRabi * first.adjoint();
    return (h.matrix - approx).norm() / kRabi;
  };
  const double r1 = residual(0.05);
  const double r2 = residual(0.025);
  EXPECT_LT(r1, 0.1);
  EXPECT_NEAR(r1 / r2, 4.0, 0.2);
}

TEST(GateTime, DisplacementInversion) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.1);
  const GatePulse p = gate_time_and_drive(gate::Displace{3.0}, ion);
  const double omega = kRabi * std::exp(-0.01);
  EXPECT_NEAR(p.duration, 2.0 * 3.0 / (omega * 0.1), 1e-15);
  ASSERT_EQ(p.drive.tones.size(), 2u);
  EXPECT_NEAR(std::abs(p.drive.tones[0].detuning), kNu, 1e-6);
}

TEST(GateTime, ZeroPhaseIsInstant) {
  EXPECT_EQ(gate_time_and_drive(gate::Phase{0.0}, IonConfig::single(kNu, kRabi, 0.05)).duration, 0.0);
}

TEST(GateTime, DisplacementEffectiveReproducesCoherent) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.1);
  const GateSpec g = gate::Displace{3.0};
  const GatePulse p = gate_time_and_drive(g, ion);
  const FockVector out = propagate_const(effective_hamiltonian(g, ion, {40}), p.duration,
                                         plus_times(fock_state(0, 40)));
  EXPECT_GT(fidelity(trace_out_spin(out), coherent(3.0, 40)), 1.0 - 1e-10);
}

TEST(GateTime, KerrEffectiveMatchesIdeal) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.05);
  const GateSpec g = gate::Kerr{kPi};
  const GatePulse p = gate_time_and_drive(g, ion);
  const FockVector in = coherent(1.0, 20);
  const FockVector out = propagate_const(effective_hamiltonian(g, ion, {20}), p.duration, plus_times(in));
  EXPECT_GT(fidelity(trace_out_spin(out), ideal_unitary(g, {20}).apply(in)), 1.0 - 1e-10);
}

TEST(EffectiveHamiltonian, DisplacementFormOnPlus) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.05);
  const int n = 10;
  const DenseOperator h = effective_hamiltonian(gate::Displace{-1.0}, ion, {n});
  const FockVector psi = coherent(cplx(0.2, 0.1), n, 1e-3);
  const Matrix a = ladder(n, Ladder::Annihilate).matrix;
  const Vector motional = cplx(0.0, 0.5 * ion.rabi() * 0.05) * (a - a.adjoint()) * psi.amplitudes();
  const Vector expect = plus_times(FockVector(motional, Layout::mode(n))).amplitudes();
  EXPECT_LT((h.matrix * plus_times(psi).amplitudes() - expect).norm() / ion.rabi(), 1e-14);
}

TEST(EffectiveHamiltonian, CarrierCommutesWithNumber) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.05);
  const DenseOperator h = effective_hamiltonian(gate::Phase{0.7}, ion, {10});
  const Matrix sn = tensor(pauli(Pauli::X), ladder(10, Ladder::Number)).matrix;
  EXPECT_LT(commutator(h.matrix, sn).cwiseAbs().maxCoeff() / ion.rabi(), 1e-14);
}

TEST(EffectiveHamiltonian, TrisqueezeSparsity) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.05);
  const int n = 12;
  const DenseOperator h = effective_hamiltonian(gate::Trisqueeze{0.2, 0.3}, ion, {n});
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = 0; j < 2 * n; ++j) {
      if (std::abs(h.matrix(i, j)) > 0.0) EXPECT_EQ(std::abs(i % n - j % n), 3) << i << "," << j;
    }
  }
}

TEST(EffectiveHamiltonian, EveryGateMatchesIdeal) {
  const std::vector<GateSpec> single{gate::Phase{-2.1}, gate::Displace{cplx(0.4, -0.6)},
                                     gate::Squeeze{0.35, 1.2}, gate::Trisqueeze{0.08, -0.7},
                                     gate::Kerr{-1.3}};
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.07);
  const FockVector in = coherent(cplx(0.3, 0.4), 24);
  for (const auto& g : single) {
    const GatePulse p = gate_time_and_drive(g, ion);
    const FockVector out = propagate_const(effective_hamiltonian(g, ion, {24}), p.duration, plus_times(in));
    EXPECT_GT(fidelity(trace_out_spin(out), ideal_unitary(g, {24}).apply(in)), 1.0 - 1e-9) << gate_name(g);
  }
  const IonConfig pair = IonConfig::pair({kNu, 0.05}, {0.7 * kNu, 0.06}, kRabi);
  const std::vector<GateSpec> two{gate::BeamSplitter{-0.9, 0.4}, gate::TwoModeSqueeze{0.25, -1.1}};
  const FockVector in2 = tensor(coherent(0.5, 10, 1e-4), fock_state(1, 10));
  for (const auto& g : two) {
    const GatePulse p = gate_time_and_drive(g, pair);
    const FockVector out =
        propagate_const(effective_hamiltonian(g, pair, {10, 10}), p.duration, plus_times(in2));
    EXPECT_GT(fidelity(trace_out_spin(out), ideal_unitary(g, {10, 10}).apply(in2)), 1.0 - 1e-9)
        << gate_name(g);
  }
}

TEST(EffectiveHamiltonian, RejectsModeMismatch) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.05);
  EXPECT_THROW(effective_hamiltonian(gate::BeamSplitter{0.3, 0.0}, ion, {6}), IncompatibleGate);
}

TEST(IonStepper, MatchesDenseHamiltonianStep) {
  const IonConfig ion = IonConfig::single(kNu, kRabi, 0.08);
  const GatePulse p = gate_time_and_drive(gate::Squeeze{0.4, 0.2}, ion);
  const IonStepper stepper(ion, p.drive, {10});
  Matrix x = Matrix::Identity(20, 20);
  const double t = 3.3e-7;
  const double dt = 4e-9;
  stepper.step(t, dt, x);
  DriveSpec lab = p.drive;
  const Matrix u = expm_hermitian(full_hamiltonian(t, ion, lab, {10}).matrix, dt);
  EXPECT_LT((x - u).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gates, ValidateRejectsNegativeSqueeze) {
  EXPECT_THROW(validate_gate(gate::Squeeze{-0.1, 0.0}), ConfigError);
  EXPECT_THROW(validate_gate(gate::Phase{std::nan("")}), ConfigError);
  EXPECT_NO_THROW(validate_gate(gate::BeamSplitter{-0.3, 0.0}));
}
