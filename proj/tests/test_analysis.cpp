#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "ioncv/analysis.hpp"
#include "ioncv/error.hpp"
#include "ioncv/gates.hpp"

using namespace ioncv;

TEST(Fidelity, Basics) {
  const FockVector a = coherent(cplx(0.4, 0.3), 20);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
  EXPECT_EQ(fidelity(fock_state(0, 5), fock_state(1, 5)), 0.0);
  EXPECT_NEAR(fidelity(fock_state(0, 20), coherent(1.0, 20)), std::exp(-1.0), 1e-6);
  const FockVector b = coherent(cplx(-0.2, 0.9), 20);
  EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-12);
  EXPECT_NEAR(fidelity(DensityMatrix::pure(a), b), fidelity(a, b), 1e-12);
}

TEST(Fidelity, RejectsLayoutMismatch) {
  EXPECT_THROW(fidelity(fock_state(0, 5), fock_state(0, 6)), LayoutMismatch);
}

TEST(Wigner, VacuumOrigin) {
  EXPECT_NEAR(wigner_point(DensityMatrix::pure(fock_state(0, 8)), 0.0, 0.0), 1.0 / kPi, 1e-6);
  EXPECT_NEAR(wigner_point(DensityMatrix::pure(fock_state(0, 8)), 0.7, -0.4),
              std::exp(-0.49 - 0.16) / kPi, 1e-12);
}

TEST(Wigner, FockOneOrigin) {
  EXPECT_NEAR(wigner_point(DensityMatrix::pure(fock_state(1, 8)), 0.0, 0.0), -1.0 / kPi, 1e-12);
}

TEST(Wigner, CoherentPeakLocation) {
  const cplx a(1.2, -0.7);
  const WignerGrid g = wigner(coherent(a, 40));
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  g.values.maxCoeff(&i, &j);
  const double cell = g.x_axis[1] - g.x_axis[0];
  EXPECT_LE(std::abs(g.x_axis[i] - std::sqrt(2.0) * a.real()), cell);
  EXPECT_LE(std::abs(g.p_axis[j] - std::sqrt(2.0) * a.imag()), cell);
}

TEST(Wigner, CatNegativity) {
  const Vector v = coherent(2.0, 40).amplitudes() + coherent(-2.0, 40).amplitudes();
  const FockVector cat(v.normalized(), Layout::mode(40));
  const WignerGrid g = wigner(cat);
  EXPECT_LE(g.min(), -0.05);
  EXPECT_NEAR(g.integral(), 1.0, 1e-2);
  EXPECT_GE(g.min(), -1.0 / kPi - 1e-6);
}

TEST(Wigner, Normalization) {
  EXPECT_NEAR(wigner(coherent(cplx(0.5, 0.5), 30)).integral(), 1.0, 1e-2);
  EXPECT_NEAR(wigner(fock_state(3, 10)).integral(), 1.0, 1e-2);
}

TEST(Wigner, LinearInRho) {
  const FockVector a = coherent(0.8, 20);
  const FockVector b = fock_state(2, 20);
  const Matrix mix = 0.3 * DensityMatrix::pure(a).matrix() + 0.7 * DensityMatrix::pure(b).matrix();
  GridSpec grid{-3, 3, -3, 3, 31};
  const WignerGrid wm = wigner(DensityMatrix(mix, Layout::mode(20)), grid);
  const WignerGrid wa = wigner(a, grid);
  const WignerGrid wb = wigner(b, grid);
  EXPECT_LT((wm.values - 0.3 * wa.values - 0.7 * wb.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Wigner, VacuumMarginal) {
  GridSpec grid{-5, 5, -6, 6, 241};
  const WignerGrid g = wigner(fock_state(0, 6), grid);
  const double dp = g.p_axis[1] - g.p_axis[0];
  for (Eigen::Index i = 0; i < g.x_axis.size(); i += 20) {
    const double x = g.x_axis[i];
    EXPECT_NEAR(g.values.row(i).sum() * dp, std::exp(-x * x) / std::sqrt(kPi), 1e-3);
  }
}

TEST(Wigner, GaussianStatesNonNegative) {
  const FockVector s = ideal_unitary(gate::Squeeze{0.5, 0.4}, {40}).apply(coherent(cplx(0.3, -0.2), 40));
  EXPECT_GE(wigner(s).min(), -1e-6);
}

TEST(Wigner, RejectsMultimode) {
  EXPECT_THROW(wigner(tensor(fock_state(0, 3), fock_state(0, 3))), InvalidDimension);
}

TEST(MeanPhonon, Values) {
  EXPECT_NEAR(mean_phonon(fock_state(3, 10)), 3.0, 1e-15);
  EXPECT_NEAR(mean_phonon(coherent(3.0, 40)), 9.0, 1e-3);
}

TEST(Leakage, Values) {
  EXPECT_LT(leakage(coherent(3.0, 40)), 1e-6);
  EXPECT_NEAR(leakage(fock_state(39, 40)), 1.0, 1e-15);
  EXPECT_NEAR(leakage(DensityMatrix::pure(fock_state(35, 40))), 0.0, 1e-15);
  EXPECT_NEAR(leakage(DensityMatrix::pure(fock_state(36, 40))), 1.0, 1e-15);
}

TEST(Wigner, CsvHasSchemaVersion) {
  const std::string path = testing::TempDir() + "wigner_test.csv";
  write_wigner_csv(path, wigner(fock_state(0, 4), GridSpec{-1, 1, -1, 1, 3}));
  std::ifstream in(path);
  std::string first;
  std::string second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first, "# schema_version=1");
  EXPECT_EQ(second, "x,p,W");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 9);
  std::remove(path.c_str());
  const auto j = wigner_json(wigner(fock_state(0, 4), GridSpec{-1, 1, -1, 1, 3}), "vacuum");
  EXPECT_EQ(j["schema_version"], 1);
}
