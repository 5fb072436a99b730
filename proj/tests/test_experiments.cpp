#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ioncv/analysis.hpp"
#include "ioncv/experiments.hpp"

using namespace ioncv;

TEST(DeriveSeed, DistinctAndStable) {
  EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
  EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
}

TEST(ParallelFor, CoversEveryIndex) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelFor, RethrowsLowestIndex) {
  std::atomic<int> done{0};
  try {
    parallel_for(20, 3, [&](std::size_t i) {
      ++done;
      if (i == 5 || i == 11) throw std::runtime_error("cell " + std::to_string(i));
    });
    FAIL() << "expected exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "cell 5");
  }
  EXPECT_EQ(done.load(), 20);
}

TEST(RandomTarget, NormalizedAndSeeded) {
  const TargetStateSpec a = random_target_state(4);
  EXPECT_NEAR(a.amplitudes.norm(), 1.0, 1e-14);
  EXPECT_EQ(a.amplitudes, random_target_state(4).amplitudes);
  EXPECT_NE(a.amplitudes, random_target_state(5).amplitudes);
  EXPECT_EQ(a.amplitudes.size(), 20);
}

TEST(RandomTarget, EnvelopeSuppressesTail) {
  int ok = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Vector c = random_target_state(s).amplitudes;
    double low = 0.0;
    double high = 0.0;
    for (int i = 0; i < 20; ++i) (i < 10 ? low : high) += std::norm(c[i]);
    if (low > high) ++ok;
  }
  EXPECT_GE(ok, 95);
}

TEST(RandomTarget, EmbedsInLargerCutoff) {
  const FockVector s = random_target_state(3).state(30);
  EXPECT_NEAR(s.norm(), 1.0, 1e-14);
  for (int i = 20; i < 30; ++i) EXPECT_EQ(s[i], cplx(0.0));
}

TEST(Benchmark, EffectiveDynamicsMatchesIdeal) {
  BenchmarkSpec spec;
  spec.gate = gate::Displace{1.0};
  spec.ion = IonConfig::single(2.0 * kPi * 3.0e6, 2.0 * kPi * 1.0e5, 0.05);
  spec.cutoff = 20;
  spec.samples = 5;
  spec.dynamics = Dynamics::Effective;
  const BenchmarkResult r = gate_benchmark(spec);
  EXPECT_GT(r.final_fidelity, 1.0 - 1e-9);
  EXPECT_EQ(r.reliable, r.max_leakage < 1e-3);
  EXPECT_EQ(r.record.traces["fidelity"].size(), 6u);
}

TEST(Benchmark, FullDynamicsSmallDisplacement) {
  BenchmarkSpec spec;
  spec.gate = gate::Displace{0.5};
  spec.ion = IonConfig::single(2.0 * kPi * 3.0e6, 2.0 * kPi * 1.0e5, 0.05);
  spec.cutoff = 12;
  spec.samples = 3;
  const BenchmarkResult a = gate_benchmark(spec);
  EXPECT_GT(a.final_fidelity, 0.999);
  EXPECT_TRUE(a.reliable);
  const BenchmarkResult b = gate_benchmark(spec);
  EXPECT_EQ(a.record.reproducible_json().dump(), b.record.reproducible_json().dump());
}

TEST(Regression, ReproducibleAcrossRunsAndThreads) {
  RegressionSpec spec;
  spec.layer_counts = {1, 2};
  spec.seeds = 3;
  spec.n_train = 8;
  spec.n_test = 8;
  spec.cutoff = 20;
  spec.train.max_iters = 5;
  spec.train.seed = 17;
  const std::string a = regression_experiment(spec).reproducible_json().dump();
  const std::string b = regression_experiment(spec).reproducible_json().dump();
  spec.threads = 2;
  const std::string c = regression_experiment(spec).reproducible_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Regression, SummaryShape) {
  RegressionSpec spec;
  spec.layer_counts = {1, 2};
  spec.seeds = 2;
  spec.n_train = 6;
  spec.n_test = 6;
  spec.cutoff = 20;
  spec.train.max_iters = 3;
  RegressionSummary sum;
  const RunRecord rec = regression_experiment(spec, &sum);
  ASSERT_EQ(sum.mse.size(), 2u);
  EXPECT_EQ(sum.mse[0].size(), 2u);
  EXPECT_EQ(sum.best_models.size(), 2u);
  EXPECT_EQ(sum.best_models[1].layers.size(), 2u);
  EXPECT_EQ(rec.experiment, "regression");
  EXPECT_TRUE(rec.to_json().contains("wall_time"));
  EXPECT_FALSE(rec.reproducible_json().contains("wall_time"));
}

TEST(StatePrep, VacuumTargetIsReachedByEveryInit) {
  StatePrepSpec spec;
  spec.vacuum_target = true;
  spec.layer_counts = {1};
  spec.inits = 30;
  spec.with_wigner = false;
  StatePrepSummary sum;
  state_prep_experiment(spec, &sum);
  int ok = 0;
  for (double f : sum.fidelity[0][0]) ok += f > 0.99;
  EXPECT_EQ(ok, 30);
}

TEST(StatePrep, ReproducibleAcrossThreads) {
  StatePrepSpec spec;
  spec.layer_counts = {1, 2};
  spec.inits = 3;
  spec.train.max_iters = 5;
  spec.with_wigner = false;
  const std::string a = state_prep_experiment(spec).reproducible_json().dump();
  spec.threads = 2;
  EXPECT_EQ(a, state_prep_experiment(spec).reproducible_json().dump());
}
