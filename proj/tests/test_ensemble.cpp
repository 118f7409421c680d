#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "progeny/ensemble.hpp"

using namespace progeny::ssa;
using progeny::DomainError;
using progeny::models::Custom;
using progeny::models::LinearBdp;
using progeny::models::Model1;
using progeny::models::Model2;
using progeny::models::RateModel;

TEST(Ensemble, PureDeathMeanIsHarmonic) {
  EnsembleSpec spec;
  spec.init = {5, 5, 0.0};
  spec.n_reps = 100000;
  spec.master_seed = 17;
  spec.threads = 2;
  const auto s = run_ensemble(LinearBdp{0.0, 1.0}, spec);
  EXPECT_EQ(s.n_absorbed, spec.n_reps);
  EXPECT_EQ(s.n_truncated, 0u);
  EXPECT_NEAR(s.t_ext.mean, 137.0 / 60.0, 3.0 * s.t_ext.se);
  EXPECT_EQ(s.z_max.mean, 5.0);
  EXPECT_EQ(s.z_max.se, 0.0);
}

TEST(Ensemble, BitIdenticalAcrossWorkerCounts) {
  EnsembleSpec spec;
  spec.n_reps = 300;
  spec.master_seed = 123;
  spec.grid = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  spec.eps_list = {1, 2, 5};
  std::string ref;
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    spec.threads = threads;
    const auto text = serialize(run_ensemble(Model1{200.0, 1.0}, spec));
    if (ref.empty())
      ref = text;
    else
      EXPECT_EQ(text, ref) << "threads=" << threads;
  }
  spec.master_seed = 124;
  spec.threads = 1;
  EXPECT_NE(serialize(run_ensemble(Model1{200.0, 1.0}, spec)), ref);
}

TEST(Ensemble, EnvironmentOverridesWorkerCount) {
  ::setenv("PROGENY_THREADS", "3", 1);
  EXPECT_EQ(default_threads(), 3u);
  ::setenv("PROGENY_THREADS", "junk", 1);
  EXPECT_GE(default_threads(), 1u);
  ::unsetenv("PROGENY_THREADS");
}

TEST(Ensemble, MeanProgenyNonDecreasingAlongGrid) {
  EnsembleSpec spec;
  spec.n_reps = 400;
  spec.master_seed = 9;
  for (double t = 0.0; t <= 20.0; t += 0.5) spec.grid.push_back(t);
  const auto s = run_ensemble(Model1{300.0, 1.0}, spec);
  for (std::size_t g = 1; g < s.grid.size(); ++g) EXPECT_GE(s.x_grid[g].mean, s.x_grid[g - 1].mean);
  for (const auto& m : s.z_grid) EXPECT_GE(m.se, 0.0);
  EXPECT_EQ(s.z_grid.front().mean, 1.0);
}

TEST(Ensemble, YuleMeanIsExponential) {
  EnsembleSpec spec;
  spec.n_reps = 20000;
  spec.master_seed = 2;
  spec.grid = {0.5, 1.0, 2.0, 3.0};
  spec.caps.max_time = 3.5;
  const auto s = run_ensemble(LinearBdp{1.0, 0.0}, spec);
  EXPECT_EQ(s.n_truncated, spec.n_reps);
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    EXPECT_EQ(s.z_grid[g].n, spec.n_reps);
    EXPECT_NEAR(s.z_grid[g].mean, std::exp(spec.grid[g]), 4.0 * s.z_grid[g].se);
  }
}

TEST(Ensemble, TruncatedReplicatesAreExcluded) {
  EnsembleSpec spec;
  spec.n_reps = 200;
  spec.master_seed = 4;
  spec.caps.max_events = 30;
  const auto s = run_ensemble(LinearBdp{1.0, 1.0}, spec);
  EXPECT_EQ(s.n_absorbed + s.n_truncated, s.n_reps);
  EXPECT_GT(s.n_truncated, 0u);
  EXPECT_EQ(s.t_ext.n, s.n_absorbed);
  EXPECT_NEAR(s.absorbed_fraction(), static_cast<double>(s.n_absorbed) / 200.0, 1e-15);
}

TEST(Ensemble, ModelTwoProgenyNearFluid) {
  EnsembleSpec spec;
  spec.n_reps = 5000;
  spec.master_seed = 77;
  const auto s = run_ensemble(Model2{1000.0, 100.0, 1.0}, spec);
  EXPECT_EQ(s.n_truncated, 0u);
  // Progeny at extinction of the fluid model (reference quadrature/root value).
  EXPECT_NEAR(s.x_final.mean, 911.8130882670913, 0.02 * 911.8130882670913);
}

TEST(Ensemble, LastVisitDecreasesWithLevel) {
  EnsembleSpec spec;
  spec.n_reps = 2000;
  spec.master_seed = 31;
  spec.eps_list = {1, 2, 3, 5, 10};
  const auto s = run_ensemble(Model1{1000.0, 1.0}, spec);
  double prev = INFINITY;
  for (auto e : spec.eps_list) {
    const auto& m = s.last_visit.at(e);
    EXPECT_LT(m.mean, prev) << "eps=" << e;
    prev = m.mean;
  }
  EXPECT_LE(s.last_visit.at(1).mean, s.t_ext.mean);
}

TEST(Ensemble, ErrorsReportLowestReplicate) {
  EnsembleSpec spec;
  spec.n_reps = 64;
  spec.threads = 4;
  spec.master_seed = 3;
  try {
    (void)run_ensemble(Custom::from_strings("1000*sqrt(3.5-x)", "1"), spec);
    FAIL();
  } catch (const ReplicateError& e) {
    // Replicates that reach x = 4 fail; the reported one is the first such index.
    EnsembleSpec single = spec;
    single.threads = 1;
    try {
      (void)run_ensemble(Custom::from_strings("1000*sqrt(3.5-x)", "1"), single);
      FAIL();
    } catch (const ReplicateError& f) {
      EXPECT_EQ(e.replicate(), f.replicate());
    }
  }
}

TEST(Ensemble, Preconditions) {
  EnsembleSpec spec;
  spec.n_reps = 0;
  EXPECT_THROW((void)run_ensemble(LinearBdp{0.0, 1.0}, spec), DomainError);
  spec.n_reps = 1;
  spec.grid = {1.0, 1.0};
  EXPECT_THROW((void)run_ensemble(LinearBdp{0.0, 1.0}, spec), DomainError);
}

TEST(GridAverage, HandBuiltPaths) {
  Trajectory a;
  a.initial = {5, 5, 0.0};
  a.events = {{1.0, EventKind::death, 4, 5}, {2.0, EventKind::death, 3, 5}, {3.0, EventKind::death, 2, 5},
              {4.0, EventKind::death, 1, 5}, {5.0, EventKind::death, 0, 5}};
  a.absorbed = true;
  a.known_until = INFINITY;
  const std::vector<double> grid = {0.0, 10.0};
  const auto [z1, x1] = grid_average(std::vector<Trajectory>{a}, grid);
  EXPECT_EQ(z1[0].mean, 5.0);
  EXPECT_EQ(z1[1].mean, 0.0);
  EXPECT_EQ(x1[1].mean, 5.0);

  Trajectory b = a;
  b.events = {{0.5, EventKind::birth, 6, 6}, {20.0, EventKind::death, 5, 6}};
  b.absorbed = false;
  b.truncated = true;
  b.known_until = 20.0;
  const std::vector<double> g2 = {0.0, 1.5, 10.0};
  const auto [z2, x2] = grid_average(std::vector<Trajectory>{a, b}, g2);
  EXPECT_DOUBLE_EQ(z2[0].mean, 5.0);
  EXPECT_DOUBLE_EQ(z2[1].mean, (4.0 + 6.0) / 2.0);
  EXPECT_DOUBLE_EQ(z2[2].mean, (0.0 + 6.0) / 2.0);
  EXPECT_DOUBLE_EQ(x2[2].mean, (5.0 + 6.0) / 2.0);
}
