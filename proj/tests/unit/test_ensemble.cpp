#include <cmath>

#include <gtest/gtest.h>

#include "bsq/diagnostics.hpp"
#include "bsq/ensemble.hpp"
#include "fields.hpp"

using namespace bsq;
using namespace bsq::testing;

namespace {
EnsembleConfig small_decay(int n_paths, double data = 0.01) {
  const Grid g(16);
  Gen gen(42);
  EnsembleConfig cfg;
  cfg.n_paths = n_paths;
  cfg.base_seed = 1000;
  cfg.experiment = Experiment::global_decay;
  cfg.u0 = random_state(g, gen, 2);
  cfg.u0 *= data / lp_norm(cfg.u0, 6);
  cfg.noise = NoiseModel(g, 4, random_transport(g, gen, 4, 1, 0.02),
                         {SigmaKind::diagonal_linear, 0.01, 0, 4});
  cfg.step = StepConfig{2e-3, Scheme::etd_euler_maruyama, 0.02, 2};
  cfg.step.weight_rate = 0.05;
  cfg.system.truncated = true;
  cfg.system.cutoff.delta0 = 0.1;
  return cfg;
}

PathResult fake(std::size_t i, bool ok, double sup) {
  PathResult r;
  r.index = i;
  r.ok = ok;
  r.sup_weighted = sup;
  r.initial_lp_p = 1.0;
  r.survived = sup < 0.05;
  return r;
}
}  // namespace

TEST(Experiments, NamesRoundTrip) {
  for (auto e : {Experiment::linear_estimate, Experiment::local_existence, Experiment::contraction,
                 Experiment::global_decay, Experiment::maximality}) {
    EXPECT_EQ(experiment_from_string(to_string(e)), e);
  }
  EXPECT_THROW(experiment_from_string("decay"), std::invalid_argument);
  EXPECT_FALSE(is_nonlinear(Experiment::linear_estimate));
  EXPECT_TRUE(is_nonlinear(Experiment::global_decay));
}

TEST(Ensemble, ZeroDataZeroNoiseGivesZeroStatistics) {
  const Grid g(8);
  EnsembleConfig cfg;
  cfg.n_paths = 2;
  cfg.u0 = State(g);
  cfg.noise = NoiseModel(g, 2, {}, {});
  cfg.step = StepConfig{1e-2, Scheme::etd_euler_maruyama, 0.05, 1};
  const auto s = run_ensemble(cfg, 1);
  EXPECT_EQ(s.n_failed, 0);
  EXPECT_EQ(s.mean_sup_weighted, 0.0);
  EXPECT_EQ(s.se_sup_weighted, 0.0);
  EXPECT_EQ(s.mean_integral_dissipation, 0.0);
  EXPECT_EQ(s.crossing_fraction, 0.0);
  EXPECT_EQ(s.c_fit, 0.0);
  EXPECT_EQ(s.survival_fraction, 1.0);
}

TEST(Ensemble, DoublingPathsReproducesFirstHalf) {
  const auto a = run_ensemble(small_decay(2), 1);
  const auto b = run_ensemble(small_decay(4), 1);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.paths[i].seed, b.paths[i].seed);
    EXPECT_EQ(a.paths[i].sup_weighted, b.paths[i].sup_weighted);
    EXPECT_EQ(a.paths[i].final_state, b.paths[i].final_state);
  }
  EXPECT_EQ(b.paths[3].seed, 1003u);
}

TEST(Ensemble, WorkerCountDoesNotChangeResults) {
  const auto cfg = small_decay(4);
  const auto a = run_ensemble(cfg, 1);
  const auto b = run_ensemble(cfg, 3);
  EXPECT_EQ(a.mean_sup_weighted, b.mean_sup_weighted);
  EXPECT_EQ(a.se_sup_weighted, b.se_sup_weighted);
  EXPECT_EQ(a.mean_integral_dissipation, b.mean_integral_dissipation);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.paths[i].final_state, b.paths[i].final_state);
}

TEST(Ensemble, PathsAreIndependentOfExecutionOrder) {
  const auto cfg = small_decay(3);
  std::vector<PathResult> fwd, rev(3);
  for (std::size_t i = 0; i < 3; ++i) fwd.push_back(run_path(cfg, i));
  for (std::size_t i = 3; i-- > 0;) rev[i] = run_path(cfg, i);
  const auto a = summarize(cfg, fwd), b = summarize(cfg, rev);
  EXPECT_EQ(a.mean_sup_weighted, b.mean_sup_weighted);
  EXPECT_EQ(a.se_sup_weighted, b.se_sup_weighted);
}

TEST(Ensemble, HalvingDataDoesNotIncreaseEnergy) {
  const auto full = run_ensemble(small_decay(4, 0.01), 1);
  const auto half = run_ensemble(small_decay(4, 0.005), 1);
  EXPECT_LE(half.mean_sup_weighted, full.mean_sup_weighted);
  EXPECT_GT(full.c_fit, 0.0);
  EXPECT_TRUE(std::isfinite(full.c_fit));
  EXPECT_EQ(full.crossing_fraction, 0.0);
}

TEST(Ensemble, StandardErrorFromPaths) {
  EnsembleConfig cfg;
  cfg.system.cutoff.delta0 = 0.1;
  const auto s = summarize(cfg, {fake(0, true, 1.0), fake(1, true, 3.0)});
  EXPECT_EQ(s.mean_sup_weighted, 2.0);
  EXPECT_NEAR(s.se_sup_weighted, 1.0, 1e-15);
  EXPECT_EQ(s.c_fit, 2.0);
}

TEST(Ensemble, FailureQuarantine) {
  EnsembleConfig cfg;
  std::vector<PathResult> paths;
  for (std::size_t i = 0; i < 20; ++i) paths.push_back(fake(i, i >= 2, 0.01));
  const auto ok = summarize(cfg, paths);
  EXPECT_EQ(ok.n_failed, 2);
  EXPECT_FALSE(ok.fatal);
  EXPECT_EQ(ok.mean_sup_weighted, 0.01);
  paths[2].ok = false;
  EXPECT_TRUE(summarize(cfg, paths).fatal);
}

TEST(Ensemble, FailedPathsRecordError) {
  auto cfg = small_decay(2);
  cfg.step.dt = 0.0;
  const auto r = run_path(cfg, 0);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.error.empty());
}

TEST(Markov, Examples) {
  EnsembleSummary s;
  s.n_paths = 10;
  s.mean_sup_weighted = 0.0;
  s.survival_fraction = 1.0;
  EXPECT_EQ(markov_bound(s, 0.1).bound, 1.0);
  s.mean_sup_weighted = 0.05;
  EXPECT_EQ(markov_bound(s, 0.1).bound, 0.0);
  s.mean_sup_weighted = 0.2;
  EXPECT_EQ(markov_bound(s, 0.1).bound, 0.0);
  s.mean_sup_weighted = 0.01;
  EXPECT_NEAR(markov_bound(s, 0.1).bound, 0.8, 1e-15);
  s.survival_fraction = 0.9;
  EXPECT_NEAR(markov_bound(s, 0.1).binomial_se, std::sqrt(0.09 / 10), 1e-15);
}

TEST(Markov, EmpiricalSurvivalDominatesBound) {
  const auto s = run_ensemble(small_decay(4), 1);
  const auto m = markov_bound(s, s.delta0);
  EXPECT_GE(m.empirical_survival, m.bound - 3 * m.binomial_se);
}

TEST(Ensemble, ContractionAndMaximalityPaths) {
  auto cfg = small_decay(1);
  cfg.experiment = Experiment::contraction;
  cfg.picard_auto_horizon = false;
  cfg.step.t_final = 0.01;
  const auto c = run_path(cfg, 0);
  ASSERT_TRUE(c.ok) << c.error;
  EXPECT_TRUE(c.extra.at("converged").get<bool>());
  EXPECT_LT(c.extra.at("max_ratio").get<double>(), 1.0);

  cfg.experiment = Experiment::maximality;
  cfg.levels = {0.05, 0.1};
  const auto m = run_path(cfg, 0);
  ASSERT_TRUE(m.ok) << m.error;
  EXPECT_TRUE(m.extra.at("monotone").get<bool>());
  EXPECT_EQ(m.extra.at("tau_n").size(), 2u);
}
