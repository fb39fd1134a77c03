#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pcl/bounds.hpp"
#include "pcl/errors.hpp"
#include "pcl/experiments.hpp"
#include "pcl/markov.hpp"
#include "pcl/persist.hpp"

using namespace pcl;

TEST(Aggregate, Examples) {
  const std::vector<double> ones{1, 1, 1};
  auto s = aggregate(ones);
  EXPECT_EQ(s.count, 3u);
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_DOUBLE_EQ(*s.std_dev, 0.0);

  const std::vector<double> two{0, 2};
  s = aggregate(two);
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_DOUBLE_EQ(*s.std_dev, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(*s.std_error, 1.0);

  const std::vector<double> one{5};
  s = aggregate(one);
  EXPECT_FALSE(s.std_dev);
  EXPECT_FALSE(s.std_error);

  std::vector<double> a{3, 1, 4, 1, 5, 9, 2, 6};
  const auto before = aggregate(a);
  std::reverse(a.begin(), a.end());
  const auto after = aggregate(a);
  EXPECT_NEAR(before.mean, after.mean, 1e-15);
  EXPECT_NEAR(*before.std_dev, *after.std_dev, 1e-14);
}

TEST(Seeds, DeterministicAndCollisionFree) {
  EXPECT_EQ(seed_for_trial(1, 2, 3, 4, 5), seed_for_trial(1, 2, 3, 4, 5));
  EXPECT_NE(seed_for_trial(1, 2, 3, 4, 5), seed_for_trial(1, 2, 3, 4, 6));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1 << 21);
  for (std::uint64_t n : {5u, 10u, 100u, 250u})
    for (std::uint64_t e = 0; e < 5; ++e)
      for (std::uint64_t t = 0; t < 50000; ++t) seen.insert(seed_for_trial(20240601, 0, n, e, t));
  EXPECT_EQ(seen.size(), 4u * 5u * 50000u);
}

TEST(Validate, FieldLevelErrors) {
  ExperimentConfig c;
  c.n_grid = {5};
  c.eps_grid = {0.1};
  EXPECT_NO_THROW(validate(c));
  auto field_of = [](ExperimentConfig cfg) {
    try {
      validate(cfg);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  auto bad = c;
  bad.n_grid = {1};
  EXPECT_EQ(field_of(bad), "N");
  bad = c;
  bad.eps_grid = {-1};
  EXPECT_EQ(field_of(bad), "epsilon");
  bad = c;
  bad.trials = 0;
  EXPECT_EQ(field_of(bad), "trials");
  bad = c;
  bad.model = Model::circle;
  bad.eps_grid = {2.5};
  EXPECT_EQ(field_of(bad), "epsilon");
  bad = c;
  bad.initial = std::vector<double>{0.0, 1.0};
  EXPECT_EQ(field_of(bad), "initial");
  bad = c;
  bad.format = "xml";
  EXPECT_EQ(field_of(bad), "format");
}

TEST(RunExperiment, ForcedTwoAgentStart) {
  ExperimentConfig c;
  c.n_grid = {2};
  c.eps_grid = {0.5};
  c.trials = 200;
  c.stopping = StopRule::exact_range;
  c.initial = std::vector<double>{0.0, 1.0};
  const auto t = run_experiment(c, 1);
  ASSERT_EQ(t.trials.size(), 200u);
  for (const auto& r : t.trials) {
    ASSERT_TRUE(r.t_eps);
    EXPECT_GE(*r.t_eps, 1u);
    EXPECT_LE(*r.t_eps, *r.t_eps_prime);
    EXPECT_LE(r.final_range, 0.5);
  }
  ASSERT_EQ(t.aggregates.size(), 1u);
  EXPECT_GE(t.aggregates[0].t_hat.mean, 1.0);
  EXPECT_EQ(t.cap_exhausted_total(), 0u);
}

TEST(RunExperiment, SameTableForAnyWorkerCount) {
  for (Model m : {Model::scalar, Model::box, Model::circle}) {
    ExperimentConfig c;
    c.model = m;
    c.dim = m == Model::box ? 2 : 1;
    c.n_grid = {4, 9};
    c.eps_grid = {0.1, 0.02};
    c.trials = 25;
    c.master_seed = 99;
    c.trace_every = 7;
    c.trace_trials = 2;
    const auto one = run_experiment(c, 1);
    const auto three = run_experiment(c, 3);
    EXPECT_EQ(trials_csv(one), trials_csv(three));
    EXPECT_EQ(aggregates_csv(one), aggregates_csv(three));
    EXPECT_EQ(traces_csv(one), traces_csv(three));
    EXPECT_EQ(table_json(one), table_json(three));
    EXPECT_FALSE(one.traces.empty());
  }
}

TEST(RunExperiment, SeedChangesResults) {
  ExperimentConfig c;
  c.n_grid = {6};
  c.eps_grid = {0.05};
  c.trials = 10;
  c.master_seed = 1;
  const auto a = run_experiment(c, 1);
  c.master_seed = 2;
  const auto b = run_experiment(c, 1);
  EXPECT_NE(trials_csv(a), trials_csv(b));
}

TEST(RunExperiment, CapExhaustionIsCounted) {
  ExperimentConfig c;
  c.n_grid = {30};
  c.eps_grid = {1e-6};
  c.trials = 5;
  c.max_steps = 50;
  const auto t = run_experiment(c, 1);
  EXPECT_EQ(t.cap_exhausted_total(), 5u);
  EXPECT_EQ(t.aggregates[0].t_hat.count, 0u);
  for (const auto& r : t.trials) EXPECT_TRUE(r.cap_hit);
}

TEST(RunExperiment, CircleHalfDiskBeforeArcAndBelowMarkovBound) {
  ExperimentConfig c;
  c.model = Model::circle;
  c.n_grid = {4, 6};
  c.eps_grid = {0.1};
  c.trials = 200;
  c.master_seed = 5;
  const auto t = run_experiment(c, 1);
  for (const auto& r : t.trials) {
    ASSERT_TRUE(r.t_hd && r.t_eps);
    EXPECT_LE(*r.t_hd, *r.t_eps);
  }
  for (const auto& a : t.aggregates) {
    ASSERT_TRUE(a.thd_hat);
    const double e0 = absorption_closed_form(chain_n(a.n), chain_c(a.n)).value;
    EXPECT_LE(a.thd_hat->mean, 2.0 * e0);
  }
}

TEST(RunExperiment, ScalarBelowUniformBound) {
  ExperimentConfig c;
  c.n_grid = {10};
  c.eps_grid = {0.01};
  c.trials = 300;
  c.stopping = StopRule::exact_range;
  const auto t = run_experiment(c, 1);
  EXPECT_LE(t.aggregates[0].t_hat.mean, 160.82);
  EXPECT_LE(t.aggregates[0].t_hat.mean, t.aggregates[0].bound_exact);
}

TEST(DefaultCap, TenTimesSimplifiedBound) {
  ExperimentConfig c;
  c.n_grid = {10};
  c.eps_grid = {0.01};
  EXPECT_EQ(default_step_cap(c, 10, 0.01),
            static_cast<std::uint64_t>(std::ceil(10 * t_eps_bound_uniform_init(10, 0.01, 0, 1).simplified)));
  c.model = Model::circle;
  EXPECT_EQ(default_step_cap(c, 50, 0.01), 100'000'000u);
  c.max_steps = 77;
  EXPECT_EQ(default_step_cap(c, 50, 0.01), 77u);
}

TEST(Presets, GridsMatchTheReferenceStudy) {
  const auto full = paper_presets(Model::scalar, PresetScale::full);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].n_grid, (std::vector<std::size_t>{5, 10, 100, 250, 500, 750, 1000}));
  EXPECT_EQ(full[0].trials, 1000u);
  const auto box = paper_presets(Model::box, PresetScale::full);
  ASSERT_EQ(box.size(), 3u);
  EXPECT_EQ(box[2].dim, 4u);
  EXPECT_EQ(box[0].n_grid, (std::vector<std::size_t>{5, 10, 50, 100, 250}));
  for (const auto& p : paper_presets(Model::circle, PresetScale::desk)) EXPECT_NO_THROW(validate(p));
}
