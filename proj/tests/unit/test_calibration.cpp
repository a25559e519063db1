// Copyright 2026 The P-PET Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ppet/calibration.hpp"
#include "ppet/synthgen.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace
{

using namespace ppet;
using namespace ppet::calibration;
using ppet::test::throws_code;

TEST(Metrics, Perfect)
{
  const auto m = metrics({5, 5, 0, 0});
  EXPECT_EQ(*m.accuracy, 1.0);
  EXPECT_EQ(*m.precision, 1.0);
  EXPECT_EQ(*m.recall, 1.0);
  EXPECT_EQ(*m.f1, 1.0);
}

TEST(Metrics, UndefinedPrecision)
{
  const auto m = metrics({0, 7, 0, 3});
  EXPECT_FALSE(m.precision);
  EXPECT_FALSE(m.f1);
  EXPECT_EQ(*m.recall, 0.0);
  EXPECT_TRUE(throws_code([&] { require(m.precision, "precision"); }, Errc::UndefinedMetric));
  EXPECT_FALSE(metrics({}).accuracy);
}

TEST(Metrics, HandArithmetic)
{
  const auto m = metrics({3, 4, 2, 1});
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(*m.precision, 0.6);
  EXPECT_DOUBLE_EQ(*m.recall, 0.75);
  EXPECT_NEAR(*m.f1, 2.0 / 3.0, 1e-15);
}

TEST(Metrics, AccuracyIdentityAndRandomOracle)
{
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c{static_cast<std::int64_t>(rng() % 50), static_cast<std::int64_t>(rng() % 50),
                      static_cast<std::int64_t>(rng() % 50), static_cast<std::int64_t>(rng() % 50)};
    const auto m = metrics(c);
    if (c.total() == 0) {
      continue;
    }
    EXPECT_EQ(std::llround(*m.accuracy * static_cast<double>(c.total())), c.tp + c.tn);
    if (c.tp + c.fp > 0 && c.tp + c.fn > 0 && c.tp > 0) {
      const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
      const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
      EXPECT_NEAR(*m.f1, 2 * p * r / (p + r), 1e-14);
    }
  }
}

TEST(Confusion, Add)
{
  ConfusionCounts c;
  c.add(true, true);
  c.add(true, false);
  c.add(false, true);
  c.add(false, false);
  c.add(false, false);
  EXPECT_EQ(c, (ConfusionCounts{1, 2, 1, 1}));
}

TEST(Folds, EvenSizes)
{
  const auto f = kfold_split(20, 10, 3);
  ASSERT_EQ(f.size(), 10u);
  for (const auto & fold : f) {
    EXPECT_EQ(fold.size(), 2u);
  }
}

TEST(Folds, BalancedRemainder)
{
  const auto f = kfold_split(23, 10, 3);
  std::vector<std::size_t> sizes;
  std::set<std::size_t> all;
  for (const auto & fold : f) {
    sizes.push_back(fold.size());
    all.insert(fold.begin(), fold.end());
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3, 2, 2, 2, 2, 2, 2, 2}));
  EXPECT_EQ(all.size(), 23u);
  EXPECT_EQ(*all.rbegin(), 22u);
}

TEST(Folds, DeterministicAndErrors)
{
  EXPECT_EQ(kfold_split(57, 10, 9), kfold_split(57, 10, 9));
  EXPECT_NE(kfold_split(57, 10, 9), kfold_split(57, 10, 10));
  EXPECT_TRUE(throws_code([] { kfold_split(9, 10, 1); }, Errc::TooFewEpisodes));
  EXPECT_TRUE(throws_code([] { kfold_split(9, 1, 1); }, Errc::InvalidArgument));
}

TEST(Units, SlotsFollowThresholdModes)
{
  risk::EpisodeTrace adult{"a", AgentCategory::Adult, {}};
  risk::EpisodeTrace kid{"k", AgentCategory::Kid, {}};
  PPetVector v;
  v.c_pf = 1.0;
  v.f_pf = 2.0;
  v.f_vf = 3.0;
  adult.frames = {v};
  kid.frames = {v};
  const std::map<std::pair<std::string, RiskArea>, bool> labels{
    {{"a", RiskArea::Closer}, true}, {{"a", RiskArea::Further}, false}, {{"k", RiskArea::Merged}, true}};
  const auto units = make_units({adult, kid}, labels, risk::RiskThresholdConfig::defaults());
  ASSERT_EQ(units.size(), 3u);
  EXPECT_EQ(units[0].frames[0].pf, std::vector<double>{1.0});
  EXPECT_TRUE(units[0].frames[0].vf.empty());
  EXPECT_EQ(units[1].frames[0].vf, std::vector<double>{3.0});
  EXPECT_EQ(units[2].slot, RiskArea::Merged);
  EXPECT_EQ(units[2].frames[0].pf, (std::vector<double>{1.0, 2.0}));
}

// ---------------------------------------------------------------------------------------------

std::vector<Unit> planted_units(int counter_limit, std::uint64_t seed, int episodes = 400)
{
  synthgen::PlantedSpec spec;
  spec.seed = seed;
  spec.episodes = episodes;
  spec.counter_limit = counter_limit;
  const auto set = synthgen::generate_planted(spec);
  return make_units(set.episodes, set.labels, risk::RiskThresholdConfig::defaults());
}

GridSpec pf_grid(double lo, double hi, double step)
{
  GridSpec g;
  g.pf = {true, lo, hi, lo, hi, step};
  g.vf.enabled = false;
  return g;
}

// Independent count of in-interval frames per unit.
bool oracle_flag(const Unit & u, const risk::AreaThresholds & th)
{
  int hits = 0;
  for (const auto & f : u.frames) {
    bool any = false;
    for (double v : f.pf) {
      any = any || (th.pf->enabled && th.pf->interval.alpha <= v && v <= th.pf->interval.beta);
    }
    for (double v : f.vf) {
      any = any || (th.vf->enabled && th.vf->interval.alpha <= v && v <= th.vf->interval.beta);
    }
    hits += any ? 1 : 0;
  }
  return hits > th.counter_limit;
}

TEST(GridSearch, RecoversPlantedRule)
{
  const auto units = planted_units(2, 5);
  SearchOptions opt;
  opt.seed = 3;
  const auto res = grid_search(units, pf_grid(-2.0, 1.0, 0.25), opt);
  EXPECT_NEAR(res.best.pf->interval.alpha, -1.0, 0.25 + 1e-9);
  EXPECT_NEAR(res.best.pf->interval.beta, 0.0, 0.25 + 1e-9);
  EXPECT_EQ(res.best.counter_limit, 2);
  EXPECT_FALSE(res.best.vf->enabled);
  EXPECT_GE(res.cv_accuracy, 0.95);
  EXPECT_GE(*res.test_metrics.accuracy, 0.95);
  EXPECT_EQ(res.train_units + res.test_units, units.size());
  EXPECT_EQ(res.test_units, 80u);
}

TEST(GridSearch, ExhaustiveAgainstReEnumeration)
{
  const auto units = planted_units(3, 6, 120);
  GridSpec grid = pf_grid(-2.0, 1.0, 0.5);
  grid.vf = {true, 0.0, 1.0, 0.0, 1.0, 0.5};
  grid.counter_limits = {2, 3, 4};
  SearchOptions opt;
  opt.k = 5;
  opt.seed = 8;
  const auto res = grid_search(units, grid, opt);
  ASSERT_EQ(res.scores.size(), grid.size());

  const auto [train, test] = holdout_split(units.size(), opt.test_fraction, opt.seed);
  const auto folds = kfold_split(train.size(), opt.k, opt.seed ^ 0x5851f42d4c957f2dULL);
  double best = -1;
  for (const auto & s : res.scores) {
    double acc = 0;
    for (const auto & fold : folds) {
      int correct = 0;
      for (auto p : fold) {
        const auto & u = units[train[p]];
        correct += oracle_flag(u, s.thresholds) == u.risk2 ? 1 : 0;
      }
      acc += static_cast<double>(correct) / static_cast<double>(fold.size());
    }
    acc /= static_cast<double>(folds.size());
    EXPECT_NEAR(s.cv_accuracy, acc, 1e-12);
    best = std::max(best, acc);
  }
  EXPECT_NEAR(res.cv_accuracy, best, 1e-12);

  // among the tied best points the narrowest wins, then the earliest
  const auto width = [](const risk::AreaThresholds & t) {
    return (t.pf->enabled ? t.pf->interval.width() : 0.0) + (t.vf->enabled ? t.vf->interval.width() : 0.0);
  };
  std::optional<std::size_t> expected;
  for (std::size_t i = 0; i < res.scores.size(); ++i) {
    if (std::abs(res.scores[i].cv_accuracy - best) > 1e-12) {
      continue;
    }
    if (!expected || width(res.scores[i].thresholds) < width(res.scores[*expected].thresholds) - 1e-12) {
      expected = i;
    }
  }
  ASSERT_TRUE(expected);
  EXPECT_EQ(res.best, res.scores[*expected].thresholds);
}

TEST(GridSearch, TestMetricsUseHoldoutOnly)
{
  const auto units = planted_units(3, 7, 200);
  SearchOptions opt;
  opt.seed = 4;
  const auto grid = pf_grid(-2.0, 1.0, 0.5);
  const auto a = grid_search(units, grid, opt);

  auto mutated = units;
  const auto [train, test] = holdout_split(units.size(), opt.test_fraction, opt.seed);
  for (auto i : test) {
    mutated[i].risk2 = !mutated[i].risk2;
  }
  const auto b = grid_search(mutated, grid, opt);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.cv_accuracy, b.cv_accuracy);
  EXPECT_EQ(a.test_counts.tp, b.test_counts.fp);
  EXPECT_EQ(a.test_counts.tn, b.test_counts.fn);

  ConfusionCounts manual;
  for (auto i : test) {
    manual.add(classify_unit(units[i], a.best), units[i].risk2);
  }
  EXPECT_EQ(manual, a.test_counts);
}

TEST(GridSearch, SinglePoint)
{
  const auto units = planted_units(3, 8, 60);
  GridSpec g = pf_grid(-0.5, -0.5, 1.0);
  g.counter_limits = {4};
  const auto res = grid_search(units, g, {});
  EXPECT_EQ(res.best.pf->interval, (risk::ThresholdInterval{-0.5, -0.5}));
  EXPECT_EQ(res.best.counter_limit, 4);
  EXPECT_EQ(res.scores.size(), 1u);
}

TEST(GridSearch, RandomLabelsStayNearPrior)
{
  auto units = planted_units(3, 9, 400);
  std::mt19937_64 rng(10);
  std::bernoulli_distribution positive(0.7);
  int pos = 0;
  for (auto & u : units) {
    u.risk2 = positive(rng);
    pos += u.risk2 ? 1 : 0;
  }
  const double prior = std::max(pos, static_cast<int>(units.size()) - pos) / static_cast<double>(units.size());
  const auto res = grid_search(units, pf_grid(-2.0, 1.0, 0.5), {});
  EXPECT_NEAR(res.cv_accuracy, prior, 0.1);
}

TEST(GridSearch, Deterministic)
{
  const auto units = planted_units(3, 11, 150);
  const auto grid = pf_grid(-2.0, 1.0, 0.5);
  const auto a = grid_search(units, grid, {});
  const auto b = grid_search(units, grid, {});
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.cv_accuracy, b.cv_accuracy);
  EXPECT_EQ(a.test_counts, b.test_counts);
}

TEST(GridSearch, Errors)
{
  const auto units = planted_units(3, 12, 60);
  GridSpec empty = pf_grid(1.0, 0.0, 0.5);
  EXPECT_TRUE(throws_code([&] { grid_search(units, empty, {}); }, Errc::EmptyGrid));
  GridSpec no_theta = pf_grid(-1.0, 0.0, 0.5);
  no_theta.counter_limits.clear();
  EXPECT_TRUE(throws_code([&] { grid_search(units, no_theta, {}); }, Errc::EmptyGrid));
  const std::vector<Unit> few(units.begin(), units.begin() + 8);
  EXPECT_TRUE(throws_code([&] { grid_search(few, pf_grid(-1.0, 0.0, 0.5), {}); }, Errc::TooFewEpisodes));
}

TEST(Grid, AxisRules)
{
  AxisSpec a{true, -1.0, 0.0, -1.0, 0.0, 0.5};
  const auto r = a.rules();
  // alpha <= beta pairs of {-1, -0.5, 0}
  EXPECT_EQ(r.size(), 6u);
  for (const auto & rule : r) {
    EXPECT_LE(rule.interval.alpha, rule.interval.beta);
  }
  GridSpec def;
  EXPECT_EQ(def.pf.rules().size(), 71u * 72u / 2u);
  EXPECT_EQ(def.size(), def.pf.rules().size() * def.vf.rules().size() * 6u);
  AxisSpec bad = a;
  bad.step = 0;
  EXPECT_TRUE(throws_code([&] { bad.rules(); }, Errc::InvalidArgument));
}

}  // namespace
