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

#ifndef PPET__CALIBRATION_HPP_
#define PPET__CALIBRATION_HPP_

#include "ppet/risk.hpp"
#include "ppet/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ppet::calibration
{

/// Positive class is Risk 2.
struct ConfusionCounts
{
  std::int64_t tp{0};
  std::int64_t tn{0};
  std::int64_t fp{0};
  std::int64_t fn{0};

  std::int64_t total() const { return tp + tn + fp + fn; }
  void add(bool predicted, bool actual);
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

/// Undefined metrics (zero denominator) are nullopt, never 0.
struct Metrics
{
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

Metrics metrics(const ConfusionCounts & c);

/// Value of a metric or Errc::UndefinedMetric.
double require(const std::optional<double> & metric, const char * name);

/// Seeded partition of n episodes into k folds whose sizes differ by at most one (the first
/// n % k folds get the extra episode). Throws Errc::TooFewEpisodes when n < k.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed);

/// The P-PET values one counter slot sees in one evaluated frame.
struct FrameValues
{
  std::vector<double> pf;
  std::vector<double> vf;
};

/// A labeled classification unit: one pedestrian episode restricted to one counter slot.
struct Unit
{
  std::string id;
  AgentCategory category{AgentCategory::Adult};
  RiskArea slot{RiskArea::Closer};
  std::vector<FrameValues> frames;
  bool risk2{false};
};

/// Frames of one slot extracted from an episode trace.
std::vector<FrameValues> slot_frames(const risk::EpisodeTrace & episode, RiskArea slot);

/// Builds units for every slot the config assigns to the episode's category. `labels` maps
/// (ped id, slot) to the ground-truth Risk-2 flag; episodes without a label are skipped.
std::vector<Unit> make_units(
  const std::vector<risk::EpisodeTrace> & episodes,
  const std::map<std::pair<std::string, RiskArea>, bool> & labels,
  const risk::RiskThresholdConfig & modes);

/// Candidate intervals of one scenario: alpha in [alpha_min, alpha_max], beta in
/// [beta_min, beta_max], both on `step`, alpha <= beta. A disabled axis contributes a single
/// never-matching rule.
struct AxisSpec
{
  bool enabled{true};
  double alpha_min{-4.0};
  double alpha_max{3.0};
  double beta_min{-4.0};
  double beta_max{3.0};
  double step{0.1};

  std::vector<risk::ScenarioRule> rules() const;
};

struct GridSpec
{
  AxisSpec pf;
  AxisSpec vf;
  std::vector<int> counter_limits{1, 2, 3, 4, 5, 6};

  std::size_t size() const;
};

struct GridPointScore
{
  risk::AreaThresholds thresholds;
  double cv_accuracy{0.0};
};

struct CalibrationResult
{
  risk::AreaThresholds best;
  double cv_accuracy{0.0};
  ConfusionCounts test_counts;
  Metrics test_metrics;
  std::size_t train_units{0};
  std::size_t test_units{0};
  /// Every grid point's score in grid order (left empty for grids above kMaxRecordedScores).
  std::vector<GridPointScore> scores;
};

inline constexpr std::size_t kMaxRecordedScores = 2'000'000;

struct SearchOptions
{
  int k{10};
  std::uint64_t seed{1};
  double test_fraction{0.2};
  bool record_scores{true};
};

/// Exhaustive enumeration of the grid scored by mean k-fold accuracy on the training part. The
/// test part (seeded split) is only used for the returned test metrics. Ties prefer the smaller
/// total interval width, then the earlier grid point.
/// Throws Errc::EmptyGrid, Errc::TooFewEpisodes.
CalibrationResult grid_search(const std::vector<Unit> & units, const GridSpec & grid, const SearchOptions & options);

/// (train, test) unit indices used by grid_search.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
  std::size_t n, double test_fraction, std::uint64_t seed);

/// Risk-2 decision of one rule on one unit, by direct counting.
bool classify_unit(const Unit & unit, const risk::AreaThresholds & th);

}  // namespace ppet::calibration

#endif  // PPET__CALIBRATION_HPP_
