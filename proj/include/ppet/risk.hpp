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

#ifndef PPET__RISK_HPP_
#define PPET__RISK_HPP_

#include "ppet/geometry.hpp"
#include "ppet/ppet.hpp"
#include "ppet/stream.hpp"
#include "ppet/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppet::risk
{

struct ThresholdInterval
{
  double alpha{0.0};
  double beta{0.0};

  bool contains(double v) const { return alpha <= v && v <= beta; }
  double width() const { return beta - alpha; }
  friend bool operator==(const ThresholdInterval &, const ThresholdInterval &) = default;
};

/// A disabled rule never matches; it is how a tuned config says "this scenario is not used".
struct ScenarioRule
{
  bool enabled{true};
  ThresholdInterval interval;

  bool matches(double v) const { return enabled && interval.contains(v); }
  friend bool operator==(const ScenarioRule &, const ScenarioRule &) = default;
};

struct AreaThresholds
{
  std::optional<ScenarioRule> pf;
  std::optional<ScenarioRule> vf;
  /// Theta: Risk 2 once the counter strictly exceeds it.
  int counter_limit{3};

  friend bool operator==(const AreaThresholds &, const AreaThresholds &) = default;
};

enum class ThresholdMode { PerArea, MergedArea };

struct CategoryThresholds
{
  ThresholdMode mode{ThresholdMode::PerArea};
  /// Closer and Further in PerArea mode, Merged in MergedArea mode.
  std::map<RiskArea, AreaThresholds> areas;
};

struct RiskThresholdConfig
{
  std::map<AgentCategory, CategoryThresholds> categories;

  /// Per-area values for adults and cyclists, merged values for kids.
  static RiskThresholdConfig defaults();

  /// Throws Errc::MissingThreshold.
  const CategoryThresholds & category(AgentCategory c) const;
  const AreaThresholds & area(AgentCategory c, RiskArea a) const;
  /// Counter slots used for the category: {Closer, Further} or {Merged}.
  std::vector<RiskArea> slots(AgentCategory c) const;
  /// Validates intervals (alpha <= beta) and limits (>= 1). Throws Errc::InvalidArgument.
  void validate() const;
};

struct StepDecision
{
  enum class Kind { NoChange, CounterIncremented, Risk2Flagged };
  Kind kind{Kind::NoChange};
  RiskArea area{RiskArea::Closer};
};

/// One frame of threshold counting for a pedestrian. A slot gains at most +1 per frame when
/// any of its available components falls inside its scenario interval; the slot is flagged once
/// its counter exceeds the limit. Pedestrians that are not Target or are inside Area 1 are never
/// counted. Throws Errc::MissingThreshold.
std::vector<StepDecision> step_evaluate(
  stream::PedestrianState & ped, const PPetVector & ppet, AgentCategory category,
  const RiskThresholdConfig & config);

/// P-PET values recorded for every evaluated frame of one pedestrian episode.
struct EpisodeTrace
{
  std::string ped_id;
  AgentCategory category{AgentCategory::Adult};
  std::vector<PPetVector> frames;
};

/// Batch classification of a whole episode; Risk2 for flagged slots, Risk1 otherwise.
std::map<RiskArea, RiskLevel> classify_offline(const EpisodeTrace & episode, const RiskThresholdConfig & config);

struct VehicleCandidate
{
  std::string id;
  geometry::WorldPoint position;
};

/// Nearest candidate by Euclidean distance; ties keep the earlier candidate.
std::optional<std::size_t> select_conflict_vehicle(
  geometry::WorldPoint ped_position, std::span<const VehicleCandidate> candidates);

struct RiskScenario
{
  std::string ped_id;
  geometry::WorldPoint ped_position;
  std::string veh_id;
  geometry::WorldPoint veh_position;
  double t{0.0};
  std::int64_t frame{0};
  RiskArea area{RiskArea::Closer};
  /// Conflict area 3.1/3.2 of the flagged slot (for Merged: the area that triggered last).
  geometry::Area conflict_area{geometry::Area::A3_1};
};

}  // namespace ppet::risk

#endif  // PPET__RISK_HPP_
