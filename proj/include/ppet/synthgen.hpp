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

#ifndef PPET__SYNTHGEN_HPP_
#define PPET__SYNTHGEN_HPP_

#include "ppet/geometry.hpp"
#include "ppet/predictors.hpp"
#include "ppet/risk.hpp"
#include "ppet/stream.hpp"
#include "ppet/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ppet::synthgen
{

/// Straight two-lane crossing: crosswalk strips over y in [0, 4], lane A (4.1 -> 3.1) runs +y
/// at x = 1.75, lane B (4.2 -> 3.2) turns in from a side road and runs -y at x = 5.25.
geometry::AreaMap reference_area_map();

/// 2 x 2 m world tiles seen through a perspective camera with slight per-vertex distortion, so
/// neighbouring tiles carry different matrices.
std::vector<geometry::HomographyTile> reference_tiles(std::uint64_t seed = 11);

/// Inverse of the tile grid mapping; nullopt outside every tile.
std::optional<geometry::PixelPoint> world_to_pixel(
  std::span<const geometry::HomographyTile> tiles, geometry::WorldPoint p);

struct ScenarioSpec
{
  std::uint64_t seed{1};
  double duration{120.0};
  int fps{30};

  int adults{20};
  int kids{10};
  int cyclists{10};
  /// Mean times to cross both conflict areas (7 m).
  double adult_crossing{5.49};
  double kid_crossing{5.36};
  double cyclist_crossing{3.01};
  /// Log-normal spread of the per-pedestrian speed.
  double speed_spread{0.1};
  /// Lateral jitter of kids (m/s per sqrt(s)); doubled in the further area.
  double kid_jitter{0.25};

  /// Vehicle arrivals per second and lane. Zero disables vehicles.
  double vehicle_rate{0.08};
  double vehicle_speed{8.0};
  double vehicle_speed_spread{0.1};
  /// Share of drivers that brake for a predicted conflict.
  double yield_probability{0.6};

  double notice_probability{0.3};
  /// Share of noticing pedestrians that accelerate instead of waiting.
  double accelerate_share{0.3};

  /// Gaussian position noise (m) applied to the emitted stream only.
  double position_noise{0.0};

  /// Throws Errc::InfeasibleSpec.
  void validate() const;
};

struct AgentTruth
{
  std::string id;
  AgentCategory category{AgentCategory::Adult};
  geometry::Direction direction{geometry::Direction::Unknown};
  double spawn_time{0.0};
  /// Cruise speed drawn at spawn (m/s).
  double nominal_speed{0.0};
  /// Realized line-crossing times keyed by q.
  std::map<int, double> crossing_times;
  Awareness awareness{Awareness::DidNotNotice};
  Reaction reaction{Reaction::None};
  /// Closer and Further levels for pedestrians.
  std::map<RiskArea, RiskLevel> risk;
};

struct GroundTruth
{
  std::vector<AgentTruth> agents;

  const AgentTruth * find(const std::string & id) const;
  std::map<std::string, predictors::Annotation> annotations() const;
  /// Risk-2 labels per (pedestrian, counter slot); merged slots take the worse of the two areas.
  std::map<std::pair<std::string, RiskArea>, bool> risk2_labels(const risk::RiskThresholdConfig & modes) const;
};

struct Scenario
{
  /// Sorted by frame; agents within a frame keep spawn order.
  std::vector<stream::Observation> observations;
  GroundTruth truth;
};

/// Deterministic for a given spec. Labels come from the realized kinematics.
Scenario generate(const ScenarioSpec & spec);

/// Groups a frame-sorted observation list into consecutive frames (empty frames included).
std::vector<std::pair<std::int64_t, std::vector<stream::Observation>>> group_frames(
  const std::vector<stream::Observation> & observations);

/// Per-agent trajectories in first-appearance order.
std::vector<predictors::Trajectory> split_trajectories(const std::vector<stream::Observation> & observations);

struct LabelRules
{
  /// Vehicles whose occupancy is further than this from the pedestrian's are ignored.
  double horizon{10.0};
  double pet_cutoff{1.5};
  double speed_change{0.3};
  /// Centered moving-average length (frames) for speed profiles.
  int smoothing{15};
  /// Pedestrian speed changes count against a vehicle entering within this lead time.
  double reaction_lead{6.0};
};

/// Realized occupancy interval [enter, leave] of a conflict area.
struct Occupancy
{
  double enter{0.0};
  double leave{0.0};
};

/// Closer/Further risk levels of one pedestrian from realized trajectories only. Vehicles that
/// never cross their conflict area are ignored.
std::map<RiskArea, RiskLevel> label_risk(
  const predictors::Trajectory & pedestrian, geometry::Direction direction,
  std::span<const predictors::Trajectory> vehicles, const geometry::AreaMap & map,
  const LabelRules & rules = {});

/// First time the smoothed speed departs from the initial cruise speed by the given fraction,
/// searched over [from, to]. Cruise speed is the mean over the first `smoothing` frames.
std::optional<double> speed_change_onset(
  const std::vector<stream::Observation> & points, double fraction, int smoothing, double from, double to);

// ---------------------------------------------------------------------------------------------
// Special-purpose corpora
// ---------------------------------------------------------------------------------------------

/// Left-to-right adults that slow down exponentially after reaching the closer conflict area.
struct DeceleratingSpec
{
  std::uint64_t seed{3};
  int count{200};
  double speed_min{1.0};
  double speed_max{1.6};
  double onset_x{0.0};
  double onset_jitter{0.3};
  /// Asymptotic fraction of the initial speed.
  double floor{0.4};
  double tau{1.5};
};

std::vector<predictors::Trajectory> generate_decelerating(const DeceleratingSpec & spec);

/// P-PET traces whose Risk-2 label follows a known rule: the closer PF value lies in
/// `interval` on more than `counter_limit` frames.
struct PlantedSpec
{
  std::uint64_t seed{5};
  int episodes{400};
  risk::ThresholdInterval interval{-1.0, 0.0};
  int counter_limit{3};
  int min_frames{30};
  int max_frames{90};
};

struct PlantedSet
{
  std::vector<risk::EpisodeTrace> episodes;
  std::map<std::pair<std::string, RiskArea>, bool> labels;
};

PlantedSet generate_planted(const PlantedSpec & spec);

}  // namespace ppet::synthgen

#endif  // PPET__SYNTHGEN_HPP_
