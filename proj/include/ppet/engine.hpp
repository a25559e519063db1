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

#ifndef PPET__ENGINE_HPP_
#define PPET__ENGINE_HPP_

#include "ppet/geometry.hpp"
#include "ppet/ppet.hpp"
#include "ppet/predictors.hpp"
#include "ppet/risk.hpp"
#include "ppet/stream.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ppet
{

/// One P-PET trace row: the two components of one counter slot for one pedestrian-frame.
struct TraceRow
{
  std::int64_t frame{0};
  std::string ped_id;
  AgentCategory category{AgentCategory::Adult};
  std::optional<std::string> veh_id;
  geometry::Area conflict_area{geometry::Area::A3_1};
  RiskArea slot{RiskArea::Closer};
  PPetVector values;
};

struct FrameTiming
{
  double prediction_ms{0.0};
  double risk_ms{0.0};
};

struct FrameOutput
{
  std::vector<stream::LifecycleEvent> events;
  std::vector<risk::RiskScenario> scenarios;
  std::vector<TraceRow> trace;
  /// Full P-PET vector of every evaluated pedestrian this frame, in evaluation order.
  std::vector<std::pair<std::string, PPetVector>> evaluated;
  FrameTiming timing;
};

/// Streaming pedestrian risk evaluation over world-coordinate observations.
class RiskEngine
{
public:
  /// Throws Errc::MissingPredictor / Errc::MissingThreshold for incomplete inputs.
  RiskEngine(geometry::AreaMap map, predictors::ModelBundle models, risk::RiskThresholdConfig thresholds);

  FrameOutput process_frame(std::int64_t frame, std::span<const stream::Observation> observations);

  const stream::StreamTracker & tracker() const { return tracker_; }
  const risk::RiskThresholdConfig & thresholds() const { return thresholds_; }

private:
  struct VehicleEstimate
  {
    std::optional<double> enter;
    std::optional<double> leave;
  };

  std::optional<double> estimate(
    AgentCategory category, int q, const stream::SlidingWindow & window,
    const geometry::TargetLine & line) const;
  VehicleEstimate vehicle_estimate(const std::string & veh_id, std::map<std::string, VehicleEstimate> & cache) const;

  stream::StreamTracker tracker_;
  predictors::ModelBundle models_;
  risk::RiskThresholdConfig thresholds_;
};

/// Pedestrian-episode P-PET traces collected from engine output, keyed by (ped id, episode).
class TraceCollector
{
public:
  void add(const RiskEngine & engine, const FrameOutput & out);
  std::vector<risk::EpisodeTrace> episodes() const;

private:
  std::map<std::pair<std::string, int>, risk::EpisodeTrace> episodes_;
};

}  // namespace ppet

#endif  // PPET__ENGINE_HPP_
