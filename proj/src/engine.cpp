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

#include "ppet/engine.hpp"

#include "ppet/errors.hpp"

#include <chrono>

namespace ppet
{

using geometry::Area;
using stream::kWindowSize;

namespace
{

double elapsed_ms(std::chrono::steady_clock::time_point from)
{
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from).count();
}

}  // namespace

RiskEngine::RiskEngine(
  geometry::AreaMap map, predictors::ModelBundle models, risk::RiskThresholdConfig thresholds)
: tracker_(std::move(map)), models_(std::move(models)), thresholds_(std::move(thresholds))
{
  models_.require_complete();
  thresholds_.validate();
  for (AgentCategory c : kPedestrianCategories) {
    for (RiskArea slot : thresholds_.slots(c)) {
      const auto & th = thresholds_.area(c, slot);
      if (!th.pf || !th.vf) {
        fail(Errc::MissingThreshold, "incomplete thresholds for category " + std::string(to_string(c)));
      }
    }
  }
}

std::optional<double> RiskEngine::estimate(
  AgentCategory category, int q, const stream::SlidingWindow & window,
  const geometry::TargetLine & line) const
{
  if (geometry::signed_distance_to_line(window.back().position, line) <= 0) {
    return 0.0;
  }
  return models_.at(category, q).predict(window, line);
}

RiskEngine::VehicleEstimate RiskEngine::vehicle_estimate(
  const std::string & veh_id, std::map<std::string, VehicleEstimate> & cache) const
{
  if (auto it = cache.find(veh_id); it != cache.end()) {
    return it->second;
  }
  VehicleEstimate est;
  const auto & buffer = tracker_.buffer(veh_id);
  if (buffer.size() >= kWindowSize) {
    const auto window = buffer.window();
    const Area conflict = stream::served_conflict_area(buffer.category());
    const auto & map = tracker_.area_map();
    est.enter = estimate(buffer.category(), 0, window, map.vehicle_line(conflict, 0));
    est.leave = estimate(buffer.category(), 1, window, map.vehicle_line(conflict, 1));
  }
  cache.emplace(veh_id, est);
  return est;
}

FrameOutput RiskEngine::process_frame(std::int64_t frame, std::span<const stream::Observation> observations)
{
  FrameOutput out;
  out.events = tracker_.ingest_frame(frame, observations);
  const auto & map = tracker_.area_map();

  // vehicles that can still conflict, grouped by the conflict area they serve
  std::map<Area, std::vector<risk::VehicleCandidate>> candidates;
  for (const auto & id : tracker_.current_agents()) {
    const auto & buffer = tracker_.buffer(id);
    if (!is_vehicle(buffer.category())) {
      continue;
    }
    const auto area = tracker_.area_of(id);
    if (!area || (geometry::area_group(*area) != 3 && geometry::area_group(*area) != 4)) {
      continue;
    }
    const Area conflict = stream::served_conflict_area(buffer.category());
    const auto pos = buffer.last().position;
    if (geometry::signed_distance_to_line(pos, map.vehicle_line(conflict, 1)) <= 0) {
      continue;
    }
    candidates[conflict].push_back({id, pos});
  }

  std::map<std::string, VehicleEstimate> vehicle_cache;
  for (const auto & id : tracker_.current_agents()) {
    const auto & buffer = tracker_.buffer(id);
    const AgentCategory category = buffer.category();
    if (!is_pedestrian(category)) {
      continue;
    }
    auto & ped = tracker_.pedestrian(id);
    if (ped.status != stream::PedestrianStatus::Target || !ped.current_area) {
      continue;
    }
    const int group = geometry::area_group(*ped.current_area);
    if ((group != 2 && group != 3) || buffer.size() < kWindowSize) {
      continue;
    }
    if (ped.direction == geometry::Direction::Unknown) {
      ped.direction = stream::infer_direction(buffer);
      if (ped.direction == geometry::Direction::Unknown) {
        continue;
      }
    }

    const auto t_pred = std::chrono::steady_clock::now();
    const auto window = buffer.window();
    ArrivalEstimateSet est;
    est.ped_q0 = estimate(category, 0, window, map.pedestrian_line(ped.direction, 0));
    est.ped_q1 = estimate(category, 1, window, map.pedestrian_line(ped.direction, 1));
    est.ped_q2 = estimate(category, 2, window, map.pedestrian_line(ped.direction, 2));
    const auto [closer, further] = stream::closer_further_assignment(ped.direction);
    const auto ped_pos = buffer.last().position;

    std::array<std::optional<risk::VehicleCandidate>, 2> conflict_vehicle;
    for (int k = 0; k < 2; ++k) {
      const Area area = k == 0 ? closer : further;
      auto it = candidates.find(area);
      if (it == candidates.end()) {
        continue;
      }
      const auto pick = risk::select_conflict_vehicle(ped_pos, it->second);
      if (!pick) {
        continue;
      }
      conflict_vehicle[k] = it->second[*pick];
      const auto v = vehicle_estimate(it->second[*pick].id, vehicle_cache);
      if (k == 0) {
        est.veh_closer_enter = v.enter;
        est.veh_closer_leave = v.leave;
      } else {
        est.veh_further_enter = v.enter;
        est.veh_further_leave = v.leave;
      }
    }
    out.timing.prediction_ms += elapsed_ms(t_pred);

    const auto t_risk = std::chrono::steady_clock::now();
    const PPetVector ppet = compute_ppet(est);
    const auto decisions = risk::step_evaluate(ped, ppet, category, thresholds_);
    for (const auto & d : decisions) {
      if (d.kind != risk::StepDecision::Kind::Risk2Flagged) {
        continue;
      }
      int k = d.area == RiskArea::Further ? 1 : 0;
      if (d.area == RiskArea::Merged) {
        const auto & th = thresholds_.area(category, RiskArea::Merged);
        const bool closer_hit = (ppet.c_pf && th.pf->matches(*ppet.c_pf)) ||
                                (ppet.c_vf && th.vf->matches(*ppet.c_vf));
        k = closer_hit ? 0 : 1;
      }
      risk::RiskScenario sc;
      sc.ped_id = id;
      sc.ped_position = ped_pos;
      if (conflict_vehicle[k]) {
        sc.veh_id = conflict_vehicle[k]->id;
        sc.veh_position = conflict_vehicle[k]->position;
      }
      sc.t = buffer.last().t;
      sc.frame = frame;
      sc.area = d.area;
      sc.conflict_area = k == 0 ? closer : further;
      out.scenarios.push_back(std::move(sc));
    }
    const bool merged = thresholds_.category(category).mode == risk::ThresholdMode::MergedArea;
    for (int k = 0; k < 2; ++k) {
      TraceRow row;
      row.frame = frame;
      row.ped_id = id;
      row.category = category;
      if (conflict_vehicle[k]) {
        row.veh_id = conflict_vehicle[k]->id;
      }
      row.conflict_area = k == 0 ? closer : further;
      row.slot = merged ? RiskArea::Merged : (k == 0 ? RiskArea::Closer : RiskArea::Further);
      if (k == 0) {
        row.values.c_pf = ppet.c_pf;
        row.values.c_vf = ppet.c_vf;
      } else {
        row.values.f_pf = ppet.f_pf;
        row.values.f_vf = ppet.f_vf;
      }
      out.trace.push_back(std::move(row));
    }
    out.evaluated.emplace_back(id, ppet);
    out.timing.risk_ms += elapsed_ms(t_risk);
  }
  return out;
}

void TraceCollector::add(const RiskEngine & engine, const FrameOutput & out)
{
  for (const auto & [id, ppet] : out.evaluated) {
    const auto & tracker = engine.tracker();
    const int episode = tracker.pedestrian(id).episode;
    auto & ep = episodes_[{id, episode}];
    ep.ped_id = id;
    ep.category = tracker.buffer(id).category();
    ep.frames.push_back(ppet);
  }
}

std::vector<risk::EpisodeTrace> TraceCollector::episodes() const
{
  std::vector<risk::EpisodeTrace> out;
  for (const auto & [key, ep] : episodes_) {
    out.push_back(ep);
  }
  return out;
}

}  // namespace ppet
