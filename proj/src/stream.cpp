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

#include "ppet/stream.hpp"

#include "ppet/errors.hpp"

#include <set>

namespace ppet::stream
{

namespace
{
constexpr std::int64_t kForgetAfterFrames = 150;
}

TrajectoryBuffer::TrajectoryBuffer(std::string agent_id, AgentCategory category, std::size_t capacity)
: agent_id_(std::move(agent_id)), category_(category), capacity_(std::max(capacity, kWindowSize))
{
}

void TrajectoryBuffer::push(Observation obs)
{
  ring_.push_back(std::move(obs));
  ++total_observed_;
  while (ring_.size() > capacity_) {
    ring_.pop_front();
  }
}

void TrajectoryBuffer::clear()
{
  ring_.clear();
  total_observed_ = 0;
}

SlidingWindow TrajectoryBuffer::window(std::size_t m) const
{
  if (ring_.size() < m) {
    fail(
      Errc::InsufficientHistory, "agent " + agent_id_ + " has " + std::to_string(ring_.size()) +
                                   " of " + std::to_string(m) + " points");
  }
  SlidingWindow w;
  w.points.assign(ring_.end() - static_cast<std::ptrdiff_t>(m), ring_.end());
  return w;
}

Direction infer_direction(const TrajectoryBuffer & buffer)
{
  if (buffer.size() < 2) {
    return Direction::Unknown;
  }
  const double dx = buffer.last().position.x - buffer.first().position.x;
  if (dx > kDirectionDeadBand) {
    return Direction::LeftToRight;
  }
  if (dx < -kDirectionDeadBand) {
    return Direction::RightToLeft;
  }
  return Direction::Unknown;
}

std::pair<Area, Area> closer_further_assignment(Direction d)
{
  switch (d) {
    case Direction::LeftToRight: return {Area::A3_1, Area::A3_2};
    case Direction::RightToLeft: return {Area::A3_2, Area::A3_1};
    case Direction::Unknown: break;
  }
  fail(Errc::UnknownDirection, "closer/further assignment needs a crossing direction");
}

Area served_conflict_area(AgentCategory vehicle)
{
  if (vehicle == AgentCategory::VehicleArea41) {
    return Area::A3_1;
  }
  if (vehicle == AgentCategory::VehicleArea42) {
    return Area::A3_2;
  }
  fail(Errc::InvalidArgument, "not a vehicle category");
}

void PedestrianState::reset_episode()
{
  direction = Direction::Unknown;
  risk_counters = {0, 0, 0};
  flagged_risk2 = {false, false, false};
  entry_side = 0;
}

std::string_view to_string(LifecycleEvent::Kind k)
{
  switch (k) {
    case LifecycleEvent::Kind::BecameTarget: return "BecameTarget";
    case LifecycleEvent::Kind::BecameNonTarget: return "BecameNonTarget";
    case LifecycleEvent::Kind::EnteredArea: return "EnteredArea";
    case LifecycleEvent::Kind::WindowReady: return "WindowReady";
  }
  return "?";
}

StreamTracker::StreamTracker(geometry::AreaMap map, std::size_t buffer_capacity)
: map_(std::move(map)), capacity_(buffer_capacity)
{
}

const TrajectoryBuffer & StreamTracker::buffer(const std::string & id) const
{
  return tracks_.at(id).buffer;
}

std::optional<Area> StreamTracker::area_of(const std::string & id) const
{
  return tracks_.at(id).area;
}

PedestrianState & StreamTracker::pedestrian(const std::string & id) { return peds_.at(id); }

const PedestrianState & StreamTracker::pedestrian(const std::string & id) const
{
  return peds_.at(id);
}

std::vector<LifecycleEvent> StreamTracker::ingest_frame(
  std::int64_t frame, std::span<const Observation> observations)
{
  using Kind = LifecycleEvent::Kind;
  if (last_frame_ && frame != *last_frame_ + 1) {
    fail(
      Errc::OutOfOrderFrame,
      "frame " + std::to_string(frame) + " after " + std::to_string(*last_frame_));
  }
  std::set<std::string> seen_ids;
  for (const auto & obs : observations) {
    if (obs.frame != frame) {
      fail(Errc::OutOfOrderFrame, "observation frame differs from ingested frame");
    }
    if (!seen_ids.insert(obs.agent_id).second) {
      fail(Errc::DuplicateAgentInFrame, "agent " + obs.agent_id + " twice in frame " + std::to_string(frame));
    }
  }

  std::vector<LifecycleEvent> events;
  current_.clear();
  for (const auto & obs : observations) {
    auto [it, inserted] = tracks_.try_emplace(obs.agent_id);
    AgentTrack & track = it->second;
    const bool first_sighting = inserted;
    if (inserted) {
      track.buffer = TrajectoryBuffer(obs.agent_id, obs.category, capacity_);
    }
    if (!track.buffer.empty() && obs.t <= track.buffer.last().t) {
      fail(Errc::OutOfOrderFrame, "time does not increase for agent " + obs.agent_id);
    }

    std::size_t before = track.buffer.size();
    if (!track.buffer.empty()) {
      const std::int64_t gap = frame - track.last_frame - 1;
      if (gap > kMaxRepairableGap) {
        track.buffer.clear();
        before = 0;
      } else if (gap > 0) {
        const Observation prev = track.buffer.last();
        for (std::int64_t g = 1; g <= gap; ++g) {
          const double s = static_cast<double>(g) / static_cast<double>(gap + 1);
          Observation fill = obs;
          fill.frame = prev.frame + g;
          fill.t = prev.t + s * (obs.t - prev.t);
          fill.position = prev.position + s * (obs.position - prev.position);
          track.buffer.push(std::move(fill));
        }
      }
    }
    track.buffer.push(obs);
    track.last_frame = frame;
    if (before < kWindowSize && track.buffer.size() >= kWindowSize) {
      events.push_back({Kind::WindowReady, frame, obs.agent_id, std::nullopt});
    }

    const std::optional<Area> previous_area = first_sighting ? std::nullopt : track.area;
    track.area = map_.locate(obs.position);
    if (track.area && (first_sighting || track.area != previous_area)) {
      events.push_back({Kind::EnteredArea, frame, obs.agent_id, track.area});
    }
    if (is_pedestrian(obs.category)) {
      update_lifecycle(obs.agent_id, track, first_sighting, previous_area, events, frame);
    }
    current_.push_back(obs.agent_id);
  }

  for (auto it = tracks_.begin(); it != tracks_.end();) {
    if (frame - it->second.last_frame > kForgetAfterFrames) {
      peds_.erase(it->first);
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }
  last_frame_ = frame;
  return events;
}

void StreamTracker::update_lifecycle(
  const std::string & id, AgentTrack & track, bool first_sighting,
  std::optional<Area> previous_area, std::vector<LifecycleEvent> & events, std::int64_t frame)
{
  using Kind = LifecycleEvent::Kind;
  PedestrianState & ped = peds_[id];
  ped.current_area = track.area;
  const int group = track.area ? geometry::area_group(*track.area) : 0;

  if (ped.status != PedestrianStatus::Target) {
    // an exited pedestrian starts a new episode only after leaving the layout entirely
    if (ped.status == PedestrianStatus::Exited && group == 0) {
      ped.rearmed = true;
    }
    const bool armed = ped.status == PedestrianStatus::NonTarget || ped.rearmed;
    const bool enters_area1 = group == 1 && armed;
    const bool startup_inside = first_sighting && (group == 2 || group == 3);
    if (enters_area1 || startup_inside) {
      ped.reset_episode();
      ped.rearmed = false;
      ped.status = PedestrianStatus::Target;
      ped.entry_side = geometry::area_side(*track.area);
      ++ped.episode;
      events.push_back({Kind::BecameTarget, frame, id, track.area});
    }
    return;
  }

  const bool was_in_conflict = previous_area && geometry::area_group(*previous_area) == 3;
  if (!was_in_conflict || group == 3) {
    return;
  }
  const bool retreat = (group == 1 || group == 2) && geometry::area_side(*track.area) == ped.entry_side;
  if (retreat) {
    return;
  }
  ped.status = PedestrianStatus::Exited;
  ped.reset_episode();
  track.buffer.clear();
  events.push_back({Kind::BecameNonTarget, frame, id, track.area});
}

}  // namespace ppet::stream
