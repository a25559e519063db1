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

#ifndef PPET__STREAM_HPP_
#define PPET__STREAM_HPP_

#include "ppet/geometry.hpp"
#include "ppet/types.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ppet::stream
{

using geometry::Area;
using geometry::Direction;
using geometry::WorldPoint;

/// Window length m (1 s at 30 FPS). The prediction gate L uses the same value.
inline constexpr std::size_t kWindowSize = 30;
inline constexpr int kMaxRepairableGap = 5;
inline constexpr double kDirectionDeadBand = 0.2;

struct Observation
{
  std::int64_t frame{0};
  double t{0.0};
  std::string agent_id;
  AgentCategory category{AgentCategory::Adult};
  WorldPoint position;
};

/// Consecutive observations of one agent. Produced by TrajectoryBuffer::window() with exactly
/// kWindowSize points; predictors accept any length >= 2.
struct SlidingWindow
{
  std::vector<Observation> points;

  std::size_t size() const { return points.size(); }
  const Observation & front() const { return points.front(); }
  const Observation & back() const { return points.back(); }
};

class TrajectoryBuffer
{
public:
  TrajectoryBuffer() = default;
  TrajectoryBuffer(std::string agent_id, AgentCategory category, std::size_t capacity = 300);

  void push(Observation obs);
  void clear();

  std::size_t size() const { return ring_.size(); }
  bool empty() const { return ring_.empty(); }
  std::size_t total_observed() const { return total_observed_; }
  const Observation & last() const { return ring_.back(); }
  const Observation & first() const { return ring_.front(); }
  const std::deque<Observation> & observations() const { return ring_; }
  const std::string & agent_id() const { return agent_id_; }
  AgentCategory category() const { return category_; }

  /// The most recent kWindowSize observations. Throws Errc::InsufficientHistory.
  SlidingWindow window(std::size_t m = kWindowSize) const;

private:
  std::string agent_id_;
  AgentCategory category_{AgentCategory::Adult};
  std::size_t capacity_{300};
  std::size_t total_observed_{0};
  std::deque<Observation> ring_;
};

/// Net x-displacement over the buffer with a 0.2 m dead-band.
Direction infer_direction(const TrajectoryBuffer & buffer);

/// (closer, further) conflict areas for a crossing direction. Throws Errc::UnknownDirection.
std::pair<Area, Area> closer_further_assignment(Direction d);

/// Conflict area served by a vehicle category (4.1 feeds 3.1, 4.2 feeds 3.2).
Area served_conflict_area(AgentCategory vehicle);

enum class PedestrianStatus { NonTarget, Target, Exited };

struct PedestrianState
{
  PedestrianStatus status{PedestrianStatus::NonTarget};
  std::optional<Area> current_area;
  Direction direction{Direction::Unknown};
  /// Indexed by RiskArea.
  std::array<int, 3> risk_counters{0, 0, 0};
  std::array<bool, 3> flagged_risk2{false, false, false};
  /// 1 when the episode started on the x.1 side, 2 on the x.2 side.
  int entry_side{0};
  int episode{0};
  bool rearmed{false};

  void reset_episode();
};

struct LifecycleEvent
{
  enum class Kind { BecameTarget, BecameNonTarget, EnteredArea, WindowReady };

  Kind kind;
  std::int64_t frame;
  std::string agent_id;
  std::optional<Area> area;

  friend bool operator==(const LifecycleEvent &, const LifecycleEvent &) = default;
};

std::string_view to_string(LifecycleEvent::Kind k);

/// Per-agent view of the latest frame.
struct AgentSnapshot
{
  const TrajectoryBuffer * buffer;
  std::optional<Area> area;
};

/// Single-writer state machine that buffers trajectories and drives the pedestrian lifecycle.
/// ingest_frame calls must arrive in consecutive frame order.
class StreamTracker
{
public:
  explicit StreamTracker(geometry::AreaMap map, std::size_t buffer_capacity = 300);

  std::vector<LifecycleEvent> ingest_frame(std::int64_t frame, std::span<const Observation> observations);

  std::optional<std::int64_t> last_frame() const { return last_frame_; }
  const geometry::AreaMap & area_map() const { return map_; }

  /// Agents observed in the most recent frame, in ingestion order.
  const std::vector<std::string> & current_agents() const { return current_; }
  const TrajectoryBuffer & buffer(const std::string & id) const;
  std::optional<Area> area_of(const std::string & id) const;

  PedestrianState & pedestrian(const std::string & id);
  const PedestrianState & pedestrian(const std::string & id) const;
  bool has_pedestrian(const std::string & id) const { return peds_.count(id) > 0; }

private:
  struct AgentTrack
  {
    TrajectoryBuffer buffer;
    std::int64_t last_frame{0};
    std::optional<Area> area;
    bool seen{false};
  };

  void update_lifecycle(const std::string & id, AgentTrack & track, bool first_sighting,
                        std::optional<Area> previous_area, std::vector<LifecycleEvent> & events,
                        std::int64_t frame);

  geometry::AreaMap map_;
  std::size_t capacity_;
  std::optional<std::int64_t> last_frame_;
  std::map<std::string, AgentTrack> tracks_;
  std::map<std::string, PedestrianState> peds_;
  std::vector<std::string> current_;
};

}  // namespace ppet::stream

#endif  // PPET__STREAM_HPP_
