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

#include "ppet/synthgen.hpp"

#include "ppet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace ppet::synthgen
{

using geometry::Area;
using geometry::Direction;
using geometry::WorldPoint;

namespace
{

geometry::Polygon rect(double x0, double x1, double y0, double y1)
{
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

geometry::TargetLine vertical_line(double x, double nx) { return {{x, 0.0}, {x, 4.0}, {nx, 0.0}}; }

geometry::TargetLine horizontal_line(double y, double ny, double x0, double x1)
{
  return {{x0, y}, {x1, y}, {0.0, ny}};
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t salt)
{
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64 & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(std::mt19937_64 & rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

std::string make_id(char prefix, int n)
{
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%04d", prefix, n);
  return buf;
}

/// Polyline path parameterised by arc length.
class Path
{
public:
  explicit Path(std::vector<WorldPoint> pts) : pts_(std::move(pts))
  {
    s_.push_back(0.0);
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      s_.push_back(s_.back() + geometry::distance(pts_[i - 1], pts_[i]));
    }
  }

  double length() const { return s_.back(); }

  WorldPoint at(double s) const
  {
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = it == s_.end() ? s_.size() - 1 : static_cast<std::size_t>(it - s_.begin());
    i = std::max<std::size_t>(i, 1);
    const double seg = s_[i] - s_[i - 1];
    const double f = seg > 0 ? (s - s_[i - 1]) / seg : 0.0;
    return pts_[i - 1] + f * (pts_[i] - pts_[i - 1]);
  }

  /// Arc length where the signed distance to the line first drops to zero.
  double crossing(const geometry::TargetLine & line) const
  {
    double prev = geometry::signed_distance_to_line(pts_[0], line);
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      const double d = geometry::signed_distance_to_line(pts_[i], line);
      if (d <= 0 && prev > 0) {
        return s_[i - 1] + (s_[i] - s_[i - 1]) * prev / (prev - d);
      }
      prev = d;
    }
    return length();
  }

private:
  std::vector<WorldPoint> pts_;
  std::vector<double> s_;
};

Path lane_a() { return Path({{1.75, -45.0}, {1.75, 40.0}}); }

Path lane_b()
{
  std::vector<WorldPoint> pts{{40.0, 22.0}};
  const WorldPoint c{14.0, 13.25};
  const double r = 8.75;
  for (int k = 0; k <= 48; ++k) {
    const double a = std::numbers::pi / 2 + std::numbers::pi / 2 * k / 48.0;
    pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  pts.push_back({5.25, -40.0});
  return Path(std::move(pts));
}

int sign_of(Direction d) { return d == Direction::LeftToRight ? 1 : -1; }

/// x extent of a conflict area in the reference layout.
std::pair<double, double> area_x(Area a) { return a == Area::A3_1 ? std::pair{0.0, 3.5} : std::pair{3.5, 7.0}; }

}  // namespace

geometry::AreaMap reference_area_map()
{
  std::map<Area, geometry::Polygon> areas{
    {Area::A1_1, rect(-8.0, -3.0, 0.0, 4.0)},  {Area::A2_1, rect(-3.0, 0.0, 0.0, 4.0)},
    {Area::A3_1, rect(0.0, 3.5, 0.0, 4.0)},    {Area::A3_2, rect(3.5, 7.0, 0.0, 4.0)},
    {Area::A2_2, rect(7.0, 10.0, 0.0, 4.0)},   {Area::A1_2, rect(10.0, 15.0, 0.0, 4.0)},
    {Area::A4_1, rect(0.0, 3.5, -30.0, 0.0)},  {Area::A4_2, rect(3.5, 7.0, 4.0, 34.0)},
  };
  std::map<std::string, geometry::TargetLine> lines{
    {"ped_ltr_q0", vertical_line(0.0, 1.0)},
    {"ped_ltr_q1", vertical_line(3.5, 1.0)},
    {"ped_ltr_q2", vertical_line(7.0, 1.0)},
    {"ped_rtl_q0", vertical_line(7.0, -1.0)},
    {"ped_rtl_q1", vertical_line(3.5, -1.0)},
    {"ped_rtl_q2", vertical_line(0.0, -1.0)},
    {"veh_31_q0", horizontal_line(0.0, 1.0, 0.0, 3.5)},
    {"veh_31_q1", horizontal_line(4.0, 1.0, 0.0, 3.5)},
    {"veh_32_q0", horizontal_line(4.0, -1.0, 3.5, 7.0)},
    {"veh_32_q1", horizontal_line(0.0, -1.0, 3.5, 7.0)},
    {"center_line", vertical_line(3.5, 1.0)},
  };
  return geometry::AreaMap(std::move(areas), std::move(lines));
}

std::vector<geometry::HomographyTile> reference_tiles(std::uint64_t seed)
{
  // camera: world plane -> pixels, perspective foreshortening along +y
  const geometry::Matrix3 cam{40.0, 6.0, 640.0, 0.0, -22.0, 900.0, 0.0, 0.012, 1.0};
  const int nx = 13;
  const int ny = 32;
  const double x0 = -10.0;
  const double y0 = -30.0;
  std::mt19937_64 rng(substream(seed, 1));
  std::vector<std::vector<geometry::PixelPoint>> vertex(nx + 1, std::vector<geometry::PixelPoint>(ny + 1));
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double x = x0 + 2.0 * i;
      const double y = y0 + 2.0 * j;
      const double w = cam[6] * x + cam[7] * y + cam[8];
      vertex[i][j] = {(cam[0] * x + cam[1] * y + cam[2]) / w + uniform(rng, -0.4, 0.4),
                      (cam[3] * x + cam[4] * y + cam[5]) / w + uniform(rng, -0.4, 0.4)};
    }
  }
  std::vector<geometry::HomographyTile> tiles;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double xa = x0 + 2.0 * i;
      const double ya = y0 + 2.0 * j;
      const std::array<geometry::PixelPoint, 4> px{vertex[i][j], vertex[i + 1][j], vertex[i + 1][j + 1], vertex[i][j + 1]};
      const std::array<WorldPoint, 4> wd{WorldPoint{xa, ya}, {xa + 2.0, ya}, {xa + 2.0, ya + 2.0}, {xa, ya + 2.0}};
      tiles.push_back(geometry::HomographyTile::from_anchors(px, wd));
    }
  }
  return tiles;
}

std::optional<geometry::PixelPoint> world_to_pixel(
  std::span<const geometry::HomographyTile> tiles, WorldPoint p)
{
  for (const auto & tile : tiles) {
    const geometry::Polygon quad(tile.world.begin(), tile.world.end());
    if (!geometry::point_in_polygon(quad, p)) {
      continue;
    }
    const auto inv = geometry::invert(tile.matrix);
    const double w = inv[6] * p.x + inv[7] * p.y + inv[8];
    return geometry::PixelPoint{(inv[0] * p.x + inv[1] * p.y + inv[2]) / w, (inv[3] * p.x + inv[4] * p.y + inv[5]) / w};
  }
  return std::nullopt;
}

void ScenarioSpec::validate() const
{
  const auto bad = [](const std::string & what) { fail(Errc::InfeasibleSpec, what); };
  if (fps != 30) {
    bad("fps must be 30");
  }
  if (!(duration > 0)) {
    bad("duration must be positive");
  }
  if (adults < 0 || kids < 0 || cyclists < 0) {
    bad("pedestrian counts must be non-negative");
  }
  for (double c : {adult_crossing, kid_crossing, cyclist_crossing}) {
    if (!(c > 0) || !std::isfinite(c)) {
      bad("crossing durations must be positive (zero-speed category)");
    }
  }
  if (!(speed_spread >= 0) || !(kid_jitter >= 0) || !(position_noise >= 0)) {
    bad("spreads and jitter must be non-negative");
  }
  if (!(vehicle_rate >= 0) || !std::isfinite(vehicle_rate)) {
    bad("vehicle rate must be non-negative");
  }
  if (vehicle_rate > 0 && !(vehicle_speed > 0)) {
    bad("vehicle speed must be positive");
  }
  for (double p : {yield_probability, notice_probability, accelerate_share}) {
    if (!(p >= 0 && p <= 1)) {
      bad("probabilities must lie in [0, 1]");
    }
  }
}

const AgentTruth * GroundTruth::find(const std::string & id) const
{
  for (const auto & a : agents) {
    if (a.id == id) {
      return &a;
    }
  }
  return nullptr;
}

std::map<std::string, predictors::Annotation> GroundTruth::annotations() const
{
  std::map<std::string, predictors::Annotation> out;
  for (const auto & a : agents) {
    predictors::Annotation ann;
    ann.awareness = a.awareness;
    ann.reaction = a.reaction;
    for (const auto & [slot, level] : a.risk) {
      ann.risk_level = std::max(ann.risk_level, level);
    }
    out[a.id] = ann;
  }
  return out;
}

std::map<std::pair<std::string, RiskArea>, bool> GroundTruth::risk2_labels(
  const risk::RiskThresholdConfig & modes) const
{
  std::map<std::pair<std::string, RiskArea>, bool> out;
  for (const auto & a : agents) {
    if (!is_pedestrian(a.category) || a.risk.empty()) {
      continue;
    }
    const auto level = [&](RiskArea s) {
      auto it = a.risk.find(s);
      return it == a.risk.end() ? RiskLevel::Risk0 : it->second;
    };
    for (RiskArea slot : modes.slots(a.category)) {
      const bool r2 = slot == RiskArea::Merged
                        ? (level(RiskArea::Closer) == RiskLevel::Risk2 || level(RiskArea::Further) == RiskLevel::Risk2)
                        : level(slot) == RiskLevel::Risk2;
      out[{a.id, slot}] = r2;
    }
  }
  return out;
}

std::vector<std::pair<std::int64_t, std::vector<stream::Observation>>> group_frames(
  const std::vector<stream::Observation> & observations)
{
  std::vector<std::pair<std::int64_t, std::vector<stream::Observation>>> out;
  for (const auto & obs : observations) {
    if (!out.empty() && obs.frame < out.back().first) {
      fail(Errc::OutOfOrderFrame, "observations are not sorted by frame");
    }
    while (!out.empty() && out.back().first + 1 < obs.frame) {
      out.push_back({out.back().first + 1, {}});
    }
    if (out.empty() || out.back().first != obs.frame) {
      out.push_back({obs.frame, {}});
    }
    out.back().second.push_back(obs);
  }
  return out;
}

std::vector<predictors::Trajectory> split_trajectories(const std::vector<stream::Observation> & observations)
{
  std::vector<predictors::Trajectory> out;
  std::map<std::string, std::size_t> index;
  for (const auto & obs : observations) {
    auto [it, inserted] = index.emplace(obs.agent_id, out.size());
    if (inserted) {
      out.push_back({obs.agent_id, obs.category, {}});
    }
    out[it->second].points.push_back(obs);
  }
  return out;
}

std::optional<double> speed_change_onset(
  const std::vector<stream::Observation> & points, double fraction, int smoothing, double from, double to)
{
  const auto w = static_cast<std::size_t>(std::max(smoothing, 1));
  if (points.size() < w + 1) {
    return std::nullopt;
  }
  std::vector<double> speed(points.size() - 1);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double dt = points[k + 1].t - points[k].t;
    speed[k] = dt > 0 ? geometry::distance(points[k + 1].position, points[k].position) / dt : 0.0;
  }
  double cruise = 0.0;
  for (std::size_t k = 0; k < w; ++k) {
    cruise += speed[k];
  }
  cruise /= static_cast<double>(w);
  if (cruise <= 1e-9) {
    return std::nullopt;
  }
  const std::size_t half = w / 2;
  for (std::size_t k = 0; k < speed.size(); ++k) {
    const double t = points[k].t;
    if (t < from || t > to) {
      continue;
    }
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(speed.size(), lo + w);
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum += speed[i];
    }
    const double smooth = sum / static_cast<double>(hi - lo);
    if (std::abs(smooth - cruise) >= fraction * cruise) {
      return t;
    }
  }
  return std::nullopt;
}

std::map<RiskArea, RiskLevel> label_risk(
  const predictors::Trajectory & pedestrian, Direction direction,
  std::span<const predictors::Trajectory> vehicles, const geometry::AreaMap & map, const LabelRules & rules)
{
  std::map<RiskArea, RiskLevel> out{{RiskArea::Closer, RiskLevel::Risk0}, {RiskArea::Further, RiskLevel::Risk0}};
  if (direction == Direction::Unknown || pedestrian.points.empty()) {
    return out;
  }
  const auto & pts = pedestrian.points;
  const double t_last = pts.back().t;
  std::array<std::optional<double>, 3> cross;
  for (int q = 0; q < 3; ++q) {
    cross[q] = predictors::first_crossing_time(pts, map.pedestrian_line(direction, q));
  }

  // speed along the crossing axis so lateral wandering does not count as evasion
  const WorldPoint axis = map.pedestrian_line(direction, 0).normal;
  std::vector<stream::Observation> along = pts;
  for (auto & o : along) {
    o.position = geometry::dot(o.position, axis) * axis;
  }
  const double ped_to = cross[2].value_or(t_last);
  const auto ped_onset = speed_change_onset(along, rules.speed_change, rules.smoothing, pts.front().t, ped_to);

  const auto [closer, further] = stream::closer_further_assignment(direction);
  for (int k = 0; k < 2; ++k) {
    const Area area = k == 0 ? closer : further;
    const RiskArea slot = k == 0 ? RiskArea::Closer : RiskArea::Further;
    if (!cross[k]) {
      continue;
    }
    const Occupancy ped{*cross[k], cross[k + 1].value_or(t_last)};
    bool nearby = false;
    bool severe = false;
    for (const auto & veh : vehicles) {
      if (!is_vehicle(veh.category) || stream::served_conflict_area(veh.category) != area || veh.points.empty()) {
        continue;
      }
      const auto enter = predictors::first_crossing_time(veh.points, map.vehicle_line(area, 0));
      if (!enter) {
        continue;
      }
      const auto leave = predictors::first_crossing_time(veh.points, map.vehicle_line(area, 1));
      const Occupancy v{*enter, leave.value_or(veh.points.back().t)};
      const double gap = std::max({v.enter - ped.leave, ped.enter - v.leave, 0.0});
      if (gap > rules.horizon) {
        continue;
      }
      nearby = true;
      if (gap < rules.pet_cutoff) {
        severe = true;
      }
      if (ped_onset && *ped_onset >= v.enter - rules.reaction_lead && *ped_onset <= v.leave) {
        severe = true;
      }
      const auto veh_onset =
        speed_change_onset(veh.points, rules.speed_change, rules.smoothing, veh.points.front().t, v.enter);
      if (veh_onset && ped.enter <= v.enter && ped.leave >= *veh_onset) {
        severe = true;
      }
    }
    out[slot] = !nearby ? RiskLevel::Risk0 : (severe ? RiskLevel::Risk2 : RiskLevel::Risk1);
  }
  return out;
}

namespace
{

struct Ped
{
  enum class Mode { Cruise, Stopping, Waiting, Boost };

  std::string id;
  AgentCategory category;
  Direction direction;
  double spawn_time;
  double x, y, vy{0.0};
  double v0, v;
  Awareness awareness;
  Reaction planned;
  Reaction realized{Reaction::None};
  Mode mode{Mode::Cruise};
  Area threat_area{Area::A3_1};
  double stop_line{0.0};
  bool alive{false};
  bool done{false};

  /// Distance still to travel before reaching x_line along the crossing direction.
  double ahead(double x_line) const { return sign_of(direction) * (x_line - x); }
};

struct Veh
{
  std::string id;
  AgentCategory category;
  int lane;
  double s{0.0};
  double v;
  double cruise;
  bool yields;
  bool alive{true};
};

struct LaneInfo
{
  Path path;
  Area area;
  double s_enter;
  double s_leave;
};

}  // namespace

Scenario generate(const ScenarioSpec & spec)
{
  spec.validate();
  const auto map = reference_area_map();
  const double dt = 1.0 / spec.fps;
  const auto n_frames = static_cast<std::int64_t>(std::llround(spec.duration * spec.fps));

  std::vector<LaneInfo> lanes;
  for (int l = 0; l < 2; ++l) {
    Path p = l == 0 ? lane_a() : lane_b();
    const Area a = l == 0 ? Area::A3_1 : Area::A3_2;
    const double se = p.crossing(map.vehicle_line(a, 0));
    const double sl = p.crossing(map.vehicle_line(a, 1));
    lanes.push_back({std::move(p), a, se, sl});
  }

  // pedestrians: attributes are drawn up front so they never depend on traffic
  std::mt19937_64 ped_rng(substream(spec.seed, 10));
  std::mt19937_64 jitter_rng(substream(spec.seed, 11));
  std::mt19937_64 veh_rng(substream(spec.seed, 20));
  std::mt19937_64 noise_rng(substream(spec.seed, 30));

  std::vector<Ped> peds;
  const double spawn_end = std::max(0.0, spec.duration - 30.0);
  const auto add_peds = [&](AgentCategory c, int count, double crossing) {
    for (int i = 0; i < count; ++i) {
      Ped p;
      p.category = c;
      p.direction = uniform(ped_rng, 0.0, 1.0) < 0.5 ? Direction::LeftToRight : Direction::RightToLeft;
      p.spawn_time = uniform(ped_rng, 0.0, spawn_end);
      p.x = p.direction == Direction::LeftToRight ? -7.5 : 14.5;
      p.y = uniform(ped_rng, 0.6, 3.4);
      p.v0 = 7.0 / crossing * std::exp(spec.speed_spread * gaussian(ped_rng));
      p.v = p.v0;
      p.awareness = uniform(ped_rng, 0.0, 1.0) < spec.notice_probability ? Awareness::Noticed : Awareness::DidNotNotice;
      p.planned = uniform(ped_rng, 0.0, 1.0) < spec.accelerate_share ? Reaction::Accelerate : Reaction::Decelerate;
      peds.push_back(p);
    }
  };
  add_peds(AgentCategory::Adult, spec.adults, spec.adult_crossing);
  add_peds(AgentCategory::Kid, spec.kids, spec.kid_crossing);
  add_peds(AgentCategory::Cyclist, spec.cyclists, spec.cyclist_crossing);
  std::stable_sort(peds.begin(), peds.end(), [](const Ped & a, const Ped & b) { return a.spawn_time < b.spawn_time; });
  for (std::size_t i = 0; i < peds.size(); ++i) {
    peds[i].id = make_id('p', static_cast<int>(i + 1));
  }

  std::vector<Veh> vehs;
  std::array<double, 2> next_arrival{};
  const auto draw_gap = [&]() { return std::exponential_distribution<double>(spec.vehicle_rate)(veh_rng); };
  for (auto & a : next_arrival) {
    a = spec.vehicle_rate > 0 ? draw_gap() : std::numeric_limits<double>::infinity();
  }
  const double veh_spawn_end = std::max(0.0, spec.duration - 15.0);

  struct Slot
  {
    bool is_ped;
    std::size_t index;
  };
  std::vector<Slot> active;
  std::vector<stream::Observation> clean;
  std::size_t next_ped = 0;

  // vehicle is a threat to a pedestrian waiting at or crossing `area`
  const auto vehicle_threat = [&](Area area) {
    for (const auto & v : vehs) {
      if (!v.alive || lanes[v.lane].area != area) {
        continue;
      }
      const double to_enter = lanes[v.lane].s_enter - v.s;
      const double to_leave = lanes[v.lane].s_leave - v.s;
      if (to_leave <= 0) {
        continue;
      }
      if (to_enter <= 0 || to_enter / std::max(v.v, 0.1) <= 4.0) {
        return true;
      }
    }
    return false;
  };

  // pedestrian expected inside `area` during [t_in, t_out] seconds from now
  const auto pedestrian_conflict = [&](Area area, double t_in, double t_out) {
    const auto [xa, xb] = area_x(area);
    for (const auto & p : peds) {
      if (!p.alive) {
        continue;
      }
      const double near_edge = p.direction == Direction::LeftToRight ? xa : xb;
      const double far_edge = p.direction == Direction::LeftToRight ? xb : xa;
      const double d_in = p.ahead(near_edge);
      const double d_out = p.ahead(far_edge);
      if (d_out <= 0) {
        continue;
      }
      if (d_in <= 0) {
        return true;
      }
      if (p.v < 0.05) {
        continue;
      }
      const double pe = d_in / p.v;
      const double pl = d_out / p.v;
      if (pe <= t_out + 0.5 && pl >= t_in - 0.5) {
        return true;
      }
    }
    return false;
  };

  for (std::int64_t f = 0; f < n_frames; ++f) {
    const double t = static_cast<double>(f) * dt;

    while (next_ped < peds.size() && peds[next_ped].spawn_time <= t) {
      peds[next_ped].alive = true;
      active.push_back({true, next_ped});
      ++next_ped;
    }
    for (int l = 0; l < 2; ++l) {
      if (next_arrival[l] > t || t > veh_spawn_end) {
        continue;
      }
      bool clear = true;
      for (const auto & v : vehs) {
        clear &= !(v.alive && v.lane == l && v.s < 12.0);
      }
      if (!clear) {
        continue;
      }
      Veh v;
      v.id = make_id('v', static_cast<int>(vehs.size() + 1));
      v.category = l == 0 ? AgentCategory::VehicleArea41 : AgentCategory::VehicleArea42;
      v.lane = l;
      v.cruise = spec.vehicle_speed * std::exp(spec.vehicle_speed_spread * gaussian(veh_rng));
      v.v = v.cruise;
      v.yields = uniform(veh_rng, 0.0, 1.0) < spec.yield_probability;
      vehs.push_back(v);
      active.push_back({false, vehs.size() - 1});
      next_arrival[l] += draw_gap();
    }

    for (const auto & slot : active) {
      stream::Observation obs;
      obs.frame = f;
      obs.t = t;
      if (slot.is_ped) {
        const auto & p = peds[slot.index];
        obs.agent_id = p.id;
        obs.category = p.category;
        obs.position = {p.x, p.y};
      } else {
        const auto & v = vehs[slot.index];
        obs.agent_id = v.id;
        obs.category = v.category;
        obs.position = lanes[v.lane].path.at(v.s);
      }
      clean.push_back(obs);
    }

    // vehicles react to the pedestrian state of this frame
    for (auto & v : vehs) {
      if (!v.alive) {
        continue;
      }
      const auto & lane = lanes[v.lane];
      const double to_enter = lane.s_enter - v.s;
      double target = v.cruise;
      if (v.yields && to_enter > 0 && to_enter <= 4.0 * v.cruise) {
        const double t_in = to_enter / v.cruise;
        const double t_out = (lane.s_leave - v.s) / v.cruise;
        if (pedestrian_conflict(lane.area, t_in, t_out)) {
          target = std::min(target, std::sqrt(6.0 * std::max(to_enter - 1.5, 0.0)));
        }
      }
      for (const auto & o : vehs) {
        if (&o == &v || !o.alive || o.lane != v.lane || o.s <= v.s) {
          continue;
        }
        const double gap = o.s - v.s - 7.0;
        target = std::min(target, std::sqrt(8.0 * std::max(gap - 3.0, 0.0)));
      }
      v.v = target > v.v ? std::min(target, v.v + 2.0 * dt) : std::max(target, v.v - 6.0 * dt);
      v.v = std::max(v.v, 0.0);
    }
    for (auto & v : vehs) {
      if (v.alive) {
        v.s += v.v * dt;
        v.alive = v.s < lanes[v.lane].path.length();
      }
    }

    for (auto & p : peds) {
      if (!p.alive) {
        continue;
      }
      const double x_q0 = p.direction == Direction::LeftToRight ? 0.0 : 7.0;
      const double x_q2 = p.direction == Direction::LeftToRight ? 7.0 : 0.0;
      const auto [closer, further] = stream::closer_further_assignment(p.direction);
      if (p.awareness == Awareness::Noticed && p.realized == Reaction::None && p.mode == Ped::Mode::Cruise) {
        const bool before_closer = p.ahead(x_q0) > 0;
        const double entry = before_closer ? x_q0 : 3.5;
        const Area next = before_closer ? closer : further;
        const double d = p.ahead(entry);
        if (d > 0 && d <= 3.0 && vehicle_threat(next)) {
          p.realized = p.planned;
          p.threat_area = next;
          if (p.planned == Reaction::Decelerate) {
            p.mode = Ped::Mode::Stopping;
            p.stop_line = entry - sign_of(p.direction) * 0.3;
          } else {
            p.mode = Ped::Mode::Boost;
          }
        }
      }
      double target = p.v0;
      switch (p.mode) {
        case Ped::Mode::Cruise: break;
        case Ped::Mode::Boost:
          target = 1.5 * p.v0;
          if (p.ahead(x_q2) <= 0) {
            p.mode = Ped::Mode::Cruise;
            target = p.v0;
          }
          break;
        case Ped::Mode::Stopping:
        case Ped::Mode::Waiting:
          if (!vehicle_threat(p.threat_area)) {
            p.mode = Ped::Mode::Cruise;
            break;
          }
          target = std::min(p.v0, std::sqrt(3.0 * std::max(p.ahead(p.stop_line), 0.0)));
          if (target < 0.05) {
            p.mode = Ped::Mode::Waiting;
            target = 0.0;
          }
          break;
      }
      const double up = p.category == AgentCategory::Cyclist ? 2.0 : 1.5;
      p.v = target > p.v ? std::min(target, p.v + up * dt) : std::max(target, p.v - 3.0 * dt);
      p.x += sign_of(p.direction) * p.v * dt;
      if (p.category == AgentCategory::Kid && spec.kid_jitter > 0) {
        const bool in_further = p.ahead(3.5) <= 0 && p.ahead(x_q2) > 0;
        const double sigma = spec.kid_jitter * (in_further ? 2.0 : 1.0);
        p.vy += -p.vy * dt + sigma * std::sqrt(dt) * gaussian(jitter_rng);
        p.y += p.vy * dt;
        if (p.y < 0.2 || p.y > 3.8) {
          p.y = std::clamp(p.y, 0.2, 3.8);
          p.vy = 0.0;
        }
      }
      const double x_end = p.direction == Direction::LeftToRight ? 15.5 : -8.5;
      if (p.ahead(x_end) <= 0) {
        p.alive = false;
        p.done = true;
      }
    }

    std::erase_if(active, [&](const Slot & s) { return s.is_ped ? !peds[s.index].alive : !vehs[s.index].alive; });
  }

  Scenario out;
  const auto trajectories = split_trajectories(clean);
  std::vector<predictors::Trajectory> vehicle_trajs;
  std::map<std::string, const predictors::Trajectory *> by_id;
  for (const auto & tr : trajectories) {
    by_id[tr.agent_id] = &tr;
    if (is_vehicle(tr.category)) {
      vehicle_trajs.push_back(tr);
    }
  }

  // agents in first-appearance order
  for (const auto & tr : trajectories) {
    AgentTruth truth;
    truth.id = tr.agent_id;
    truth.category = tr.category;
    truth.spawn_time = tr.points.front().t;
    if (is_pedestrian(tr.category)) {
      const auto it = std::find_if(peds.begin(), peds.end(), [&](const Ped & p) { return p.id == tr.agent_id; });
      truth.direction = it->direction;
      truth.nominal_speed = it->v0;
      truth.awareness = it->awareness;
      truth.reaction = it->realized;
      for (int q = 0; q < 3; ++q) {
        if (auto c = predictors::first_crossing_time(tr.points, map.pedestrian_line(it->direction, q))) {
          truth.crossing_times[q] = *c;
        }
      }
      truth.risk = label_risk(tr, it->direction, vehicle_trajs, map);
    } else {
      const auto it = std::find_if(vehs.begin(), vehs.end(), [&](const Veh & v) { return v.id == tr.agent_id; });
      truth.nominal_speed = it->cruise;
      const Area area = stream::served_conflict_area(tr.category);
      for (int q = 0; q < 2; ++q) {
        if (auto c = predictors::first_crossing_time(tr.points, map.vehicle_line(area, q))) {
          truth.crossing_times[q] = *c;
        }
      }
    }
    out.truth.agents.push_back(std::move(truth));
  }

  out.observations = std::move(clean);
  if (spec.position_noise > 0) {
    for (auto & o : out.observations) {
      o.position.x += spec.position_noise * gaussian(noise_rng);
      o.position.y += spec.position_noise * gaussian(noise_rng);
    }
  }
  return out;
}

std::vector<predictors::Trajectory> generate_decelerating(const DeceleratingSpec & spec)
{
  if (!(spec.speed_min > 0) || spec.speed_max < spec.speed_min || !(spec.tau > 0) || spec.count < 0) {
    fail(Errc::InfeasibleSpec, "invalid decelerating-pedestrian spec");
  }
  std::mt19937_64 rng(substream(spec.seed, 40));
  const double dt = 1.0 / 30.0;
  std::vector<predictors::Trajectory> out;
  for (int i = 0; i < spec.count; ++i) {
    predictors::Trajectory tr;
    tr.agent_id = make_id('d', i + 1);
    tr.category = AgentCategory::Adult;
    const double v0 = uniform(rng, spec.speed_min, spec.speed_max);
    const double onset = spec.onset_x + uniform(rng, -spec.onset_jitter, spec.onset_jitter);
    double x = -7.5 + uniform(rng, 0.0, 1.0);
    const double y = uniform(rng, 1.0, 3.0);
    std::optional<double> t_onset;
    for (std::int64_t f = 0; f < 3000 && x <= 15.5; ++f) {
      const double t = static_cast<double>(f) * dt;
      tr.points.push_back({f, t, tr.agent_id, tr.category, {x, y}});
      if (!t_onset && x >= onset) {
        t_onset = t;
      }
      double v = v0;
      if (t_onset) {
        v = v0 * (spec.floor + (1.0 - spec.floor) * std::exp(-(t - *t_onset) / spec.tau));
      }
      x += v * dt;
    }
    out.push_back(std::move(tr));
  }
  return out;
}

PlantedSet generate_planted(const PlantedSpec & spec)
{
  if (spec.episodes < 1 || spec.min_frames < 1 || spec.max_frames < spec.min_frames ||
      spec.max_frames < spec.counter_limit + 6 || spec.interval.alpha > spec.interval.beta) {
    fail(Errc::InfeasibleSpec, "invalid planted-rule spec");
  }
  std::mt19937_64 rng(substream(spec.seed, 50));
  const double lo = -4.5;
  const double hi = 3.5;
  PlantedSet out;
  for (int e = 0; e < spec.episodes; ++e) {
    risk::EpisodeTrace ep;
    ep.ped_id = make_id('e', e + 1);
    ep.category = AgentCategory::Adult;
    const int n = std::uniform_int_distribution<int>(spec.min_frames, spec.max_frames)(rng);
    const bool risky = uniform(rng, 0.0, 1.0) < 0.5;
    const int inside = risky ? std::uniform_int_distribution<int>(spec.counter_limit + 1, spec.counter_limit + 5)(rng)
                             : std::uniform_int_distribution<int>(0, spec.counter_limit)(rng);
    std::vector<double> values;
    for (int k = 0; k < inside; ++k) {
      values.push_back(uniform(rng, spec.interval.alpha, spec.interval.beta));
    }
    while (static_cast<int>(values.size()) < n) {
      const double v = uniform(rng, lo, hi);
      if (!spec.interval.contains(v)) {
        values.push_back(v);
      }
    }
    std::shuffle(values.begin(), values.end(), rng);
    int count = 0;
    for (double v : values) {
      PPetVector p;
      p.c_pf = v;
      ep.frames.push_back(p);
      count += spec.interval.contains(v) ? 1 : 0;
    }
    out.labels[{ep.ped_id, RiskArea::Closer}] = count > spec.counter_limit;
    out.episodes.push_back(std::move(ep));
  }
  return out;
}

}  // namespace ppet::synthgen
