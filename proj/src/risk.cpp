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

#include "ppet/risk.hpp"

#include "ppet/errors.hpp"

#include <limits>

namespace ppet::risk
{

namespace
{

AreaThresholds rule(double pf_a, double pf_b, double vf_a, double vf_b, int counter)
{
  return {ScenarioRule{true, {pf_a, pf_b}}, ScenarioRule{true, {vf_a, vf_b}}, counter};
}

struct SlotComponents
{
  std::array<std::optional<double>, 2> pf;
  std::array<std::optional<double>, 2> vf;
};

SlotComponents components_of(RiskArea slot, const PPetVector & v)
{
  switch (slot) {
    case RiskArea::Closer: return {{v.c_pf, std::nullopt}, {v.c_vf, std::nullopt}};
    case RiskArea::Further: return {{v.f_pf, std::nullopt}, {v.f_vf, std::nullopt}};
    case RiskArea::Merged: return {{v.c_pf, v.f_pf}, {v.c_vf, v.f_vf}};
  }
  return {};
}

bool in_range(const AreaThresholds & th, const SlotComponents & comp, const char * where)
{
  if (!th.pf || !th.vf) {
    fail(Errc::MissingThreshold, std::string("scenario interval missing for ") + where);
  }
  for (const auto & v : comp.pf) {
    if (v && th.pf->matches(*v)) {
      return true;
    }
  }
  for (const auto & v : comp.vf) {
    if (v && th.vf->matches(*v)) {
      return true;
    }
  }
  return false;
}

}  // namespace

RiskThresholdConfig RiskThresholdConfig::defaults()
{
  RiskThresholdConfig cfg;
  cfg.categories[AgentCategory::Adult] = {
    ThresholdMode::PerArea,
    {{RiskArea::Closer, rule(-0.7, 0.1, 0.1, 1.1, 3)},
     {RiskArea::Further, rule(-2.5, -1.5, 0.9, 2.4, 3)}}};
  cfg.categories[AgentCategory::Cyclist] = {
    ThresholdMode::PerArea,
    {{RiskArea::Closer, rule(-3.0, -2.6, 1.4, 2.0, 5)},
     {RiskArea::Further, rule(-0.6, 0.2, 0.6, 1.6, 3)}}};
  cfg.categories[AgentCategory::Kid] = {
    ThresholdMode::MergedArea, {{RiskArea::Merged, rule(-3.3, -3.1, 1.0, 1.5, 3)}}};
  return cfg;
}

const CategoryThresholds & RiskThresholdConfig::category(AgentCategory c) const
{
  auto it = categories.find(c);
  if (it == categories.end()) {
    fail(Errc::MissingThreshold, "no thresholds for category " + std::string(to_string(c)));
  }
  return it->second;
}

const AreaThresholds & RiskThresholdConfig::area(AgentCategory c, RiskArea a) const
{
  const auto & cat = category(c);
  auto it = cat.areas.find(a);
  if (it == cat.areas.end()) {
    fail(
      Errc::MissingThreshold,
      "no " + std::string(to_string(a)) + " thresholds for category " + std::string(to_string(c)));
  }
  return it->second;
}

std::vector<RiskArea> RiskThresholdConfig::slots(AgentCategory c) const
{
  if (category(c).mode == ThresholdMode::MergedArea) {
    return {RiskArea::Merged};
  }
  return {RiskArea::Closer, RiskArea::Further};
}

void RiskThresholdConfig::validate() const
{
  for (const auto & [cat, th] : categories) {
    for (const auto & [area, at] : th.areas) {
      for (const auto & r : {at.pf, at.vf}) {
        if (r && r->enabled && !(r->interval.alpha <= r->interval.beta)) {
          fail(Errc::InvalidArgument, "threshold interval with alpha > beta");
        }
      }
      if (at.counter_limit < 1) {
        fail(Errc::InvalidArgument, "counter limit must be >= 1");
      }
    }
  }
}

std::vector<StepDecision> step_evaluate(
  stream::PedestrianState & ped, const PPetVector & ppet, AgentCategory category,
  const RiskThresholdConfig & config)
{
  std::vector<StepDecision> out;
  const auto slots = config.slots(category);
  const bool gated = ped.status != stream::PedestrianStatus::Target ||
                     (ped.current_area && geometry::area_group(*ped.current_area) == 1);
  for (RiskArea slot : slots) {
    const AreaThresholds & th = config.area(category, slot);
    StepDecision decision{StepDecision::Kind::NoChange, slot};
    if (!gated) {
      const auto idx = static_cast<std::size_t>(slot);
      if (in_range(th, components_of(slot, ppet), "step evaluation")) {
        ++ped.risk_counters[idx];
        decision.kind = StepDecision::Kind::CounterIncremented;
      }
      if (!ped.flagged_risk2[idx] && ped.risk_counters[idx] > th.counter_limit) {
        ped.flagged_risk2[idx] = true;
        decision.kind = StepDecision::Kind::Risk2Flagged;
      }
    }
    out.push_back(decision);
  }
  return out;
}

std::map<RiskArea, RiskLevel> classify_offline(const EpisodeTrace & episode, const RiskThresholdConfig & config)
{
  std::map<RiskArea, RiskLevel> out;
  for (RiskArea slot : config.slots(episode.category)) {
    const AreaThresholds & th = config.area(episode.category, slot);
    long hits = 0;
    for (const auto & frame : episode.frames) {
      hits += in_range(th, components_of(slot, frame), "offline classification") ? 1 : 0;
    }
    out[slot] = hits > th.counter_limit ? RiskLevel::Risk2 : RiskLevel::Risk1;
  }
  return out;
}

std::optional<std::size_t> select_conflict_vehicle(
  geometry::WorldPoint ped_position, std::span<const VehicleCandidate> candidates)
{
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d = geometry::distance(ped_position, candidates[i].position);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace ppet::risk
