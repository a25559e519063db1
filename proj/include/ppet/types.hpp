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

#ifndef PPET__TYPES_HPP_
#define PPET__TYPES_HPP_

#include <array>
#include <optional>
#include <string_view>

namespace ppet
{

enum class AgentCategory { Adult = 0, Kid = 1, Cyclist = 2, VehicleArea41 = 3, VehicleArea42 = 4 };

inline constexpr std::array<AgentCategory, 3> kPedestrianCategories{
  AgentCategory::Adult, AgentCategory::Kid, AgentCategory::Cyclist};
inline constexpr std::array<AgentCategory, 2> kVehicleCategories{
  AgentCategory::VehicleArea41, AgentCategory::VehicleArea42};

constexpr bool is_pedestrian(AgentCategory c) { return static_cast<int>(c) <= 2; }
constexpr bool is_vehicle(AgentCategory c) { return !is_pedestrian(c); }
constexpr int code(AgentCategory c) { return static_cast<int>(c); }

std::string_view to_string(AgentCategory c);
std::optional<AgentCategory> parse_category(std::string_view s);
/// Number of target locations q for the category: 3 for pedestrians, 2 for vehicles.
constexpr int target_count(AgentCategory c) { return is_pedestrian(c) ? 3 : 2; }

/// Counter slot of a pedestrian: the two conflict areas relative to the crossing direction, or
/// the single pooled counter used in merged-area mode.
enum class RiskArea { Closer = 0, Further = 1, Merged = 2 };

std::string_view to_string(RiskArea a);

/// Conflict ordering: pedestrian first or vehicle first.
enum class Scenario { PedestrianFirst = 0, VehicleFirst = 1 };

enum class Awareness { DidNotNotice = 0, Noticed = 1 };
enum class Reaction { None = 0, Decelerate = 1, Accelerate = 2 };
enum class RiskLevel { Risk0 = 0, Risk1 = 1, Risk2 = 2 };

}  // namespace ppet

#endif  // PPET__TYPES_HPP_
