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

#include "ppet/types.hpp"

#include <string>

namespace ppet
{

std::string_view to_string(AgentCategory c)
{
  switch (c) {
    case AgentCategory::Adult: return "adult";
    case AgentCategory::Kid: return "kid";
    case AgentCategory::Cyclist: return "cyclist";
    case AgentCategory::VehicleArea41: return "vehicle_41";
    case AgentCategory::VehicleArea42: return "vehicle_42";
  }
  return "?";
}

std::optional<AgentCategory> parse_category(std::string_view s)
{
  // accepts numeric codes as well as names
  if (s.size() == 1 && s[0] >= '0' && s[0] <= '4') {
    return static_cast<AgentCategory>(s[0] - '0');
  }
  for (int i = 0; i <= 4; ++i) {
    const auto c = static_cast<AgentCategory>(i);
    if (to_string(c) == s) {
      return c;
    }
  }
  return std::nullopt;
}

std::string_view to_string(RiskArea a)
{
  switch (a) {
    case RiskArea::Closer: return "closer";
    case RiskArea::Further: return "further";
    case RiskArea::Merged: return "merged";
  }
  return "?";
}

}  // namespace ppet
