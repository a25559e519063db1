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

#ifndef PPET__PPET_HPP_
#define PPET__PPET_HPP_

#include <optional>

namespace ppet
{

/// Predicted arrival times (seconds from now). Absent fields are unavailable.
struct ArrivalEstimateSet
{
  std::optional<double> ped_q0;  ///< pedestrian enters the closer conflict area
  std::optional<double> ped_q1;  ///< pedestrian crosses the center line
  std::optional<double> ped_q2;  ///< pedestrian leaves the further conflict area
  std::optional<double> veh_closer_enter;
  std::optional<double> veh_closer_leave;
  std::optional<double> veh_further_enter;
  std::optional<double> veh_further_leave;
};

/// The four per-pedestrian P-PET values (seconds, signed).
struct PPetVector
{
  std::optional<double> c_pf;
  std::optional<double> c_vf;
  std::optional<double> f_pf;
  std::optional<double> f_vf;

  friend bool operator==(const PPetVector &, const PPetVector &) = default;
};

struct PetPair
{
  double pedestrian_first;
  double vehicle_first;
};

/// Classical post-encroachment time from observed event times:
///   PF = T_V,enter - T_P,leave ; VF = T_P,enter - T_V,leave
PetPair pet(double t_p_enter, double t_p_leave, double t_v_enter, double t_v_leave);

/// c_pf = veh_closer_enter - ped_q1   c_vf = ped_q0 - veh_closer_leave
/// f_pf = veh_further_enter - ped_q2  f_vf = ped_q1 - veh_further_leave
PPetVector compute_ppet(const ArrivalEstimateSet & est);

}  // namespace ppet

#endif  // PPET__PPET_HPP_
