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

#include "ppet/ppet.hpp"

namespace ppet
{

namespace
{

std::optional<double> diff(const std::optional<double> & a, const std::optional<double> & b)
{
  if (!a || !b) {
    return std::nullopt;
  }
  return *a - *b;
}

}  // namespace

PetPair pet(double t_p_enter, double t_p_leave, double t_v_enter, double t_v_leave)
{
  return {t_v_enter - t_p_leave, t_p_enter - t_v_leave};
}

PPetVector compute_ppet(const ArrivalEstimateSet & est)
{
  PPetVector v;
  v.c_pf = diff(est.veh_closer_enter, est.ped_q1);
  v.c_vf = diff(est.ped_q0, est.veh_closer_leave);
  v.f_pf = diff(est.veh_further_enter, est.ped_q2);
  v.f_vf = diff(est.ped_q1, est.veh_further_leave);
  return v;
}

}  // namespace ppet
