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

#ifndef PPET__ERRORS_HPP_
#define PPET__ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppet
{

enum class Errc {
  // geometry
  DegenerateAnchors,
  OutsideCalibratedRegion,
  ProjectiveSingularity,
  InvalidAreaMap,
  // stream
  OutOfOrderFrame,
  DuplicateAgentInFrame,
  InsufficientHistory,
  UnknownDirection,
  // predictors
  ZeroDisplacement,
  NonPositiveVelocity,
  NoApproach,
  NonFiniteParameters,
  NonFiniteGradient,
  DatasetTooSmall,
  DivergedLoss,
  NeverReachesTarget,
  EmptyCandidates,
  MissingPredictor,
  // risk / calibration
  MissingThreshold,
  UndefinedMetric,
  TooFewEpisodes,
  EmptyGrid,
  // synthgen
  InfeasibleSpec,
  // io / cli
  ParseError,
  BudgetExceeded,
  InvalidArgument,
};

std::string_view to_string(Errc code);

/// Library-wide exception. Every failure the library signals carries one of the codes above.
class Error : public std::runtime_error
{
public:
  Error(Errc code, const std::string & what);

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string & what);

}  // namespace ppet

#endif  // PPET__ERRORS_HPP_
