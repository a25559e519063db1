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

#include "ppet/errors.hpp"

namespace ppet
{

std::string_view to_string(Errc code)
{
  switch (code) {
    case Errc::DegenerateAnchors: return "DegenerateAnchors";
    case Errc::OutsideCalibratedRegion: return "OutsideCalibratedRegion";
    case Errc::ProjectiveSingularity: return "ProjectiveSingularity";
    case Errc::InvalidAreaMap: return "InvalidAreaMap";
    case Errc::OutOfOrderFrame: return "OutOfOrderFrame";
    case Errc::DuplicateAgentInFrame: return "DuplicateAgentInFrame";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::UnknownDirection: return "UnknownDirection";
    case Errc::ZeroDisplacement: return "ZeroDisplacement";
    case Errc::NonPositiveVelocity: return "NonPositiveVelocity";
    case Errc::NoApproach: return "NoApproach";
    case Errc::NonFiniteParameters: return "NonFiniteParameters";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::DatasetTooSmall: return "DatasetTooSmall";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::NeverReachesTarget: return "NeverReachesTarget";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::MissingPredictor: return "MissingPredictor";
    case Errc::MissingThreshold: return "MissingThreshold";
    case Errc::UndefinedMetric: return "UndefinedMetric";
    case Errc::TooFewEpisodes: return "TooFewEpisodes";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::InfeasibleSpec: return "InfeasibleSpec";
    case Errc::ParseError: return "ParseError";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string & what)
: std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

void fail(Errc code, const std::string & what) { throw Error(code, what); }

}  // namespace ppet
