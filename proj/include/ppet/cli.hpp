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

#ifndef PPET__CLI_HPP_
#define PPET__CLI_HPP_

#include <string>
#include <vector>

namespace ppet::cli
{

enum ExitCode : int { kOk = 0, kInputError = 2, kBudgetViolation = 3, kInternalError = 4 };

/// Entry point of the `ppet` tool. Never throws; failures map to exit codes.
int run(int argc, const char * const * argv);
int run(const std::vector<std::string> & args);

struct StageStats
{
  double mean_ms{0.0};
  double std_ms{0.0};
};

/// Per-frame latency of the replayed stream.
struct LatencyReport
{
  std::size_t frames{0};
  double mean_active_agents{0.0};
  std::size_t max_active_agents{0};
  StageStats transform;
  StageStats prediction;
  StageStats ppet_risk;
  /// prediction + P-PET + risk
  StageStats safety_evaluation;
  StageStats total;
};

}  // namespace ppet::cli

#endif  // PPET__CLI_HPP_
