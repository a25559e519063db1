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

#ifndef PPET__IO_HPP_
#define PPET__IO_HPP_

#include "ppet/calibration.hpp"
#include "ppet/engine.hpp"
#include "ppet/geometry.hpp"
#include "ppet/predictors.hpp"
#include "ppet/risk.hpp"
#include "ppet/stream.hpp"
#include "ppet/synthgen.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ppet::io
{

using Json = nlohmann::json;

std::string read_text(const std::filesystem::path & path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path & path, const std::string & text);

/// Throws Errc::ParseError naming the source and the 1-based line of the failure.
Json parse_json(const std::string & text, const std::string & source = "<input>");
Json load_json(const std::filesystem::path & path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

// observation stream -------------------------------------------------------------------------

struct RawStream
{
  /// Positions hold (u, v) when `pixel` is set.
  std::vector<stream::Observation> observations;
  bool pixel{false};
};

RawStream parse_stream_csv_raw(const std::string & text, const std::string & source = "<stream>");

/// Accepts `frame,t,id,category,x,y` or the pixel variant `frame,t,id,category,u,v`; pixel rows
/// are mapped through `tiles`, which is then required.
std::vector<stream::Observation> parse_stream_csv(
  const std::string & text, const geometry::TileGrid * tiles = nullptr, const std::string & source = "<stream>");
std::vector<stream::Observation> load_stream_csv(
  const std::filesystem::path & path, const geometry::TileGrid * tiles = nullptr);
std::string stream_csv(const std::vector<stream::Observation> & observations);

// geometry -----------------------------------------------------------------------------------

geometry::AreaMap area_map_from_json(const Json & j);
Json to_json(const geometry::AreaMap & map);

/// Tiles are always re-solved from their anchors; a stored "matrix" is informational.
std::vector<geometry::HomographyTile> tiles_from_json(const Json & j);
Json to_json(const std::vector<geometry::HomographyTile> & tiles);

// predictors ---------------------------------------------------------------------------------

predictors::TrainingConfig training_config_from_json(const Json & j);
Json to_json(const predictors::TrainingConfig & c);

predictors::ModelBundle model_bundle_from_json(const Json & j);
Json to_json(const predictors::ModelBundle & bundle);

Json to_json(const predictors::LabeledSample & s);
predictors::LabeledSample labeled_sample_from_json(const Json & j);
std::string samples_jsonl(const std::vector<predictors::LabeledSample> & samples);
std::vector<predictors::LabeledSample> parse_samples_jsonl(const std::string & text, const std::string & source = "<samples>");

// risk ---------------------------------------------------------------------------------------

risk::RiskThresholdConfig thresholds_from_json(const Json & j);
Json to_json(const risk::RiskThresholdConfig & config);

Json to_json(const risk::RiskScenario & s);
std::string scenarios_jsonl(const std::vector<risk::RiskScenario> & scenarios);

std::string trace_csv_header();
std::string trace_csv_row(const TraceRow & row);

/// Episode traces with their per-slot Risk-2 labels: the input of threshold tuning.
struct LabeledEpisode
{
  risk::EpisodeTrace trace;
  std::map<RiskArea, bool> labels;
};

std::string episodes_jsonl(const std::vector<LabeledEpisode> & episodes);
std::vector<LabeledEpisode> parse_episodes_jsonl(const std::string & text, const std::string & source = "<episodes>");

// calibration --------------------------------------------------------------------------------

Json to_json(const calibration::Metrics & m);
Json to_json(const calibration::ConfusionCounts & c);
Json to_json(const calibration::GridSpec & g);
calibration::GridSpec grid_spec_from_json(const Json & j);
Json to_json(const risk::AreaThresholds & th);
Json calibration_report(const calibration::CalibrationResult & r, const calibration::GridSpec & g, std::uint64_t seed);
std::string scores_csv(const std::vector<calibration::GridPointScore> & scores);

// synthgen -----------------------------------------------------------------------------------

synthgen::ScenarioSpec scenario_spec_from_json(const Json & j);
Json to_json(const synthgen::ScenarioSpec & s);
Json to_json(const synthgen::GroundTruth & truth);
synthgen::GroundTruth ground_truth_from_json(const Json & j);

}  // namespace ppet::io

#endif  // PPET__IO_HPP_
