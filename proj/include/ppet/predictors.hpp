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

#ifndef PPET__PREDICTORS_HPP_
#define PPET__PREDICTORS_HPP_

#include "ppet/geometry.hpp"
#include "ppet/recurrent.hpp"
#include "ppet/stream.hpp"
#include "ppet/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ppet::predictors
{

using geometry::TargetLine;
using geometry::WorldPoint;
using stream::SlidingWindow;

inline constexpr double kMaxArrivalSeconds = 60.0;

struct ArrivalPrediction
{
  double seconds{0.0};
  std::string produced_by;
};

// ---------------------------------------------------------------------------------------------
// Historical Average: constant-velocity extrapolation along the window's net heading.
// ---------------------------------------------------------------------------------------------

struct HaDirection
{
  WorldPoint d;
  double norm{0.0};
  double theta{0.0};
};

/// D = end - start. Throws Errc::ZeroDisplacement when |D| < 1e-9 m.
HaDirection ha_direction(const SlidingWindow & window);

/// Mean of the forward-difference velocities projected on D/|D|.
/// Throws Errc::NonPositiveVelocity when the result is <= 1e-6 m/s.
double ha_avg_velocity(const SlidingWindow & window, const HaDirection & dir);

/// d / (V_avg cos(theta - phi)) with phi the angle of the line's inward normal, clamped to
/// [0, 60] s. Throws Errc::NoApproach when the window end is past the line or the approach
/// speed is <= 1e-6 m/s.
ArrivalPrediction ha_arrival_time(const SlidingWindow & window, const TargetLine & target);

/// Non-throwing form used on the per-frame path; nullopt wherever ha_arrival_time throws.
std::optional<double> try_ha_arrival_time(const SlidingWindow & window, const TargetLine & target);

// ---------------------------------------------------------------------------------------------
// Labeled dataset
// ---------------------------------------------------------------------------------------------

struct Annotation
{
  Awareness awareness{Awareness::DidNotNotice};
  Reaction reaction{Reaction::None};
  RiskLevel risk_level{RiskLevel::Risk0};
};

struct LabeledSample
{
  std::string agent_id;
  AgentCategory category{AgentCategory::Adult};
  int q{0};
  TargetLine line;
  SlidingWindow window;
  double arrival_time{0.0};
  Annotation annotation;
};

struct Trajectory
{
  std::string agent_id;
  AgentCategory category{AgentCategory::Adult};
  std::vector<stream::Observation> points;
};

/// First time the trajectory crosses the line (positive -> non-positive signed distance), with
/// sub-frame linear interpolation. nullopt if it never does or starts past the line.
std::optional<double> first_crossing_time(
  const std::vector<stream::Observation> & points, const TargetLine & line);

/// Splits a trajectory at gaps longer than the repairable limit and linearly fills short gaps.
std::vector<std::vector<stream::Observation>> repair_gaps(const std::vector<stream::Observation> & points);

struct DatasetBuildResult
{
  std::vector<LabeledSample> samples;
  /// (agent_id, q) pairs whose trajectory never reaches the target.
  std::vector<std::pair<std::string, int>> skipped;
};

/// Emits one sample per window ending strictly before the target crossing. `targets` restricts
/// the q indices built (empty = every q of the agent's kind); `stride` keeps every n-th window.
DatasetBuildResult build_labeled_dataset(
  const std::vector<Trajectory> & trajectories, const geometry::AreaMap & map,
  const std::vector<int> & targets = {},
  const std::map<std::string, Annotation> & annotations = {},
  std::size_t window_size = stream::kWindowSize, std::size_t stride = 1);

// ---------------------------------------------------------------------------------------------
// Training and selection
// ---------------------------------------------------------------------------------------------

struct TrainingConfig
{
  std::uint64_t seed{7};
  int hidden_size{32};
  double learning_rate{0.01};
  int epochs{60};
  int patience{10};
  int batch_size{32};
};

struct TrainResult
{
  RecurrentRegressor model;
  double validation_mae{0.0};
  int best_epoch{0};
  std::size_t train_size{0};
  std::size_t validation_size{0};
};

/// Keeps DidNotNotice samples only, splits 8:2 by seeded shuffle, trains with Adam on the MAE
/// loss and returns the best-validation-epoch weights.
/// Throws Errc::DatasetTooSmall (< 50 samples) and Errc::DivergedLoss.
TrainResult train(const std::vector<LabeledSample> & dataset, const TrainingConfig & config);

/// Deterministic 8:2 split used by train(); returns (train indices, validation indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
  std::size_t n, std::uint64_t seed, double train_fraction = 0.8);

double mean_absolute_error(const std::vector<double> & predicted, const std::vector<double> & truth);

struct Candidate
{
  std::string name;
  double validation_mae{0.0};
};

/// argmin validation MAE; ties go to the earliest candidate. Throws Errc::EmptyCandidates.
std::size_t select_model(const std::vector<Candidate> & candidates);

// ---------------------------------------------------------------------------------------------
// Per-(category, q) predictors
// ---------------------------------------------------------------------------------------------

class Predictor
{
public:
  enum class Kind { HistoricalAverage, Recurrent };

  static Predictor historical_average(double validation_mae = 0.0);
  static Predictor recurrent(RecurrentRegressor model, double validation_mae = 0.0);

  Kind kind() const { return kind_; }
  std::string name() const;
  double validation_mae() const { return validation_mae_; }
  const RecurrentRegressor & model() const { return *model_; }

  /// nullopt when the predictor cannot produce an estimate (HA failure modes).
  std::optional<double> predict(const SlidingWindow & window, const TargetLine & target) const;

private:
  Kind kind_{Kind::HistoricalAverage};
  std::optional<RecurrentRegressor> model_;
  double validation_mae_{0.0};
};

using PredictorKey = std::pair<AgentCategory, int>;

struct ModelBundle
{
  static constexpr int kVersion = 1;

  std::map<PredictorKey, Predictor> predictors;
  double split_ratio{0.8};

  /// Throws Errc::MissingPredictor naming (i, q).
  const Predictor & at(AgentCategory category, int q) const;
  /// Throws Errc::MissingPredictor for the first absent pair among every category and q.
  void require_complete() const;

  /// HA for every (category, q).
  static ModelBundle historical_average_only();
};

struct SelectionReport
{
  AgentCategory category;
  int q;
  std::vector<Candidate> candidates;
  std::string chosen;
};

/// Trains GRU(16) and GRU(32), evaluates HA on the same validation split, and selects per
/// (category, q) by validation MAE. Pairs with too little data fall back to HA.
ModelBundle train_bundle(
  const std::vector<LabeledSample> & dataset, const TrainingConfig & config,
  std::vector<SelectionReport> * report = nullptr);

}  // namespace ppet::predictors

#endif  // PPET__PREDICTORS_HPP_
