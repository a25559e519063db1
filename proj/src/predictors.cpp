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

#include "ppet/predictors.hpp"

#include "ppet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ppet::predictors
{

namespace
{

constexpr double kMinDisplacement = 1e-9;
constexpr double kMinSpeed = 1e-6;

enum class HaStatus { Ok, ZeroDisplacement, NonPositiveVelocity, NoApproach };

struct HaOutcome
{
  HaStatus status{HaStatus::Ok};
  double seconds{0.0};
};

HaDirection direction_of(const SlidingWindow & w)
{
  HaDirection dir;
  dir.d = w.back().position - w.front().position;
  dir.norm = std::sqrt(dir.d.x * dir.d.x + dir.d.y * dir.d.y);
  dir.theta = std::atan2(dir.d.y, dir.d.x);
  return dir;
}

double avg_velocity_of(const SlidingWindow & w, const HaDirection & dir)
{
  const WorldPoint unit{dir.d.x / dir.norm, dir.d.y / dir.norm};
  double sum = 0.0;
  const std::size_t n = w.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = w.points[k + 1].t - w.points[k].t;
    const auto step = w.points[k + 1].position - w.points[k].position;
    sum += geometry::dot(step, unit) / dt;
  }
  return sum / static_cast<double>(n);
}

HaOutcome evaluate_ha(const SlidingWindow & w, const TargetLine & target)
{
  if (w.size() < 2) {
    return {HaStatus::ZeroDisplacement, 0.0};
  }
  const double d = geometry::signed_distance_to_line(w.back().position, target);
  if (d < 0) {
    return {HaStatus::NoApproach, 0.0};
  }
  const auto dir = direction_of(w);
  if (dir.norm < kMinDisplacement) {
    return {HaStatus::ZeroDisplacement, 0.0};
  }
  const double v_avg = avg_velocity_of(w, dir);
  if (v_avg <= kMinSpeed) {
    return {HaStatus::NonPositiveVelocity, 0.0};
  }
  if (d == 0.0) {
    return {HaStatus::Ok, 0.0};
  }
  const double phi = std::atan2(target.normal.y, target.normal.x);
  const double approach = v_avg * std::cos(dir.theta - phi);
  if (approach <= kMinSpeed) {
    return {HaStatus::NoApproach, 0.0};
  }
  return {HaStatus::Ok, std::clamp(d / approach, 0.0, kMaxArrivalSeconds)};
}

}  // namespace

HaDirection ha_direction(const SlidingWindow & window)
{
  if (window.size() < 2) {
    fail(Errc::ZeroDisplacement, "window needs at least two points");
  }
  const auto dir = direction_of(window);
  if (dir.norm < kMinDisplacement) {
    fail(Errc::ZeroDisplacement, "window start and end coincide");
  }
  return dir;
}

double ha_avg_velocity(const SlidingWindow & window, const HaDirection & dir)
{
  if (window.size() < 2 || dir.norm < kMinDisplacement) {
    fail(Errc::ZeroDisplacement, "direction vector is degenerate");
  }
  const double v = avg_velocity_of(window, dir);
  if (v <= kMinSpeed) {
    fail(Errc::NonPositiveVelocity, "agent is not moving along its heading");
  }
  return v;
}

ArrivalPrediction ha_arrival_time(const SlidingWindow & window, const TargetLine & target)
{
  const auto outcome = evaluate_ha(window, target);
  switch (outcome.status) {
    case HaStatus::Ok: return {outcome.seconds, "ha"};
    case HaStatus::ZeroDisplacement: fail(Errc::ZeroDisplacement, "window start and end coincide");
    case HaStatus::NonPositiveVelocity:
      fail(Errc::NonPositiveVelocity, "agent is not moving along its heading");
    case HaStatus::NoApproach: fail(Errc::NoApproach, "agent is not approaching the target line");
  }
  fail(Errc::NoApproach, "unreachable");
}

std::optional<double> try_ha_arrival_time(const SlidingWindow & window, const TargetLine & target)
{
  const auto outcome = evaluate_ha(window, target);
  if (outcome.status != HaStatus::Ok) {
    return std::nullopt;
  }
  return outcome.seconds;
}

// ---------------------------------------------------------------------------------------------

std::optional<double> first_crossing_time(
  const std::vector<stream::Observation> & points, const TargetLine & line)
{
  if (points.empty()) {
    return std::nullopt;
  }
  double prev_s = geometry::signed_distance_to_line(points.front().position, line);
  if (prev_s <= 0) {
    return std::nullopt;
  }
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double s = geometry::signed_distance_to_line(points[k].position, line);
    if (s <= 0) {
      const double frac = prev_s / (prev_s - s);
      return points[k - 1].t + frac * (points[k].t - points[k - 1].t);
    }
    prev_s = s;
  }
  return std::nullopt;
}

std::vector<std::vector<stream::Observation>> repair_gaps(const std::vector<stream::Observation> & points)
{
  std::vector<std::vector<stream::Observation>> segments;
  for (const auto & obs : points) {
    if (segments.empty()) {
      segments.push_back({obs});
      continue;
    }
    auto & seg = segments.back();
    const auto & prev = seg.back();
    const std::int64_t gap = obs.frame - prev.frame - 1;
    if (gap < 0) {
      fail(Errc::OutOfOrderFrame, "trajectory of " + obs.agent_id + " is not in frame order");
    }
    if (gap > stream::kMaxRepairableGap) {
      segments.push_back({obs});
      continue;
    }
    const stream::Observation from = prev;
    for (std::int64_t g = 1; g <= gap; ++g) {
      const double s = static_cast<double>(g) / static_cast<double>(gap + 1);
      stream::Observation fill = obs;
      fill.frame = from.frame + g;
      fill.t = from.t + s * (obs.t - from.t);
      fill.position = from.position + s * (obs.position - from.position);
      seg.push_back(std::move(fill));
    }
    seg.push_back(obs);
  }
  return segments;
}

DatasetBuildResult build_labeled_dataset(
  const std::vector<Trajectory> & trajectories, const geometry::AreaMap & map,
  const std::vector<int> & targets, const std::map<std::string, Annotation> & annotations,
  std::size_t window_size, std::size_t stride)
{
  if (window_size < 2 || stride < 1) {
    fail(Errc::InvalidArgument, "window size must be >= 2 and stride >= 1");
  }
  DatasetBuildResult result;
  for (const auto & traj : trajectories) {
    if (traj.points.empty()) {
      continue;
    }
    const int q_count = target_count(traj.category);
    std::vector<int> qs;
    for (int q = 0; q < q_count; ++q) {
      if (targets.empty() || std::find(targets.begin(), targets.end(), q) != targets.end()) {
        qs.push_back(q);
      }
    }
    geometry::Direction dir = geometry::Direction::Unknown;
    if (is_pedestrian(traj.category)) {
      const double dx = traj.points.back().position.x - traj.points.front().position.x;
      if (dx > stream::kDirectionDeadBand) {
        dir = geometry::Direction::LeftToRight;
      } else if (dx < -stream::kDirectionDeadBand) {
        dir = geometry::Direction::RightToLeft;
      }
    }
    Annotation annotation;
    if (auto it = annotations.find(traj.agent_id); it != annotations.end()) {
      annotation = it->second;
    }
    const auto segments = repair_gaps(traj.points);
    for (int q : qs) {
      if (is_pedestrian(traj.category) && dir == geometry::Direction::Unknown) {
        result.skipped.emplace_back(traj.agent_id, q);
        continue;
      }
      const TargetLine & line = is_pedestrian(traj.category)
                                  ? map.pedestrian_line(dir, q)
                                  : map.vehicle_line(stream::served_conflict_area(traj.category), q);
      bool reached = false;
      for (const auto & seg : segments) {
        const auto crossing = first_crossing_time(seg, line);
        if (!crossing) {
          continue;
        }
        reached = true;
        for (std::size_t end = window_size - 1; end < seg.size(); end += stride) {
          const auto & last = seg[end];
          if (last.t > *crossing || geometry::signed_distance_to_line(last.position, line) < 0) {
            break;
          }
          LabeledSample sample;
          sample.agent_id = traj.agent_id;
          sample.category = traj.category;
          sample.q = q;
          sample.line = line;
          sample.window.points.assign(
            seg.begin() + static_cast<std::ptrdiff_t>(end + 1 - window_size),
            seg.begin() + static_cast<std::ptrdiff_t>(end + 1));
          sample.arrival_time = std::max(0.0, *crossing - last.t);
          sample.annotation = annotation;
          result.samples.push_back(std::move(sample));
        }
      }
      if (!reached) {
        result.skipped.emplace_back(traj.agent_id, q);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
  std::size_t n, std::uint64_t seed, double train_fraction)
{
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return {train, val};
}

double mean_absolute_error(const std::vector<double> & predicted, const std::vector<double> & truth)
{
  if (predicted.size() != truth.size() || predicted.empty()) {
    fail(Errc::InvalidArgument, "MAE needs two equally sized non-empty vectors");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    sum += std::abs(predicted[i] - truth[i]);
  }
  return sum / static_cast<double>(predicted.size());
}

namespace
{

constexpr std::size_t kMinTrainingSamples = 50;

std::vector<const LabeledSample *> unaware(const std::vector<LabeledSample> & dataset)
{
  std::vector<const LabeledSample *> out;
  for (const auto & s : dataset) {
    if (s.annotation.awareness == Awareness::DidNotNotice) {
      out.push_back(&s);
    }
  }
  return out;
}

FeatureSample to_feature_sample(const LabeledSample & s)
{
  return {line_frame_features(s.window, s.line), s.arrival_time};
}

double inverse_softplus(double y)
{
  y = std::max(y, 1e-3);
  return y > 30 ? y : std::log(std::expm1(y));
}

}  // namespace

TrainResult train(const std::vector<LabeledSample> & dataset, const TrainingConfig & config)
{
  const auto pool = unaware(dataset);
  if (pool.size() < kMinTrainingSamples) {
    fail(
      Errc::DatasetTooSmall,
      std::to_string(pool.size()) + " unaware samples, need " + std::to_string(kMinTrainingSamples));
  }
  if (config.batch_size <= 0 || config.epochs < 0 || config.learning_rate <= 0) {
    fail(Errc::InvalidArgument, "invalid training hyperparameters");
  }
  const auto [train_idx, val_idx] = split_indices(pool.size(), config.seed);
  std::vector<FeatureSample> train_set;
  std::vector<FeatureSample> val_set;
  train_set.reserve(train_idx.size());
  for (auto i : train_idx) {
    train_set.push_back(to_feature_sample(*pool[i]));
  }
  for (auto i : val_idx) {
    val_set.push_back(to_feature_sample(*pool[i]));
  }

  RecurrentRegressor model = RecurrentRegressor::random(config.hidden_size, config.seed);
  model.normalization() = Normalization::fit(train_set);
  {
    double mean_label = 0.0;
    for (const auto & s : train_set) {
      mean_label += s.label;
    }
    mean_label /= static_cast<double>(train_set.size());
    model.block_span("b_out")[0] = inverse_softplus(mean_label);
  }

  const double initial_val = model.loss(val_set);
  TrainResult best{model, initial_val, 0, train_set.size(), val_set.size()};

  // Adam
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  auto & params = model.parameters();
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  std::vector<double> grad;
  std::int64_t step = 0;

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<FeatureSample> batch;
  int since_improvement = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(train_set[order[k]]);
      }
      model.loss_and_gradient(batch, grad);
      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < params.size(); ++k) {
        m1[k] = beta1 * m1[k] + (1 - beta1) * grad[k];
        m2[k] = beta2 * m2[k] + (1 - beta2) * grad[k] * grad[k];
        params[k] -= config.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + eps);
      }
    }
    const double val = model.loss(val_set);
    if (!std::isfinite(val) || val > 10.0 * initial_val) {
      fail(Errc::DivergedLoss, "validation MAE diverged at epoch " + std::to_string(epoch));
    }
    if (val < best.validation_mae) {
      best.model = model;
      best.validation_mae = val;
      best.best_epoch = epoch;
      since_improvement = 0;
    } else if (++since_improvement >= config.patience) {
      break;
    }
  }
  return best;
}

std::size_t select_model(const std::vector<Candidate> & candidates)
{
  if (candidates.empty()) {
    fail(Errc::EmptyCandidates, "no candidate predictors");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].validation_mae < candidates[best].validation_mae) {
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------------------------

Predictor Predictor::historical_average(double validation_mae)
{
  Predictor p;
  p.kind_ = Kind::HistoricalAverage;
  p.validation_mae_ = validation_mae;
  return p;
}

Predictor Predictor::recurrent(RecurrentRegressor model, double validation_mae)
{
  model.check_finite();
  Predictor p;
  p.kind_ = Kind::Recurrent;
  p.model_ = std::move(model);
  p.validation_mae_ = validation_mae;
  return p;
}

std::string Predictor::name() const
{
  if (kind_ == Kind::HistoricalAverage) {
    return "ha";
  }
  return "gru" + std::to_string(model_->hidden_size());
}

std::optional<double> Predictor::predict(const SlidingWindow & window, const TargetLine & target) const
{
  if (kind_ == Kind::HistoricalAverage) {
    return try_ha_arrival_time(window, target);
  }
  return model_->predict(window, target);
}

const Predictor & ModelBundle::at(AgentCategory category, int q) const
{
  auto it = predictors.find({category, q});
  if (it == predictors.end()) {
    fail(
      Errc::MissingPredictor, "no predictor for (i=" + std::to_string(code(category)) +
                                ", q=" + std::to_string(q) + ")");
  }
  return it->second;
}

void ModelBundle::require_complete() const
{
  for (int i = 0; i <= 4; ++i) {
    const auto c = static_cast<AgentCategory>(i);
    for (int q = 0; q < target_count(c); ++q) {
      at(c, q);
    }
  }
}

ModelBundle ModelBundle::historical_average_only()
{
  ModelBundle bundle;
  for (int i = 0; i <= 4; ++i) {
    const auto c = static_cast<AgentCategory>(i);
    for (int q = 0; q < target_count(c); ++q) {
      bundle.predictors.emplace(PredictorKey{c, q}, Predictor::historical_average());
    }
  }
  return bundle;
}

ModelBundle train_bundle(
  const std::vector<LabeledSample> & dataset, const TrainingConfig & config,
  std::vector<SelectionReport> * report)
{
  ModelBundle bundle;
  std::map<PredictorKey, std::vector<LabeledSample>> groups;
  for (const auto & s : dataset) {
    groups[{s.category, s.q}].push_back(s);
  }
  for (int i = 0; i <= 4; ++i) {
    const auto c = static_cast<AgentCategory>(i);
    for (int q = 0; q < target_count(c); ++q) {
      const PredictorKey key{c, q};
      auto it = groups.find(key);
      const auto pool = it == groups.end() ? std::vector<const LabeledSample *>{} : unaware(it->second);
      SelectionReport rep{c, q, {}, "ha"};
      if (pool.size() < kMinTrainingSamples) {
        bundle.predictors.emplace(key, Predictor::historical_average(std::nan("")));
        if (report) {
          report->push_back(rep);
        }
        continue;
      }
      // HA scored on the same validation split the recurrent candidates use
      const auto split = split_indices(pool.size(), config.seed);
      double ha_err = 0.0;
      for (auto k : split.second) {
        const auto est = try_ha_arrival_time(pool[k]->window, pool[k]->line);
        ha_err += std::abs(est.value_or(kMaxArrivalSeconds) - pool[k]->arrival_time);
      }
      const double ha_mae = ha_err / static_cast<double>(std::max<std::size_t>(1, split.second.size()));

      std::vector<Candidate> candidates{{"ha", ha_mae}};
      std::vector<Predictor> options{Predictor::historical_average(ha_mae)};
      for (int hidden : {std::max(1, config.hidden_size / 2), config.hidden_size}) {
        TrainingConfig cfg = config;
        cfg.hidden_size = hidden;
        auto trained = train(it->second, cfg);
        candidates.push_back({"gru" + std::to_string(hidden), trained.validation_mae});
        options.push_back(Predictor::recurrent(std::move(trained.model), trained.validation_mae));
      }
      const std::size_t chosen = select_model(candidates);
      rep.candidates = candidates;
      rep.chosen = candidates[chosen].name;
      bundle.predictors.emplace(key, options[chosen]);
      if (report) {
        report->push_back(rep);
      }
    }
  }
  bundle.split_ratio = 0.8;
  return bundle;
}

}  // namespace ppet::predictors
