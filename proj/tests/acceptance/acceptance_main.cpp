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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails or exceeds its time limit.

#include "ppet/calibration.hpp"
#include "ppet/cli.hpp"
#include "ppet/engine.hpp"
#include "ppet/io.hpp"
#include "ppet/ppet.hpp"
#include "ppet/predictors.hpp"
#include "ppet/recurrent.hpp"
#include "ppet/risk.hpp"
#include "ppet/synthgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace ppet;
namespace fs = std::filesystem;
using geometry::WorldPoint;
using io::Json;

struct Outcome
{
  bool pass{false};
  std::string detail;
};

struct Criterion
{
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

class ScratchDir
{
public:
  explicit ScratchDir(const std::string & tag)
  {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("ppet_accept_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~ScratchDir()
  {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir & operator=(const ScratchDir &) = delete;

  std::string str(const std::string & leaf = "") const { return (path_ / leaf).string(); }

private:
  fs::path path_;
};

std::string fmt(double v, int precision = 4)
{
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

/// Runs the CLI with its console output suppressed.
int quiet_cli(const std::vector<std::string> & args)
{
  std::ostringstream sink;
  auto * out = std::cout.rdbuf(sink.rdbuf());
  auto * err = std::cerr.rdbuf(sink.rdbuf());
  const int rc = cli::run(args);
  std::cout.rdbuf(out);
  std::cerr.rdbuf(err);
  if (rc != cli::kOk) {
    std::cerr << "  command failed (" << rc << "):";
    for (const auto & a : args) {
      std::cerr << ' ' << a;
    }
    std::cerr << "\n  " << sink.str() << "\n";
  }
  return rc;
}

constexpr double kDt = 1.0 / 30.0;

// --- 1 --------------------------------------------------------------------------------------

Outcome ha_exactness()
{
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> approach(-M_PI / 3, M_PI / 3);
  std::uniform_real_distribution<double> speed(0.8, 3.0);
  std::uniform_real_distribution<double> dist(0.5, 20.0);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double phi = angle(rng);
    const WorldPoint n{std::cos(phi), std::sin(phi)};
    const WorldPoint tangent{-n.y, n.x};
    const WorldPoint c{coord(rng), coord(rng)};
    const geometry::TargetLine line{c - 100.0 * tangent, c + 100.0 * tangent, n};

    const double d = dist(rng);
    const WorldPoint end = c - d * n + coord(rng) * 0.2 * tangent;
    const double psi = phi + approach(rng);
    const WorldPoint v = speed(rng) * WorldPoint{std::cos(psi), std::sin(psi)};
    const double expected = d / (v.x * n.x + v.y * n.y);

    stream::SlidingWindow w;
    for (int k = 0; k < 30; ++k) {
      const double back = static_cast<double>(29 - k) * kDt;
      w.points.push_back({k, k * kDt, "a", AgentCategory::Adult, end - back * v});
    }
    const double got = predictors::ha_arrival_time(w, line).seconds;
    worst = std::max(worst, std::abs(got - expected) / expected);
  }
  return {worst < 1e-9, "max relative error " + fmt(worst, 3) + " over 1000 windows"};
}

// --- 2 --------------------------------------------------------------------------------------

Outcome gradient_check()
{
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto model = predictors::RecurrentRegressor::random(8, 17);
  model.normalization().mean = {0.5, -0.2, 0.1};
  model.normalization().scale = {2.0, 1.5, 0.8};
  std::vector<predictors::FeatureSample> batch;
  for (int s = 0; s < 3; ++s) {
    predictors::FeatureSample fs;
    for (int k = 0; k < 10; ++k) {
      fs.steps.push_back({u(rng), u(rng), u(rng)});
    }
    // Labels far from the softplus output keep every sample off the |.| kink.
    fs.label = s == 1 ? -1.0 : 40.0;
    batch.push_back(fs);
  }
  std::vector<double> grad;
  model.loss_and_gradient(batch, grad);
  // Near the cube root of machine epsilon: balances truncation against cancellation.
  const double eps = 1e-4;
  double worst = 0.0;
  auto & p = model.parameters();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double saved = p[k];
    p[k] = saved + eps;
    const double up = model.loss(batch);
    p[k] = saved - eps;
    const double down = model.loss(batch);
    p[k] = saved;
    const double fd = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
    worst = std::max(worst, std::abs(fd - grad[k]) / scale);
  }
  return {worst < 1e-4 && grad.size() == p.size(),
          "max relative error " + fmt(worst, 3) + " over " + std::to_string(p.size()) + " parameters"};
}

// --- 3 --------------------------------------------------------------------------------------

std::vector<predictors::LabeledSample> decelerating_samples(std::uint64_t seed, int count, std::size_t stride)
{
  synthgen::DeceleratingSpec spec;
  spec.seed = seed;
  spec.count = count;
  const auto trajectories = synthgen::generate_decelerating(spec);
  return predictors::build_labeled_dataset(
           trajectories, synthgen::reference_area_map(), {2}, {}, stream::kWindowSize, stride)
    .samples;
}

Outcome learned_beats_ha()
{
  const auto train_set = decelerating_samples(3, 200, 4);
  const auto test_set = decelerating_samples(4, 100, 1);

  predictors::TrainingConfig config;
  config.seed = 7;
  config.hidden_size = 16;
  config.epochs = 40;
  config.patience = 8;
  const auto result = predictors::train(train_set, config);

  // Both predictors are scored on the windows where HA yields an estimate.
  std::vector<double> truth, gru, ha;
  std::size_t ha_failures = 0;
  for (const auto & s : test_set) {
    const auto h = predictors::try_ha_arrival_time(s.window, s.line);
    if (!h) {
      ++ha_failures;
      continue;
    }
    truth.push_back(s.arrival_time);
    ha.push_back(*h);
    gru.push_back(result.model.predict(s.window, s.line));
  }
  const double ha_mae = predictors::mean_absolute_error(ha, truth);
  const double gru_mae = predictors::mean_absolute_error(gru, truth);
  return {!truth.empty() && gru_mae <= 0.7 * ha_mae,
          "q=2 test MAE gru " + fmt(gru_mae) + " s vs ha " + fmt(ha_mae) + " s (ratio " + fmt(gru_mae / ha_mae, 3) +
            ", " + std::to_string(train_set.size()) + " train / " + std::to_string(truth.size()) +
            " test windows, " + std::to_string(ha_failures) + " HA failures excluded)"};
}

// --- 4 --------------------------------------------------------------------------------------

Outcome ppet_arithmetic()
{
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> t(0.0, 30.0);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  std::bernoulli_distribution present(0.85);
  const auto maybe = [&]() -> std::optional<double> {
    const double v = t(rng);
    return present(rng) ? std::optional<double>(v) : std::nullopt;
  };
  const auto diff = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return *a - *b;
  };
  int mismatches = 0;
  double worst_shift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ArrivalEstimateSet e{maybe(), maybe(), maybe(), maybe(), maybe(), maybe(), maybe()};
    const auto got = compute_ppet(e);
    const PPetVector oracle{
      diff(e.veh_closer_enter, e.ped_q1), diff(e.ped_q0, e.veh_closer_leave), diff(e.veh_further_enter, e.ped_q2),
      diff(e.ped_q1, e.veh_further_leave)};
    mismatches += got == oracle ? 0 : 1;

    const double dt = shift(rng);
    for (auto * f : {&e.ped_q0, &e.ped_q1, &e.ped_q2, &e.veh_closer_enter, &e.veh_closer_leave, &e.veh_further_enter,
                     &e.veh_further_leave}) {
      if (*f) **f += dt;
    }
    const auto shifted = compute_ppet(e);
    for (auto m : {&PPetVector::c_pf, &PPetVector::c_vf, &PPetVector::f_pf, &PPetVector::f_vf}) {
      if ((got.*m).has_value() != (shifted.*m).has_value()) {
        ++mismatches;
      } else if ((got.*m).has_value()) {
        worst_shift = std::max(worst_shift, std::abs(*(got.*m) - *(shifted.*m)));
      }
    }
  }
  return {mismatches == 0 && worst_shift <= 1e-12,
          std::to_string(mismatches) + " mismatches in 10000 sets, max shift deviation " + fmt(worst_shift, 3)};
}

// --- 5 --------------------------------------------------------------------------------------

Outcome streaming_equals_batch()
{
  synthgen::ScenarioSpec spec;
  spec.seed = 55;
  spec.duration = 300.0;
  spec.adults = 50;
  spec.kids = 25;
  spec.cyclists = 25;
  spec.vehicle_rate = 0.25;
  const auto scenario = synthgen::generate(spec);
  const auto thresholds = risk::RiskThresholdConfig::defaults();

  RiskEngine engine(synthgen::reference_area_map(), predictors::ModelBundle::historical_average_only(), thresholds);
  TraceCollector collector;
  std::map<std::pair<std::string, RiskArea>, int> streamed;
  for (const auto & [frame, obs] : synthgen::group_frames(scenario.observations)) {
    const auto out = engine.process_frame(frame, obs);
    collector.add(engine, out);
    for (const auto & s : out.scenarios) {
      ++streamed[{s.ped_id, s.area}];
    }
  }
  auto episodes = collector.episodes();
  if (episodes.size() < 100) {
    return {false, "only " + std::to_string(episodes.size()) + " episodes"};
  }
  episodes.resize(100);

  int mismatches = 0;
  int risk2 = 0;
  std::map<std::pair<std::string, RiskArea>, int> batch;
  for (const auto & ep : episodes) {
    const auto offline = risk::classify_offline(ep, thresholds);
    stream::PedestrianState ped;
    ped.status = stream::PedestrianStatus::Target;
    ped.current_area = geometry::Area::A3_1;
    std::map<RiskArea, RiskLevel> replay;
    for (RiskArea s : thresholds.slots(ep.category)) {
      replay[s] = RiskLevel::Risk1;
    }
    for (const auto & f : ep.frames) {
      for (const auto & d : risk::step_evaluate(ped, f, ep.category, thresholds)) {
        if (d.kind == risk::StepDecision::Kind::Risk2Flagged) {
          replay[d.area] = RiskLevel::Risk2;
        }
      }
    }
    mismatches += replay == offline ? 0 : 1;
    for (const auto & [slot, level] : offline) {
      if (level == RiskLevel::Risk2) {
        ++risk2;
        ++batch[{ep.ped_id, slot}];
      }
    }
  }
  // The engine's own emissions for the same pedestrians must agree with the batch verdicts.
  std::set<std::string> ids;
  for (const auto & ep : episodes) ids.insert(ep.ped_id);
  int emission_mismatches = 0;
  for (const auto & [key, n] : streamed) {
    if (ids.count(key.first) && batch[key] != n) ++emission_mismatches;
  }
  for (const auto & [key, n] : batch) {
    if (streamed[key] != n) ++emission_mismatches;
  }
  return {mismatches == 0 && emission_mismatches == 0,
          std::to_string(mismatches) + " replay mismatches, " + std::to_string(emission_mismatches) +
            " engine emission mismatches over 100 episodes (" + std::to_string(risk2) + " Risk-2 slots)"};
}

// --- 6 --------------------------------------------------------------------------------------

Outcome threshold_recovery()
{
  synthgen::PlantedSpec planted;
  planted.seed = 66;
  planted.episodes = 400;
  const auto set = synthgen::generate_planted(planted);
  const auto units = calibration::make_units(set.episodes, set.labels, risk::RiskThresholdConfig::defaults());

  calibration::GridSpec grid;
  const double step = 0.25;
  grid.pf = {true, -3.0, 2.0, -3.0, 2.0, step};
  grid.vf.enabled = false;
  calibration::SearchOptions options;
  options.seed = 6;
  options.record_scores = false;
  const auto found = calibration::grid_search(units, grid, options);
  const auto & iv = found.best.pf->interval;
  const bool interval_ok = std::abs(iv.alpha - planted.interval.alpha) <= step + 1e-9 &&
                           std::abs(iv.beta - planted.interval.beta) <= step + 1e-9;
  const double planted_acc = found.test_metrics.accuracy.value_or(0.0);

  // Mixed corpus: tune on one seed, evaluate the tuned thresholds on another.
  ScratchDir a("tune"), b("eval");
  io::write_text(a.str("grid.json"), R"({"pf": {"step": 0.25}, "vf": {"step": 0.25}})");
  bool ok = quiet_cli({"--seed", "5", "--out", a.str(), "gen", "--duration", "3600", "--adults", "360", "--kids", "120",
                       "--cyclists", "120"}) == 0;
  ok = ok && quiet_cli({"--out", a.str(), "evaluate", "--stream", a.str("stream.csv"), "--truth",
                        a.str("ground_truth.json")}) == 0;
  ok = ok && quiet_cli({"--seed", "5", "--out", a.str(), "tune", "--episodes", a.str("episodes.jsonl"), "--grid",
                        a.str("grid.json")}) == 0;
  ok = ok && quiet_cli({"--seed", "6", "--out", b.str(), "gen", "--duration", "1800", "--adults", "180", "--kids", "60",
                        "--cyclists", "60"}) == 0;
  ok = ok && quiet_cli({"--out", b.str(), "evaluate", "--stream", b.str("stream.csv"), "--truth",
                        b.str("ground_truth.json"), "--thresholds", a.str("thresholds.json")}) == 0;
  if (!ok) {
    return {false, "mixed-corpus pipeline failed"};
  }
  const auto m = io::load_json(b.str("metrics.json")).at("metrics");
  const double recall = m.at("recall").is_null() ? 0.0 : m.at("recall").get<double>();
  const double f1 = m.at("f1").is_null() ? 0.0 : m.at("f1").get<double>();

  return {interval_ok && planted_acc >= 0.95 && recall >= 0.80 && f1 >= 0.75,
          "planted [" + fmt(iv.alpha) + ", " + fmt(iv.beta) + "] vs [" + fmt(planted.interval.alpha) + ", " +
            fmt(planted.interval.beta) + "], held-out accuracy " + fmt(planted_acc) + "; mixed corpus recall " +
            fmt(recall) + ", F1 " + fmt(f1)};
}

// --- 7 --------------------------------------------------------------------------------------

Outcome metrics_formulas()
{
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<std::int64_t> n(0, 500);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    calibration::ConfusionCounts c{n(rng), n(rng), n(rng), n(rng)};
    if (i % 10 == 0) c.tp = 0;
    const auto m = calibration::metrics(c);
    const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
    const double total = tp + tn + fp + fn;
    const auto expect = [&](const std::optional<double> & got, bool defined, double value) {
      if (got.has_value() != defined || (defined && *got != value)) ++mismatches;
    };
    expect(m.accuracy, total > 0, (tp + tn) / total);
    expect(m.precision, tp + fp > 0, tp / (tp + fp));
    expect(m.recall, tp + fn > 0, tp / (tp + fn));
    const double p = tp / (tp + fp), r = tp / (tp + fn);
    const bool f1_defined = tp + fp > 0 && tp + fn > 0 && p + r > 0;
    expect(m.f1, f1_defined, 2.0 * p * r / (p + r));
    if (f1_defined && std::abs(*m.f1 - 2.0 * tp / (2.0 * tp + fp + fn)) > 1e-12) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 1000 random counts"};
}

// --- 8 --------------------------------------------------------------------------------------

Outcome homography()
{
  ScratchDir dir("homography");
  const auto reference = synthgen::reference_tiles();
  io::write_text(dir.str("anchors.json"), io::to_json(reference).dump());
  if (quiet_cli({"--out", dir.str(), "homography", "--anchors", dir.str("anchors.json")}) != 0) {
    return {false, "homography command failed"};
  }
  double grid_worst = 0.0;
  const auto tiles = io::tiles_from_json(io::load_json(dir.str("tiles.json")));
  for (const auto & t : tiles) {
    for (int k = 0; k < 4; ++k) {
      grid_worst = std::max(grid_worst, geometry::distance(geometry::project(t.matrix, t.pixel[k]), t.world[k]));
    }
  }

  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_real_distribution<double> origin(-500.0, 500.0);
  double random_worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u0 = origin(rng), v0 = origin(rng);
    const std::array<geometry::PixelPoint, 4> px{
      geometry::PixelPoint{u0 + 100 * jitter(rng), v0 + 100 * jitter(rng)},
      {u0 + 400 + 100 * jitter(rng), v0 + 100 * jitter(rng)},
      {u0 + 400 + 100 * jitter(rng), v0 + 300 + 100 * jitter(rng)},
      {u0 + 100 * jitter(rng), v0 + 300 + 100 * jitter(rng)}};
    const double x0 = origin(rng) / 10, y0 = origin(rng) / 10;
    const std::array<WorldPoint, 4> wd{
      WorldPoint{x0 + jitter(rng), y0 + jitter(rng)}, {x0 + 5 + jitter(rng), y0 + jitter(rng)},
      {x0 + 5 + jitter(rng), y0 + 4 + jitter(rng)}, {x0 + jitter(rng), y0 + 4 + jitter(rng)}};
    const auto m = geometry::solve_homography(px, wd);
    for (int k = 0; k < 4; ++k) {
      random_worst = std::max(random_worst, geometry::distance(geometry::project(m, px[k]), wd[k]));
    }
  }
  return {!tiles.empty() && grid_worst < 1e-6 && random_worst < 1e-9,
          "reference grid " + std::to_string(tiles.size()) + " tiles max residual " + fmt(grid_worst, 3) +
            " m, 1000 random quads max residual " + fmt(random_worst, 3) + " m"};
}

// --- 9 --------------------------------------------------------------------------------------

Outcome realtime_budget()
{
  ScratchDir dir("replay");
  // Dense scene: about twenty agents on screen at once.
  if (quiet_cli({"--seed", "9", "--out", dir.str(), "gen", "--duration", "120", "--adults", "70", "--kids", "30",
                 "--cyclists", "30", "--vehicle-rate", "0.25"}) != 0) {
    return {false, "gen failed"};
  }
  // Worst-case predictors: the largest recurrent model for every (category, q).
  predictors::ModelBundle bundle;
  std::uint64_t seed = 1;
  for (const auto & [key, p] : predictors::ModelBundle::historical_average_only().predictors) {
    bundle.predictors[key] = predictors::Predictor::recurrent(predictors::RecurrentRegressor::random(32, seed++));
  }
  io::write_text(dir.str("models.json"), io::to_json(bundle).dump());
  const int rc = quiet_cli({"--out", dir.str(), "replay", "--stream", dir.str("stream.csv"), "--models",
                            dir.str("models.json"), "--assert-budget", "33"});
  const auto j = io::load_json(dir.str("latency.json"));
  const double mean = j.at("safety_evaluation").at("mean_ms").get<double>();
  const double agents = j.at("mean_active_agents").get<double>();
  return {rc == cli::kOk && agents >= 20.0,
          "safety evaluation mean " + fmt(mean) + " ms per frame (budget 33 ms), mean " + fmt(agents, 3) +
            " active agents, max " + std::to_string(j.at("max_active_agents").get<int>())};
}

// --- 10 -------------------------------------------------------------------------------------

bool full_run(const ScratchDir & dir)
{
  io::write_text(dir.str("train.json"), R"({"hidden_size": 8, "epochs": 6, "patience": 3})");
  return quiet_cli({"--seed", "10", "--out", dir.str(), "gen", "--duration", "180", "--vehicle-rate", "0.2"}) == 0 &&
         quiet_cli({"--out", dir.str(), "build-dataset", "--stream", dir.str("stream.csv"), "--truth",
                    dir.str("ground_truth.json"), "--stride", "6"}) == 0 &&
         quiet_cli({"--seed", "10", "--config", dir.str("train.json"), "--out", dir.str(), "train", "--dataset",
                    dir.str("samples.jsonl")}) == 0 &&
         quiet_cli({"--out", dir.str(), "evaluate", "--stream", dir.str("stream.csv"), "--models",
                    dir.str("models.json")}) == 0;
}

Outcome determinism()
{
  ScratchDir a("run_a"), b("run_b");
  if (!full_run(a) || !full_run(b)) {
    return {false, "pipeline failed"};
  }
  const auto ra = io::read_text(a.str("risk_scenarios.jsonl"));
  const auto rb = io::read_text(b.str("risk_scenarios.jsonl"));
  const bool models_equal = io::read_text(a.str("models.json")) == io::read_text(b.str("models.json"));
  const auto lines = std::count(ra.begin(), ra.end(), '\n');
  int recurrent = 0;
  const auto bundle = io::load_json(a.str("models.json"));
  for (const auto & p : bundle.at("predictors")) {
    recurrent += p.at("kind") == "gru" ? 1 : 0;
  }
  return {ra == rb && models_equal && lines > 0,
          std::to_string(lines) + " risk scenarios, " + std::to_string(recurrent) + " recurrent predictors, outputs " + (ra == rb ? "identical" : "differ") +
            ", model bundles " + (models_equal ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char ** argv)
{
  const std::vector<Criterion> criteria{
    {1, "HA exactness", 1.0, ha_exactness},
    {2, "gradient check", 30.0, gradient_check},
    {3, "learned beats HA", 300.0, learned_beats_ha},
    {4, "P-PET arithmetic", 60.0, ppet_arithmetic},
    {5, "streaming/batch equivalence", 120.0, streaming_equals_batch},
    {6, "threshold recovery", 600.0, threshold_recovery},
    {7, "metrics formulas", 60.0, metrics_formulas},
    {8, "homography", 60.0, homography},
    {9, "real-time budget", 120.0, realtime_budget},
    {10, "determinism", 600.0, determinism},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    only.push_back(std::stoi(argv[i]));
  }

  int failures = 0;
  for (const auto & c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception & e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << out.detail << " ("
              << fmt(secs, 3) << " s, limit " << fmt(c.limit_s, 4) << " s" << (in_time ? "" : ", over limit") << ")"
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
