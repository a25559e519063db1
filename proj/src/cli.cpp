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

#include "ppet/cli.hpp"

#include "ppet/calibration.hpp"
#include "ppet/engine.hpp"
#include "ppet/errors.hpp"
#include "ppet/io.hpp"
#include "ppet/synthgen.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <thread>

namespace ppet::cli
{

namespace fs = std::filesystem;
using io::Json;

namespace
{

struct Globals
{
  std::uint64_t seed{0};
  bool seed_set{false};
  std::string out{"."};
  int fps{30};
  std::string config;
};

fs::path out_path(const Globals & g, const std::string & name) { return fs::path(g.out) / name; }

void require_file(const std::string & path, const char * what)
{
  if (path.empty()) {
    fail(Errc::InvalidArgument, std::string("missing ") + what);
  }
  if (!fs::exists(path)) {
    fail(Errc::InvalidArgument, std::string(what) + " not found: " + path);
  }
}

geometry::AreaMap load_area_map(const std::string & path)
{
  if (path.empty()) {
    return synthgen::reference_area_map();
  }
  require_file(path, "area map");
  return io::area_map_from_json(io::load_json(path));
}

std::optional<geometry::TileGrid> load_tiles(const std::string & path)
{
  if (path.empty()) {
    return std::nullopt;
  }
  require_file(path, "tile grid");
  return geometry::TileGrid(io::tiles_from_json(io::load_json(path)), geometry::FallbackPolicy::NearestTile);
}

predictors::ModelBundle load_models(const std::string & path)
{
  if (path.empty()) {
    return predictors::ModelBundle::historical_average_only();
  }
  require_file(path, "model bundle");
  return io::model_bundle_from_json(io::load_json(path));
}

risk::RiskThresholdConfig load_thresholds(const std::string & path)
{
  if (path.empty()) {
    return risk::RiskThresholdConfig::defaults();
  }
  require_file(path, "threshold config");
  return io::thresholds_from_json(io::load_json(path));
}

std::vector<stream::Observation> load_stream(const std::string & path, const std::optional<geometry::TileGrid> & tiles)
{
  require_file(path, "stream");
  return io::load_stream_csv(path, tiles ? &*tiles : nullptr);
}

StageStats stats(const std::vector<double> & xs)
{
  StageStats s;
  if (xs.empty()) {
    return s;
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  s.mean_ms = sum / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) {
    var += (x - s.mean_ms) * (x - s.mean_ms);
  }
  s.std_ms = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  return s;
}

Json stats_json(const StageStats & s) { return {{"mean_ms", s.mean_ms}, {"std_ms", s.std_ms}}; }

Json latency_json(const LatencyReport & r, std::optional<double> budget)
{
  return {{"unit", "frame"},
          {"frames", r.frames},
          {"mean_active_agents", r.mean_active_agents},
          {"max_active_agents", r.max_active_agents},
          {"transform", stats_json(r.transform)},
          {"prediction", stats_json(r.prediction)},
          {"ppet_risk", stats_json(r.ppet_risk)},
          {"safety_evaluation", stats_json(r.safety_evaluation)},
          {"total", stats_json(r.total)},
          {"budget_ms", budget ? Json(*budget) : Json(nullptr)}};
}

struct EvaluationRun
{
  std::vector<risk::RiskScenario> scenarios;
  std::string trace_csv;
  std::vector<risk::EpisodeTrace> episodes;
};

/// Streams every frame through a fresh engine.
EvaluationRun evaluate_observations(
  const geometry::AreaMap & map, const predictors::ModelBundle & models, const risk::RiskThresholdConfig & thresholds,
  const std::vector<stream::Observation> & observations)
{
  EvaluationRun run;
  RiskEngine engine(map, models, thresholds);
  TraceCollector collector;
  run.trace_csv = io::trace_csv_header();
  for (const auto & [frame, obs] : synthgen::group_frames(observations)) {
    auto out = engine.process_frame(frame, obs);
    collector.add(engine, out);
    for (auto & s : out.scenarios) {
      run.scenarios.push_back(std::move(s));
    }
    for (const auto & row : out.trace) {
      run.trace_csv += io::trace_csv_row(row);
    }
  }
  run.episodes = collector.episodes();
  return run;
}

// --- homography ------------------------------------------------------------------------------

int cmd_homography(const Globals & g, const std::string & anchors)
{
  require_file(anchors, "anchors file");
  const auto tiles = io::tiles_from_json(io::load_json(anchors));
  double worst = 0.0;
  for (const auto & t : tiles) {
    worst = std::max(worst, t.corner_residual());
  }
  io::write_text(out_path(g, "tiles.json"), io::to_json(tiles).dump(2) + "\n");
  std::cout << "tiles: " << tiles.size() << "\nmax corner residual (m): " << worst << "\n";
  return kOk;
}

// --- build-dataset ---------------------------------------------------------------------------

struct BuildArgs
{
  std::string stream;
  std::string area_map;
  std::string tiles;
  std::string truth;
  std::vector<int> targets;
  std::size_t stride{1};
};

int cmd_build_dataset(const Globals & g, const BuildArgs & a)
{
  const auto map = load_area_map(a.area_map);
  const auto tiles = load_tiles(a.tiles);
  const auto obs = load_stream(a.stream, tiles);
  std::map<std::string, predictors::Annotation> annotations;
  if (!a.truth.empty()) {
    require_file(a.truth, "ground truth");
    annotations = io::ground_truth_from_json(io::load_json(a.truth)).annotations();
  }
  const auto result = predictors::build_labeled_dataset(synthgen::split_trajectories(obs), map, a.targets, annotations, stream::kWindowSize, a.stride);
  for (const auto & [id, q] : result.skipped) {
    std::cerr << "warning: skipping agent " << id << " q=" << q << " (target never reached)\n";
  }
  io::write_text(out_path(g, "samples.jsonl"), io::samples_jsonl(result.samples));
  std::cout << "samples: " << result.samples.size() << "\nskipped: " << result.skipped.size() << "\n";
  return kOk;
}

// --- train -----------------------------------------------------------------------------------

int cmd_train(const Globals & g, const std::string & dataset)
{
  require_file(dataset, "dataset");
  predictors::TrainingConfig config;
  if (!g.config.empty()) {
    require_file(g.config, "training config");
    config = io::training_config_from_json(io::load_json(g.config));
  }
  if (g.seed_set) {
    config.seed = g.seed;
  }
  const auto samples = io::parse_samples_jsonl(io::read_text(dataset), dataset);
  std::vector<predictors::SelectionReport> report;
  const auto bundle = predictors::train_bundle(samples, config, &report);
  io::write_text(out_path(g, "models.json"), io::to_json(bundle).dump() + "\n");
  Json rep = Json::array();
  for (const auto & r : report) {
    Json cands = Json::array();
    for (const auto & c : r.candidates) {
      cands.push_back({{"name", c.name}, {"validation_mae", c.validation_mae}});
    }
    rep.push_back(
      {{"category", std::string(to_string(r.category))}, {"q", r.q}, {"candidates", cands}, {"chosen", r.chosen}});
    std::cout << to_string(r.category) << " q=" << r.q << " -> " << r.chosen << "\n";
  }
  io::write_text(
    out_path(g, "training_report.json"), Json{{"config", io::to_json(config)}, {"selection", rep}}.dump(2) + "\n");
  return kOk;
}

// --- evaluate --------------------------------------------------------------------------------

struct EvalArgs
{
  std::string stream;
  std::string models;
  std::string thresholds;
  std::string area_map;
  std::string tiles;
  std::string truth;
};

int cmd_evaluate(const Globals & g, const EvalArgs & a)
{
  const auto map = load_area_map(a.area_map);
  const auto tiles = load_tiles(a.tiles);
  const auto models = load_models(a.models);
  const auto thresholds = load_thresholds(!a.thresholds.empty() ? a.thresholds : g.config);
  std::optional<synthgen::GroundTruth> truth;
  if (!a.truth.empty()) {
    require_file(a.truth, "ground truth");
    truth = io::ground_truth_from_json(io::load_json(a.truth));
  }
  const auto obs = load_stream(a.stream, tiles);
  const auto run = evaluate_observations(map, models, thresholds, obs);

  io::write_text(out_path(g, "risk_scenarios.jsonl"), io::scenarios_jsonl(run.scenarios));
  io::write_text(out_path(g, "ppet_trace.csv"), run.trace_csv);
  std::cout << "risk scenarios: " << run.scenarios.size() << "\nepisodes: " << run.episodes.size() << "\n";

  if (truth) {
    const auto labels = truth->risk2_labels(thresholds);
    std::map<std::pair<std::string, RiskArea>, bool> flagged;
    std::vector<io::LabeledEpisode> labeled;
    for (const auto & ep : run.episodes) {
      const auto levels = risk::classify_offline(ep, thresholds);
      io::LabeledEpisode le{ep, {}};
      for (const auto & [slot, level] : levels) {
        flagged[{ep.ped_id, slot}] = flagged[{ep.ped_id, slot}] || level == RiskLevel::Risk2;
        if (auto it = labels.find({ep.ped_id, slot}); it != labels.end()) {
          le.labels[slot] = it->second;
        }
      }
      labeled.push_back(std::move(le));
    }
    calibration::ConfusionCounts counts;
    for (const auto & [key, actual] : labels) {
      auto it = flagged.find(key);
      counts.add(it != flagged.end() && it->second, actual);
    }
    const auto m = calibration::metrics(counts);
    io::write_text(out_path(g, "episodes.jsonl"), io::episodes_jsonl(labeled));
    io::write_text(out_path(g, "metrics.json"), Json{{"counts", io::to_json(counts)}, {"metrics", io::to_json(m)}}.dump(2) + "\n");
    std::cout << "metrics: " << io::to_json(m).dump() << "\n";
  }
  return kOk;
}

// --- tune ------------------------------------------------------------------------------------

struct TuneArgs
{
  std::string episodes;
  std::string grid;
  std::string thresholds;
  int k{10};
  double test_fraction{0.2};
};

int cmd_tune(const Globals & g, const TuneArgs & a)
{
  require_file(a.episodes, "episodes file");
  calibration::GridSpec grid;
  const std::string grid_path = !a.grid.empty() ? a.grid : g.config;
  if (!grid_path.empty()) {
    require_file(grid_path, "grid spec");
    grid = io::grid_spec_from_json(io::load_json(grid_path));
  }
  auto tuned = load_thresholds(a.thresholds);
  const auto episodes = io::parse_episodes_jsonl(io::read_text(a.episodes), a.episodes);
  std::vector<risk::EpisodeTrace> traces;
  std::map<std::pair<std::string, RiskArea>, bool> labels;
  for (const auto & e : episodes) {
    traces.push_back(e.trace);
    for (const auto & [slot, r2] : e.labels) {
      labels[{e.trace.ped_id, slot}] = r2;
    }
  }
  const auto units = calibration::make_units(traces, labels, tuned);
  calibration::SearchOptions options;
  options.k = a.k;
  options.test_fraction = a.test_fraction;
  options.seed = g.seed_set ? g.seed : options.seed;

  Json groups = Json::array();
  std::string scores = "category,slot,pf_alpha,pf_beta,vf_alpha,vf_beta,counter,cv_accuracy\n";
  for (AgentCategory c : kPedestrianCategories) {
    for (RiskArea slot : tuned.slots(c)) {
      std::vector<calibration::Unit> subset;
      for (const auto & u : units) {
        if (u.category == c && u.slot == slot) {
          subset.push_back(u);
        }
      }
      Json entry{{"category", std::string(to_string(c))}, {"slot", std::string(to_string(slot))}, {"units", subset.size()}};
      try {
        const auto result = calibration::grid_search(subset, grid, options);
        tuned.categories[c].areas[slot] = result.best;
        entry["report"] = io::calibration_report(result, grid, options.seed);
        const std::string prefix = std::string(to_string(c)) + ',' + std::string(to_string(slot)) + ',';
        const std::string csv = io::scores_csv(result.scores);
        std::size_t pos = csv.find('\n') + 1;
        while (pos < csv.size()) {
          const std::size_t end = csv.find('\n', pos);
          scores += prefix + csv.substr(pos, end - pos + 1);
          pos = end + 1;
        }
        std::cout << to_string(c) << '/' << to_string(slot) << ": cv accuracy " << result.cv_accuracy << "\n";
      } catch (const Error & e) {
        if (e.code() != Errc::TooFewEpisodes) {
          throw;
        }
        entry["skipped"] = e.what();
        std::cerr << "warning: " << to_string(c) << '/' << to_string(slot) << " kept its thresholds: " << e.what() << "\n";
      }
      groups.push_back(entry);
    }
  }
  io::write_text(out_path(g, "thresholds.json"), io::to_json(tuned).dump(2) + "\n");
  io::write_text(
    out_path(g, "calibration_report.json"),
    Json{{"seed", options.seed}, {"k", options.k}, {"grid_spec", io::to_json(grid)}, {"groups", groups}}.dump(2) + "\n");
  io::write_text(out_path(g, "calibration_scores.csv"), scores);
  return kOk;
}

// --- replay ----------------------------------------------------------------------------------

struct ReplayArgs
{
  std::string stream;
  std::string models;
  std::string thresholds;
  std::string area_map;
  std::string tiles;
  bool realtime{false};
  std::optional<double> budget_ms;
};

int cmd_replay(const Globals & g, const ReplayArgs & a)
{
  using clock = std::chrono::steady_clock;
  const auto map = load_area_map(a.area_map);
  const auto tiles = load_tiles(a.tiles);
  const auto models = load_models(a.models);
  const auto thresholds = load_thresholds(!a.thresholds.empty() ? a.thresholds : g.config);
  require_file(a.stream, "stream");
  auto raw = io::parse_stream_csv_raw(io::read_text(a.stream), a.stream);
  if (raw.pixel && !tiles) {
    fail(Errc::InvalidArgument, "pixel stream needs --tiles");
  }

  RiskEngine engine(map, models, thresholds);
  std::vector<double> transform, prediction, ppet_risk, safety, total;
  std::vector<risk::RiskScenario> scenarios;
  LatencyReport report;
  double agents = 0.0;
  const auto start = clock::now();
  for (auto & [frame, obs] : synthgen::group_frames(raw.observations)) {
    if (a.realtime) {
      std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(
                                              static_cast<double>(report.frames) / g.fps)));
    }
    const auto t0 = clock::now();
    if (raw.pixel) {
      for (auto & o : obs) {
        o.position = tiles->transform({o.position.x, o.position.y});
      }
    }
    const auto t1 = clock::now();
    auto out = engine.process_frame(frame, obs);
    const auto t2 = clock::now();
    transform.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    prediction.push_back(out.timing.prediction_ms);
    ppet_risk.push_back(out.timing.risk_ms);
    safety.push_back(out.timing.prediction_ms + out.timing.risk_ms);
    total.push_back(std::chrono::duration<double, std::milli>(t2 - t0).count());
    for (auto & s : out.scenarios) {
      scenarios.push_back(std::move(s));
    }
    ++report.frames;
    agents += static_cast<double>(obs.size());
    report.max_active_agents = std::max(report.max_active_agents, obs.size());
  }
  report.mean_active_agents = report.frames ? agents / static_cast<double>(report.frames) : 0.0;
  report.transform = stats(transform);
  report.prediction = stats(prediction);
  report.ppet_risk = stats(ppet_risk);
  report.safety_evaluation = stats(safety);
  report.total = stats(total);

  io::write_text(out_path(g, "latency.json"), latency_json(report, a.budget_ms).dump(2) + "\n");
  io::write_text(out_path(g, "risk_scenarios.jsonl"), io::scenarios_jsonl(scenarios));
  std::cout << "frames: " << report.frames << "\nsafety evaluation mean (ms): " << report.safety_evaluation.mean_ms
            << "\n";
  if (a.budget_ms && report.safety_evaluation.mean_ms >= *a.budget_ms) {
    fail(Errc::BudgetExceeded, "mean safety evaluation " + std::to_string(report.safety_evaluation.mean_ms) +
                                 " ms exceeds the " + std::to_string(*a.budget_ms) + " ms budget");
  }
  return kOk;
}

// --- gen -------------------------------------------------------------------------------------

struct GenArgs
{
  std::optional<double> duration;
  std::optional<int> adults;
  std::optional<int> kids;
  std::optional<int> cyclists;
  std::optional<double> vehicle_rate;
  bool pixel{false};
};

int cmd_gen(const Globals & g, const GenArgs & a)
{
  synthgen::ScenarioSpec spec;
  if (!g.config.empty()) {
    require_file(g.config, "scenario spec");
    spec = io::scenario_spec_from_json(io::load_json(g.config));
  }
  if (g.seed_set) {
    spec.seed = g.seed;
  }
  spec.fps = g.fps;
  if (a.duration) spec.duration = *a.duration;
  if (a.adults) spec.adults = *a.adults;
  if (a.kids) spec.kids = *a.kids;
  if (a.cyclists) spec.cyclists = *a.cyclists;
  if (a.vehicle_rate) spec.vehicle_rate = *a.vehicle_rate;

  const auto scenario = synthgen::generate(spec);
  if (a.pixel) {
    const auto tiles = synthgen::reference_tiles();
    std::string csv = "frame,t,id,category,u,v\n";
    for (const auto & o : scenario.observations) {
      const auto px = synthgen::world_to_pixel(tiles, o.position);
      if (!px) {
        fail(Errc::OutsideCalibratedRegion, "agent " + o.agent_id + " left the reference tile grid");
      }
      csv += std::to_string(o.frame) + ',' + io::format_double(o.t) + ',' + o.agent_id + ',' +
             std::to_string(code(o.category)) + ',' + io::format_double(px->u) + ',' + io::format_double(px->v) + '\n';
    }
    io::write_text(out_path(g, "stream.csv"), csv);
    io::write_text(out_path(g, "tiles.json"), io::to_json(tiles).dump(2) + "\n");
  } else {
    io::write_text(out_path(g, "stream.csv"), io::stream_csv(scenario.observations));
  }
  io::write_text(out_path(g, "ground_truth.json"), io::to_json(scenario.truth).dump(2) + "\n");
  io::write_text(out_path(g, "area_map.json"), io::to_json(synthgen::reference_area_map()).dump(2) + "\n");
  io::write_text(out_path(g, "spec.json"), io::to_json(spec).dump(2) + "\n");
  std::cout << "observations: " << scenario.observations.size() << "\nagents: " << scenario.truth.agents.size() << "\n";
  return kOk;
}

// --- metrics ---------------------------------------------------------------------------------

int cmd_metrics(const Globals & g, const std::string & counts_file, calibration::ConfusionCounts counts)
{
  if (!counts_file.empty()) {
    require_file(counts_file, "counts file");
    const auto j = io::load_json(counts_file);
    try {
      counts = {j.at("tp").get<std::int64_t>(), j.at("tn").get<std::int64_t>(), j.at("fp").get<std::int64_t>(),
                j.at("fn").get<std::int64_t>()};
    } catch (const nlohmann::json::exception & e) {
      fail(Errc::ParseError, counts_file + ": " + e.what());
    }
  }
  if (counts.tp < 0 || counts.tn < 0 || counts.fp < 0 || counts.fn < 0) {
    fail(Errc::InvalidArgument, "confusion counts must be non-negative");
  }
  const Json out{{"counts", io::to_json(counts)}, {"metrics", io::to_json(calibration::metrics(counts))}};
  io::write_text(out_path(g, "metrics.json"), out.dump(2) + "\n");
  std::cout << out.dump() << "\n";
  return kOk;
}

int exit_code_for(Errc code)
{
  switch (code) {
    case Errc::BudgetExceeded: return kBudgetViolation;
    case Errc::NonFiniteParameters:
    case Errc::NonFiniteGradient:
    case Errc::DivergedLoss:
    case Errc::ProjectiveSingularity: return kInternalError;
    default: return kInputError;
  }
}

}  // namespace

int run(int argc, const char * const * argv)
{
  CLI::App app{"Predicted post-encroachment time risk evaluation", "ppet"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto * seed_opt = app.add_option("--seed", g.seed, "Seed for every random sub-stream");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--fps", g.fps, "Stream frame rate")->capture_default_str();
  app.add_option("--config", g.config, "Command configuration file");

  std::string anchors;
  auto * homography = app.add_subcommand("homography", "Solve per-tile homographies from anchor pairs");
  homography->add_option("--anchors", anchors, "Anchor JSON file")->required();

  BuildArgs build;
  auto * build_cmd = app.add_subcommand("build-dataset", "Build labeled arrival-time samples from a stream");
  build_cmd->add_option("--stream", build.stream, "Observation stream CSV")->required();
  build_cmd->add_option("--area-map", build.area_map, "Area map JSON (default: reference layout)");
  build_cmd->add_option("--tiles", build.tiles, "Tile grid for pixel streams");
  build_cmd->add_option("--truth", build.truth, "Ground-truth JSON with awareness annotations");
  build_cmd->add_option("--targets", build.targets, "Target indices q to build (default: all)")->delimiter(',');
  build_cmd->add_option("--stride", build.stride, "Keep every n-th window")->capture_default_str()->check(CLI::PositiveNumber);

  std::string dataset;
  auto * train_cmd = app.add_subcommand("train", "Train and select arrival-time predictors");
  train_cmd->add_option("--dataset", dataset, "Labeled samples JSONL")->required();

  EvalArgs eval;
  auto * eval_cmd = app.add_subcommand("evaluate", "Stream a recording through the risk engine");
  eval_cmd->add_option("--stream", eval.stream, "Observation stream CSV")->required();
  eval_cmd->add_option("--models", eval.models, "Model bundle (default: historical average)");
  eval_cmd->add_option("--thresholds", eval.thresholds, "Threshold config (default: built-in)");
  eval_cmd->add_option("--area-map", eval.area_map, "Area map JSON (default: reference layout)");
  eval_cmd->add_option("--tiles", eval.tiles, "Tile grid for pixel streams");
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth JSON for metrics and labeled episodes");

  TuneArgs tune;
  auto * tune_cmd = app.add_subcommand("tune", "Grid-search risk thresholds with k-fold cross-validation");
  tune_cmd->add_option("--episodes", tune.episodes, "Labeled episodes JSONL")->required();
  tune_cmd->add_option("--grid", tune.grid, "Grid spec JSON");
  tune_cmd->add_option("--thresholds", tune.thresholds, "Base config supplying the area modes");
  tune_cmd->add_option("--folds", tune.k, "Number of folds")->capture_default_str();
  tune_cmd->add_option("--test-fraction", tune.test_fraction, "Held-out share")->capture_default_str();

  ReplayArgs replay;
  double budget = 0.0;
  auto * replay_cmd = app.add_subcommand("replay", "Replay a stream and report per-frame latency");
  replay_cmd->add_option("--stream", replay.stream, "Observation stream CSV")->required();
  replay_cmd->add_option("--models", replay.models, "Model bundle (default: historical average)");
  replay_cmd->add_option("--thresholds", replay.thresholds, "Threshold config (default: built-in)");
  replay_cmd->add_option("--area-map", replay.area_map, "Area map JSON (default: reference layout)");
  replay_cmd->add_option("--tiles", replay.tiles, "Tile grid for pixel streams");
  replay_cmd->add_flag("--realtime", replay.realtime, "Pace frames at the stream frame rate");
  auto * budget_opt = replay_cmd->add_option("--assert-budget", budget, "Fail when the mean exceeds this many ms");

  GenArgs gen;
  double duration = 0.0;
  int adults = 0, kids = 0, cyclists = 0;
  double vehicle_rate = 0.0;
  auto * gen_cmd = app.add_subcommand("gen", "Generate a synthetic scenario with ground truth");
  auto * duration_opt = gen_cmd->add_option("--duration", duration, "Seconds");
  auto * adults_opt = gen_cmd->add_option("--adults", adults);
  auto * kids_opt = gen_cmd->add_option("--kids", kids);
  auto * cyclists_opt = gen_cmd->add_option("--cyclists", cyclists);
  auto * rate_opt = gen_cmd->add_option("--vehicle-rate", vehicle_rate, "Arrivals per second and lane");
  gen_cmd->add_flag("--pixel", gen.pixel, "Emit pixel coordinates through the reference tile grid");

  std::string counts_file;
  calibration::ConfusionCounts counts;
  auto * metrics_cmd = app.add_subcommand("metrics", "Accuracy, precision, recall and F1 from confusion counts");
  metrics_cmd->add_option("--counts", counts_file, "JSON {tp, tn, fp, fn}");
  metrics_cmd->add_option("--tp", counts.tp);
  metrics_cmd->add_option("--tn", counts.tn);
  metrics_cmd->add_option("--fp", counts.fp);
  metrics_cmd->add_option("--fn", counts.fn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }
  g.seed_set = seed_opt->count() > 0;
  if (budget_opt->count()) replay.budget_ms = budget;
  if (duration_opt->count()) gen.duration = duration;
  if (adults_opt->count()) gen.adults = adults;
  if (kids_opt->count()) gen.kids = kids;
  if (cyclists_opt->count()) gen.cyclists = cyclists;
  if (rate_opt->count()) gen.vehicle_rate = vehicle_rate;

  try {
    if (g.fps <= 0) {
      fail(Errc::InvalidArgument, "--fps must be positive");
    }
    if (homography->parsed()) return cmd_homography(g, anchors);
    if (build_cmd->parsed()) return cmd_build_dataset(g, build);
    if (train_cmd->parsed()) return cmd_train(g, dataset);
    if (eval_cmd->parsed()) return cmd_evaluate(g, eval);
    if (tune_cmd->parsed()) return cmd_tune(g, tune);
    if (replay_cmd->parsed()) return cmd_replay(g, replay);
    if (gen_cmd->parsed()) return cmd_gen(g, gen);
    if (metrics_cmd->parsed()) return cmd_metrics(g, counts_file, counts);
  } catch (const Error & e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception & e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}

int run(const std::vector<std::string> & args)
{
  std::vector<const char *> argv;
  argv.push_back("ppet");
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ppet::cli
