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

#include "ppet/io.hpp"
#include "ppet/synthgen.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

namespace
{

using namespace ppet;
using ppet::test::throws_code;

std::string error_text(const std::function<void()> & fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.what();
  }
  return {};
}

TEST(Text, FormatDoubleRoundTrips)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(io::format_double(3.0), "3");
}

TEST(Text, WriteCreatesDirectories)
{
  test::TempDir dir;
  const auto path = dir.path() / "a" / "b" / "c.txt";
  io::write_text(path, "hello\n");
  EXPECT_EQ(io::read_text(path), "hello\n");
  EXPECT_TRUE(throws_code([&] { io::read_text(dir.path() / "missing"); }, Errc::ParseError));
}

TEST(Json, MalformedReportsLine)
{
  const std::string text = "{\n  \"a\": 1,\n  \"b\": [1, 2\n}\n";
  const auto msg = error_text([&] { io::parse_json(text, "cfg.json"); });
  EXPECT_NE(msg.find("cfg.json:4"), std::string::npos) << msg;
  EXPECT_TRUE(throws_code([&] { io::parse_json(text); }, Errc::ParseError));
}

TEST(Stream, RoundTrip)
{
  synthgen::ScenarioSpec spec;
  spec.duration = 40;
  const auto sc = synthgen::generate(spec);
  const auto text = io::stream_csv(sc.observations);
  const auto back = io::parse_stream_csv(text);
  ASSERT_EQ(back.size(), sc.observations.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].frame, sc.observations[i].frame);
    EXPECT_EQ(back[i].t, sc.observations[i].t);
    EXPECT_EQ(back[i].agent_id, sc.observations[i].agent_id);
    EXPECT_EQ(back[i].category, sc.observations[i].category);
    EXPECT_EQ(back[i].position, sc.observations[i].position);
  }
  EXPECT_EQ(io::stream_csv(back), text);
}

TEST(Stream, CategoryNamesAndCrlf)
{
  const auto obs = io::parse_stream_csv("frame,t,id,category,x,y\r\n0,0,p1,kid,1.5,2\r\n0,0,v1,3,1.75,-9\r\n");
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[0].category, AgentCategory::Kid);
  EXPECT_EQ(obs[1].category, AgentCategory::VehicleArea41);
  EXPECT_EQ(obs[0].position, (geometry::WorldPoint{1.5, 2.0}));
}

TEST(Stream, ErrorsCarryLineNumbers)
{
  const std::string bad_number = "frame,t,id,category,x,y\n0,0,p,0,1,2\n1,0.03,p,0,abc,2\n";
  EXPECT_NE(error_text([&] { io::parse_stream_csv(bad_number, nullptr, "s.csv"); }).find("s.csv:3"),
            std::string::npos);
  EXPECT_TRUE(throws_code([] { io::parse_stream_csv("frame,t,id,category,x,y\n0,0,p,7,1,2\n"); }, Errc::ParseError));
  EXPECT_TRUE(throws_code([] { io::parse_stream_csv("frame,t,id,category,x,y\n0,0,p,0,1\n"); }, Errc::ParseError));
  EXPECT_TRUE(throws_code([] { io::parse_stream_csv("a,b,c\n"); }, Errc::ParseError));
  EXPECT_TRUE(io::parse_stream_csv("").empty());
}

TEST(Stream, PixelVariantUsesTiles)
{
  const auto tiles = synthgen::reference_tiles();
  const geometry::TileGrid grid(tiles, geometry::FallbackPolicy::NearestTile);
  const auto px = synthgen::world_to_pixel(tiles, {1.1, 2.3});
  ASSERT_TRUE(px);
  const std::string text = "frame,t,id,category,u,v\n0,0,p,0," + io::format_double(px->u) + "," +
                           io::format_double(px->v) + "\n";
  const auto obs = io::parse_stream_csv(text, &grid);
  EXPECT_NEAR(obs[0].position.x, 1.1, 1e-6);
  EXPECT_NEAR(obs[0].position.y, 2.3, 1e-6);
  EXPECT_TRUE(throws_code([&] { io::parse_stream_csv(text); }, Errc::InvalidArgument));
}

TEST(Geometry, AreaMapRoundTrip)
{
  const auto map = synthgen::reference_area_map();
  const auto back = io::area_map_from_json(io::parse_json(io::to_json(map).dump()));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(-10, 17), uy(-32, 36);
  for (int i = 0; i < 2000; ++i) {
    const geometry::WorldPoint p{ux(rng), uy(rng)};
    EXPECT_EQ(map.locate(p), back.locate(p));
  }
  const auto & a = map.line("ped_ltr_q1");
  const auto & b = back.line("ped_ltr_q1");
  EXPECT_EQ(a.p0, b.p0);
  EXPECT_EQ(a.normal, b.normal);
  EXPECT_TRUE(throws_code([] { io::area_map_from_json(io::Json::object()); }, Errc::ParseError));
}

TEST(Geometry, TilesRoundTrip)
{
  const auto tiles = synthgen::reference_tiles();
  const auto back = io::tiles_from_json(io::parse_json(io::to_json(tiles).dump()));
  ASSERT_EQ(back.size(), tiles.size());
  for (std::size_t i = 0; i < tiles.size(); i += 37) {
    for (int k = 0; k < 9; ++k) {
      EXPECT_NEAR(back[i].matrix[k], tiles[i].matrix[k], 1e-9 * std::max(1.0, std::abs(tiles[i].matrix[k])));
    }
  }
  EXPECT_TRUE(throws_code([] { io::tiles_from_json(io::Json::object()); }, Errc::ParseError));
}

TEST(Models, BundleRoundTripPreservesPredictions)
{
  auto bundle = predictors::ModelBundle::historical_average_only();
  auto model = predictors::RecurrentRegressor::random(6, 3);
  model.normalization().mean = {1.0, 0.5, -0.2};
  model.normalization().scale = {2.0, 0.7, 1.1};
  bundle.predictors.at({AgentCategory::Adult, 1}) = predictors::Predictor::recurrent(model, 0.42);
  const auto back = io::model_bundle_from_json(io::parse_json(io::to_json(bundle).dump()));
  EXPECT_NO_THROW(back.require_complete());
  const auto & p = back.at(AgentCategory::Adult, 1);
  ASSERT_EQ(p.kind(), predictors::Predictor::Kind::Recurrent);
  EXPECT_EQ(p.validation_mae(), 0.42);
  EXPECT_EQ(p.model().parameters(), model.parameters());
  stream::SlidingWindow w;
  for (int k = 0; k < 30; ++k) {
    w.points.push_back({k, k / 30.0, "a", AgentCategory::Adult, {-6.0 + 0.04 * k, 2.0}});
  }
  const auto & line = synthgen::reference_area_map().pedestrian_line(geometry::Direction::LeftToRight, 1);
  EXPECT_EQ(*p.predict(w, line), model.predict(w, line));
}

TEST(Models, VersionAndShapesAreChecked)
{
  auto j = io::to_json(predictors::ModelBundle::historical_average_only());
  j.erase("version");
  EXPECT_TRUE(throws_code([&] { io::model_bundle_from_json(j); }, Errc::ParseError));

  auto bundle = predictors::ModelBundle::historical_average_only();
  bundle.predictors.at({AgentCategory::Kid, 0}) =
    predictors::Predictor::recurrent(predictors::RecurrentRegressor::random(4, 1));
  auto g = io::to_json(bundle);
  bool changed = false;
  for (auto & p : g.at("predictors")) {
    if (p.at("kind") == "gru") {
      p.at("weights")[0].at("values").erase(0);
      changed = true;
    }
  }
  ASSERT_TRUE(changed);
  EXPECT_TRUE(throws_code([&] { io::model_bundle_from_json(g); }, Errc::ParseError));
}

TEST(Models, TrainingConfigRoundTrip)
{
  predictors::TrainingConfig c{99, 12, 0.003, 7, 2, 16};
  const auto back = io::training_config_from_json(io::to_json(c));
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.hidden_size, 12);
  EXPECT_EQ(back.learning_rate, 0.003);
  EXPECT_EQ(back.epochs, 7);
  EXPECT_EQ(back.patience, 2);
  EXPECT_EQ(back.batch_size, 16);
}

TEST(Samples, JsonlRoundTrip)
{
  predictors::LabeledSample s;
  s.agent_id = "p0001";
  s.category = AgentCategory::Cyclist;
  s.q = 2;
  s.line = synthgen::reference_area_map().pedestrian_line(geometry::Direction::RightToLeft, 2);
  for (int k = 0; k < 30; ++k) {
    s.window.points.push_back({k + 10, (k + 10) / 30.0, "p0001", AgentCategory::Cyclist, {9.0 - 0.1 * k, 2.5}});
  }
  s.arrival_time = 3.25;
  s.annotation = {Awareness::Noticed, Reaction::Decelerate, RiskLevel::Risk2};
  const auto back = io::parse_samples_jsonl(io::samples_jsonl({s, s}));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].agent_id, s.agent_id);
  EXPECT_EQ(back[1].category, s.category);
  EXPECT_EQ(back[1].q, 2);
  EXPECT_EQ(back[1].arrival_time, 3.25);
  EXPECT_EQ(back[1].annotation.reaction, Reaction::Decelerate);
  EXPECT_EQ(back[1].annotation.risk_level, RiskLevel::Risk2);
  EXPECT_EQ(back[1].line.normal, s.line.normal);
  ASSERT_EQ(back[1].window.size(), 30u);
  EXPECT_EQ(back[1].window.back().position, s.window.back().position);
  EXPECT_EQ(back[1].window.back().frame, 39);
  const auto msg = error_text([] { io::parse_samples_jsonl("{}\n{oops\n", "d.jsonl"); });
  EXPECT_NE(msg.find("d.jsonl"), std::string::npos) << msg;
}

TEST(Thresholds, RoundTripWithDisabledAndMissingRules)
{
  auto cfg = risk::RiskThresholdConfig::defaults();
  cfg.categories[AgentCategory::Adult].areas[RiskArea::Further].vf = risk::ScenarioRule{false, {0, 0}};
  const auto back = io::thresholds_from_json(io::parse_json(io::to_json(cfg).dump()));
  EXPECT_EQ(back.categories.size(), 3u);
  for (const auto & [c, th] : cfg.categories) {
    EXPECT_EQ(back.category(c).mode, th.mode);
    for (const auto & [slot, at] : th.areas) {
      const auto & b = back.area(c, slot);
      EXPECT_EQ(b.counter_limit, at.counter_limit);
      EXPECT_EQ(b.pf->enabled, at.pf->enabled);
      EXPECT_EQ(b.vf->enabled, at.vf->enabled);
      if (at.pf->enabled) EXPECT_EQ(b.pf->interval, at.pf->interval);
      if (at.vf->enabled) EXPECT_EQ(b.vf->interval, at.vf->interval);
    }
  }
  auto j = io::to_json(cfg);
  j.at("categories").at("adult").at("areas").at("closer").erase("pf");
  const auto partial = io::thresholds_from_json(j);
  EXPECT_FALSE(partial.area(AgentCategory::Adult, RiskArea::Closer).pf.has_value());
  j.at("categories").at("adult").at("mode") = "sideways";
  EXPECT_TRUE(throws_code([&] { io::thresholds_from_json(j); }, Errc::ParseError));
}

TEST(Trace, EmptyCellsForUnavailable)
{
  TraceRow row;
  row.frame = 12;
  row.ped_id = "p0003";
  row.conflict_area = geometry::Area::A3_2;
  row.values.f_pf = -1.25;
  EXPECT_EQ(io::trace_csv_header(), "frame,ped_id,veh_id,area,c_pf,c_vf,f_pf,f_vf\n");
  EXPECT_EQ(io::trace_csv_row(row), "12,p0003,,3.2,,,-1.25,\n");
}

TEST(Episodes, JsonlRoundTrip)
{
  io::LabeledEpisode e;
  e.trace = {"p0009", AgentCategory::Kid, {}};
  PPetVector a;
  a.c_pf = -3.2;
  PPetVector b;
  b.f_vf = 1.1;
  b.c_vf = 0.0;
  e.trace.frames = {a, b, PPetVector{}};
  e.labels = {{RiskArea::Merged, true}};
  const auto back = io::parse_episodes_jsonl(io::episodes_jsonl({e}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].trace.ped_id, "p0009");
  EXPECT_EQ(back[0].trace.category, AgentCategory::Kid);
  EXPECT_EQ(back[0].trace.frames, e.trace.frames);
  EXPECT_EQ(back[0].labels, e.labels);
  const auto msg = error_text([] { io::parse_episodes_jsonl("\n{\"ped_id\":\"x\",\"category\":0,\"frames\":[[1,2]]}\n", "e.jsonl"); });
  EXPECT_NE(msg.find("e.jsonl:2"), std::string::npos) << msg;
}

TEST(Calibration, GridSpecRoundTrip)
{
  calibration::GridSpec g;
  g.pf = {true, -2.0, 1.0, -1.5, 1.5, 0.25};
  g.vf.enabled = false;
  g.counter_limits = {2, 3};
  const auto back = io::grid_spec_from_json(io::to_json(g));
  EXPECT_EQ(back.size(), g.size());
  EXPECT_EQ(back.pf.step, 0.25);
  EXPECT_EQ(back.pf.beta_min, -1.5);
  EXPECT_FALSE(back.vf.enabled);
  EXPECT_EQ(back.counter_limits, g.counter_limits);
}

TEST(Calibration, MetricsJsonMarksUndefined)
{
  const auto j = io::to_json(calibration::metrics({0, 4, 0, 2}));
  EXPECT_TRUE(j.at("precision").is_null());
  EXPECT_EQ(j.at("accuracy").get<double>(), 4.0 / 6.0);
}

TEST(Synthetic, SpecAndTruthRoundTrip)
{
  synthgen::ScenarioSpec spec;
  spec.seed = 17;
  spec.duration = 45;
  spec.kids = 3;
  spec.vehicle_rate = 0.2;
  const auto s2 = io::scenario_spec_from_json(io::to_json(spec));
  EXPECT_EQ(io::to_json(s2), io::to_json(spec));

  const auto sc = synthgen::generate(spec);
  const auto truth = io::ground_truth_from_json(io::parse_json(io::to_json(sc.truth).dump()));
  ASSERT_EQ(truth.agents.size(), sc.truth.agents.size());
  for (std::size_t i = 0; i < truth.agents.size(); ++i) {
    const auto & a = truth.agents[i];
    const auto & b = sc.truth.agents[i];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.category, b.category);
    EXPECT_EQ(a.direction, b.direction);
    EXPECT_EQ(a.crossing_times, b.crossing_times);
    EXPECT_EQ(a.awareness, b.awareness);
    EXPECT_EQ(a.reaction, b.reaction);
    EXPECT_EQ(a.risk, b.risk);
  }
}

}  // namespace
