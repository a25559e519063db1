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

#include "ppet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ppet::io
{

using geometry::Area;
using geometry::WorldPoint;

namespace
{

/// Runs a JSON conversion, mapping library type errors to Errc::ParseError.
template <typename F>
auto guarded(const char * what, F && f)
{
  try {
    return f();
  } catch (const nlohmann::json::exception & e) {
    fail(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

/// Prefixes conversion errors of one JSON-lines record with its location.
template <typename F>
auto at_line(const std::string & source, std::size_t n, F && f)
{
  try {
    return f();
  } catch (const Error & e) {
    const std::string where = source + ":" + std::to_string(n);
    std::string msg = e.what();
    if (e.code() != Errc::ParseError || msg.find(where) != std::string::npos) {
      throw;
    }
    const std::string prefix = std::string(to_string(Errc::ParseError)) + ": ";
    if (msg.rfind(prefix, 0) == 0) {
      msg.erase(0, prefix.size());
    }
    fail(Errc::ParseError, where + ": " + msg);
  }
}

Json point(WorldPoint p) { return Json::array({p.x, p.y}); }

WorldPoint point_from(const Json & j)
{
  if (!j.is_array() || j.size() != 2) {
    fail(Errc::ParseError, "expected a [x, y] pair");
  }
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json optional_number(const std::optional<double> & v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json & j)
{
  if (j.is_null()) {
    return std::nullopt;
  }
  return j.get<double>();
}

AgentCategory category_from(const Json & j)
{
  const std::string s = j.is_number_integer() ? std::to_string(j.get<int>()) : j.get<std::string>();
  const auto c = parse_category(s);
  if (!c) {
    fail(Errc::ParseError, "unknown category '" + s + "'");
  }
  return *c;
}

RiskArea risk_area_from(const std::string & s)
{
  for (RiskArea a : {RiskArea::Closer, RiskArea::Further, RiskArea::Merged}) {
    if (to_string(a) == s) {
      return a;
    }
  }
  fail(Errc::ParseError, "unknown risk area '" + s + "'");
}

std::string_view awareness_name(Awareness a) { return a == Awareness::Noticed ? "noticed" : "did_not_notice"; }

Awareness awareness_from(const std::string & s)
{
  if (s == "noticed") {
    return Awareness::Noticed;
  }
  if (s == "did_not_notice") {
    return Awareness::DidNotNotice;
  }
  fail(Errc::ParseError, "unknown awareness '" + s + "'");
}

std::string_view reaction_name(Reaction r)
{
  switch (r) {
    case Reaction::None: return "none";
    case Reaction::Decelerate: return "decelerate";
    case Reaction::Accelerate: return "accelerate";
  }
  return "none";
}

Reaction reaction_from(const std::string & s)
{
  for (Reaction r : {Reaction::None, Reaction::Decelerate, Reaction::Accelerate}) {
    if (reaction_name(r) == s) {
      return r;
    }
  }
  fail(Errc::ParseError, "unknown reaction '" + s + "'");
}

geometry::Direction direction_from(const std::string & s)
{
  for (auto d : {geometry::Direction::LeftToRight, geometry::Direction::RightToLeft, geometry::Direction::Unknown}) {
    if (geometry::to_string(d) == s) {
      return d;
    }
  }
  fail(Errc::ParseError, "unknown direction '" + s + "'");
}

Json line_json(const geometry::TargetLine & l)
{
  return {{"p0", point(l.p0)}, {"p1", point(l.p1)}, {"normal", point(l.normal)}};
}

geometry::TargetLine line_from(const Json & j)
{
  return {point_from(j.at("p0")), point_from(j.at("p1")), point_from(j.at("normal"))};
}

std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
bool parse_number(const std::string & s, T & out)
{
  const auto * end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

/// Splits JSON-lines text, skipping blank lines; returns (1-based line number, line).
std::vector<std::pair<std::size_t, std::string>> json_lines(const std::string & text)
{
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      out.emplace_back(n, line);
    }
  }
  return out;
}

/// One JSON-lines record; errors name the line within the whole file.
Json parse_record(const std::string & line, const std::string & source, std::size_t n)
{
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::parse_error &) {
    fail(Errc::ParseError, source + ":" + std::to_string(n) + ": malformed JSON");
  }
}

Json rule_json(const std::optional<risk::ScenarioRule> & r)
{
  if (!r || !r->enabled) {
    return nullptr;
  }
  return Json::array({r->interval.alpha, r->interval.beta});
}

risk::ScenarioRule rule_from(const Json & j)
{
  if (j.is_null()) {
    return {false, {0.0, 0.0}};
  }
  if (!j.is_array() || j.size() != 2) {
    fail(Errc::ParseError, "threshold interval must be [alpha, beta] or null");
  }
  return {true, {j.at(0).get<double>(), j.at(1).get<double>()}};
}

}  // namespace

std::string read_text(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::ParseError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::InvalidArgument, "cannot write " + path.string());
  }
  out << text;
}

Json parse_json(const std::string & text, const std::string & source)
{
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    fail(Errc::ParseError, source + ":" + std::to_string(line) + ": malformed JSON");
  }
}

Json load_json(const std::filesystem::path & path) { return parse_json(read_text(path), path.string()); }

std::string format_double(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// observation stream -------------------------------------------------------------------------

RawStream parse_stream_csv_raw(const std::string & text, const std::string & source)
{
  RawStream out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  const auto bad = [&](const std::string & msg) { fail(Errc::ParseError, source + ":" + std::to_string(n) + ": " + msg); };
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (!header) {
      if (line == "frame,t,id,category,x,y") {
        out.pixel = false;
      } else if (line == "frame,t,id,category,u,v") {
        out.pixel = true;
      } else {
        bad("unexpected header '" + line + "'");
      }
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 6) {
      bad("expected 6 columns");
    }
    stream::Observation obs;
    if (!parse_number(cells[0], obs.frame) || !parse_number(cells[1], obs.t) ||
        !parse_number(cells[4], obs.position.x) || !parse_number(cells[5], obs.position.y)) {
      bad("malformed number");
    }
    if (cells[2].empty()) {
      bad("empty agent id");
    }
    obs.agent_id = cells[2];
    const auto cat = parse_category(cells[3]);
    if (!cat) {
      bad("unknown category '" + cells[3] + "'");
    }
    obs.category = *cat;
    out.observations.push_back(std::move(obs));
  }
  return out;
}

std::vector<stream::Observation> parse_stream_csv(
  const std::string & text, const geometry::TileGrid * tiles, const std::string & source)
{
  auto raw = parse_stream_csv_raw(text, source);
  if (raw.pixel) {
    if (!tiles || tiles->empty()) {
      fail(Errc::InvalidArgument, source + ": pixel stream needs a tile grid");
    }
    for (auto & o : raw.observations) {
      o.position = tiles->transform({o.position.x, o.position.y});
    }
  }
  return std::move(raw.observations);
}

std::vector<stream::Observation> load_stream_csv(const std::filesystem::path & path, const geometry::TileGrid * tiles)
{
  return parse_stream_csv(read_text(path), tiles, path.string());
}

std::string stream_csv(const std::vector<stream::Observation> & observations)
{
  std::string out = "frame,t,id,category,x,y\n";
  for (const auto & o : observations) {
    out += std::to_string(o.frame) + ',' + format_double(o.t) + ',' + o.agent_id + ',' +
           std::to_string(code(o.category)) + ',' + format_double(o.position.x) + ',' +
           format_double(o.position.y) + '\n';
  }
  return out;
}

// geometry -----------------------------------------------------------------------------------

geometry::AreaMap area_map_from_json(const Json & j)
{
  return guarded("area map", [&] {
    std::map<Area, geometry::Polygon> areas;
    for (const auto & [name, verts] : j.at("areas").items()) {
      const auto a = geometry::parse_area(name);
      if (!a) {
        fail(Errc::InvalidAreaMap, "unknown area '" + name + "'");
      }
      geometry::Polygon poly;
      for (const auto & v : verts) {
        poly.push_back(point_from(v));
      }
      areas[*a] = std::move(poly);
    }
    std::map<std::string, geometry::TargetLine> lines;
    for (const auto & [name, l] : j.at("target_lines").items()) {
      lines[name] = line_from(l);
    }
    return geometry::AreaMap(std::move(areas), std::move(lines));
  });
}

Json to_json(const geometry::AreaMap & map)
{
  Json areas = Json::object();
  for (const auto & [a, poly] : map.areas()) {
    Json verts = Json::array();
    for (const auto & p : poly) {
      verts.push_back(point(p));
    }
    areas[std::string(geometry::to_string(a))] = verts;
  }
  Json lines = Json::object();
  for (const auto & [name, l] : map.target_lines()) {
    lines[name] = line_json(l);
  }
  return {{"areas", areas}, {"target_lines", lines}};
}

std::vector<geometry::HomographyTile> tiles_from_json(const Json & j)
{
  return guarded("tile grid", [&] {
    if (!j.is_array()) {
      fail(Errc::ParseError, "tile grid must be a JSON array");
    }
    std::vector<geometry::HomographyTile> tiles;
    for (const auto & t : j) {
      const auto & px = t.at("pixel");
      const auto & wd = t.at("world");
      if (px.size() != 4 || wd.size() != 4) {
        fail(Errc::ParseError, "each tile needs four pixel and four world anchors");
      }
      std::array<geometry::PixelPoint, 4> pixel;
      std::array<WorldPoint, 4> world;
      for (std::size_t k = 0; k < 4; ++k) {
        const auto p = point_from(px.at(k));
        pixel[k] = {p.x, p.y};
        world[k] = point_from(wd.at(k));
      }
      tiles.push_back(geometry::HomographyTile::from_anchors(pixel, world));
    }
    return tiles;
  });
}

Json to_json(const std::vector<geometry::HomographyTile> & tiles)
{
  Json out = Json::array();
  for (const auto & t : tiles) {
    Json px = Json::array();
    Json wd = Json::array();
    for (std::size_t k = 0; k < 4; ++k) {
      px.push_back(Json::array({t.pixel[k].u, t.pixel[k].v}));
      wd.push_back(point(t.world[k]));
    }
    out.push_back({{"pixel", px}, {"world", wd}, {"matrix", t.matrix}, {"residual", t.corner_residual()}});
  }
  return out;
}

// predictors ---------------------------------------------------------------------------------

predictors::TrainingConfig training_config_from_json(const Json & j)
{
  return guarded("training config", [&] {
    predictors::TrainingConfig c;
    c.seed = j.value("seed", c.seed);
    c.hidden_size = j.value("hidden_size", c.hidden_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.patience = j.value("patience", c.patience);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (c.hidden_size < 2 || !(c.learning_rate > 0) || c.epochs < 1 || c.patience < 1 || c.batch_size < 1) {
      fail(Errc::InvalidArgument, "training config values out of range");
    }
    return c;
  });
}

Json to_json(const predictors::TrainingConfig & c)
{
  return {{"seed", c.seed},         {"hidden_size", c.hidden_size}, {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},     {"patience", c.patience},       {"batch_size", c.batch_size}};
}

predictors::ModelBundle model_bundle_from_json(const Json & j)
{
  return guarded("model bundle", [&] {
    if (!j.contains("version")) {
      fail(Errc::ParseError, "model bundle has no version field");
    }
    if (j.at("version").get<int>() != predictors::ModelBundle::kVersion) {
      fail(Errc::ParseError, "unsupported model bundle version " + j.at("version").dump());
    }
    predictors::ModelBundle bundle;
    bundle.split_ratio = j.value("split_ratio", 0.8);
    for (const auto & p : j.at("predictors")) {
      const AgentCategory cat = category_from(p.at("category"));
      const int q = p.at("q").get<int>();
      const double mae = p.value("validation_mae", 0.0);
      const std::string kind = p.at("kind").get<std::string>();
      if (kind == "ha") {
        bundle.predictors[{cat, q}] = predictors::Predictor::historical_average(mae);
        continue;
      }
      if (kind != "gru") {
        fail(Errc::ParseError, "unknown predictor kind '" + kind + "'");
      }
      predictors::RecurrentRegressor model(p.at("hidden_size").get<int>());
      const auto & norm = p.at("normalization");
      for (std::size_t k = 0; k < 3; ++k) {
        model.normalization().mean[k] = norm.at("mean").at(k).get<double>();
        model.normalization().scale[k] = norm.at("scale").at(k).get<double>();
      }
      for (const auto & w : p.at("weights")) {
        const auto & block = model.block(w.at("name").get<std::string>());
        if (w.at("shape").at(0).get<int>() != block.rows || w.at("shape").at(1).get<int>() != block.cols) {
          fail(Errc::ParseError, "weight block " + block.name + " has the wrong shape");
        }
        const auto values = w.at("values").get<std::vector<double>>();
        if (values.size() != block.size()) {
          fail(Errc::ParseError, "weight block " + block.name + " has the wrong length");
        }
        std::copy(values.begin(), values.end(), model.parameters().begin() + static_cast<std::ptrdiff_t>(block.offset));
      }
      model.check_finite();
      bundle.predictors[{cat, q}] = predictors::Predictor::recurrent(std::move(model), mae);
    }
    return bundle;
  });
}

Json to_json(const predictors::ModelBundle & bundle)
{
  Json preds = Json::array();
  for (const auto & [key, p] : bundle.predictors) {
    Json e{{"category", std::string(to_string(key.first))},
           {"q", key.second},
           {"validation_mae", p.validation_mae()}};
    if (p.kind() == predictors::Predictor::Kind::HistoricalAverage) {
      e["kind"] = "ha";
    } else {
      const auto & m = p.model();
      e["kind"] = "gru";
      e["hidden_size"] = m.hidden_size();
      e["normalization"] = {{"mean", m.normalization().mean}, {"scale", m.normalization().scale}};
      Json weights = Json::array();
      for (const auto & b : m.blocks()) {
        const auto first = m.parameters().begin() + static_cast<std::ptrdiff_t>(b.offset);
        weights.push_back({{"name", b.name},
                           {"shape", Json::array({b.rows, b.cols})},
                           {"values", std::vector<double>(first, first + static_cast<std::ptrdiff_t>(b.size()))}});
      }
      e["weights"] = weights;
    }
    preds.push_back(e);
  }
  return {{"version", predictors::ModelBundle::kVersion}, {"split_ratio", bundle.split_ratio}, {"predictors", preds}};
}

Json to_json(const predictors::LabeledSample & s)
{
  Json window = Json::array();
  for (const auto & o : s.window.points) {
    window.push_back(Json::array({o.frame, o.t, o.position.x, o.position.y}));
  }
  return {{"agent_id", s.agent_id},
          {"category", std::string(to_string(s.category))},
          {"q", s.q},
          {"line", line_json(s.line)},
          {"window", window},
          {"arrival_time", s.arrival_time},
          {"awareness", std::string(awareness_name(s.annotation.awareness))},
          {"reaction", std::string(reaction_name(s.annotation.reaction))},
          {"risk_level", static_cast<int>(s.annotation.risk_level)}};
}

predictors::LabeledSample labeled_sample_from_json(const Json & j)
{
  return guarded("labeled sample", [&] {
    predictors::LabeledSample s;
    s.agent_id = j.at("agent_id").get<std::string>();
    s.category = category_from(j.at("category"));
    s.q = j.at("q").get<int>();
    s.line = line_from(j.at("line"));
    for (const auto & row : j.at("window")) {
      stream::Observation o;
      o.frame = row.at(0).get<std::int64_t>();
      o.t = row.at(1).get<double>();
      o.agent_id = s.agent_id;
      o.category = s.category;
      o.position = {row.at(2).get<double>(), row.at(3).get<double>()};
      s.window.points.push_back(o);
    }
    s.arrival_time = j.at("arrival_time").get<double>();
    s.annotation.awareness = awareness_from(j.value("awareness", std::string("did_not_notice")));
    s.annotation.reaction = reaction_from(j.value("reaction", std::string("none")));
    const int level = j.value("risk_level", 0);
    if (level < 0 || level > 2) {
      fail(Errc::ParseError, "risk level must be 0, 1 or 2");
    }
    s.annotation.risk_level = static_cast<RiskLevel>(level);
    return s;
  });
}

std::string samples_jsonl(const std::vector<predictors::LabeledSample> & samples)
{
  std::string out;
  for (const auto & s : samples) {
    out += to_json(s).dump() + '\n';
  }
  return out;
}

std::vector<predictors::LabeledSample> parse_samples_jsonl(const std::string & text, const std::string & source)
{
  std::vector<predictors::LabeledSample> out;
  for (const auto & [n, line] : json_lines(text)) {
    out.push_back(at_line(source, n, [&] { return labeled_sample_from_json(parse_record(line, source, n)); }));
  }
  return out;
}

// risk ---------------------------------------------------------------------------------------

risk::RiskThresholdConfig thresholds_from_json(const Json & j)
{
  return guarded("threshold config", [&] {
    risk::RiskThresholdConfig cfg;
    for (const auto & [name, c] : j.at("categories").items()) {
      const AgentCategory cat = category_from(Json(name));
      if (!is_pedestrian(cat)) {
        fail(Errc::ParseError, "thresholds are defined for pedestrian categories only");
      }
      risk::CategoryThresholds ct;
      const std::string mode = c.value("mode", std::string("per_area"));
      if (mode == "per_area") {
        ct.mode = risk::ThresholdMode::PerArea;
      } else if (mode == "merged") {
        ct.mode = risk::ThresholdMode::MergedArea;
      } else {
        fail(Errc::ParseError, "unknown threshold mode '" + mode + "'");
      }
      for (const auto & [area_name, a] : c.at("areas").items()) {
        risk::AreaThresholds th;
        if (a.contains("pf")) {
          th.pf = rule_from(a.at("pf"));
        }
        if (a.contains("vf")) {
          th.vf = rule_from(a.at("vf"));
        }
        th.counter_limit = a.at("counter").get<int>();
        ct.areas[risk_area_from(area_name)] = th;
      }
      cfg.categories[cat] = std::move(ct);
    }
    cfg.validate();
    return cfg;
  });
}

Json to_json(const risk::AreaThresholds & th)
{
  Json a = Json::object();
  if (th.pf) {
    a["pf"] = rule_json(th.pf);
  }
  if (th.vf) {
    a["vf"] = rule_json(th.vf);
  }
  a["counter"] = th.counter_limit;
  return a;
}

Json to_json(const risk::RiskThresholdConfig & config)
{
  Json cats = Json::object();
  for (const auto & [cat, ct] : config.categories) {
    Json areas = Json::object();
    for (const auto & [area, th] : ct.areas) {
      areas[std::string(to_string(area))] = to_json(th);
    }
    cats[std::string(to_string(cat))] = {
      {"mode", ct.mode == risk::ThresholdMode::PerArea ? "per_area" : "merged"}, {"areas", areas}};
  }
  return {{"categories", cats}};
}

Json to_json(const risk::RiskScenario & s)
{
  return {{"frame", s.frame},
          {"t", s.t},
          {"ped_id", s.ped_id},
          {"ped_position", point(s.ped_position)},
          {"veh_id", s.veh_id.empty() ? Json(nullptr) : Json(s.veh_id)},
          {"veh_position", s.veh_id.empty() ? Json(nullptr) : point(s.veh_position)},
          {"area", std::string(to_string(s.area))},
          {"conflict_area", std::string(geometry::to_string(s.conflict_area))}};
}

std::string scenarios_jsonl(const std::vector<risk::RiskScenario> & scenarios)
{
  std::string out;
  for (const auto & s : scenarios) {
    out += to_json(s).dump() + '\n';
  }
  return out;
}

std::string trace_csv_header() { return "frame,ped_id,veh_id,area,c_pf,c_vf,f_pf,f_vf\n"; }

std::string trace_csv_row(const TraceRow & row)
{
  const auto cell = [](const std::optional<double> & v) { return v ? format_double(*v) : std::string(); };
  return std::to_string(row.frame) + ',' + row.ped_id + ',' + row.veh_id.value_or("") + ',' +
         std::string(geometry::to_string(row.conflict_area)) + ',' + cell(row.values.c_pf) + ',' +
         cell(row.values.c_vf) + ',' + cell(row.values.f_pf) + ',' + cell(row.values.f_vf) + '\n';
}

std::string episodes_jsonl(const std::vector<LabeledEpisode> & episodes)
{
  std::string out;
  for (const auto & e : episodes) {
    Json frames = Json::array();
    for (const auto & f : e.trace.frames) {
      frames.push_back(Json::array(
        {optional_number(f.c_pf), optional_number(f.c_vf), optional_number(f.f_pf), optional_number(f.f_vf)}));
    }
    Json labels = Json::object();
    for (const auto & [slot, r2] : e.labels) {
      labels[std::string(to_string(slot))] = r2;
    }
    out += Json{{"ped_id", e.trace.ped_id},
                {"category", std::string(to_string(e.trace.category))},
                {"frames", frames},
                {"labels", labels}}
             .dump() +
           '\n';
  }
  return out;
}

std::vector<LabeledEpisode> parse_episodes_jsonl(const std::string & text, const std::string & source)
{
  std::vector<LabeledEpisode> out;
  for (const auto & [n, line] : json_lines(text)) {
    const Json j = parse_record(line, source, n);
    out.push_back(at_line(source, n, [&] { return guarded("episode", [&] {
      LabeledEpisode e;
      e.trace.ped_id = j.at("ped_id").get<std::string>();
      e.trace.category = category_from(j.at("category"));
      for (const auto & f : j.at("frames")) {
        if (f.size() != 4) {
          fail(Errc::ParseError, source + ":" + std::to_string(n) + ": frame needs four P-PET values");
        }
        e.trace.frames.push_back({optional_from(f.at(0)), optional_from(f.at(1)), optional_from(f.at(2)),
                                  optional_from(f.at(3))});
      }
      for (const auto & [slot, r2] : j.at("labels").items()) {
        e.labels[risk_area_from(slot)] = r2.get<bool>();
      }
      return e;
    }); }));
  }
  return out;
}

// calibration --------------------------------------------------------------------------------

Json to_json(const calibration::Metrics & m)
{
  return {{"accuracy", optional_number(m.accuracy)},
          {"precision", optional_number(m.precision)},
          {"recall", optional_number(m.recall)},
          {"f1", optional_number(m.f1)}};
}

Json to_json(const calibration::ConfusionCounts & c)
{
  return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

namespace
{

Json axis_json(const calibration::AxisSpec & a)
{
  return {{"enabled", a.enabled},   {"alpha_min", a.alpha_min}, {"alpha_max", a.alpha_max},
          {"beta_min", a.beta_min}, {"beta_max", a.beta_max},   {"step", a.step}};
}

calibration::AxisSpec axis_from(const Json & j)
{
  calibration::AxisSpec a;
  a.enabled = j.value("enabled", a.enabled);
  a.alpha_min = j.value("alpha_min", a.alpha_min);
  a.alpha_max = j.value("alpha_max", a.alpha_max);
  a.beta_min = j.value("beta_min", a.beta_min);
  a.beta_max = j.value("beta_max", a.beta_max);
  a.step = j.value("step", a.step);
  return a;
}

}  // namespace

Json to_json(const calibration::GridSpec & g)
{
  return {{"pf", axis_json(g.pf)}, {"vf", axis_json(g.vf)}, {"counter_limits", g.counter_limits}};
}

calibration::GridSpec grid_spec_from_json(const Json & j)
{
  return guarded("grid spec", [&] {
    calibration::GridSpec g;
    if (j.contains("pf")) {
      g.pf = axis_from(j.at("pf"));
    }
    if (j.contains("vf")) {
      g.vf = axis_from(j.at("vf"));
    }
    if (j.contains("counter_limits")) {
      g.counter_limits = j.at("counter_limits").get<std::vector<int>>();
    }
    return g;
  });
}

Json calibration_report(const calibration::CalibrationResult & r, const calibration::GridSpec & g, std::uint64_t seed)
{
  return {{"best_config", to_json(r.best)},
          {"cv_accuracy", r.cv_accuracy},
          {"test_metrics", to_json(r.test_metrics)},
          {"test_counts", to_json(r.test_counts)},
          {"train_units", r.train_units},
          {"test_units", r.test_units},
          {"grid_spec", to_json(g)},
          {"seed", seed}};
}

std::string scores_csv(const std::vector<calibration::GridPointScore> & scores)
{
  std::string out = "pf_alpha,pf_beta,vf_alpha,vf_beta,counter,cv_accuracy\n";
  const auto rule = [](const std::optional<risk::ScenarioRule> & r) {
    if (!r || !r->enabled) {
      return std::string(",");
    }
    return format_double(r->interval.alpha) + ',' + format_double(r->interval.beta);
  };
  for (const auto & s : scores) {
    out += rule(s.thresholds.pf) + ',' + rule(s.thresholds.vf) + ',' + std::to_string(s.thresholds.counter_limit) +
           ',' + format_double(s.cv_accuracy) + '\n';
  }
  return out;
}

// synthgen -----------------------------------------------------------------------------------

synthgen::ScenarioSpec scenario_spec_from_json(const Json & j)
{
  return guarded("scenario spec", [&] {
    synthgen::ScenarioSpec s;
    s.seed = j.value("seed", s.seed);
    s.duration = j.value("duration", s.duration);
    s.fps = j.value("fps", s.fps);
    s.adults = j.value("adults", s.adults);
    s.kids = j.value("kids", s.kids);
    s.cyclists = j.value("cyclists", s.cyclists);
    s.adult_crossing = j.value("adult_crossing", s.adult_crossing);
    s.kid_crossing = j.value("kid_crossing", s.kid_crossing);
    s.cyclist_crossing = j.value("cyclist_crossing", s.cyclist_crossing);
    s.speed_spread = j.value("speed_spread", s.speed_spread);
    s.kid_jitter = j.value("kid_jitter", s.kid_jitter);
    s.vehicle_rate = j.value("vehicle_rate", s.vehicle_rate);
    s.vehicle_speed = j.value("vehicle_speed", s.vehicle_speed);
    s.vehicle_speed_spread = j.value("vehicle_speed_spread", s.vehicle_speed_spread);
    s.yield_probability = j.value("yield_probability", s.yield_probability);
    s.notice_probability = j.value("notice_probability", s.notice_probability);
    s.accelerate_share = j.value("accelerate_share", s.accelerate_share);
    s.position_noise = j.value("position_noise", s.position_noise);
    return s;
  });
}

Json to_json(const synthgen::ScenarioSpec & s)
{
  return {{"seed", s.seed},
          {"duration", s.duration},
          {"fps", s.fps},
          {"adults", s.adults},
          {"kids", s.kids},
          {"cyclists", s.cyclists},
          {"adult_crossing", s.adult_crossing},
          {"kid_crossing", s.kid_crossing},
          {"cyclist_crossing", s.cyclist_crossing},
          {"speed_spread", s.speed_spread},
          {"kid_jitter", s.kid_jitter},
          {"vehicle_rate", s.vehicle_rate},
          {"vehicle_speed", s.vehicle_speed},
          {"vehicle_speed_spread", s.vehicle_speed_spread},
          {"yield_probability", s.yield_probability},
          {"notice_probability", s.notice_probability},
          {"accelerate_share", s.accelerate_share},
          {"position_noise", s.position_noise}};
}

Json to_json(const synthgen::GroundTruth & truth)
{
  Json agents = Json::array();
  for (const auto & a : truth.agents) {
    Json crossings = Json::object();
    for (const auto & [q, t] : a.crossing_times) {
      crossings[std::to_string(q)] = t;
    }
    Json risk = Json::object();
    for (const auto & [slot, level] : a.risk) {
      risk[std::string(to_string(slot))] = static_cast<int>(level);
    }
    agents.push_back({{"id", a.id},
                      {"category", std::string(to_string(a.category))},
                      {"direction", std::string(geometry::to_string(a.direction))},
                      {"spawn_time", a.spawn_time},
                      {"nominal_speed", a.nominal_speed},
                      {"crossing_times", crossings},
                      {"awareness", std::string(awareness_name(a.awareness))},
                      {"reaction", std::string(reaction_name(a.reaction))},
                      {"risk", risk}});
  }
  return {{"agents", agents}};
}

synthgen::GroundTruth ground_truth_from_json(const Json & j)
{
  return guarded("ground truth", [&] {
    synthgen::GroundTruth truth;
    for (const auto & a : j.at("agents")) {
      synthgen::AgentTruth t;
      t.id = a.at("id").get<std::string>();
      t.category = category_from(a.at("category"));
      t.direction = direction_from(a.value("direction", std::string("unknown")));
      t.spawn_time = a.value("spawn_time", 0.0);
      t.nominal_speed = a.value("nominal_speed", 0.0);
      for (const auto & [q, v] : a.at("crossing_times").items()) {
        t.crossing_times[std::stoi(q)] = v.get<double>();
      }
      t.awareness = awareness_from(a.value("awareness", std::string("did_not_notice")));
      t.reaction = reaction_from(a.value("reaction", std::string("none")));
      for (const auto & [slot, level] : a.at("risk").items()) {
        const int l = level.get<int>();
        if (l < 0 || l > 2) {
          fail(Errc::ParseError, "risk level must be 0, 1 or 2");
        }
        t.risk[risk_area_from(slot)] = static_cast<RiskLevel>(l);
      }
      truth.agents.push_back(std::move(t));
    }
    return truth;
  });
}

}  // namespace ppet::io
