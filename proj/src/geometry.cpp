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

#include "ppet/geometry.hpp"

#include "ppet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ppet::geometry
{

double dot(WorldPoint a, WorldPoint b) { return a.x * b.x + a.y * b.y; }
double cross(WorldPoint a, WorldPoint b) { return a.x * b.y - a.y * b.x; }
double norm(WorldPoint a) { return std::hypot(a.x, a.y); }
double distance(WorldPoint a, WorldPoint b) { return norm(a - b); }

namespace
{

template <typename P>
WorldPoint as_world(const P & p)
{
  if constexpr (std::is_same_v<P, PixelPoint>) {
    return {p.u, p.v};
  } else {
    return p;
  }
}

template <typename P>
void check_anchor_set(std::span<const P, 4> pts, const char * label)
{
  double scale = 0.0;
  for (const auto & p : pts) {
    const auto w = as_world(p);
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      fail(Errc::DegenerateAnchors, std::string(label) + " anchor is not finite");
    }
    scale = std::max({scale, std::abs(w.x), std::abs(w.y)});
  }
  scale = std::max(scale, 1.0);
  const double dup_tol = 1e-12 * scale;
  const double col_tol = 1e-10 * scale * scale;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (distance(as_world(pts[i]), as_world(pts[j])) <= dup_tol) {
        fail(Errc::DegenerateAnchors, std::string("duplicate ") + label + " anchors");
      }
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        const auto a = as_world(pts[i]);
        const auto b = as_world(pts[j]);
        const auto c = as_world(pts[k]);
        if (std::abs(cross(b - a, c - a)) <= col_tol) {
          fail(Errc::DegenerateAnchors, std::string("three collinear ") + label + " anchors");
        }
      }
    }
  }
}

bool segments_cross(WorldPoint a, WorldPoint b, WorldPoint c, WorldPoint d)
{
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double point_segment_distance(WorldPoint p, WorldPoint a, WorldPoint b)
{
  const auto ab = b - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return distance(p, a + s * ab);
}

}  // namespace

Matrix3 solve_homography(std::span<const PixelPoint, 4> pixel, std::span<const WorldPoint, 4> world)
{
  check_anchor_set(pixel, "pixel");
  check_anchor_set(world, "world");

  // Rows: [u v 1 0 0 0 -ux -vx | x], [0 0 0 u v 1 -uy -vy | y]
  std::array<std::array<double, 9>, 8> a{};
  for (int k = 0; k < 4; ++k) {
    const double u = pixel[k].u;
    const double v = pixel[k].v;
    const double x = world[k].x;
    const double y = world[k].y;
    a[2 * k] = {u, v, 1, 0, 0, 0, -u * x, -v * x, x};
    a[2 * k + 1] = {0, 0, 0, u, v, 1, -u * y, -v * y, y};
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
        pivot = r;
      }
    }
    if (std::abs(a[pivot][col]) < 1e-14) {
      fail(Errc::DegenerateAnchors, "singular anchor system");
    }
    std::swap(a[col], a[pivot]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) {
        continue;
      }
      for (int c = col; c < 9; ++c) {
        a[r][c] -= f * a[col][c];
      }
    }
  }
  std::array<double, 8> h{};
  for (int r = 7; r >= 0; --r) {
    double s = a[r][8];
    for (int c = r + 1; c < 8; ++c) {
      s -= a[r][c] * h[c];
    }
    h[r] = s / a[r][r];
  }
  Matrix3 m{h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0};
  for (double e : m) {
    if (!std::isfinite(e)) {
      fail(Errc::DegenerateAnchors, "non-finite homography");
    }
  }
  return m;
}

WorldPoint project(const Matrix3 & m, PixelPoint p)
{
  const double x = m[0] * p.u + m[1] * p.v + m[2];
  const double y = m[3] * p.u + m[4] * p.v + m[5];
  const double w = m[6] * p.u + m[7] * p.v + m[8];
  if (std::abs(w) < 1e-12) {
    fail(Errc::ProjectiveSingularity, "third homogeneous coordinate vanishes");
  }
  return {x / w, y / w};
}

double determinant(const Matrix3 & m)
{
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Matrix3 invert(const Matrix3 & m)
{
  const double det = determinant(m);
  if (!std::isfinite(det) || std::abs(det) < 1e-15) {
    fail(Errc::ProjectiveSingularity, "matrix is not invertible");
  }
  Matrix3 r{
    m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
    m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
    m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
  const double s = std::abs(r[8]) > 1e-12 ? r[8] : det;
  for (double & v : r) {
    v /= s;
  }
  return r;
}

HomographyTile HomographyTile::from_anchors(
  const std::array<PixelPoint, 4> & pixel, const std::array<WorldPoint, 4> & world)
{
  HomographyTile t;
  t.pixel = pixel;
  t.world = world;
  t.matrix = solve_homography(std::span<const PixelPoint, 4>(pixel), std::span<const WorldPoint, 4>(world));
  return t;
}

bool HomographyTile::contains(PixelPoint p) const
{
  const WorldPoint q{p.u, p.v};
  bool has_pos = false;
  bool has_neg = false;
  for (int k = 0; k < 4; ++k) {
    const WorldPoint a{pixel[k].u, pixel[k].v};
    const WorldPoint b{pixel[(k + 1) % 4].u, pixel[(k + 1) % 4].v};
    const double c = cross(b - a, q - a);
    has_pos |= c > 0;
    has_neg |= c < 0;
  }
  return !(has_pos && has_neg);
}

double HomographyTile::pixel_distance(PixelPoint p) const
{
  if (contains(p)) {
    return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const WorldPoint a{pixel[k].u, pixel[k].v};
    const WorldPoint b{pixel[(k + 1) % 4].u, pixel[(k + 1) % 4].v};
    best = std::min(best, point_segment_distance({p.u, p.v}, a, b));
  }
  return best;
}

double HomographyTile::corner_residual() const
{
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    worst = std::max(worst, distance(project(matrix, pixel[k]), world[k]));
  }
  return worst;
}

TileGrid::TileGrid(std::vector<HomographyTile> tiles, FallbackPolicy policy)
: tiles_(std::move(tiles)), policy_(policy)
{
}

std::optional<std::size_t> TileGrid::find_tile(PixelPoint p) const
{
  for (std::size_t i = 0; i < tiles_.size(); ++i) {
    if (tiles_[i].contains(p)) {
      return i;
    }
  }
  if (policy_ == FallbackPolicy::Reject || tiles_.empty()) {
    return std::nullopt;
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tiles_.size(); ++i) {
    const double d = tiles_[i].pixel_distance(p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

WorldPoint TileGrid::transform(PixelPoint p) const
{
  if (tiles_.empty()) {
    fail(Errc::OutsideCalibratedRegion, "empty tile grid");
  }
  const auto idx = find_tile(p);
  if (!idx) {
    std::ostringstream os;
    os << "pixel (" << p.u << ", " << p.v << ") lies outside every tile";
    fail(Errc::OutsideCalibratedRegion, os.str());
  }
  return project(tiles_[*idx].matrix, p);
}

// ---------------------------------------------------------------------------------------------

std::string_view to_string(Area a)
{
  switch (a) {
    case Area::A1_1: return "1.1";
    case Area::A1_2: return "1.2";
    case Area::A2_1: return "2.1";
    case Area::A2_2: return "2.2";
    case Area::A3_1: return "3.1";
    case Area::A3_2: return "3.2";
    case Area::A4_1: return "4.1";
    case Area::A4_2: return "4.2";
  }
  return "?";
}

std::optional<Area> parse_area(std::string_view s)
{
  for (Area a : kAllAreas) {
    if (to_string(a) == s) {
      return a;
    }
  }
  return std::nullopt;
}

int area_group(Area a)
{
  switch (a) {
    case Area::A1_1:
    case Area::A1_2: return 1;
    case Area::A2_1:
    case Area::A2_2: return 2;
    case Area::A3_1:
    case Area::A3_2: return 3;
    case Area::A4_1:
    case Area::A4_2: return 4;
  }
  return 0;
}

int area_side(Area a)
{
  switch (a) {
    case Area::A1_1:
    case Area::A2_1:
    case Area::A3_1:
    case Area::A4_1: return 1;
    default: return 2;
  }
}

int area_priority(Area a)
{
  static constexpr std::array<int, 5> kGroupRank{0, 3, 1, 0, 2};
  return kGroupRank[area_group(a)] * 2 + (area_side(a) - 1);
}

std::string_view to_string(Direction d)
{
  switch (d) {
    case Direction::LeftToRight: return "left_to_right";
    case Direction::RightToLeft: return "right_to_left";
    case Direction::Unknown: return "unknown";
  }
  return "unknown";
}

double signed_distance_to_line(WorldPoint p, const TargetLine & line)
{
  return dot(p - line.p0, -1.0 * line.normal);
}

bool point_on_boundary(const Polygon & poly, WorldPoint p, double tol)
{
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= tol) {
      return true;
    }
  }
  return false;
}

bool point_in_polygon(const Polygon & poly, WorldPoint p)
{
  if (poly.size() < 3) {
    return false;
  }
  if (point_on_boundary(poly, p)) {
    return true;
  }
  // winding number
  int winding = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = poly[i];
    const auto b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) {
        ++winding;
      }
    } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
      --winding;
    }
  }
  return winding != 0;
}

bool is_simple(const Polygon & poly)
{
  const std::size_t n = poly.size();
  if (n < 3) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(poly[i], poly[(i + 1) % n]) == 0.0) {
      return false;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

namespace
{

/// Interior intervals of a simple polygon along the vertical line at x.
std::vector<std::pair<double, double>> vertical_slab(const Polygon & poly, double x)
{
  std::vector<double> ys;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto & p = poly[i];
    const auto & q = poly[(i + 1) % poly.size()];
    if ((p.x < x) != (q.x < x)) {
      ys.push_back(p.y + (q.y - p.y) * (x - p.x) / (q.x - p.x));
    }
  }
  std::sort(ys.begin(), ys.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < ys.size(); k += 2) {
    out.emplace_back(ys[k], ys[k + 1]);
  }
  return out;
}

bool interiors_overlap(const Polygon & a, const Polygon & b)
{
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_cross(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) {
        return true;
      }
    }
  }
  // without proper crossings the edge order only changes at vertices, so one probe per slab
  // between consecutive vertex abscissae decides the overlap
  std::vector<double> xs;
  for (const auto & p : a) {
    xs.push_back(p.x);
  }
  for (const auto & p : b) {
    xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    if (xs[k + 1] - xs[k] < 1e-12) {
      continue;
    }
    const double x = 0.5 * (xs[k] + xs[k + 1]);
    for (const auto & [a0, a1] : vertical_slab(a, x)) {
      for (const auto & [b0, b1] : vertical_slab(b, x)) {
        if (std::min(a1, b1) - std::max(a0, b0) > 1e-12) {
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

AreaMap::AreaMap(std::map<Area, Polygon> areas, std::map<std::string, TargetLine> target_lines)
: areas_(std::move(areas)), lines_(std::move(target_lines))
{
  for (Area a : kAllAreas) {
    auto it = areas_.find(a);
    if (it == areas_.end()) {
      fail(Errc::InvalidAreaMap, "missing polygon for area " + std::string(to_string(a)));
    }
    if (!is_simple(it->second)) {
      fail(Errc::InvalidAreaMap, "polygon " + std::string(to_string(a)) + " is not simple");
    }
  }
  if (interiors_overlap(areas_.at(Area::A3_1), areas_.at(Area::A3_2))) {
    fail(Errc::InvalidAreaMap, "conflict areas 3.1 and 3.2 overlap");
  }
  for (const auto & [name, line] : lines_) {
    if (std::abs(norm(line.normal) - 1.0) > 1e-9) {
      fail(Errc::InvalidAreaMap, "target line " + name + " normal is not unit length");
    }
  }
  for (Direction d : {Direction::LeftToRight, Direction::RightToLeft}) {
    for (int q = 0; q < 3; ++q) {
      if (!lines_.count(pedestrian_line_name(d, q))) {
        fail(Errc::InvalidAreaMap, "missing target line " + pedestrian_line_name(d, q));
      }
    }
  }
  for (Area a : {Area::A3_1, Area::A3_2}) {
    for (int q = 0; q < 2; ++q) {
      if (!lines_.count(vehicle_line_name(a, q))) {
        fail(Errc::InvalidAreaMap, "missing target line " + vehicle_line_name(a, q));
      }
    }
  }
}

std::optional<Area> AreaMap::locate(WorldPoint p) const
{
  std::optional<Area> best;
  for (const auto & [area, poly] : areas_) {
    if (!point_in_polygon(poly, p)) {
      continue;
    }
    if (!best || area_priority(area) < area_priority(*best)) {
      best = area;
    }
  }
  return best;
}

const Polygon & AreaMap::polygon(Area a) const { return areas_.at(a); }

const TargetLine & AreaMap::line(const std::string & name) const
{
  auto it = lines_.find(name);
  if (it == lines_.end()) {
    fail(Errc::InvalidAreaMap, "unknown target line " + name);
  }
  return it->second;
}

std::string AreaMap::pedestrian_line_name(Direction d, int q)
{
  if (d == Direction::Unknown) {
    fail(Errc::UnknownDirection, "pedestrian target line needs a crossing direction");
  }
  if (q < 0 || q > 2) {
    fail(Errc::InvalidArgument, "pedestrian target index must be 0..2");
  }
  return std::string(d == Direction::LeftToRight ? "ped_ltr_q" : "ped_rtl_q") + std::to_string(q);
}

std::string AreaMap::vehicle_line_name(Area conflict_area, int q)
{
  if (area_group(conflict_area) != 3) {
    fail(Errc::InvalidArgument, "vehicle target lines belong to conflict areas 3.1/3.2");
  }
  if (q < 0 || q > 1) {
    fail(Errc::InvalidArgument, "vehicle target index must be 0..1");
  }
  return std::string(area_side(conflict_area) == 1 ? "veh_31_q" : "veh_32_q") + std::to_string(q);
}

const TargetLine & AreaMap::pedestrian_line(Direction d, int q) const
{
  return line(pedestrian_line_name(d, q));
}

const TargetLine & AreaMap::vehicle_line(Area conflict_area, int q) const
{
  return line(vehicle_line_name(conflict_area, q));
}

const TargetLine & AreaMap::center_line() const
{
  auto it = lines_.find("center_line");
  if (it != lines_.end()) {
    return it->second;
  }
  return line(pedestrian_line_name(Direction::LeftToRight, 1));
}

}  // namespace ppet::geometry
