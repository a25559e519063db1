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

#ifndef PPET__GEOMETRY_HPP_
#define PPET__GEOMETRY_HPP_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppet::geometry
{

struct PixelPoint
{
  double u{0.0};
  double v{0.0};
};

struct WorldPoint
{
  double x{0.0};
  double y{0.0};

  friend WorldPoint operator+(WorldPoint a, WorldPoint b) { return {a.x + b.x, a.y + b.y}; }
  friend WorldPoint operator-(WorldPoint a, WorldPoint b) { return {a.x - b.x, a.y - b.y}; }
  friend WorldPoint operator*(double s, WorldPoint a) { return {s * a.x, s * a.y}; }
  friend bool operator==(WorldPoint, WorldPoint) = default;
};

double dot(WorldPoint a, WorldPoint b);
double cross(WorldPoint a, WorldPoint b);
double norm(WorldPoint a);
double distance(WorldPoint a, WorldPoint b);

/// Row-major 3x3 projective matrix.
using Matrix3 = std::array<double, 9>;

/// Solves the pixel->world homography from four anchor pairs by a direct linear transform
/// (8 unknowns, Gaussian elimination with partial pivoting). The result has entry (2,2) == 1.
/// Throws Errc::DegenerateAnchors on duplicate or collinear anchors.
Matrix3 solve_homography(std::span<const PixelPoint, 4> pixel, std::span<const WorldPoint, 4> world);

/// Applies a projective map with homogeneous normalization.
/// Throws Errc::ProjectiveSingularity when |w| < 1e-12.
WorldPoint project(const Matrix3 & m, PixelPoint p);

double determinant(const Matrix3 & m);

/// Adjugate inverse scaled so entry (2,2) == 1 when possible. Throws Errc::ProjectiveSingularity.
Matrix3 invert(const Matrix3 & m);

struct HomographyTile
{
  std::array<PixelPoint, 4> pixel;
  std::array<WorldPoint, 4> world;
  Matrix3 matrix{};

  /// Solves the matrix from the anchors.
  static HomographyTile from_anchors(
    const std::array<PixelPoint, 4> & pixel, const std::array<WorldPoint, 4> & world);

  bool contains(PixelPoint p) const;
  double pixel_distance(PixelPoint p) const;
  /// Largest anchor round-trip error in meters.
  double corner_residual() const;
};

enum class FallbackPolicy { NearestTile, Reject };

class TileGrid
{
public:
  TileGrid() = default;
  TileGrid(std::vector<HomographyTile> tiles, FallbackPolicy policy);

  /// Tile regions are half-open in tile order: a pixel on a shared edge belongs to the first
  /// tile that contains it.
  WorldPoint transform(PixelPoint p) const;
  std::optional<std::size_t> find_tile(PixelPoint p) const;

  const std::vector<HomographyTile> & tiles() const { return tiles_; }
  FallbackPolicy policy() const { return policy_; }
  bool empty() const { return tiles_.empty(); }

private:
  std::vector<HomographyTile> tiles_;
  FallbackPolicy policy_{FallbackPolicy::NearestTile};
};

// ---------------------------------------------------------------------------------------------
// Intersection layout
// ---------------------------------------------------------------------------------------------

enum class Area { A1_1, A1_2, A2_1, A2_2, A3_1, A3_2, A4_1, A4_2 };

inline constexpr std::array<Area, 8> kAllAreas{Area::A1_1, Area::A1_2, Area::A2_1, Area::A2_2,
                                               Area::A3_1, Area::A3_2, Area::A4_1, Area::A4_2};

std::string_view to_string(Area a);
std::optional<Area> parse_area(std::string_view s);
/// 1..4
int area_group(Area a);
/// 1 for x.1 areas, 2 for x.2 areas.
int area_side(Area a);

enum class Direction { LeftToRight, RightToLeft, Unknown };

std::string_view to_string(Direction d);

using Polygon = std::vector<WorldPoint>;

/// Target line with a unit inward normal pointing toward the side the agent reaches after
/// crossing.
struct TargetLine
{
  WorldPoint p0;
  WorldPoint p1;
  WorldPoint normal;
};

/// Positive on the approach side, zero on the line, negative once the line is crossed.
double signed_distance_to_line(WorldPoint p, const TargetLine & line);

/// Inclusive point-in-polygon test (boundary counts as inside).
bool point_in_polygon(const Polygon & poly, WorldPoint p);
bool point_on_boundary(const Polygon & poly, WorldPoint p, double tol = 1e-12);
bool is_simple(const Polygon & poly);

class AreaMap
{
public:
  AreaMap() = default;
  /// Validates polygons, the 3.1/3.2 disjointness and the normal lengths.
  /// Throws Errc::InvalidAreaMap.
  AreaMap(std::map<Area, Polygon> areas, std::map<std::string, TargetLine> target_lines);

  /// Boundary ties resolve by priority 3.x > 2.x > 4.x > 1.x, then x.1 before x.2.
  std::optional<Area> locate(WorldPoint p) const;

  const Polygon & polygon(Area a) const;
  const std::map<Area, Polygon> & areas() const { return areas_; }
  const std::map<std::string, TargetLine> & target_lines() const { return lines_; }
  const TargetLine & line(const std::string & name) const;

  /// q: 0 enter closer conflict area, 1 cross the center line, 2 leave further conflict area.
  const TargetLine & pedestrian_line(Direction d, int q) const;
  /// q: 0 enter, 1 leave the given conflict area (3.1 or 3.2).
  const TargetLine & vehicle_line(Area conflict_area, int q) const;
  const TargetLine & center_line() const;

  static std::string pedestrian_line_name(Direction d, int q);
  static std::string vehicle_line_name(Area conflict_area, int q);

private:
  std::map<Area, Polygon> areas_;
  std::map<std::string, TargetLine> lines_;
};

/// Priority rank used for boundary tie-breaks; lower wins.
int area_priority(Area a);

}  // namespace ppet::geometry

#endif  // PPET__GEOMETRY_HPP_
