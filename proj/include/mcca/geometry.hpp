// Copyright 2026 The mcca-sim Authors
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

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcca
{

/// 2D vector used for positions (m) and velocities (m/s).
struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 & operator+=(const Vec2 & o)
  {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 & operator-=(const Vec2 & o)
  {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2 &) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, const Vec2 & v) { return v * s; }
constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
/// det([a b]) with a, b as columns.
constexpr double det(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
/// Counter-clockwise perpendicular.
constexpr Vec2 perp(const Vec2 & v) { return {-v.y, v.x}; }

inline Vec2 normalized(const Vec2 & v)
{
  const double n = v.norm();
  return n > 0.0 ? v / n : Vec2{};
}

inline bool is_finite(const Vec2 & v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Closest point to `q` on the segment [a, b].
Vec2 closest_point_on_segment(const Vec2 & q, const Vec2 & a, const Vec2 & b);

/// Permitted-velocity half-plane: velocities on the left of `direction`
/// through `point`. `direction` is unit length.
struct HalfPlane
{
  Vec2 point;
  Vec2 direction{0.0, 1.0};

  /// Half-plane through `point` whose permitted side lies along the unit
  /// normal `normal`.
  static HalfPlane from_normal(const Vec2 & point, const Vec2 & normal)
  {
    return {point, Vec2{normal.y, -normal.x}};
  }

  /// Unit normal pointing into the permitted side.
  Vec2 normal() const { return perp(direction); }
};

/// det[[v.x - p.x, d.x], [v.y - p.y, d.y]]; nonpositive iff `v` is permitted.
constexpr double halfplane_violation(const Vec2 & v, const HalfPlane & hp)
{
  return det(v - hp.point, hp.direction);
}

/// Collision cone of a disc: the set of velocities (shifted by
/// `apex_offset`) that bring two discs into contact within `horizon`.
struct VoCone
{
  Vec2 apex_offset;
  Vec2 rel_position;
  double combined_radius = 0.0;
  double horizon = std::numeric_limits<double>::infinity();

  bool penetrating() const { return rel_position.norm() < combined_radius; }
};

/// Collision cone of a line segment swept by a disc of `radius`. A disc VO
/// is the special case `rel_a == rel_b`.
struct SegmentVo
{
  Vec2 apex_offset;
  Vec2 rel_a;
  Vec2 rel_b;
  double radius = 0.0;
  double horizon = std::numeric_limits<double>::infinity();

  static SegmentVo from_cone(const VoCone & c)
  {
    return {c.apex_offset, c.rel_position, c.rel_position, c.combined_radius, c.horizon};
  }
};

/// Minimal move out of (or onto) a velocity obstacle.
struct Escape
{
  Vec2 u;  ///< from the query to the closest boundary point
  Vec2 n;  ///< outward unit normal of the obstacle at that point
};

class GeometryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Closest boundary point of the truncated cone from `v` (absolute velocity;
/// the cone sits at `apex_offset`).
///
/// When the swept shape already contains the origin (discs overlap), the
/// cone degenerates; the escape is then taken from the cutoff shape alone
/// (the shape scaled by 1 / horizon), so callers pass the time step as the
/// horizon to push the pair apart within one step.
Escape closest_escape(const Vec2 & v, const SegmentVo & vo);
Escape closest_escape(const Vec2 & v, const VoCone & cone);

/// True iff moving at relative velocity `v - apex_offset` brings the shapes
/// into contact at some t in [0, horizon].
bool vo_contains(const Vec2 & v, const SegmentVo & vo);
bool vo_contains(const Vec2 & v, const VoCone & cone);

/// Ray/disc test for the untruncated cone. Overlapping discs count as a hit.
bool in_vo_infinite(const Vec2 & v, const VoCone & cone);

/// Rotate `v` counter-clockwise by `angle` radians.
inline Vec2 rotated(const Vec2 & v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wrap to (-pi, pi].
double wrap_angle(double a);

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace mcca
