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

#include "mcca/geometry.hpp"

#include <algorithm>
#include <array>

namespace mcca
{

namespace
{

struct Candidate
{
  Vec2 point;
  Vec2 normal;
  double dist_sq = std::numeric_limits<double>::infinity();
};

void keep_closer(Candidate & best, const Vec2 & w, const Vec2 & p, const Vec2 & n)
{
  const double d = (p - w).squared_norm();
  if (d < best.dist_sq) {
    best = {p, n, d};
  }
}

struct Tangents
{
  Vec2 left;
  Vec2 right;
  double leg = 0.0;  // distance from the origin to the tangent points
};

// Tangent directions from the origin to the disc (c, r); requires |c| > r.
Tangents tangents(const Vec2 & c, double r)
{
  const double dist_sq = c.squared_norm();
  const double leg = std::sqrt(std::max(dist_sq - r * r, 0.0));
  return {
    Vec2{c.x * leg - c.y * r, c.x * r + c.y * leg} / dist_sq,
    Vec2{c.x * leg + c.y * r, -c.x * r + c.y * leg} / dist_sq,
    leg};
}

double segment_distance(const Vec2 & p0, const Vec2 & p1, const Vec2 & q0, const Vec2 & q1)
{
  const auto orient = [](const Vec2 & a, const Vec2 & b, const Vec2 & c) {
    return det(b - a, c - a);
  };
  const double o1 = orient(p0, p1, q0);
  const double o2 = orient(p0, p1, q1);
  const double o3 = orient(q0, q1, p0);
  const double o4 = orient(q0, q1, p1);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return 0.0;
  }
  return std::min(
    {(closest_point_on_segment(q0, p0, p1) - q0).norm(),
     (closest_point_on_segment(q1, p0, p1) - q1).norm(),
     (closest_point_on_segment(p0, q0, q1) - p0).norm(),
     (closest_point_on_segment(p1, q0, q1) - p1).norm()});
}

Escape escape_from_cutoff(const Vec2 & w, const SegmentVo & vo)
{
  if (!std::isfinite(vo.horizon)) {
    throw GeometryError("overlapping shapes need a finite cutoff horizon");
  }
  const double s = 1.0 / vo.horizon;
  const Vec2 c = closest_point_on_segment(w, vo.rel_a * s, vo.rel_b * s);
  const Vec2 diff = w - c;
  const double dist = diff.norm();
  Vec2 dir;
  if (dist > 1e-12) {
    dir = diff / dist;
  } else {
    const Vec2 toward = closest_point_on_segment(Vec2{}, vo.rel_a, vo.rel_b);
    if (toward.norm() < 1e-12) {
      throw GeometryError("centre lies on the obstacle");
    }
    dir = -normalized(toward);
  }
  return {dir * (vo.radius * s - dist), dir};
}

}  // namespace

Vec2 closest_point_on_segment(const Vec2 & q, const Vec2 & a, const Vec2 & b)
{
  const Vec2 ab = b - a;
  const double len_sq = ab.squared_norm();
  if (len_sq <= 0.0) {
    return a;
  }
  const double t = std::clamp(dot(q - a, ab) / len_sq, 0.0, 1.0);
  return a + ab * t;
}

double wrap_angle(double a)
{
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) {
    r += 2.0 * kPi;
  }
  return r;
}

Escape closest_escape(const Vec2 & v, const SegmentVo & vo)
{
  if (!(vo.radius > 0.0)) {
    throw GeometryError("velocity obstacle radius must be positive");
  }
  const Vec2 w = v - vo.apex_offset;
  const Vec2 nearest = closest_point_on_segment(Vec2{}, vo.rel_a, vo.rel_b);
  if (nearest.norm() < vo.radius) {
    return escape_from_cutoff(w, vo);
  }

  const double s = std::isfinite(vo.horizon) ? 1.0 / vo.horizon : 0.0;
  const double rho = vo.radius * s;
  const bool is_disc = vo.rel_a == vo.rel_b;

  // Legs: extreme tangents over the two end discs.
  Tangents ta = tangents(vo.rel_a, vo.radius);
  Tangents tb = is_disc ? ta : tangents(vo.rel_b, vo.radius);
  const bool left_from_b = det(ta.left, tb.left) > 0.0;
  const bool right_from_b = det(ta.right, tb.right) < 0.0;
  const Vec2 left_dir = left_from_b ? tb.left : ta.left;
  const Vec2 right_dir = right_from_b ? tb.right : ta.right;
  const Vec2 left_start = left_dir * ((left_from_b ? tb.leg : ta.leg) * s);
  const Vec2 right_start = right_dir * ((right_from_b ? tb.leg : ta.leg) * s);

  Candidate best;
  keep_closer(
    best, w, left_start + left_dir * std::max(0.0, dot(w - left_start, left_dir)), perp(left_dir));
  keep_closer(
    best, w, right_start + right_dir * std::max(0.0, dot(w - right_start, right_dir)),
    -perp(right_dir));

  if (rho > 0.0) {
    // Cutoff boundary: the part of the scaled capsule that faces the origin.
    const double tol = 1e-12 * (vo.rel_a.norm() + vo.rel_b.norm() + vo.radius) * s;
    const std::array<std::pair<Vec2, Vec2>, 2> ends{
      std::pair{vo.rel_a * s, (vo.rel_b - vo.rel_a) * s},
      std::pair{vo.rel_b * s, (vo.rel_a - vo.rel_b) * s}};
    for (std::size_t k = 0; k < (is_disc ? 1U : 2U); ++k) {
      const auto & [centre, away] = ends[k];
      const Vec2 chat = normalized(centre);
      const double cos_b = std::clamp(rho / centre.norm(), -1.0, 1.0);
      const double sin_b = std::sqrt(1.0 - cos_b * cos_b);
      const Vec2 ehat = normalized(away);
      std::array<Vec2, 5> normals{
        normalized(w - centre), -chat * cos_b + perp(chat) * sin_b,
        -chat * cos_b - perp(chat) * sin_b, perp(ehat), -perp(ehat)};
      const std::size_t count = is_disc ? 3U : 5U;
      for (std::size_t i = 0; i < count; ++i) {
        const Vec2 & n = normals[i];
        if (n.squared_norm() == 0.0) {
          continue;
        }
        if (dot(n, centre) + rho > tol || dot(n, away) > tol) {
          continue;
        }
        keep_closer(best, w, centre + n * rho, n);
      }
    }
    if (!is_disc) {
      const Vec2 side = normalized(vo.rel_b - vo.rel_a);
      for (const Vec2 & n : {perp(side), -perp(side)}) {
        const Vec2 p0 = vo.rel_a * s + n * rho;
        const Vec2 p1 = vo.rel_b * s + n * rho;
        if (dot(n, p0) > tol) {
          continue;
        }
        keep_closer(best, w, closest_point_on_segment(w, p0, p1), n);
      }
    }
  }

  return {best.point - w, best.normal};
}

Escape closest_escape(const Vec2 & v, const VoCone & cone)
{
  return closest_escape(v, SegmentVo::from_cone(cone));
}

bool vo_contains(const Vec2 & v, const SegmentVo & vo)
{
  const Vec2 w = v - vo.apex_offset;
  if (closest_point_on_segment(Vec2{}, vo.rel_a, vo.rel_b).norm() <= vo.radius) {
    return true;
  }
  const double reach = std::isfinite(vo.horizon) ? vo.horizon : 1e9;
  return segment_distance(Vec2{}, w * reach, vo.rel_a, vo.rel_b) <= vo.radius;
}

bool vo_contains(const Vec2 & v, const VoCone & cone)
{
  return vo_contains(v, SegmentVo::from_cone(cone));
}

bool in_vo_infinite(const Vec2 & v, const VoCone & cone)
{
  const Vec2 & p = cone.rel_position;
  const double r = cone.combined_radius;
  if (p.squared_norm() <= r * r) {
    return true;
  }
  const Vec2 w = v - cone.apex_offset;
  if (dot(w, p) <= 0.0) {
    return false;
  }
  const double cross = det(w, p);
  return cross * cross <= r * r * w.squared_norm();
}

}  // namespace mcca
