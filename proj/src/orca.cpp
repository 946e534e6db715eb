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

#include "mcca/orca.hpp"

#include <algorithm>

#include <stdexcept>

namespace mcca
{

void OrcaParams::validate() const
{
  if (!(dt > 0.0) || !(tau > dt)) {
    throw std::invalid_argument("ORCA parameters need tau > dt > 0");
  }
}

VoCone robot_vo(
  const RobotState & self, const RobotState & other, const Vec2 & other_velocity,
  const OrcaParams & params)
{
  VoCone cone;
  cone.apex_offset = other_velocity;
  cone.rel_position = other.position() - self.position();
  cone.combined_radius = self.radius() + other.radius();
  if (cone.rel_position.norm() < 1e-9) {
    throw GeometryError("robots " + std::to_string(self.id) + " and " + std::to_string(other.id) + " share a centre");
  }
  cone.horizon = cone.penetrating() ? params.dt : params.tau;
  return cone;
}

HalfPlane orca_robot_halfplane(const RobotState & self, const RobotState & other, const OrcaParams & params)
{
  const VoCone cone = robot_vo(self, other, other.effective_velocity, params);
  const Escape e = closest_escape(self.effective_velocity, cone);
  return HalfPlane::from_normal(self.effective_velocity + e.u * 0.5, e.n);
}

std::vector<HalfPlane> orca_obstacle_halfplanes(
  const RobotState & self, const ObstacleSegment & seg, const OrcaParams & params)
{
  if ((seg.b - seg.a).norm() <= 0.0) {
    throw GeometryError("degenerate obstacle segment");
  }
  const Vec2 p = self.position();
  SegmentVo vo{Vec2{}, seg.a - p, seg.b - p, self.radius(), params.tau};
  const double gap = closest_point_on_segment(Vec2{}, vo.rel_a, vo.rel_b).norm();
  if (gap < 1e-9) {
    throw GeometryError("robot " + std::to_string(self.id) + " centre lies on an obstacle segment");
  }
  if (gap < vo.radius) {
    vo.horizon = params.dt;
  }
  const Escape e = closest_escape(self.effective_velocity, vo);
  return {HalfPlane::from_normal(self.effective_velocity + e.u, e.n)};
}

std::vector<HalfPlane> orca_obstacle_halfplanes(
  const RobotState & self, const std::vector<ObstacleSegment> & obstacles, const OrcaParams & params)
{
  // Nearest segments first. A segment whose truncated obstacle already lies
  // in the forbidden side of an earlier plane adds nothing but a tangent that
  // can cut deep into free velocity space, so it is skipped.
  const Vec2 p = self.position();
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(obstacles.size());
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const auto & seg = obstacles[k];
    order.emplace_back(closest_point_on_segment(Vec2{}, seg.a - p, seg.b - p).norm(), k);
  }
  std::sort(order.begin(), order.end());

  const double r = self.radius() / params.tau;
  std::vector<HalfPlane> out;
  out.reserve(obstacles.size());
  for (const auto & [gap, k] : order) {
    const auto & seg = obstacles[k];
    if (gap >= self.radius()) {
      const Vec2 ca = (seg.a - p) / params.tau;
      const Vec2 cb = (seg.b - p) / params.tau;
      const bool skip = std::any_of(out.begin(), out.end(), [&](const HalfPlane & h) {
        return halfplane_violation(ca, h) - r >= -1e-9 && halfplane_violation(cb, h) - r >= -1e-9;
      });
      if (skip) {
        continue;
      }
    }
    const auto planes = orca_obstacle_halfplanes(self, seg, params);
    out.insert(out.end(), planes.begin(), planes.end());
  }
  return out;
}

}  // namespace mcca
