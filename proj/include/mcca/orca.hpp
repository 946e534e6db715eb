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

#include <vector>

#include "mcca/geometry.hpp"
#include "mcca/robot_state.hpp"

namespace mcca
{

struct ObstacleSegment
{
  Vec2 a;
  Vec2 b;
  bool operator==(const ObstacleSegment &) const = default;
};

struct OrcaParams
{
  double tau = 17.0;  // time horizon, s
  double dt = 0.25;   // control period, s

  /// Requires tau > dt > 0.
  void validate() const;
};

/// Velocity obstacle of `self` against `other`, with `other_velocity` as the
/// other robot's optimisation velocity. Overlapping discs yield a cone whose
/// horizon is the control period (one-step separation).
VoCone robot_vo(const RobotState & self, const RobotState & other, const Vec2 & other_velocity, const OrcaParams & params);

/// Reciprocal half-plane for `self` against `other` (half of the escape).
/// Both robots' optimisation velocities are their current velocities.
HalfPlane orca_robot_halfplane(const RobotState & self, const RobotState & other, const OrcaParams & params);

/// Half-planes against a static segment (full escape). Throws GeometryError
/// when the robot centre lies on the segment.
std::vector<HalfPlane> orca_obstacle_halfplanes(
  const RobotState & self, const ObstacleSegment & seg, const OrcaParams & params);

std::vector<HalfPlane> orca_obstacle_halfplanes(
  const RobotState & self, const std::vector<ObstacleSegment> & obstacles, const OrcaParams & params);

}  // namespace mcca
