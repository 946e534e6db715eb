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

#include "mcca/geometry.hpp"

namespace mcca
{

/// Physical differential-drive robot. Wheel speeds are linear (m/s), so the
/// wheel radius never enters the kinematic map.
struct DiffDriveParams
{
  double wheel_radius = 0.1;  // r, m
  double axle_length = 0.5;   // L, m
  double offset = 0.015;      // D, axle centre to effective centre, m
  double body_radius = 0.485; // R, m
  double v_max = 2.0;         // m/s per wheel
  double a_max = 2.0;         // m/s^2 per wheel

  /// Radius of the disc centred on the effective centre.
  double effective_radius() const { return body_radius + offset; }

  /// Throws std::invalid_argument when D <= 0, D/R > 0.1 or any other
  /// parameter is non-positive.
  void validate() const;

  bool operator==(const DiffDriveParams &) const = default;
};

struct Pose
{
  Vec2 axle_center;
  double heading = 0.0;  // radians, (-pi, pi], direction of c_e - c_a

  bool operator==(const Pose &) const = default;
};

struct BodyVelocity
{
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
};

/// c_a + D (cos theta, sin theta).
Vec2 effective_center(const Pose & pose, const DiffDriveParams & params);

/// Linear map from wheel speeds to the velocity of the effective centre and
/// the yaw rate.
BodyVelocity forward_kinematics(double v_l, double v_r, double heading, const DiffDriveParams & params);

/// Coefficients of the same map: (vx, vy) = M (v_l, v_r).
struct KinematicMap
{
  double vx_l, vx_r, vy_l, vy_r;
};
KinematicMap kinematic_map(double heading, const DiffDriveParams & params);

/// Exact arc integration with wheel speeds held constant over `dt`.
Pose integrate(const Pose & pose, double v_l, double v_r, double dt, const DiffDriveParams & params);

}  // namespace mcca
