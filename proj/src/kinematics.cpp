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

#include "mcca/kinematics.hpp"

#include <stdexcept>

namespace mcca
{

void DiffDriveParams::validate() const
{
  if (!(offset > 0.0)) {
    throw std::invalid_argument("effective-centre offset D must be positive");
  }
  if (!(body_radius > 0.0) || !(axle_length > 0.0) || !(wheel_radius > 0.0)) {
    throw std::invalid_argument("robot dimensions must be positive");
  }
  if (offset / body_radius > 0.1 + 1e-12) {
    throw std::invalid_argument("offset D must not exceed 0.1 R");
  }
  if (!(v_max > 0.0) || !(a_max > 0.0)) {
    throw std::invalid_argument("speed and acceleration limits must be positive");
  }
}

Vec2 effective_center(const Pose & pose, const DiffDriveParams & params)
{
  return pose.axle_center +
         Vec2{std::cos(pose.heading), std::sin(pose.heading)} * params.offset;
}

KinematicMap kinematic_map(double heading, const DiffDriveParams & params)
{
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double k = params.offset / params.axle_length;
  return {c / 2.0 + k * s, c / 2.0 - k * s, s / 2.0 - k * c, s / 2.0 + k * c};
}

BodyVelocity forward_kinematics(double v_l, double v_r, double heading, const DiffDriveParams & params)
{
  const KinematicMap m = kinematic_map(heading, params);
  return {
    m.vx_l * v_l + m.vx_r * v_r, m.vy_l * v_l + m.vy_r * v_r,
    (v_r - v_l) / params.axle_length};
}

Pose integrate(const Pose & pose, double v_l, double v_r, double dt, const DiffDriveParams & params)
{
  const double v = 0.5 * (v_l + v_r);
  const double swept = (v_r - v_l) / params.axle_length * dt;
  const double half = 0.5 * swept;
  // chord of the arc: v dt sinc(half) along the mid-step heading
  const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
  const double mid = pose.heading + half;
  const double chord = v * dt * sinc;
  return {
    pose.axle_center + Vec2{std::cos(mid), std::sin(mid)} * chord,
    wrap_angle(pose.heading + swept)};
}

}  // namespace mcca
