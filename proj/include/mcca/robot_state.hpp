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
#include "mcca/kinematics.hpp"

namespace mcca
{

/// Broadcast deadlock-free velocity intention. Not bounded by the speed
/// limit of the robot.
struct MaskedVelocity
{
  Vec2 v;
  bool operator==(const MaskedVelocity &) const = default;
};

/// Head/normal priority record.
struct PriorityState
{
  bool is_head = false;
  int tabu_remaining = 0;  // T, ticks before the robot may seek head priority
  int importance = 0;      // S, ticks spent as head since the last goal
  bool operator==(const PriorityState &) const = default;
};

/// What one robot broadcasts each control cycle.
struct RobotState
{
  int id = 0;
  Pose pose;
  double v_left = 0.0;
  double v_right = 0.0;
  Vec2 effective_velocity;
  /// Masked velocity in effect (head or normal, per `priority`).
  MaskedVelocity masked;
  /// Masked velocity solved as if the robot were a head, used to test
  /// head conflicts.
  MaskedVelocity head_candidate;
  PriorityState priority;
  Vec2 goal;
  bool at_goal = false;
  DiffDriveParams params;

  Vec2 position() const { return effective_center(pose, params); }
  double radius() const { return params.effective_radius(); }
};

}  // namespace mcca
