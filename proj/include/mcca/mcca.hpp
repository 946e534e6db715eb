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
#include "mcca/orca.hpp"
#include "mcca/qp.hpp"
#include "mcca/robot_state.hpp"

namespace mcca
{

struct MaskParams
{
  OrcaParams orca;
  MccaWeights weights;
  /// Masked velocities are boxed to |v_x|, |v_y| <= mask_cap_factor * v_max.
  double mask_cap_factor = 4.0;
};

/// Another robot as seen through the broadcast: its state and the masked
/// velocity it last published.
struct MaskedNeighbor
{
  const RobotState * state = nullptr;
  MaskedVelocity masked;
};

/// Masked velocity of a head robot: closest to `v_pref` among obstacle ORCA
/// half-planes only. Other robots never enter.
MaskedVelocity masked_velocity_head(
  const RobotState & self, const Vec2 & v_pref, const std::vector<ObstacleSegment> & obstacles,
  const MaskParams & params);

/// Masked velocity obstacle of `self` against `other`, whose optimisation
/// velocity is its masked velocity; `self` keeps its current velocity.
VoCone mvo(const RobotState & self, const RobotState & other, const MaskedVelocity & other_masked, double horizon);

/// Permitted masked-velocity half-plane of a normal robot: through
/// v_self + u with the full escape vector u of the truncated MVO.
HalfPlane mcca_halfplane(
  const RobotState & self, const RobotState & other, const MaskedVelocity & other_masked,
  const OrcaParams & params);

/// MCCA half-planes against every neighbour.
std::vector<HalfPlane> mcca_halfplanes(
  const RobotState & self, const std::vector<MaskedNeighbor> & others, const OrcaParams & params);

/// Masked velocity of a normal robot: closest to `v_pref` among obstacle
/// ORCA half-planes (alpha2) and MCCA half-planes (alpha4).
MaskedVelocity masked_velocity_normal(
  const RobotState & self, const Vec2 & v_pref, const std::vector<MaskedNeighbor> & others,
  const std::vector<ObstacleSegment> & obstacles, const MaskParams & params);

/// Same, from precomputed half-planes.
MaskedVelocity solve_masked(
  const Vec2 & v_pref, const PlaneSet & planes, const MccaWeights & weights, double cap);

}  // namespace mcca
