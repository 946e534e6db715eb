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

#include "mcca/mcca.hpp"

namespace mcca
{

MaskedVelocity solve_masked(
  const Vec2 & v_pref, const PlaneSet & planes, const MccaWeights & weights, double cap)
{
  const QpSolution sol = solve(build_holonomic(v_pref, planes, weights, cap));
  return {holonomic_velocity(sol)};
}

MaskedVelocity masked_velocity_head(
  const RobotState & self, const Vec2 & v_pref, const std::vector<ObstacleSegment> & obstacles,
  const MaskParams & params)
{
  PlaneSet planes;
  planes.obstacle = orca_obstacle_halfplanes(self, obstacles, params.orca);
  return solve_masked(v_pref, planes, params.weights, params.mask_cap_factor * self.params.v_max);
}

VoCone mvo(const RobotState & self, const RobotState & other, const MaskedVelocity & other_masked, double horizon)
{
  VoCone cone;
  cone.apex_offset = other_masked.v;
  cone.rel_position = other.position() - self.position();
  cone.combined_radius = self.radius() + other.radius();
  cone.horizon = horizon;
  if (cone.rel_position.norm() < 1e-9) {
    throw GeometryError("robots " + std::to_string(self.id) + " and " + std::to_string(other.id) + " share a centre");
  }
  return cone;
}

HalfPlane mcca_halfplane(
  const RobotState & self, const RobotState & other, const MaskedVelocity & other_masked,
  const OrcaParams & params)
{
  VoCone cone = mvo(self, other, other_masked, params.tau);
  if (cone.penetrating()) {
    cone.horizon = params.dt;
  }
  const Escape e = closest_escape(self.effective_velocity, cone);
  return HalfPlane::from_normal(self.effective_velocity + e.u, e.n);
}

std::vector<HalfPlane> mcca_halfplanes(
  const RobotState & self, const std::vector<MaskedNeighbor> & others, const OrcaParams & params)
{
  std::vector<HalfPlane> out;
  out.reserve(others.size());
  for (const auto & o : others) {
    out.push_back(mcca_halfplane(self, *o.state, o.masked, params));
  }
  return out;
}

MaskedVelocity masked_velocity_normal(
  const RobotState & self, const Vec2 & v_pref, const std::vector<MaskedNeighbor> & others,
  const std::vector<ObstacleSegment> & obstacles, const MaskParams & params)
{
  PlaneSet planes;
  planes.obstacle = orca_obstacle_halfplanes(self, obstacles, params.orca);
  planes.mcca = mcca_halfplanes(self, others, params.orca);
  return solve_masked(v_pref, planes, params.weights, params.mask_cap_factor * self.params.v_max);
}

}  // namespace mcca
