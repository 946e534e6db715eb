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

#include <span>
#include <vector>

#include "mcca/robot_state.hpp"

namespace mcca
{

/// True when `a`'s head masked velocity lies in its untruncated MVO against
/// `b` and the two head masked velocities oppose each other
/// (v_a . v_b <= 0). A robot following another one the same way never
/// conflicts with it.
bool heads_conflict(const RobotState & a, const RobotState & b);

/// Whether `b` wins a head conflict against `a`: larger importance, then
/// lower id.
bool outranks(const RobotState & b, const RobotState & a);

/// Head set implied by a broadcast snapshot. Robots that are at their goal
/// or still in tabu stay normal; the remaining ones are visited by rank and
/// become heads unless they conflict with an already chosen head. Every
/// robot evaluates the same snapshot, so all of them agree on the result.
std::vector<bool> resolve_heads(std::span<const RobotState> snapshot);

/// Priority update of robot `self_index` of `snapshot`:
///   at goal            -> normal, T = 0, S = 0
///   T > 0              -> normal, T - 1
///   conflicts a head   -> normal, T = eta
///   otherwise          -> head, S + 1
PriorityState update_priority(std::span<const RobotState> snapshot, std::size_t self_index, int eta);

/// All robots at once (same result as calling update_priority per robot).
std::vector<PriorityState> update_priorities(std::span<const RobotState> snapshot, int eta);

/// Pairs of heads (A, B) in `next` with S_A < S_B (snapshot importances)
/// that conflict on the snapshot.
int count_conflicting_heads(std::span<const RobotState> snapshot, std::span<const PriorityState> next);

}  // namespace mcca
