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

#include "mcca/priority.hpp"

#include <algorithm>
#include <numeric>

namespace mcca
{

bool heads_conflict(const RobotState & a, const RobotState & b)
{
  const VoCone cone{b.head_candidate.v, b.position() - a.position(), a.radius() + b.radius()};
  return in_vo_infinite(a.head_candidate.v, cone) &&
         dot(a.head_candidate.v, b.head_candidate.v) <= 0.0;
}

bool outranks(const RobotState & b, const RobotState & a)
{
  if (b.priority.importance != a.priority.importance) {
    return b.priority.importance > a.priority.importance;
  }
  return b.id < a.id;
}

std::vector<bool> resolve_heads(std::span<const RobotState> snapshot)
{
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    if (!snapshot[i].at_goal && snapshot[i].priority.tabu_remaining == 0) {
      order.push_back(i);
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return outranks(snapshot[l], snapshot[r]);
  });
  std::vector<bool> head(snapshot.size(), false);
  std::vector<std::size_t> chosen;
  for (const std::size_t i : order) {
    const bool blocked = std::any_of(chosen.begin(), chosen.end(), [&](std::size_t j) {
      return heads_conflict(snapshot[i], snapshot[j]);
    });
    if (!blocked) {
      head[i] = true;
      chosen.push_back(i);
    }
  }
  return head;
}

namespace
{

PriorityState next_state(const RobotState & self, bool becomes_head, int eta)
{
  const PriorityState & p = self.priority;
  if (self.at_goal) {
    return {false, 0, 0};
  }
  if (p.tabu_remaining > 0) {
    return {false, p.tabu_remaining - 1, p.importance};
  }
  if (!becomes_head) {
    return {false, eta, p.importance};
  }
  return {true, 0, p.importance + 1};
}

}  // namespace

PriorityState update_priority(std::span<const RobotState> snapshot, std::size_t self_index, int eta)
{
  const RobotState & self = snapshot[self_index];
  if (self.at_goal || self.priority.tabu_remaining > 0) {
    return next_state(self, false, eta);
  }
  return next_state(self, resolve_heads(snapshot)[self_index], eta);
}

std::vector<PriorityState> update_priorities(std::span<const RobotState> snapshot, int eta)
{
  const std::vector<bool> head = resolve_heads(snapshot);
  std::vector<PriorityState> out;
  out.reserve(snapshot.size());
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    out.push_back(next_state(snapshot[i], head[i], eta));
  }
  return out;
}

int count_conflicting_heads(std::span<const RobotState> snapshot, std::span<const PriorityState> next)
{
  int violations = 0;
  for (std::size_t a = 0; a < snapshot.size(); ++a) {
    for (std::size_t b = 0; b < snapshot.size(); ++b) {
      if (a == b || !next[a].is_head || !next[b].is_head) {
        continue;
      }
      if (snapshot[a].priority.importance < snapshot[b].priority.importance &&
          heads_conflict(snapshot[a], snapshot[b])) {
        ++violations;
      }
    }
  }
  return violations;
}

}  // namespace mcca
