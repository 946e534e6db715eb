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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mcca/robot_state.hpp"

namespace testing
{

/// A robot whose effective centre sits at `center`, heading `heading`, moving
/// with effective velocity `velocity`. Wheel speeds are left at zero; the
/// planners only read `effective_velocity`.
inline mcca::RobotState robot_at(int id, mcca::Vec2 center, mcca::Vec2 velocity = {}, double heading = 0.0)
{
  mcca::RobotState s;
  s.id = id;
  s.pose.heading = heading;
  s.pose.axle_center = center - mcca::Vec2{std::cos(heading), std::sin(heading)} * s.params.offset;
  s.effective_velocity = velocity;
  s.masked.v = velocity;
  s.head_candidate.v = velocity;
  s.goal = center + mcca::Vec2{100.0, 0.0};
  return s;
}

/// One parsed row of the trajectory CSV.
struct LogRow
{
  int tick = 0;
  int id = 0;
  double x = 0.0, y = 0.0, theta = 0.0;
  double v_l = 0.0, v_r = 0.0;
  double v_x = 0.0, v_y = 0.0;
  double mask_x = 0.0, mask_y = 0.0;
  char priority = 'N';
  int importance = 0;
  int tabu = 0;
};

inline std::vector<LogRow> parse_log(const std::string & csv)
{
  std::vector<LogRow> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    for (auto & c : line) {
      if (c == ',') {
        c = ' ';
      }
    }
    std::istringstream fields(line);
    LogRow r;
    fields >> r.tick >> r.id >> r.x >> r.y >> r.theta >> r.v_l >> r.v_r >> r.v_x >> r.v_y >> r.mask_x >>
      r.mask_y >> r.priority >> r.importance >> r.tabu;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace testing
