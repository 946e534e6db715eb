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

#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mcca/priority.hpp"
#include "oracles.hpp"

using namespace mcca;
using testing::robot_at;

namespace
{

RobotState candidate(int id, Vec2 at, Vec2 head_velocity, int importance = 0)
{
  RobotState s = robot_at(id, at);
  s.head_candidate.v = head_velocity;
  s.priority.importance = importance;
  return s;
}

// Conflict test written out from scratch: the relative head velocity points
// into the other robot's disc, and the two head velocities do not agree.
bool conflict_oracle(const RobotState & a, const RobotState & b)
{
  const Vec2 w = a.head_candidate.v - b.head_candidate.v;
  const Vec2 p = b.position() - a.position();
  return oracle::ray_hits_disc(w, p, a.radius() + b.radius()) &&
         oracle::dot2(a.head_candidate.v, b.head_candidate.v) <= 0.0;
}

std::vector<RobotState> random_snapshot(std::mt19937_64 & rng, int n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> s(0, 5);
  std::vector<RobotState> out;
  for (int i = 0; i < n; ++i) {
    RobotState r = candidate(i, {6.0 * u(rng), 6.0 * u(rng)}, {2.0 * u(rng), 2.0 * u(rng)}, s(rng));
    r.priority.tabu_remaining = (u(rng) > 0.7) ? s(rng) : 0;
    r.at_goal = u(rng) > 0.9;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("robot at its goal resets to normal")
{
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 7)};
  snap[0].at_goal = true;
  snap[0].priority.tabu_remaining = 3;
  CHECK(update_priority(snap, 0, 30) == PriorityState{false, 0, 0});
}

TEST_CASE("tabu counts down")
{
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 2)};
  snap[0].priority.tabu_remaining = 5;
  CHECK(update_priority(snap, 0, 30) == PriorityState{false, 4, 2});
}

TEST_CASE("an isolated robot becomes head and gains importance")
{
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 2), candidate(1, {0.0, 20.0}, {1.0, 0.0}, 9)};
  CHECK(update_priority(snap, 0, 30) == PriorityState{true, 0, 3});
}

TEST_CASE("a robot behind a head going the same way may follow it")
{
  // Robot 1 is faster and right behind robot 0, so its head velocity points
  // into robot 0, but both go east.
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 9), candidate(1, {-1.5, 0.0}, {1.5, 0.0}, 1)};
  CHECK(in_vo_infinite(snap[1].head_candidate.v, VoCone{snap[0].head_candidate.v, snap[0].position() - snap[1].position(), 1.0}));
  CHECK_FALSE(heads_conflict(snap[1], snap[0]));
  const auto next = update_priorities(snap, 30);
  CHECK(next[0].is_head);
  CHECK(next[1].is_head);
}

TEST_CASE("head-on robots cannot both be heads")
{
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 1), candidate(1, {3.0, 0.0}, {-1.0, 0.0}, 4)};
  CHECK(heads_conflict(snap[0], snap[1]));
  const auto next = update_priorities(snap, 30);
  CHECK_FALSE(next[0].is_head);
  CHECK(next[0].tabu_remaining == 30);
  CHECK(next[1].is_head);
  CHECK(next[1].importance == 5);
}

TEST_CASE("perpendicular head velocities count as conflicting")
{
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 0), candidate(1, {2.0, -2.0}, {0.0, 1.0}, 3)};
  CHECK(heads_conflict(snap[0], snap[1]));
  CHECK_FALSE(update_priorities(snap, 30)[0].is_head);
}

TEST_CASE("equal importance: the lower id keeps head")
{
  std::vector<RobotState> snap = {candidate(4, {0.0, 0.0}, {1.0, 0.0}, 2), candidate(2, {3.0, 0.0}, {-1.0, 0.0}, 2)};
  const auto next = update_priorities(snap, 30);
  CHECK_FALSE(next[0].is_head);
  CHECK(next[1].is_head);
}

TEST_CASE("single-robot update agrees with the batch update")
{
  std::mt19937_64 rng(73);
  for (int k = 0; k < 50; ++k) {
    const auto snap = random_snapshot(rng, 8);
    const auto all = update_priorities(snap, 30);
    for (std::size_t i = 0; i < snap.size(); ++i) {
      CHECK(update_priority(snap, i, 30) == all[i]);
    }
  }
}

TEST_CASE("no two heads conflict after an update")
{
  std::mt19937_64 rng(79);
  for (int k = 0; k < 400; ++k) {
    const auto snap = random_snapshot(rng, 2 + k % 12);
    const auto next = update_priorities(snap, 30);
    CHECK(count_conflicting_heads(snap, next) == 0);
    for (std::size_t a = 0; a < snap.size(); ++a) {
      for (std::size_t b = 0; b < snap.size(); ++b) {
        if (a == b || !next[a].is_head || !next[b].is_head) {
          continue;
        }
        const bool b_ranks_higher = snap[b].priority.importance > snap[a].priority.importance ||
                                    (snap[b].priority.importance == snap[a].priority.importance && snap[b].id < snap[a].id);
        if (b_ranks_higher) {
          CHECK_FALSE(conflict_oracle(snap[a], snap[b]));
        }
      }
    }
    for (std::size_t i = 0; i < snap.size(); ++i) {
      CHECK((next[i].tabu_remaining == 0 || !next[i].is_head));
    }
  }
}

TEST_CASE("importance never drops except at the goal")
{
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto snap = random_snapshot(rng, 10);
  for (auto & s : snap) {
    s.at_goal = false;
  }
  for (int step = 0; step < 300; ++step) {
    const auto next = update_priorities(snap, 5);
    for (std::size_t i = 0; i < snap.size(); ++i) {
      if (snap[i].at_goal) {
        CHECK(next[i].importance == 0);
      } else {
        CHECK(next[i].importance >= snap[i].priority.importance);
      }
      snap[i].priority = next[i];
      snap[i] = [&] {
        RobotState r = snap[i];
        r.pose.axle_center = r.pose.axle_center + Vec2{0.3 * u(rng), 0.3 * u(rng)};
        r.head_candidate.v = {2.0 * u(rng), 2.0 * u(rng)};
        r.at_goal = u(rng) > 0.95;
        return r;
      }();
    }
  }
}

TEST_CASE("a demoted robot is eligible again after exactly eta updates")
{
  const int eta = 30;
  std::vector<RobotState> snap = {candidate(0, {0.0, 0.0}, {1.0, 0.0}, 4)};
  snap[0].priority = {false, eta, 4};
  for (int k = 1; k <= eta; ++k) {
    snap[0].priority = update_priority(snap, 0, eta);
    CHECK_FALSE(snap[0].priority.is_head);
    CHECK(snap[0].priority.tabu_remaining == eta - k);
  }
  snap[0].priority = update_priority(snap, 0, eta);
  CHECK(snap[0].priority == PriorityState{true, 0, 5});
}
