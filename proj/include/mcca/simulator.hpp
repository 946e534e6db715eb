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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcca/mcca.hpp"
#include "mcca/orca.hpp"
#include "mcca/priority.hpp"
#include "mcca/qp.hpp"
#include "mcca/robot_state.hpp"

namespace mcca
{

struct SimConfig
{
  double dt = 0.25;
  double tau = 17.0;
  MccaWeights weights;
  double mu = 9.0;
  AngularForm angular_form = AngularForm::braking;
  int eta = 30;
  double noise_position = 0.01;           // m, uniform per axis
  double noise_heading = deg_to_rad(1.0); // rad, uniform
  std::uint64_t seed = 1;
  double goal_tolerance = 0.1;
  int max_ticks = 2400;
  double mask_cap_factor = 4.0;
  /// Linearize the obstacle planes of a masked-velocity solve about the
  /// robot's previous masked velocity rather than its physical velocity.
  bool mask_self_linearize = true;
  double deadlock_window = 60.0;  // s
  double deadlock_eps = 0.2;      // m
  double collision_substep = 0.01;  // s
  /// Cross-check every holonomic solve against a local brute-force grid.
  bool oracle_mode = false;

  void validate() const;
  OrcaParams orca() const { return {tau, dt}; }
  MaskParams mask() const { return {orca(), weights, mask_cap_factor}; }
};

struct RobotSpec
{
  int id = 0;
  Pose start;
  std::vector<Vec2> waypoints;
  bool loop = false;
  DiffDriveParams params;

  bool operator==(const RobotSpec &) const = default;
};

struct CollisionEvent
{
  int a = 0;
  int b = 0;
  int tick = 0;
  double depth = 0.0;  // m
};

struct DeadlockFlag
{
  int robot = 0;
  int tick = 0;  // tick at which the window closed
};

struct Metrics
{
  std::vector<CollisionEvent> collisions;
  double min_clearance = std::numeric_limits<double>::infinity();
  std::vector<DeadlockFlag> deadlocks;
  /// First tick each robot reached its final waypoint; -1 if never.
  std::vector<int> goal_completion_ticks;
  /// Waypoints reached per robot.
  std::vector<int> waypoints_reached;
  std::vector<double> tick_solve_seconds;
  int priority_violations = 0;
  int ticks = 0;
  int max_heads = 0;
};

/// Deterministic per-robot noise stream.
class NoiseStream
{
public:
  NoiseStream() = default;
  NoiseStream(std::uint64_t seed, int robot_id);
  /// Uniform in [-amplitude, amplitude).
  double uniform(double amplitude);

private:
  std::mt19937_64 engine_;
};

/// Everything the simulator owns: true robot bodies, their last broadcast,
/// the static obstacles.
struct World
{
  struct Body
  {
    Pose pose;
    double v_left = 0.0;
    double v_right = 0.0;
    std::vector<Vec2> waypoints;
    std::size_t waypoint = 0;
    bool loop = false;
    NoiseStream noise;
  };

  std::vector<ObstacleSegment> obstacles;
  std::vector<Body> bodies;
  /// Broadcast snapshot: what every robot published at the end of the
  /// previous tick (noisy pose reading included).
  std::vector<RobotState> broadcast;
  int tick = 0;
  Metrics metrics;
  /// Effective-centre history for deadlock detection, one entry per tick.
  std::vector<std::vector<Vec2>> history;
};

class SimulationError : public std::runtime_error
{
public:
  SimulationError(const std::string & what, std::string snapshot)
  : std::runtime_error(what), snapshot_(std::move(snapshot))
  {
  }
  /// JSON dump of the broadcast snapshot the failing tick started from.
  const std::string & snapshot() const { return snapshot_; }

private:
  std::string snapshot_;
};

/// Goal-directed velocity of the effective centre, capped at v_max; zero
/// within `goal_tolerance` of the goal.
Vec2 preferred_velocity(const RobotState & robot, double goal_tolerance);

World make_world(
  const std::vector<ObstacleSegment> & obstacles, const std::vector<RobotSpec> & robots,
  const SimConfig & config);

/// Wheel-speed command and the intermediate quantities of one robot's cycle.
struct RobotPlan
{
  double v_left = 0.0;
  double v_right = 0.0;
  MaskedVelocity masked;
  Vec2 v_pref;
  Vec2 v_holonomic;
  PlaneSet planes;
};

/// One control cycle of robot `index` against the broadcast snapshot, with
/// its priority for this tick already decided.
RobotPlan plan_robot(
  std::span<const RobotState> snapshot, std::size_t index, const PriorityState & priority,
  const std::vector<ObstacleSegment> & obstacles, const SimConfig & config);

/// Advance the world by one control cycle.
void tick(World & world, const SimConfig & config);

/// Pairs whose body circles (radius R around the axle centre) overlap.
std::vector<CollisionEvent> detect_collisions(const World & world);

/// Robots away from their goal whose effective centre moved less than `eps`
/// over the last `window` seconds.
std::vector<DeadlockFlag> detect_deadlock(const World & world, const SimConfig & config);

/// One CSV line per robot per tick.
class TrajectoryLog
{
public:
  static const char * header();
  void record(const World & world);
  const std::string & text() const { return text_; }

private:
  std::string text_;
};

struct RunResult
{
  TrajectoryLog log;
  Metrics metrics;
  World world;
};

/// Tick until every non-looping robot is at its final goal or `max_ticks`.
RunResult run(
  const std::vector<ObstacleSegment> & obstacles, const std::vector<RobotSpec> & robots,
  const SimConfig & config);

/// Metrics summary as JSON text.
std::string metrics_json(const Metrics & metrics, const SimConfig & config);

/// Snapshot as JSON text (diagnostics).
std::string snapshot_json(std::span<const RobotState> snapshot);

}  // namespace mcca
