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

#include "mcca/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace mcca
{

void SimConfig::validate() const
{
  orca().validate();
  weights.validate();
  if (!(mu > 1.0)) {
    throw std::invalid_argument("mu must exceed 1");
  }
  if (eta < 0) {
    throw std::invalid_argument("eta must be nonnegative");
  }
  if (noise_position < 0.0 || noise_heading < 0.0) {
    throw std::invalid_argument("noise amplitudes must be nonnegative");
  }
  if (!(goal_tolerance > 0.0) || max_ticks < 0 || !(mask_cap_factor > 0.0)) {
    throw std::invalid_argument("invalid goal tolerance, tick budget or mask cap");
  }
  if (!(deadlock_window > 0.0) || !(deadlock_eps > 0.0) || !(collision_substep > 0.0)) {
    throw std::invalid_argument("monitor windows must be positive");
  }
}

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, int robot_id)
: engine_(splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(robot_id) + 1U)))
{
}

double NoiseStream::uniform(double amplitude)
{
  // 53 random bits mapped to [0, 1); independent of the standard library's
  // distribution implementations.
  const double u = static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
  return amplitude * (2.0 * u - 1.0);
}

Vec2 preferred_velocity(const RobotState & robot, double goal_tolerance)
{
  const Vec2 d = robot.goal - robot.position();
  const double dist = d.norm();
  if (dist <= goal_tolerance) {
    return {};
  }
  if (dist > robot.params.v_max) {
    return d * (robot.params.v_max / dist);
  }
  return d;
}

namespace
{

Vec2 current_goal(const World::Body & body)
{
  return body.waypoints.empty() ? effective_center(body.pose, DiffDriveParams{}) : body.waypoints[body.waypoint];
}

// Noisy self-reading, goal bookkeeping and the head candidate.
RobotState sense(
  World & world, std::size_t i, const RobotState & previous, const MaskedVelocity & masked,
  const PriorityState & priority, const SimConfig & config)
{
  World::Body & body = world.bodies[i];
  RobotState s = previous;
  s.pose.axle_center = body.pose.axle_center +
                       Vec2{body.noise.uniform(config.noise_position), body.noise.uniform(config.noise_position)};
  s.pose.heading = wrap_angle(body.pose.heading + body.noise.uniform(config.noise_heading));
  s.v_left = body.v_left;
  s.v_right = body.v_right;
  const BodyVelocity bv = forward_kinematics(body.v_left, body.v_right, s.pose.heading, s.params);
  s.effective_velocity = {bv.vx, bv.vy};
  s.masked = masked;
  s.priority = priority;

  Metrics & m = world.metrics;
  s.at_goal = false;
  if (body.waypoints.empty()) {
    s.goal = s.position();
    s.at_goal = true;
  } else {
    s.goal = body.waypoints[body.waypoint];
    if ((s.position() - s.goal).norm() <= config.goal_tolerance) {
      s.at_goal = true;
      const bool last = body.waypoint + 1 == body.waypoints.size();
      if (!last) {
        ++body.waypoint;
        ++m.waypoints_reached[i];
      } else if (body.loop) {
        body.waypoint = 0;
        ++m.waypoints_reached[i];
      } else if (m.goal_completion_ticks[i] < 0) {
        m.goal_completion_ticks[i] = world.tick;
        ++m.waypoints_reached[i];
      }
      s.goal = body.waypoints[body.waypoint];
    }
  }
  RobotState lin = s;
  if (config.mask_self_linearize) {
    lin.effective_velocity = previous.head_candidate.v;
  }
  s.head_candidate = masked_velocity_head(
    lin, preferred_velocity(s, config.goal_tolerance), world.obstacles, config.mask());
  return s;
}

bool finished(const World & world)
{
  if (world.bodies.empty()) {
    return true;
  }
  for (std::size_t i = 0; i < world.bodies.size(); ++i) {
    const auto & b = world.bodies[i];
    if (b.waypoints.empty()) {
      continue;
    }
    if (b.loop || world.metrics.goal_completion_ticks[i] < 0) {
      return false;
    }
  }
  return true;
}

double holonomic_objective(const Vec2 & v, const Vec2 & v_pref, const PlaneSet & planes, const MccaWeights & w)
{
  double f = w.alpha1 * (v - v_pref).squared_norm();
  const auto add = [&](const std::vector<HalfPlane> & group, double weight) {
    for (const auto & hp : group) {
      const double d = std::max(0.0, halfplane_violation(v, hp));
      f += weight * d * d;
    }
  };
  add(planes.obstacle, w.alpha2);
  add(planes.robot, w.alpha3);
  add(planes.mcca, w.alpha4);
  return f;
}

// Brute-force neighbourhood check of a holonomic optimum.
void oracle_check(const Vec2 & v, const Vec2 & v_pref, const PlaneSet & planes, const MccaWeights & w, double cap)
{
  const double f = holonomic_objective(v, v_pref, planes, w);
  double best = std::numeric_limits<double>::infinity();
  for (int i = -40; i <= 40; ++i) {
    for (int j = -40; j <= 40; ++j) {
      const Vec2 q{std::clamp(v.x + i * 0.00125, -cap, cap), std::clamp(v.y + j * 0.00125, -cap, cap)};
      best = std::min(best, holonomic_objective(q, v_pref, planes, w));
    }
  }
  if (f > best + 1e-9 * (1.0 + std::abs(best))) {
    throw QpError("oracle mode: brute-force grid beats the QP optimum", f - best);
  }
}

}  // namespace

World make_world(
  const std::vector<ObstacleSegment> & obstacles, const std::vector<RobotSpec> & robots,
  const SimConfig & config)
{
  config.validate();
  World world;
  world.obstacles = obstacles;
  std::set<int> ids;
  for (const auto & spec : robots) {
    spec.params.validate();
    if (!ids.insert(spec.id).second) {
      throw std::invalid_argument("duplicate robot id " + std::to_string(spec.id));
    }
    World::Body body;
    body.pose = spec.start;
    body.pose.heading = wrap_angle(body.pose.heading);
    body.waypoints = spec.waypoints;
    body.loop = spec.loop && spec.waypoints.size() > 1;
    body.noise = NoiseStream(config.seed, spec.id);
    world.bodies.push_back(std::move(body));
  }
  const std::size_t n = robots.size();
  world.metrics.goal_completion_ticks.assign(n, -1);
  world.metrics.waypoints_reached.assign(n, 0);
  world.broadcast.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    RobotState blank;
    blank.id = robots[i].id;
    blank.params = robots[i].params;
    world.broadcast[i] = sense(world, i, blank, MaskedVelocity{}, PriorityState{}, config);
  }
  std::vector<Vec2> centres;
  for (const auto & b : world.bodies) {
    centres.push_back(b.pose.axle_center);
  }
  world.history.clear();
  std::vector<Vec2> eff;
  for (std::size_t i = 0; i < n; ++i) {
    eff.push_back(effective_center(world.bodies[i].pose, robots[i].params));
  }
  world.history.push_back(std::move(eff));
  for (const auto & ev : detect_collisions(world)) {
    world.metrics.collisions.push_back(ev);
  }
  return world;
}

RobotPlan plan_robot(
  std::span<const RobotState> snapshot, std::size_t index, const PriorityState & priority,
  const std::vector<ObstacleSegment> & obstacles, const SimConfig & config)
{
  RobotState self = snapshot[index];
  self.priority = priority;
  const OrcaParams orca = config.orca();
  const double cap = config.mask_cap_factor * self.params.v_max;

  RobotPlan plan;
  plan.v_pref = preferred_velocity(self, config.goal_tolerance);
  plan.planes.obstacle = orca_obstacle_halfplanes(self, obstacles, orca);
  std::vector<MaskedNeighbor> others;
  for (std::size_t j = 0; j < snapshot.size(); ++j) {
    if (j == index) {
      continue;
    }
    plan.planes.robot.push_back(orca_robot_halfplane(self, snapshot[j], orca));
    others.push_back({&snapshot[j], snapshot[j].masked});
  }

  if (priority.is_head) {
    plan.masked = self.head_candidate;
  } else {
    plan.planes.mcca = mcca_halfplanes(self, others, orca);
    PlaneSet mask_planes;
    if (config.mask_self_linearize) {
      RobotState lin = self;
      lin.effective_velocity = self.masked.v;
      mask_planes.obstacle = orca_obstacle_halfplanes(lin, obstacles, orca);
    } else {
      mask_planes.obstacle = plan.planes.obstacle;
    }
    mask_planes.mcca = plan.planes.mcca;
    plan.masked = solve_masked(plan.v_pref, mask_planes, config.weights, cap);
    if (config.oracle_mode) {
      oracle_check(plan.masked.v, plan.v_pref, mask_planes, config.weights, cap);
    }
  }

  const QpSolution hol = solve(build_holonomic(plan.v_pref, plan.planes, config.weights, cap));
  plan.v_holonomic = holonomic_velocity(hol);
  if (config.oracle_mode) {
    oracle_check(plan.v_holonomic, plan.v_pref, plan.planes, config.weights, cap);
  }

  const double omega = (self.v_right - self.v_left) / self.params.axle_length;
  const int omega_sign = omega > 1e-9 ? 1 : (omega < -1e-9 ? -1 : 0);
  DiffDriveInput in;
  in.v_pref = plan.v_pref;
  in.heading = self.pose.heading;
  in.v_left = self.v_left;
  in.v_right = self.v_right;
  in.dt = config.dt;
  in.angular = angular_constraint(
    omega_sign, self.pose.heading, plan.v_holonomic, config.mu, self.params.a_max,
    self.params.axle_length, config.angular_form, config.dt);
  const QpProblem dd = build_diffdrive(in, self.params, plan.planes, config.weights);
  const QpSolution sol = solve(dd);
  plan.v_left = std::clamp(sol.x[0], dd.bounds()[0].lo, dd.bounds()[0].hi);
  plan.v_right = std::clamp(sol.x[1], dd.bounds()[1].lo, dd.bounds()[1].hi);
  return plan;
}

std::vector<CollisionEvent> detect_collisions(const World & world)
{
  std::vector<CollisionEvent> out;
  const auto & b = world.bodies;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const double reach = world.broadcast[i].params.body_radius + world.broadcast[j].params.body_radius;
      const double dist = (b[i].pose.axle_center - b[j].pose.axle_center).norm();
      if (dist < reach) {
        out.push_back({world.broadcast[i].id, world.broadcast[j].id, world.tick, reach - dist});
      }
    }
  }
  return out;
}

std::vector<DeadlockFlag> detect_deadlock(const World & world, const SimConfig & config)
{
  std::vector<DeadlockFlag> out;
  const auto window = static_cast<std::size_t>(std::lround(config.deadlock_window / config.dt));
  if (world.history.size() <= window) {
    return out;
  }
  const auto & now = world.history.back();
  const auto & then = world.history[world.history.size() - 1 - window];
  for (std::size_t i = 0; i < world.bodies.size(); ++i) {
    const auto & body = world.bodies[i];
    if (body.waypoints.empty()) {
      continue;
    }
    const Vec2 goal = current_goal(body);
    if ((now[i] - goal).norm() <= config.goal_tolerance) {
      continue;
    }
    if ((now[i] - then[i]).norm() < config.deadlock_eps) {
      out.push_back({world.broadcast[i].id, world.tick});
    }
  }
  return out;
}

void tick(World & world, const SimConfig & config)
{
  const auto start = std::chrono::steady_clock::now();
  const std::vector<RobotState> snapshot = world.broadcast;
  const std::size_t n = snapshot.size();

  const std::vector<PriorityState> priorities = update_priorities(snapshot, config.eta);
  world.metrics.priority_violations += count_conflicting_heads(snapshot, priorities);
  const int heads = static_cast<int>(std::count_if(
    priorities.begin(), priorities.end(), [](const PriorityState & p) { return p.is_head; }));
  world.metrics.max_heads = std::max(world.metrics.max_heads, heads);

  std::vector<RobotPlan> plans;
  plans.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      plans.push_back(plan_robot(snapshot, i, priorities[i], world.obstacles, config));
    } catch (const std::exception & e) {
      throw SimulationError(
        "tick " + std::to_string(world.tick) + ", robot " + std::to_string(snapshot[i].id) + ": " + e.what(),
        snapshot_json(snapshot));
    }
  }

  // Actuation, with sub-step sampling for collisions.
  std::vector<Pose> before;
  for (const auto & b : world.bodies) {
    before.push_back(b.pose);
  }
  const int substeps = std::max(1, static_cast<int>(std::lround(config.dt / config.collision_substep)));
  std::map<std::pair<int, int>, double> worst;
  for (int s = 1; s <= substeps; ++s) {
    const double h = config.dt * s / substeps;
    std::vector<Vec2> centres;
    for (std::size_t i = 0; i < n; ++i) {
      centres.push_back(
        integrate(before[i], plans[i].v_left, plans[i].v_right, h, snapshot[i].params).axle_center);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double reach = snapshot[i].params.body_radius + snapshot[j].params.body_radius;
        const double gap = (centres[i] - centres[j]).norm() - reach;
        world.metrics.min_clearance = std::min(world.metrics.min_clearance, gap);
        if (gap < 0.0) {
          auto & d = worst[{snapshot[i].id, snapshot[j].id}];
          d = std::max(d, -gap);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto & body = world.bodies[i];
    body.pose = integrate(before[i], plans[i].v_left, plans[i].v_right, config.dt, snapshot[i].params);
    body.v_left = plans[i].v_left;
    body.v_right = plans[i].v_right;
  }
  ++world.tick;
  for (const auto & [pair, depth] : worst) {
    world.metrics.collisions.push_back({pair.first, pair.second, world.tick, depth});
  }

  // Broadcast.
  std::vector<RobotState> next(n);
  std::vector<Vec2> eff;
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = sense(world, i, snapshot[i], plans[i].masked, priorities[i], config);
    eff.push_back(effective_center(world.bodies[i].pose, snapshot[i].params));
  }
  world.broadcast = std::move(next);
  world.history.push_back(std::move(eff));
  const auto window = static_cast<std::size_t>(std::lround(config.deadlock_window / config.dt));
  if (world.history.size() > window + 2) {
    world.history.erase(world.history.begin());
  }

  // Record each stuck episode once, when it starts.
  for (const auto & flag : detect_deadlock(world, config)) {
    const bool continuing = std::any_of(
      world.metrics.deadlocks.rbegin(), world.metrics.deadlocks.rend(),
      [&](const DeadlockFlag & f) { return f.robot == flag.robot && f.tick == world.tick - 1; });
    if (continuing) {
      for (auto & f : world.metrics.deadlocks) {
        if (f.robot == flag.robot && f.tick == world.tick - 1) {
          f.tick = world.tick;
        }
      }
    } else {
      world.metrics.deadlocks.push_back(flag);
    }
  }

  world.metrics.ticks = world.tick;
  world.metrics.tick_solve_seconds.push_back(
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

const char * TrajectoryLog::header()
{
  return "tick,id,x,y,theta,v_l,v_r,v_x,v_y,mask_x,mask_y,priority,S,T\n";
}

void TrajectoryLog::record(const World & world)
{
  if (text_.empty()) {
    text_ = header();
  }
  char buf[512];
  for (std::size_t i = 0; i < world.bodies.size(); ++i) {
    const auto & b = world.bodies[i];
    const auto & s = world.broadcast[i];
    const BodyVelocity v = forward_kinematics(b.v_left, b.v_right, b.pose.heading, s.params);
    std::snprintf(
      buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%c,%d,%d\n", world.tick,
      s.id, b.pose.axle_center.x, b.pose.axle_center.y, b.pose.heading, b.v_left, b.v_right, v.vx,
      v.vy, s.masked.v.x, s.masked.v.y, s.priority.is_head ? 'H' : 'N', s.priority.importance,
      s.priority.tabu_remaining);
    text_ += buf;
  }
}

RunResult run(
  const std::vector<ObstacleSegment> & obstacles, const std::vector<RobotSpec> & robots,
  const SimConfig & config)
{
  RunResult result{TrajectoryLog{}, Metrics{}, make_world(obstacles, robots, config)};
  result.log.record(result.world);
  while (result.world.tick < config.max_ticks && !finished(result.world)) {
    tick(result.world, config);
    result.log.record(result.world);
  }
  result.metrics = result.world.metrics;
  return result;
}

std::string metrics_json(const Metrics & m, const SimConfig & config)
{
  nlohmann::json j;
  j["ticks"] = m.ticks;
  j["simulated_seconds"] = m.ticks * config.dt;
  j["collision_count"] = m.collisions.size();
  auto & cols = j["collisions"] = nlohmann::json::array();
  for (const auto & c : m.collisions) {
    cols.push_back({{"a", c.a}, {"b", c.b}, {"tick", c.tick}, {"depth_m", c.depth}});
  }
  j["min_clearance_m"] = std::isfinite(m.min_clearance) ? nlohmann::json(m.min_clearance) : nlohmann::json();
  j["deadlock_count"] = m.deadlocks.size();
  auto & dls = j["deadlocks"] = nlohmann::json::array();
  for (const auto & d : m.deadlocks) {
    dls.push_back({{"robot", d.robot}, {"tick", d.tick}});
  }
  j["goal_completion_ticks"] = m.goal_completion_ticks;
  j["waypoints_reached"] = m.waypoints_reached;
  j["priority_violations"] = m.priority_violations;
  j["max_heads"] = m.max_heads;
  if (!m.tick_solve_seconds.empty()) {
    std::vector<double> t = m.tick_solve_seconds;
    std::sort(t.begin(), t.end());
    j["tick_seconds_median"] = t[t.size() / 2];
    j["tick_seconds_max"] = t.back();
  }
  return j.dump(2) + "\n";
}

std::string snapshot_json(std::span<const RobotState> snapshot)
{
  nlohmann::json arr = nlohmann::json::array();
  for (const auto & s : snapshot) {
    arr.push_back({
      {"id", s.id},
      {"axle_center_m", {s.pose.axle_center.x, s.pose.axle_center.y}},
      {"heading_rad", s.pose.heading},
      {"wheel_speeds_mps", {s.v_left, s.v_right}},
      {"effective_velocity_mps", {s.effective_velocity.x, s.effective_velocity.y}},
      {"masked_velocity_mps", {s.masked.v.x, s.masked.v.y}},
      {"head_candidate_mps", {s.head_candidate.v.x, s.head_candidate.v.y}},
      {"is_head", s.priority.is_head},
      {"tabu", s.priority.tabu_remaining},
      {"importance", s.priority.importance},
      {"goal_m", {s.goal.x, s.goal.y}},
      {"at_goal", s.at_goal},
    });
  }
  return arr.dump(2) + "\n";
}

}  // namespace mcca
