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

// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "mcca/orca.hpp"
#include "mcca/qp.hpp"
#include "mcca/scenario.hpp"
#include "oracles.hpp"

using namespace mcca;
using Clock = std::chrono::steady_clock;

namespace
{

// Criterion 1
constexpr int kQpInstances = 200;
constexpr double kQpGrid = 0.005;
constexpr double kQpObjectiveTol = 1e-3;
constexpr double kQpMedianSeconds = 1e-3;
constexpr double kQpTotalSeconds = 30.0;
// Criterion 2
constexpr int kOrcaPairs = 500;
constexpr double kOrcaSubstep = 1e-3;
// Criteria 3-5
constexpr double kGoalSeconds = 300.0;
constexpr double kCorridorRuntimeSeconds = 60.0;
constexpr double kCongestionSeconds = 600.0;
// Criterion 7
constexpr int kOscillationSkipTicks = 8;  // first 2 s at dt = 0.25
constexpr int kOscillationTicks = 240;
constexpr double kOmegaBand = 0.1;        // rad/s, dead band for sign changes
constexpr int kOscillationMaxChanges = 2;
// Criterion 8
constexpr int kSchedules = 20;
constexpr double kScheduleSeconds = 10.0;
constexpr double kScheduleSegment = 0.25;
constexpr double kMarchStep = 1e-4;
constexpr double kKinematicsTol = 1e-6;
// Criterion 9
constexpr int kDeterminismTicks = 200;
// Criterion 10
constexpr double kRadiusRatio = 1.031;

int failures = 0;
int priority_violations = 0;
int priority_runs = 0;

void report(int id, bool pass, const std::string & detail)
{
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char * f, double a = 0, double b = 0, double c = 0, double d = 0, double e = 0)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d, e);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void qp_oracle()
{
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> planes_count(0, 6);
  const MccaWeights w;
  const double box = 4.0;
  std::vector<double> solve_times;
  double worst_excess = -1e300;  // solver objective minus grid optimum
  double worst_local = -1e300;   // solver objective minus fine local grid optimum
  const auto start = Clock::now();
  for (int k = 0; k < kQpInstances; ++k) {
    PlaneSet planes;
    std::vector<oracle::SoftPlane> soft;
    const Vec2 v_pref{2.0 * u(rng), 2.0 * u(rng)};
    Vec2 lo = v_pref;
    Vec2 hi = v_pref;
    const int m = planes_count(rng);
    for (int i = 0; i < m; ++i) {
      const double ang = kPi * u(rng);
      const HalfPlane h = HalfPlane::from_normal({2.0 * u(rng), 2.0 * u(rng)}, {std::cos(ang), std::sin(ang)});
      const int group = static_cast<int>(rng() % 3);
      double weight = w.alpha2;
      if (group == 0) {
        planes.obstacle.push_back(h);
      } else if (group == 1) {
        planes.robot.push_back(h);
        weight = w.alpha3;
      } else {
        planes.mcca.push_back(h);
        weight = w.alpha4;
      }
      soft.push_back({h.point, h.direction, weight});
      lo = {std::min(lo.x, h.point.x), std::min(lo.y, h.point.y)};
      hi = {std::max(hi.x, h.point.x), std::max(hi.y, h.point.y)};
    }
    const auto t0 = Clock::now();
    const QpSolution s = solve(build_holonomic(v_pref, planes, w, box));
    solve_times.push_back(seconds_since(t0));
    const Vec2 v = holonomic_velocity(s);

    // The grid spans every plane point and v_pref with a margin, clipped to
    // the velocity box.
    const Vec2 glo{std::max(-box, lo.x - 0.5), std::max(-box, lo.y - 0.5)};
    const Vec2 ghi{std::min(box, hi.x + 0.5), std::min(box, hi.y + 0.5)};
    const auto grid = oracle::grid_minimum(v_pref, w.alpha1, soft, glo, ghi, kQpGrid);
    const double got = oracle::soft_objective(v, v_pref, w.alpha1, soft);
    worst_excess = std::max(worst_excess, got - grid.objective);
    const Vec2 llo{std::max(-box, v.x - 0.005), std::max(-box, v.y - 0.005)};
    const Vec2 lhi{std::min(box, v.x + 0.005), std::min(box, v.y + 0.005)};
    const auto local = oracle::grid_minimum(v_pref, w.alpha1, soft, llo, lhi, 1e-4);
    worst_local = std::max(worst_local, got - local.objective);
  }
  const double total = seconds_since(start);
  std::sort(solve_times.begin(), solve_times.end());
  const double median = solve_times[solve_times.size() / 2];
  const bool pass = worst_excess <= kQpObjectiveTol && worst_local <= kQpObjectiveTol &&
                    median < kQpMedianSeconds && total < kQpTotalSeconds;
  report(
    1, pass,
    fmt("max(solver - grid) = %.3g, max(solver - local fine grid) = %.3g, median solve %.3g ms, total %.2f s", worst_excess,
        worst_local, median * 1e3, total));
}

void orca_safety()
{
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const OrcaParams params = SimConfig{}.orca();
  int pairs = 0;
  int checked = 0;
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  while (pairs < kOrcaPairs) {
    const RobotState a = testing::robot_at(0, {4.0 * u(rng), 4.0 * u(rng)}, {2.0 * u(rng), 2.0 * u(rng)}, kPi * u(rng));
    const RobotState b = testing::robot_at(1, {4.0 * u(rng), 4.0 * u(rng)}, {2.0 * u(rng), 2.0 * u(rng)}, kPi * u(rng));
    const double rsum = a.radius() + b.radius();
    if ((a.position() - b.position()).norm() <= rsum) {
      continue;  // overlapping pairs get the one-step escape, not the horizon guarantee
    }
    ++pairs;
    const HalfPlane ha = orca_robot_halfplane(a, b, params);
    const HalfPlane hb = orca_robot_halfplane(b, a, params);
    std::vector<std::pair<Vec2, Vec2>> candidates;
    // The velocities a planner would pick: each current velocity pushed just
    // inside its own plane.
    const auto inside = [](Vec2 v, const HalfPlane & h) {
      const double viol = halfplane_violation(v, h);
      return viol > -1e-9 ? v + h.normal() * (viol + 1e-9) : v;
    };
    candidates.emplace_back(inside(a.effective_velocity, ha), inside(b.effective_velocity, hb));
    for (int t = 0; t < 400 && candidates.size() < 12; ++t) {
      const Vec2 va{3.0 * u(rng), 3.0 * u(rng)};
      const Vec2 vb{3.0 * u(rng), 3.0 * u(rng)};
      if (halfplane_violation(va, ha) < 0.0 && halfplane_violation(vb, hb) < 0.0) {
        candidates.emplace_back(va, vb);
      }
    }
    for (const auto & [va, vb] : candidates) {
      if (!(halfplane_violation(va, ha) < 0.0 && halfplane_violation(vb, hb) < 0.0)) {
        continue;
      }
      ++checked;
      const Vec2 p = a.position() - b.position();
      const Vec2 w = va - vb;
      double clearance = p.norm() - rsum;
      const int steps = static_cast<int>(std::lround(params.tau / kOrcaSubstep));
      for (int s = 1; s <= steps; ++s) {
        clearance = std::min(clearance, (p + w * (s * kOrcaSubstep)).norm() - rsum);
      }
      worst = std::min(worst, clearance);
      violations += clearance < 0.0 ? 1 : 0;
    }
  }
  report(
    2, violations == 0,
    fmt("%g pairs, %g velocity pairs checked over %g s, violations %g, min clearance %.3g m", pairs, checked,
        params.tau, violations, worst));
}

struct ScenarioRun
{
  ScenarioOutcome outcome;
  double seconds = 0.0;
  double dt = 0.25;
};

ScenarioRun run_builtin(const std::string & name, const Overrides & overrides)
{
  const auto start = Clock::now();
  ScenarioRun r{run_scenario(builtin_scenario(name), overrides, std::nullopt), 0.0};
  r.seconds = seconds_since(start);
  if (r.outcome.result) {
    priority_violations += r.outcome.result->metrics.priority_violations;
    ++priority_runs;
  }
  return r;
}

struct GoalSummary
{
  int reached = 0;
  int total = 0;
  int last_tick = -1;
};

GoalSummary goals(const Metrics & m)
{
  GoalSummary g;
  g.total = static_cast<int>(m.goal_completion_ticks.size());
  for (int t : m.goal_completion_ticks) {
    if (t >= 0) {
      ++g.reached;
      g.last_tick = std::max(g.last_tick, t);
    }
  }
  return g;
}

void corridor()
{
  const int ticks = static_cast<int>(kGoalSeconds / 0.25);
  const ScenarioRun r = run_builtin("scenario1", {{"max_ticks", static_cast<double>(ticks)}, {"seed", 1.0}});
  if (!r.outcome.result) {
    report(3, false, "solver failure: " + r.outcome.error);
    return;
  }
  const Metrics & m = r.outcome.result->metrics;
  const GoalSummary g = goals(m);
  const bool pass = m.collisions.empty() && m.deadlocks.empty() && g.reached == g.total &&
                    r.seconds < kCorridorRuntimeSeconds;
  report(
    3, pass,
    fmt("collisions %g, deadlock flags %g, goals %g/%g within %g s", m.collisions.size(), m.deadlocks.size(),
        g.reached, g.total, kGoalSeconds) +
      fmt(", runtime %.1f s", r.seconds));
}

void merge()
{
  const int ticks = static_cast<int>(kGoalSeconds / 0.25);
  const ScenarioRun r = run_builtin("scenario2", {{"max_ticks", static_cast<double>(ticks)}, {"seed", 1.0}});
  if (!r.outcome.result) {
    report(4, false, "solver failure: " + r.outcome.error);
    return;
  }
  const Metrics & m = r.outcome.result->metrics;
  const GoalSummary g = goals(m);
  report(
    4, m.collisions.empty() && g.reached == g.total,
    fmt("collisions %g, goals %g/%g within %g s (last at %g s)", m.collisions.size(), g.reached, g.total,
        kGoalSeconds, g.last_tick * 0.25) +
      fmt(", deadlock flags %g (not part of this criterion)", m.deadlocks.size()));
}

void congestion()
{
  const int ticks = static_cast<int>(kCongestionSeconds / 0.25);
  const ScenarioRun r = run_builtin("scenario5", {{"max_ticks", static_cast<double>(ticks)}, {"seed", 1.0}});
  if (!r.outcome.result) {
    report(5, false, "solver failure: " + r.outcome.error);
    return;
  }
  const Metrics & m = r.outcome.result->metrics;
  double deepest = 0.0;
  for (const auto & c : m.collisions) {
    deepest = std::max(deepest, c.depth);
  }
  int trips = 0;
  for (int n : m.waypoints_reached) {
    trips += n;
  }
  report(
    5, m.collisions.empty() && m.deadlocks.empty(),
    fmt("robots %g, collisions %g (deepest %.3g m), deadlock flags %g, waypoints reached %g",
        m.goal_completion_ticks.size(), m.collisions.size(), deepest, m.deadlocks.size(), trips) +
      fmt(", runtime %.1f s", r.seconds));
}

struct OscillationResult
{
  int sign_changes = 0;
  int goal_tick = -1;
  double turned = 0.0;  // total |heading change|, rad
};

// One robot, goal directly behind it, reduced wheel acceleration.
OscillationResult oscillation(double alpha5)
{
  const ScenarioSpec s7 = builtin_scenario("scenario7");
  RobotSpec r;
  r.id = 0;
  r.start = {{6.0, 0.0}, 0.0};
  r.waypoints = {{-6.0, 0.0}};
  r.params.a_max = 0.2;
  SimConfig config;
  config.mu = 9.0;
  config.weights.alpha5 = alpha5;
  config.max_ticks = kOscillationTicks;
  World world = make_world(s7.obstacles, {r}, config);
  OscillationResult out;
  int previous = 0;
  for (int k = 1; k <= kOscillationTicks && out.goal_tick < 0; ++k) {
    const double before = world.bodies[0].pose.heading;
    tick(world, config);
    const auto & b = world.bodies[0];
    out.turned += std::abs(wrap_angle(b.pose.heading - before));
    if (world.metrics.goal_completion_ticks[0] >= 0) {
      out.goal_tick = world.metrics.goal_completion_ticks[0];
    }
    const double omega = (b.v_right - b.v_left) / r.params.axle_length;
    const int sign = omega > kOmegaBand ? 1 : (omega < -kOmegaBand ? -1 : 0);
    if (k > kOscillationSkipTicks && sign != 0 && previous != 0 && sign != previous) {
      ++out.sign_changes;
    }
    if (sign != 0) {
      previous = sign;
    }
  }
  priority_violations += world.metrics.priority_violations;
  return out;
}

void heading_oscillation(const OscillationResult & with, const OscillationResult & without)
{
  const bool pass = with.sign_changes <= kOscillationMaxChanges && without.sign_changes > with.sign_changes;
  report(
    7, pass,
    fmt("omega sign changes after 2 s: alpha5=2e4 -> %g (goal tick %g, turned %.1f rad); ", with.sign_changes,
        with.goal_tick, with.turned) +
      fmt("alpha5=0 -> %g (goal tick %g, turned %.1f rad)", without.sign_changes, without.goal_tick, without.turned));
}

void kinematics_oracle()
{
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const DiffDriveParams p;
  double worst = 0.0;
  const int segments = static_cast<int>(std::lround(kScheduleSeconds / kScheduleSegment));
  for (int k = 0; k < kSchedules; ++k) {
    Pose exact{{0.0, 0.0}, 0.0};
    oracle::EulerPose fine{0.0, 0.0, 0.0};
    for (int s = 0; s < segments; ++s) {
      const double vl = u(rng);
      const double vr = u(rng);
      exact = integrate(exact, vl, vr, kScheduleSegment, p);
      fine = oracle::march(fine, vl, vr, p.axle_length, kScheduleSegment, kMarchStep);
      worst = std::max(worst, std::hypot(exact.axle_center.x - fine.x, exact.axle_center.y - fine.y));
    }
  }
  report(
    8, worst <= kKinematicsTol,
    fmt("%g schedules of %g s, max position gap to the %g s march %.3g m", kSchedules, kScheduleSeconds, kMarchStep,
        worst));
}

void determinism()
{
  int identical = 0;
  int total = 0;
  for (const auto & name : builtin_scenarios()) {
    const Overrides o{{"max_ticks", static_cast<double>(kDeterminismTicks)}, {"seed", 5.0}};
    const ScenarioRun a = run_builtin(name, o);
    const ScenarioRun b = run_builtin(name, o);
    ++total;
    if (a.outcome.result && b.outcome.result && a.outcome.result->log.text() == b.outcome.result->log.text()) {
      ++identical;
    }
  }
  report(9, identical == total, fmt("%g/%g scenarios byte-identical over %g ticks", identical, total, kDeterminismTicks));
}

}  // namespace

int main()
{
  qp_oracle();
  orca_safety();
  corridor();
  merge();
  congestion();
  const OscillationResult with = oscillation(2e4);
  const OscillationResult without = oscillation(0.0);
  report(
    6, priority_violations == 0,
    fmt("conflicting head pairs summed over the scenario runs of criteria 3-5 and 7: %g", priority_violations));
  heading_oscillation(with, without);
  kinematics_oracle();
  determinism();
  const DiffDriveParams p;
  report(
    10, p.effective_radius() / p.body_radius <= kRadiusRatio,
    fmt("(R+D)/R = %.5f with R = %g m, D = %g m", p.effective_radius() / p.body_radius, p.body_radius, p.offset));
  std::printf("%d criteria failed\n", failures);
  return failures;
}
