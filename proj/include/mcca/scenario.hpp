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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcca/simulator.hpp"

namespace mcca
{

/// Named parameter overrides, keyed with explicit units ("dt_s", "a_max_mps2",
/// ...). See `override_keys()`.
using Overrides = std::map<std::string, double>;

struct ScenarioSpec
{
  std::string name;
  std::string description;
  std::vector<ObstacleSegment> obstacles;
  std::vector<RobotSpec> robots;
  Overrides config;

  bool operator==(const ScenarioSpec &) const = default;
};

/// Every key accepted by `apply_overrides`.
std::vector<std::string> override_keys();

/// Apply overrides to the simulator config and to every robot's parameters.
/// Throws std::invalid_argument on an unknown key.
void apply_overrides(const Overrides & overrides, SimConfig & config, std::vector<RobotSpec> & robots);

/// Parse "key=value". Throws std::invalid_argument on malformed text.
std::pair<std::string, double> parse_override(const std::string & text);

/// Throws std::invalid_argument if two robots overlap at their start poses, a
/// robot starts on an obstacle, or a waypoint is closer to an obstacle than
/// the effective radius.
void validate_scenario(const ScenarioSpec & spec);

std::string scenario_to_json(const ScenarioSpec & spec);
ScenarioSpec scenario_from_json(const std::string & text);

/// Built-in scenario names, "scenario1" .. "scenario7".
std::vector<std::string> builtin_scenarios();
/// Throws std::invalid_argument for an unknown name.
ScenarioSpec builtin_scenario(const std::string & name);

/// Axis-aligned rectangle outline.
std::vector<ObstacleSegment> rectangle(const Vec2 & lo, const Vec2 & hi);

/// SVG with one polyline per robot over the obstacle segments. Takes the CSV
/// produced by TrajectoryLog.
std::string emit_traces(const std::string & log_csv, const std::vector<ObstacleSegment> & obstacles);

enum class ExitStatus : int
{
  clean = 0,
  collision = 2,
  deadlock = 3,
  solver_failure = 4,
};

struct ScenarioOutcome
{
  ExitStatus status = ExitStatus::clean;
  std::optional<RunResult> result;  // empty after a solver failure
  std::string error;
};

/// Run a scenario with `overrides` applied on top of the scenario's own. When
/// `out_dir` is given, writes trajectory.csv, metrics.json and traces.svg
/// there (or failure_snapshot.json after a solver failure).
ScenarioOutcome run_scenario(
  const ScenarioSpec & spec, const Overrides & overrides,
  const std::optional<std::filesystem::path> & out_dir);

}  // namespace mcca
