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

// Command-line scenario runner.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mcca/scenario.hpp"

namespace
{

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Masked cooperative collision avoidance simulator"};

  std::string scenario = "scenario1";
  std::string scenario_file;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> max_ticks;
  std::vector<std::string> sets;
  bool oracle = false;
  bool list = false;
  std::string dump_dir;

  app.add_option("-s,--scenario", scenario, "Built-in scenario name (scenario1 .. scenario7)");
  app.add_option("-f,--file", scenario_file, "Scenario JSON file (takes precedence over --scenario)")
    ->check(CLI::ExistingFile);
  app.add_option("-o,--out", out_dir, "Output directory for trajectory.csv, metrics.json, traces.svg");
  app.add_option("--seed", seed, "Noise seed");
  app.add_option("--max-ticks", max_ticks, "Tick budget");
  app.add_option("--set", sets, "Parameter override key=value (repeatable); see --list");
  app.add_flag("--oracle", oracle, "Cross-check every holonomic solve against a brute-force grid");
  app.add_flag("--list", list, "List built-in scenarios and override keys, then exit");
  app.add_option("--dump-builtins", dump_dir, "Write every built-in scenario as JSON into this directory, then exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list) {
      std::cout << "scenarios:\n";
      for (const auto & name : mcca::builtin_scenarios()) {
        std::cout << "  " << name << ": " << mcca::builtin_scenario(name).description << "\n";
      }
      std::cout << "override keys:\n";
      for (const auto & key : mcca::override_keys()) {
        std::cout << "  " << key << "\n";
      }
      return 0;
    }
    if (!dump_dir.empty()) {
      std::filesystem::create_directories(dump_dir);
      for (const auto & name : mcca::builtin_scenarios()) {
        const auto path = std::filesystem::path(dump_dir) / (name + ".json");
        std::ofstream(path, std::ios::binary) << mcca::scenario_to_json(mcca::builtin_scenario(name));
        std::cout << path.string() << "\n";
      }
      return 0;
    }

    const mcca::ScenarioSpec spec = scenario_file.empty()
                                      ? mcca::builtin_scenario(scenario)
                                      : mcca::scenario_from_json(read_file(scenario_file));
    mcca::Overrides overrides;
    for (const auto & s : sets) {
      overrides.insert_or_assign(mcca::parse_override(s).first, mcca::parse_override(s).second);
    }
    if (seed) {
      overrides["seed"] = static_cast<double>(*seed);
    }
    if (max_ticks) {
      overrides["max_ticks"] = *max_ticks;
    }
    if (oracle) {
      overrides["oracle_mode"] = 1.0;
    }

    const auto outcome = mcca::run_scenario(spec, overrides, std::filesystem::path(out_dir));
    if (outcome.status == mcca::ExitStatus::solver_failure) {
      std::cerr << "solver failure: " << outcome.error << "\n"
                << "snapshot written to " << (std::filesystem::path(out_dir) / "failure_snapshot.json").string()
                << "\n";
      return static_cast<int>(outcome.status);
    }
    const auto & m = outcome.result->metrics;
    int completed = 0;
    for (int t : m.goal_completion_ticks) {
      completed += t >= 0 ? 1 : 0;
    }
    std::cout << spec.name << ": " << m.ticks << " ticks, " << m.collisions.size() << " collisions, "
              << m.deadlocks.size() << " deadlock flags, " << completed << "/" << m.goal_completion_ticks.size()
              << " robots at final goal, min clearance " << m.min_clearance << " m\n";
    return static_cast<int>(outcome.status);
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
