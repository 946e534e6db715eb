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

#include "mcca/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace mcca
{

using nlohmann::json;

namespace
{

using ConfigSetter = std::function<void(SimConfig &, double)>;
using ParamSetter = std::function<void(DiffDriveParams &, double)>;

int as_int(const std::string & key, double v)
{
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw std::invalid_argument(key + " must be an integer");
  }
  return static_cast<int>(v);
}

const std::map<std::string, ConfigSetter> & config_setters()
{
  static const std::map<std::string, ConfigSetter> setters{
    {"dt_s", [](SimConfig & c, double v) { c.dt = v; }},
    {"tau_s", [](SimConfig & c, double v) { c.tau = v; }},
    {"alpha1", [](SimConfig & c, double v) { c.weights.alpha1 = v; }},
    {"alpha2", [](SimConfig & c, double v) { c.weights.alpha2 = v; }},
    {"alpha3", [](SimConfig & c, double v) { c.weights.alpha3 = v; }},
    {"alpha4", [](SimConfig & c, double v) { c.weights.alpha4 = v; }},
    {"alpha5", [](SimConfig & c, double v) { c.weights.alpha5 = v; }},
    {"mu", [](SimConfig & c, double v) { c.mu = v; }},
    {"angular_braking",
     [](SimConfig & c, double v) { c.angular_form = v != 0.0 ? AngularForm::braking : AngularForm::printed; }},
    {"eta_ticks", [](SimConfig & c, double v) { c.eta = as_int("eta_ticks", v); }},
    {"noise_position_m", [](SimConfig & c, double v) { c.noise_position = v; }},
    {"noise_heading_rad", [](SimConfig & c, double v) { c.noise_heading = v; }},
    {"noise_heading_deg", [](SimConfig & c, double v) { c.noise_heading = deg_to_rad(v); }},
    {"seed",
     [](SimConfig & c, double v) {
       if (v < 0 || v != std::floor(v) || v > 9007199254740992.0) {
         throw std::invalid_argument("seed must be a nonnegative integer below 2^53");
       }
       c.seed = static_cast<std::uint64_t>(v);
     }},
    {"goal_tolerance_m", [](SimConfig & c, double v) { c.goal_tolerance = v; }},
    {"max_ticks", [](SimConfig & c, double v) { c.max_ticks = as_int("max_ticks", v); }},
    {"mask_cap_factor", [](SimConfig & c, double v) { c.mask_cap_factor = v; }},
    {"mask_self_linearize", [](SimConfig & c, double v) { c.mask_self_linearize = v != 0.0; }},
    {"deadlock_window_s", [](SimConfig & c, double v) { c.deadlock_window = v; }},
    {"deadlock_eps_m", [](SimConfig & c, double v) { c.deadlock_eps = v; }},
    {"collision_substep_s", [](SimConfig & c, double v) { c.collision_substep = v; }},
    {"oracle_mode", [](SimConfig & c, double v) { c.oracle_mode = v != 0.0; }},
  };
  return setters;
}

const std::map<std::string, ParamSetter> & param_setters()
{
  static const std::map<std::string, ParamSetter> setters{
    {"wheel_radius_m", [](DiffDriveParams & p, double v) { p.wheel_radius = v; }},
    {"axle_length_m", [](DiffDriveParams & p, double v) { p.axle_length = v; }},
    {"offset_m", [](DiffDriveParams & p, double v) { p.offset = v; }},
    {"body_radius_m", [](DiffDriveParams & p, double v) { p.body_radius = v; }},
    {"v_max_mps", [](DiffDriveParams & p, double v) { p.v_max = v; }},
    {"a_max_mps2", [](DiffDriveParams & p, double v) { p.a_max = v; }},
  };
  return setters;
}

json vec_json(const Vec2 & v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json & j)
{
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected a two-element array, got " + j.dump());
  }
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json params_json(const DiffDriveParams & p)
{
  return {
    {"wheel_radius_m", p.wheel_radius}, {"axle_length_m", p.axle_length},
    {"offset_m", p.offset},             {"body_radius_m", p.body_radius},
    {"v_max_mps", p.v_max},             {"a_max_mps2", p.a_max},
  };
}

DiffDriveParams params_from(const json & j)
{
  DiffDriveParams p;
  for (const auto & [key, value] : j.items()) {
    const auto it = param_setters().find(key);
    if (it == param_setters().end()) {
      throw std::invalid_argument("unknown robot parameter '" + key + "'");
    }
    it->second(p, value.get<double>());
  }
  return p;
}

// Scenario building blocks.

std::vector<ObstacleSegment> & operator+=(
  std::vector<ObstacleSegment> & lhs, const std::vector<ObstacleSegment> & rhs)
{
  lhs.insert(lhs.end(), rhs.begin(), rhs.end());
  return lhs;
}

RobotSpec robot(int id, const Vec2 & start, std::vector<Vec2> waypoints, bool loop = false)
{
  RobotSpec r;
  r.id = id;
  r.start.heading = std::atan2(waypoints.front().y - start.y, waypoints.front().x - start.x);
  // Place the axle so that the effective centre sits on `start`.
  r.start.axle_center = start - Vec2{std::cos(r.start.heading), std::sin(r.start.heading)} * r.params.offset;
  r.waypoints = std::move(waypoints);
  r.loop = loop;
  return r;
}

// Two rooms joined by a straight passage along the x axis. Each mouth opens
// through a 45-degree funnel of depth `funnel`, so that robots pressed
// against the room wall slide into the passage instead of stalling at a
// square corner.
std::vector<ObstacleSegment> rooms_with_passage(
  double half_length, double width, double funnel, double room_w, double room_h)
{
  const double hw = width / 2.0;
  const double x0 = half_length;
  const double x1 = half_length + funnel;
  const double x2 = half_length + funnel + room_w;
  const double hh = room_h / 2.0;
  std::vector<ObstacleSegment> w;
  for (double s : {-1.0, 1.0}) {
    for (double t : {-1.0, 1.0}) {
      if (funnel > 0.0) {
        w.push_back({{s * x0, t * hw}, {s * x1, t * (hw + funnel)}});
      }
      w.push_back({{s * x1, t * (hw + funnel)}, {s * x1, t * hh}});
      w.push_back({{s * x1, t * hh}, {s * x2, t * hh}});
    }
    w.push_back({{s * x2, -hh}, {s * x2, hh}});
    w.push_back({{-x0, s * hw}, {x0, s * hw}});
  }
  return w;
}

ScenarioSpec scenario1()
{
  ScenarioSpec s;
  s.name = "scenario1";
  s.description =
    "Two groups of five robots swap sides through a one-lane passage (width 1.2 m, length 4 m).";
  s.obstacles = rooms_with_passage(2.0, 1.2, 0.0, 10.0, 12.0);
  // Goal slots fan out from the passage exit so that no robot's exit line
  // runs past another robot already parked, and none sits on the axis where
  // the other group lines up.
  const Vec2 exit{1.5, 0.0};
  std::vector<Vec2> slots;
  for (const auto & [deg, r] : std::vector<std::pair<double, double>>{
         {-60.0, 4.5}, {-20.0, 4.5}, {20.0, 4.5}, {60.0, 4.5}, {40.0, 8.0}}) {
    slots.push_back(exit + Vec2{std::cos(deg_to_rad(deg)), std::sin(deg_to_rad(deg))} * r);
  }
  // The preferred velocity points straight at the current waypoint: each
  // robot lines up on the axis in front of its mouth, then heads for a
  // point just inside the far end. Both groups swap places exactly.
  int id = 0;
  for (const Vec2 & p : slots) {
    s.robots.push_back(robot(id++, {-p.x, p.y}, {{-5.5, 0.0}, exit, p}));
  }
  for (const Vec2 & p : slots) {
    s.robots.push_back(robot(id++, p, {{5.5, 0.0}, {-exit.x, 0.0}, {-p.x, p.y}}));
  }
  return s;
}

ScenarioSpec scenario2()
{
  ScenarioSpec s;
  s.name = "scenario2";
  s.description =
    "Two groups of eight robots swap sides through a two-lane passage (width 2.4 m, length 6 m).";
  s.obstacles = rooms_with_passage(3.0, 2.4, 1.5, 10.0, 12.0);
  std::vector<Vec2> slots;
  for (int col = 0; col < 4; ++col) {
    for (double y : {-1.8, 1.8}) {
      slots.push_back({5.0 + 1.5 * col, y * (col % 2 == 0 ? 1.0 : 0.5)});
    }
  }
  int id = 0;
  for (const Vec2 & p : slots) {
    s.robots.push_back(robot(id++, {-p.x, p.y}, {{p.x, -p.y}}));
  }
  for (const Vec2 & p : slots) {
    s.robots.push_back(robot(id++, p, {{-p.x, -p.y}}));
  }
  return s;
}

ScenarioSpec scenario3()
{
  ScenarioSpec s;
  s.name = "scenario3";
  s.description =
    "Inspired-by: ten robots make round trips between two rooms joined by two one-lane passages.";
  s.obstacles = rectangle({-10.0, -7.0}, {10.0, 7.0});
  // Thick partition at x in [-1, 1] with gaps of 1.2 m centred on y = +-3.
  for (double y0 : {-7.0, -2.4, 3.6}) {
    const double y1 = y0 == -7.0 ? -3.6 : (y0 == -2.4 ? 2.4 : 7.0);
    s.obstacles += rectangle({-1.0, y0}, {1.0, y1});
  }
  int id = 0;
  for (int k = 0; k < 5; ++k) {
    const Vec2 a{-6.0 - (k % 2) * 1.5, -4.0 + 2.0 * k};
    const Vec2 b{6.0 + (k % 2) * 1.5, 4.0 - 2.0 * k};
    s.robots.push_back(robot(id++, a, {b, a}, true));
    s.robots.push_back(robot(id++, b, {a, b}, true));
  }
  return s;
}

ScenarioSpec scenario4()
{
  ScenarioSpec s;
  s.name = "scenario4";
  s.description =
    "Inspired-by: twenty robots make round trips across a field of densely placed square pillars.";
  s.obstacles = rectangle({-12.0, -8.0}, {12.0, 8.0});
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      const Vec2 c{3.0 * i + (j % 2 == 0 ? 0.0 : 1.5), 3.0 * j};
      s.obstacles += rectangle(c - Vec2{0.4, 0.4}, c + Vec2{0.4, 0.4});
    }
  }
  int id = 0;
  for (int k = 0; k < 10; ++k) {
    const Vec2 a{-10.0 + (k % 2) * 1.2, -6.75 + 1.5 * k};
    const Vec2 b{10.0 - (k % 2) * 1.2, 6.75 - 1.5 * k};
    s.robots.push_back(robot(id++, a, {b, a}, true));
    s.robots.push_back(robot(id++, b, {a, b}, true));
  }
  return s;
}

ScenarioSpec scenario5()
{
  ScenarioSpec s;
  s.name = "scenario5";
  s.description =
    "Inspired-by: forty robots make round trips across a confined 20 m x 16 m arena.";
  s.obstacles = rectangle({-10.0, -8.0}, {10.0, 8.0});
  int id = 0;
  for (int col = 0; col < 4; ++col) {
    for (int row = 0; row < 5; ++row) {
      const Vec2 a{-8.5 + 1.5 * col, -6.0 + 3.0 * row};
      const Vec2 b{8.5 - 1.5 * col, 6.0 - 3.0 * row};
      s.robots.push_back(robot(id++, a, {b, a}, true));
      s.robots.push_back(robot(id++, b, {a, b}, true));
    }
  }
  return s;
}

ScenarioSpec scenario6()
{
  ScenarioSpec s;
  s.name = "scenario6";
  s.description =
    "Inspired-by: thirty-four robots converge into a two-lane passage and spread out behind it.";
  s.obstacles = rooms_with_passage(3.0, 2.4, 1.5, 12.0, 16.0);
  int id = 0;
  for (int k = 0; k < 34; ++k) {
    const int col = k / 7;
    const int row = k % 7;
    const Vec2 a{-5.0 - 1.8 * col, -6.3 + 2.1 * row};
    const Vec2 b{5.0 + 1.8 * col, 6.3 - 2.1 * row};
    s.robots.push_back(robot(id++, a, {b}));
  }
  return s;
}

ScenarioSpec scenario7()
{
  ScenarioSpec s;
  s.name = "scenario7";
  s.description =
    "Ten robots with maximum wheel acceleration reduced to 0.2 m/s^2 make round trips in an open room.";
  s.obstacles = rectangle({-12.0, -8.0}, {12.0, 8.0});
  int id = 0;
  for (int k = 0; k < 5; ++k) {
    const Vec2 a{-8.0, -5.0 + 2.5 * k};
    const Vec2 b{8.0, 5.0 - 2.5 * k};
    s.robots.push_back(robot(id++, a, {b, a}, true));
    s.robots.push_back(robot(id++, b, {a, b}, true));
  }
  for (auto & r : s.robots) {
    r.params.a_max = 0.2;
  }
  return s;
}

void write_file(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

}  // namespace

std::vector<ObstacleSegment> rectangle(const Vec2 & lo, const Vec2 & hi)
{
  return {
    {{lo.x, lo.y}, {hi.x, lo.y}},
    {{hi.x, lo.y}, {hi.x, hi.y}},
    {{hi.x, hi.y}, {lo.x, hi.y}},
    {{lo.x, hi.y}, {lo.x, lo.y}},
  };
}

std::vector<std::string> override_keys()
{
  std::vector<std::string> keys;
  for (const auto & kv : config_setters()) {
    keys.push_back(kv.first);
  }
  for (const auto & kv : param_setters()) {
    keys.push_back(kv.first);
  }
  return keys;
}

void apply_overrides(const Overrides & overrides, SimConfig & config, std::vector<RobotSpec> & robots)
{
  for (const auto & [key, value] : overrides) {
    if (const auto it = config_setters().find(key); it != config_setters().end()) {
      it->second(config, value);
    } else if (const auto pit = param_setters().find(key); pit != param_setters().end()) {
      for (auto & r : robots) {
        pit->second(r.params, value);
      }
    } else {
      throw std::invalid_argument("unknown override '" + key + "'");
    }
  }
}

std::pair<std::string, double> parse_override(const std::string & text)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like key=value: '" + text + "'");
  }
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v)) {
    throw std::invalid_argument("override value is not a number: '" + text + "'");
  }
  return {key, v};
}

void validate_scenario(const ScenarioSpec & spec)
{
  const auto & rs = spec.robots;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rs[i].params.validate();
    const Pose & pi = rs[i].start;
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      const double reach = rs[i].params.body_radius + rs[j].params.body_radius;
      if ((pi.axle_center - rs[j].start.axle_center).norm() < reach) {
        throw std::invalid_argument(
          "robots " + std::to_string(rs[i].id) + " and " + std::to_string(rs[j].id) + " overlap at start");
      }
    }
    const Vec2 c = effective_center(pi, rs[i].params);
    for (const auto & o : spec.obstacles) {
      if ((closest_point_on_segment(c, o.a, o.b) - c).norm() < rs[i].params.body_radius) {
        throw std::invalid_argument("robot " + std::to_string(rs[i].id) + " starts on an obstacle");
      }
      for (const Vec2 & g : rs[i].waypoints) {
        if ((closest_point_on_segment(g, o.a, o.b) - g).norm() < rs[i].params.effective_radius()) {
          throw std::invalid_argument(
            "a waypoint of robot " + std::to_string(rs[i].id) + " lies too close to an obstacle");
        }
      }
    }
  }
}

std::string scenario_to_json(const ScenarioSpec & spec)
{
  json j;
  j["name"] = spec.name;
  j["description"] = spec.description;
  j["obstacles"] = json::array();
  for (const auto & o : spec.obstacles) {
    j["obstacles"].push_back({{"a_m", vec_json(o.a)}, {"b_m", vec_json(o.b)}});
  }
  j["robots"] = json::array();
  for (const auto & r : spec.robots) {
    json wps = json::array();
    for (const auto & w : r.waypoints) {
      wps.push_back(vec_json(w));
    }
    j["robots"].push_back({
      {"id", r.id},
      {"axle_center_m", vec_json(r.start.axle_center)},
      {"heading_rad", r.start.heading},
      {"waypoints_m", wps},
      {"loop", r.loop},
      {"params", params_json(r.params)},
    });
  }
  j["config"] = json::object();
  for (const auto & [k, v] : spec.config) {
    j["config"][k] = v;
  }
  return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string & text)
{
  ScenarioSpec s;
  try {
    const json j = json::parse(text);
    s.name = j.value("name", std::string{});
    s.description = j.value("description", std::string{});
    for (const auto & o : j.value("obstacles", json::array())) {
      s.obstacles.push_back({vec_from(o.at("a_m")), vec_from(o.at("b_m"))});
    }
    for (const auto & r : j.value("robots", json::array())) {
      RobotSpec spec;
      spec.id = r.at("id").get<int>();
      spec.start.axle_center = vec_from(r.at("axle_center_m"));
      spec.start.heading = r.value("heading_rad", 0.0);
      for (const auto & w : r.value("waypoints_m", json::array())) {
        spec.waypoints.push_back(vec_from(w));
      }
      spec.loop = r.value("loop", false);
      spec.params = params_from(r.value("params", json::object()));
      s.robots.push_back(std::move(spec));
    }
    for (const auto & [k, v] : j.value("config", json::object()).items()) {
      s.config[k] = v.is_boolean() ? (v.get<bool>() ? 1.0 : 0.0) : v.get<double>();
    }
  } catch (const json::exception & e) {
    throw std::invalid_argument(std::string("malformed scenario file: ") + e.what());
  }
  // Reject unknown override keys early.
  SimConfig probe;
  std::vector<RobotSpec> robots;
  apply_overrides(s.config, probe, robots);
  return s;
}

std::vector<std::string> builtin_scenarios()
{
  return {"scenario1", "scenario2", "scenario3", "scenario4", "scenario5", "scenario6", "scenario7"};
}

ScenarioSpec builtin_scenario(const std::string & name)
{
  static const std::map<std::string, std::function<ScenarioSpec()>> table{
    {"scenario1", scenario1}, {"scenario2", scenario2}, {"scenario3", scenario3},
    {"scenario4", scenario4}, {"scenario5", scenario5}, {"scenario6", scenario6},
    {"scenario7", scenario7},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    throw std::invalid_argument("unknown built-in scenario '" + name + "'");
  }
  return it->second();
}

std::string emit_traces(const std::string & log_csv, const std::vector<ObstacleSegment> & obstacles)
{
  std::map<int, std::vector<Vec2>> tracks;
  std::istringstream in(log_csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    int tick = 0;
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &tick, &id, &x, &y) != 4) {
      throw std::invalid_argument("malformed trajectory line: " + line);
    }
    tracks[id].push_back({x, y});
  }

  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi = -lo;
  const auto grow = [&](const Vec2 & p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  };
  for (const auto & o : obstacles) {
    grow(o.a);
    grow(o.b);
  }
  for (const auto & [id, pts] : tracks) {
    for (const auto & p : pts) {
      grow(p);
    }
  }
  if (!std::isfinite(lo.x)) {
    lo = {-1.0, -1.0};
    hi = {1.0, 1.0};
  }
  constexpr double kScale = 40.0;  // px per metre
  constexpr double kMargin = 1.0;  // m
  lo = lo - Vec2{kMargin, kMargin};
  hi = hi + Vec2{kMargin, kMargin};
  const auto px = [&](const Vec2 & p) { return Vec2{(p.x - lo.x) * kScale, (hi.y - p.y) * kScale}; };

  std::string svg;
  char buf[256];
  std::snprintf(
    buf, sizeof(buf),
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
    (hi.x - lo.x) * kScale, (hi.y - lo.y) * kScale, (hi.x - lo.x) * kScale, (hi.y - lo.y) * kScale);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g stroke=\"black\" stroke-width=\"3\" stroke-linecap=\"round\">\n";
  for (const auto & o : obstacles) {
    const Vec2 a = px(o.a);
    const Vec2 b = px(o.b);
    std::snprintf(buf, sizeof(buf), "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n", a.x, a.y, b.x, b.y);
    svg += buf;
  }
  svg += "</g>\n<g fill=\"none\" stroke-width=\"1.5\">\n";
  std::size_t k = 0;
  for (const auto & [id, pts] : tracks) {
    // Golden-angle hue spacing keeps neighbouring ids apart.
    const int hue = static_cast<int>(std::lround(std::fmod(137.508 * static_cast<double>(k++), 360.0)));
    std::snprintf(buf, sizeof(buf), "<polyline id=\"robot-%d\" stroke=\"hsl(%d,70%%,45%%)\" points=\"", id, hue);
    svg += buf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 p = px(pts[i]);
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i == 0 ? "" : " ", p.x, p.y);
      svg += buf;
    }
    svg += "\"/>\n";
    if (!pts.empty()) {
      const Vec2 p = px(pts.front());
      std::snprintf(
        buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"hsl(%d,70%%,45%%)\"/>\n", p.x, p.y, hue);
      svg += buf;
    }
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

ScenarioOutcome run_scenario(
  const ScenarioSpec & spec, const Overrides & overrides,
  const std::optional<std::filesystem::path> & out_dir)
{
  validate_scenario(spec);
  SimConfig config;
  std::vector<RobotSpec> robots = spec.robots;
  apply_overrides(spec.config, config, robots);
  apply_overrides(overrides, config, robots);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
  }
  ScenarioOutcome outcome;
  try {
    outcome.result = run(spec.obstacles, robots, config);
  } catch (const SimulationError & e) {
    outcome.status = ExitStatus::solver_failure;
    outcome.error = e.what();
    if (out_dir) {
      write_file(*out_dir / "failure_snapshot.json", e.snapshot());
    }
    return outcome;
  }
  const Metrics & m = outcome.result->metrics;
  if (!m.collisions.empty()) {
    outcome.status = ExitStatus::collision;
  } else if (!m.deadlocks.empty()) {
    outcome.status = ExitStatus::deadlock;
  }
  if (out_dir) {
    write_file(*out_dir / "trajectory.csv", outcome.result->log.text());
    write_file(*out_dir / "metrics.json", metrics_json(m, config));
    write_file(*out_dir / "traces.svg", emit_traces(outcome.result->log.text(), spec.obstacles));
  }
  return outcome;
}

}  // namespace mcca
