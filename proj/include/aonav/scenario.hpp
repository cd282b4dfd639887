#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aonav/simulator.hpp"

namespace aonav {

/// Raised for unreadable, malformed or semantically invalid scenario input.
/// The message carries file/field context; the CLI maps it to exit code 2.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioAgent {
  std::string id;
  bool controlled = true;
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
  double radius = 1.0;
  std::optional<Vec2> goal;
  std::optional<Trajectory> trajectory;  // scripted agents only
};

struct Scenario {
  std::string name = "scenario";
  double dt = 0.02;
  double replan_interval = 0.1;
  double duration = 20.0;
  Mode mode = Mode::NAO;
  int seed = 7;
  double goal_radius = 1.5;
  ControlConstraint constraint{4.0};
  PlannerConfig planner;
  std::vector<ScenarioAgent> agents;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where.empty() ? what : where + ": " + what);
}

inline double num_field(const json& j, const char* key, double fallback,
                        const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

inline Vec2 vec_field(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(where, std::string("field '") + key + "' must be [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline std::optional<Vec2> opt_vec_field(const json& j, const char* key,
                                         const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  return vec_field(j, key, where);
}

inline Mode parse_mode(const std::string& s, const std::string& where) {
  if (s == "vo") return Mode::VO;
  if (s == "nlvo") return Mode::NLVO;
  if (s == "ao") return Mode::AO;
  if (s == "nao") return Mode::NAO;
  fail(where, "mode must be one of vo|nlvo|ao|nao (got '" + s + "')");
}

inline Heuristic parse_heuristic(const std::string& s, const std::string& where) {
  if (s == "min_deviation") return Heuristic::MinDeviation;
  if (s == "max_clearance") return Heuristic::MaxClearance;
  if (s == "goal_greedy") return Heuristic::GoalGreedy;
  fail(where, "heuristic must be min_deviation|max_clearance|goal_greedy (got '" + s + "')");
}

inline const char* to_string(Heuristic h) {
  switch (h) {
    case Heuristic::MinDeviation: return "min_deviation";
    case Heuristic::MaxClearance: return "max_clearance";
    case Heuristic::GoalGreedy: return "goal_greedy";
  }
  return "?";
}

inline Trajectory parse_trajectory(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    fail(where, "trajectory must be an object with a 'type' string");
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "linear") {
      return Linear{vec_field(j, "c0", where), vec_field(j, "v", where)};
    }
    if (type == "const_accel") {
      return ConstAccel{vec_field(j, "c0", where), vec_field(j, "v", where),
                        vec_field(j, "a", where)};
    }
    if (type == "circular") {
      Circular c;
      c.center = vec_field(j, "center", where);
      c.path_radius = j.at("path_radius").get<double>();
      c.angular_rate = j.at("angular_rate").get<double>();
      c.phase = num_field(j, "phase", 0.0, where);
      validate(Trajectory{c});
      return c;
    }
    if (type == "piecewise") {
      const auto& arr = j.at("samples");
      if (!arr.is_array()) fail(where, "piecewise 'samples' must be an array");
      std::vector<std::pair<double, Vec2>> samples;
      for (const auto& s : arr) {
        if (!s.is_array() || s.size() != 2 || !s[0].is_number())
          fail(where, "each piecewise sample must be [tau, [x, y]]");
        if (!s[1].is_array() || s[1].size() != 2)
          fail(where, "each piecewise sample must be [tau, [x, y]]");
        samples.emplace_back(s[0].get<double>(),
                             Vec2{s[1][0].get<double>(), s[1][1].get<double>()});
      }
      return Piecewise{std::move(samples)};
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  fail(where, "unknown trajectory type '" + type + "'");
}

inline json trajectory_to_json(const Trajectory& traj) {
  json j;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Linear>) {
          j = {{"type", "linear"}, {"c0", {t.c0.x, t.c0.y}}, {"v", {t.v.x, t.v.y}}};
        } else if constexpr (std::is_same_v<T, ConstAccel>) {
          j = {{"type", "const_accel"},
               {"c0", {t.c0.x, t.c0.y}},
               {"v", {t.v.x, t.v.y}},
               {"a", {t.a.x, t.a.y}}};
        } else if constexpr (std::is_same_v<T, Circular>) {
          j = {{"type", "circular"},
               {"center", {t.center.x, t.center.y}},
               {"path_radius", t.path_radius},
               {"angular_rate", t.angular_rate},
               {"phase", t.phase}};
        } else {
          json samples = json::array();
          for (const auto& [tau, pos] : t.samples())
            samples.push_back({tau, {pos.x, pos.y}});
          j = {{"type", "piecewise"}, {"samples", std::move(samples)}};
        }
      },
      traj);
  return j;
}

}  // namespace detail

/// Semantic validation beyond structural parsing; `where` names the source.
inline void validate_scenario(const Scenario& s, const std::string& where = {}) {
  using detail::fail;
  if (s.agents.empty()) fail(where, "scenario needs at least one agent");
  if (s.dt <= 0.0) fail(where, "dt must be > 0");
  if (s.duration <= 0.0) fail(where, "duration must be > 0");
  if (s.replan_interval < s.dt) fail(where, "replan_interval must be >= dt");
  const double stride = s.replan_interval / s.dt;
  if (std::fabs(stride - std::llround(stride)) > 1e-6)
    fail(where, "replan_interval must be an integer multiple of dt");
  if (s.constraint.a_max <= 0.0) fail(where, "constraint.a_max must be > 0");
  if (s.planner.horizon <= kTauMin) fail(where, "planner.horizon must exceed " +
                                                    std::to_string(kTauMin));
  if (s.planner.n_radial < 1) fail(where, "planner.n_radial must be >= 1");
  if (s.planner.n_angular < 4) fail(where, "planner.n_angular must be >= 4");
  if (s.planner.safety_margin < 0.0) fail(where, "planner.safety_margin must be >= 0");

  std::set<std::string> ids;
  const long n_steps = static_cast<long>(std::ceil(s.duration / s.dt - 1e-9));
  for (const auto& a : s.agents) {
    const std::string ctx = where.empty() ? "agent '" + a.id + "'"
                                          : where + ": agent '" + a.id + "'";
    if (a.id.empty()) fail(where, "agent id must be non-empty");
    if (!ids.insert(a.id).second) fail({}, "duplicate agent id '" + a.id + "'");
    if (a.radius <= 0.0) fail(ctx, "radius must be > 0");
    require_finite(a.position, "agent position");
    require_finite(a.velocity, "agent velocity");
    if (a.controlled) {
      if (a.trajectory) fail(ctx, "controlled agents must not declare a trajectory");
    } else {
      if (!a.trajectory) fail(ctx, "scripted agents need a trajectory");
      try {
        validate(*a.trajectory);
      } catch (const std::exception& e) {
        fail(ctx, e.what());
      }
      const double end = domain_end(*a.trajectory);
      if (end < n_steps * s.dt - 1e-9)
        fail(ctx, "piecewise trajectory domain ends before the scenario duration");
    }
  }
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using nlohmann::json;
  json j;
  j["name"] = s.name;
  j["dt"] = s.dt;
  j["replan_interval"] = s.replan_interval;
  j["duration"] = s.duration;
  j["mode"] = to_string(s.mode);
  j["seed"] = s.seed;
  j["goal_radius"] = s.goal_radius;
  j["constraint"] = {{"a_max", s.constraint.a_max}};
  j["planner"] = {{"horizon", s.planner.horizon},
                  {"n_radial", s.planner.n_radial},
                  {"n_angular", s.planner.n_angular},
                  {"safety_margin", s.planner.safety_margin},
                  {"kp", s.planner.kp},
                  {"kd", s.planner.kd},
                  {"heuristic", detail::to_string(s.planner.heuristic)},
                  {"goal_lookahead", s.planner.goal_lookahead}};
  json agents = json::array();
  for (const auto& a : s.agents) {
    json ja;
    ja["id"] = a.id;
    ja["role"] = a.controlled ? "controlled" : "scripted";
    ja["radius"] = a.radius;
    if (a.controlled) {
      ja["position"] = {a.position.x, a.position.y};
      ja["velocity"] = {a.velocity.x, a.velocity.y};
      ja["acceleration"] = {a.acceleration.x, a.acceleration.y};
      if (a.goal) ja["goal"] = {a.goal->x, a.goal->y};
    } else {
      ja["trajectory"] = detail::trajectory_to_json(*a.trajectory);
    }
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j, const std::string& where = {}) {
  using detail::fail;
  using detail::num_field;
  if (!j.is_object()) fail(where, "scenario root must be a JSON object");
  Scenario s;
  try {
    s.name = j.value("name", std::string{"scenario"});
    s.dt = num_field(j, "dt", s.dt, where);
    s.replan_interval = num_field(j, "replan_interval", s.replan_interval, where);
    s.duration = num_field(j, "duration", s.duration, where);
    if (j.contains("mode")) s.mode = detail::parse_mode(j["mode"].get<std::string>(), where);
    s.seed = j.value("seed", s.seed);
    s.goal_radius = num_field(j, "goal_radius", s.goal_radius, where);
    if (j.contains("constraint"))
      s.constraint.a_max = num_field(j["constraint"], "a_max", s.constraint.a_max, where);
    if (j.contains("planner")) {
      const auto& p = j["planner"];
      s.planner.horizon = num_field(p, "horizon", s.planner.horizon, where);
      s.planner.n_radial = static_cast<int>(num_field(p, "n_radial", s.planner.n_radial, where));
      s.planner.n_angular =
          static_cast<int>(num_field(p, "n_angular", s.planner.n_angular, where));
      s.planner.safety_margin = num_field(p, "safety_margin", s.planner.safety_margin, where);
      s.planner.kp = num_field(p, "kp", s.planner.kp, where);
      s.planner.kd = num_field(p, "kd", s.planner.kd, where);
      s.planner.goal_lookahead = num_field(p, "goal_lookahead", s.planner.goal_lookahead, where);
      if (p.contains("heuristic"))
        s.planner.heuristic = detail::parse_heuristic(p["heuristic"].get<std::string>(), where);
    }
    if (!j.contains("agents") || !j["agents"].is_array())
      fail(where, "scenario needs an 'agents' array");
    for (const auto& ja : j["agents"]) {
      ScenarioAgent a;
      if (!ja.contains("id") || !ja["id"].is_string())
        fail(where, "every agent needs a string 'id'");
      a.id = ja["id"].get<std::string>();
      const std::string ctx =
          where.empty() ? "agent '" + a.id + "'" : where + ": agent '" + a.id + "'";
      const std::string role = ja.value("role", std::string{"controlled"});
      if (role != "controlled" && role != "scripted")
        fail(ctx, "role must be 'controlled' or 'scripted'");
      a.controlled = role == "controlled";
      a.radius = num_field(ja, "radius", a.radius, ctx);
      if (a.controlled) {
        if (ja.contains("trajectory")) fail(ctx, "controlled agents take no trajectory");
        a.position = detail::vec_field(ja, "position", ctx);
        if (auto v = detail::opt_vec_field(ja, "velocity", ctx)) a.velocity = *v;
        if (auto acc = detail::opt_vec_field(ja, "acceleration", ctx)) a.acceleration = *acc;
        a.goal = detail::opt_vec_field(ja, "goal", ctx);
      } else {
        if (ja.contains("position") || ja.contains("velocity"))
          fail(ctx, "scripted agents derive their state from the trajectory");
        if (!ja.contains("trajectory")) fail(ctx, "scripted agents need a trajectory");
        a.trajectory = detail::parse_trajectory(ja["trajectory"], ctx);
        const TrajQuery q = eval(*a.trajectory, 0.0);
        a.position = q.position;
        a.velocity = q.velocity;
        a.acceleration = q.acceleration;
      }
      s.agents.push_back(std::move(a));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  validate_scenario(s, where);
  return s;
}

// ---------------------------------------------------------------------------
// Built-in scenario generators. The paper's experiments give lane structure
// and vehicle counts; the numeric defaults here were tuned to reproduce the
// reported qualitative outcomes at desk scale.
// ---------------------------------------------------------------------------

/// Busy roundabout: n_per_lane vehicles on each of three circular lanes, plus
/// one controlled vehicle entering from the left with its goal at the top
/// exit.
inline Scenario gen_roundabout(int n_per_lane = 10,
                               std::vector<double> lane_radii = {10.0, 14.0, 18.0},
                               std::vector<double> lane_speeds = {7.0, 8.0, 9.0},
                               int seed = 7) {
  if (n_per_lane < 1) throw std::invalid_argument("n_per_lane must be >= 1");
  if (lane_radii.size() != lane_speeds.size())
    throw std::invalid_argument("lane_radii and lane_speeds must have equal length");
  Scenario s;
  s.name = "roundabout";
  s.mode = Mode::NAO;
  s.seed = seed;
  s.duration = 20.0;
  s.constraint.a_max = 3.0;
  s.planner.kp = 0.6;
  s.planner.kd = 1.6;

  std::mt19937 rng(static_cast<unsigned>(seed));
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);

  for (std::size_t lane = 0; lane < lane_radii.size(); ++lane) {
    const double base_phase = phase_dist(rng);
    const double rate = lane_speeds[lane] / lane_radii[lane];
    for (int i = 0; i < n_per_lane; ++i) {
      ScenarioAgent a;
      a.id = "lane" + std::to_string(lane) + "_car" + std::to_string(i);
      a.controlled = false;
      a.radius = 1.3;
      Circular c;
      c.center = {0.0, 0.0};
      c.path_radius = lane_radii[lane];
      c.angular_rate = rate;
      c.phase = base_phase + 2.0 * M_PI * i / n_per_lane;
      a.trajectory = c;
      const TrajQuery q = eval(*a.trajectory, 0.0);
      a.position = q.position;
      a.velocity = q.velocity;
      a.acceleration = q.acceleration;
      s.agents.push_back(std::move(a));
    }
  }

  ScenarioAgent ego;
  ego.id = "ego";
  ego.controlled = true;
  ego.radius = 1.3;
  ego.position = {-28.0, 0.0};
  ego.velocity = {0.0, 0.0};
  ego.goal = Vec2{0.0, 28.0};
  s.agents.push_back(std::move(ego));
  return s;
}

/// Fig-style single-shot crossing: same ring, but the vehicle selects one
/// constant acceleration at t = 0 (replan interval past the run end) and
/// holds it across the roundabout.
inline Scenario gen_roundabout_crossing(int n_per_lane = 10, int seed = 7) {
  Scenario s = gen_roundabout(n_per_lane, {10.0, 14.0, 18.0}, {7.0, 8.0, 9.0}, seed);
  s.name = "roundabout_crossing";
  s.duration = 9.0;
  s.replan_interval = 10.0;  // beyond the run: exactly one selection at t = 0
  s.planner.horizon = 12.0;  // the one selection must cover the whole crossing
  auto& ego = s.agents.back();
  ego.position = {-28.0, 0.0};
  ego.velocity = {0.0, 0.0};
  ego.goal = Vec2{28.0, 0.0};
  return s;
}

/// Four vehicles on a curved road. The controlled vehicle's current velocity
/// sits inside the linear velocity obstacle of the vehicle ahead on the outer
/// lane but outside its nonlinear one, and clear of the other two vehicles
/// entirely.
inline Scenario gen_curved_road() {
  Scenario s;
  s.name = "curved_road";
  s.mode = Mode::VO;  // diagnostic by default; run with --mode ao|nao to plan
  s.duration = 6.0;
  s.constraint.a_max = 4.0;
  s.planner.kp = 0.6;
  s.planner.kd = 1.6;

  const Vec2 road_center{0.0, -20.0};

  ScenarioAgent a;
  a.id = "A";
  a.controlled = true;
  a.radius = 1.0;
  a.position = {0.0, 22.0};       // top of the outer lane (radius 42)
  a.velocity = {13.5, 0.0};       // clockwise tangent
  a.goal = Vec2{70.0, 22.0};
  s.agents.push_back(std::move(a));

  // Clockwise traffic: angular_rate = -speed / radius.
  const auto scripted = [&](const char* id, double lane_radius, double speed,
                            double phase_deg) {
    ScenarioAgent v;
    v.id = id;
    v.controlled = false;
    v.radius = 1.0;
    Circular c;
    c.center = road_center;
    c.path_radius = lane_radius;
    c.angular_rate = -speed / lane_radius;
    c.phase = phase_deg * M_PI / 180.0;
    v.trajectory = c;
    const TrajQuery q = eval(*v.trajectory, 0.0);
    v.position = q.position;
    v.velocity = q.velocity;
    v.acceleration = q.acceleration;
    s.agents.push_back(std::move(v));
  };
  scripted("B", 46.0, 8.0, 75.0);   // ahead of A, one lane out
  scripted("C", 38.0, 7.0, 40.0);   // far ahead, inner lane
  scripted("D", 42.0, 8.0, 115.0);  // behind A, same lane
  return s;
}

inline std::vector<std::string> builtin_scenarios() {
  return {"roundabout", "roundabout_crossing", "curved_road"};
}

inline std::optional<Scenario> make_builtin(const std::string& name) {
  if (name == "roundabout") return gen_roundabout();
  if (name == "roundabout_crossing") return gen_roundabout_crossing();
  if (name == "curved_road") return gen_curved_road();
  return std::nullopt;
}

/// Loads a scenario from a JSON file, or by built-in name when no such file
/// exists. Parse errors carry line/column context, semantic errors name the
/// offending agent or field.
inline Scenario load_scenario(const std::string& path_or_name) {
  if (!std::filesystem::exists(path_or_name)) {
    if (auto builtin = make_builtin(path_or_name)) return *builtin;
    throw ScenarioError("no such scenario file or built-in: '" + path_or_name +
                        "' (built-ins: roundabout, roundabout_crossing, curved_road)");
  }
  std::ifstream in(path_or_name, std::ios::binary);
  if (!in) throw ScenarioError(path_or_name + ": cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into line/column for the diagnostic.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioError(path_or_name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                        ": " + e.what());
  }
  return scenario_from_json(j, path_or_name);
}

inline World make_world(const Scenario& s) {
  World w;
  w.dt = s.dt;
  w.replan_interval = s.replan_interval;
  for (const auto& a : s.agents) {
    AgentState st;
    st.id = a.id;
    st.position = a.position;
    st.velocity = a.velocity;
    st.acceleration = a.acceleration;
    st.radius = a.radius;
    st.goal = a.goal;
    st.script = a.trajectory;
    w.agents.push_back(std::move(st));
  }
  return w;
}

inline SimConfig make_sim_config(const Scenario& s) {
  SimConfig cfg;
  cfg.mode = s.mode;
  cfg.planner = s.planner;
  cfg.constraint = s.constraint;
  cfg.goal_radius = s.goal_radius;
  return cfg;
}

}  // namespace aonav
