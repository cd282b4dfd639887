// Command-line front end: run scenarios, dump obstacle maps, compare the
// constant-acceleration and trajectory-aware planning modes, validate files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "aonav/io.hpp"
#include "aonav/scenario.hpp"
#include "aonav/svg.hpp"

namespace fs = std::filesystem;
using namespace aonav;

namespace {

std::optional<Mode> parse_mode_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "vo") return Mode::VO;
  if (s == "nlvo") return Mode::NLVO;
  if (s == "ao") return Mode::AO;
  if (s == "nao") return Mode::NAO;
  throw CLI::ValidationError("--mode must be vo|nlvo|ao|nao");
}

// Rebuild a renderable world from a logged step (static agent properties come
// from the scenario, kinematic state from the log row).
World world_at_step(const Scenario& scenario, const StepRecord& rec) {
  World w = make_world(scenario);
  w.time = rec.time;
  for (auto& agent : w.agents) {
    for (const auto& row : rec.agents) {
      if (row.id == agent.id) {
        agent.position = row.position;
        agent.velocity = row.velocity;
        agent.acceleration = row.acceleration;
        break;
      }
    }
  }
  return w;
}

int cmd_run(const std::string& scenario_arg, const std::string& mode_flag,
            const std::string& out_dir, int svg_every, bool strict) {
  Scenario scenario = load_scenario(scenario_arg);
  if (auto m = parse_mode_flag(mode_flag)) scenario.mode = *m;

  World world = make_world(scenario);
  const SimConfig cfg = make_sim_config(scenario);
  const SimLog log = run(world, cfg, scenario.duration);

  fs::create_directories(out_dir);
  const std::string stem = scenario.name + "_" + to_string(scenario.mode);
  {
    std::ostringstream csv;
    write_log_csv(log, csv);
    write_file(out_dir + "/" + stem + "_log.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_events_csv(log, csv);
    write_file(out_dir + "/" + stem + "_events.csv", csv.str());
  }
  if (svg_every > 0) {
    fs::create_directories(out_dir + "/frames");
    for (std::size_t i = 0; i < log.steps.size(); i += svg_every) {
      char name[64];
      std::snprintf(name, sizeof(name), "/frames/%s_%06zu.svg", stem.c_str(), i);
      write_file(out_dir + name, render_frame(world_at_step(scenario, log.steps[i])));
    }
  }

  int adjustments = 0;
  for (const auto& [id, n] : log.adjustments) adjustments += n;
  std::cout << "scenario: " << scenario.name << "  mode: " << to_string(scenario.mode)
            << "\nsteps: " << log.steps.size() - 1 << "  collisions: " << log.events.size()
            << "  adjustments: " << adjustments << "\n";
  for (const auto& [id, t] : log.reached)
    std::cout << "agent " << id << " reached its goal at t=" << t << "\n";
  if (scenario.mode == Mode::VO || scenario.mode == Mode::NLVO) {
    const auto [vo_changes, nlvo_changes] = diag_flag_changes(log);
    std::cout << "vo flag changes: " << vo_changes << "  nlvo flag changes: " << nlvo_changes
              << "\n";
  }
  std::cout << "log: " << out_dir << "/" << stem << "_log.csv\n";
  if (strict && !log.events.empty()) return 3;
  return 0;
}

int cmd_map(const std::string& scenario_arg, const std::string& agent_id, double at_time,
            const std::string& kind, const std::string& observer_id,
            const std::string& out_dir) {
  Scenario scenario = load_scenario(scenario_arg);
  World world = make_world(scenario);
  const SimConfig cfg = make_sim_config(scenario);
  const long n = std::lround(at_time / world.dt);
  for (long i = 0; i < n; ++i) world = step(world, cfg).next;

  const AgentState* robot = nullptr;
  const AgentState* obstacle = nullptr;
  for (const auto& a : world.agents) {
    if (a.id == agent_id) obstacle = &a;
    if (observer_id.empty() ? (a.controlled() && !robot) : a.id == observer_id) robot = &a;
  }
  if (!obstacle) throw ScenarioError("no agent with id '" + agent_id + "'");
  if (!robot) throw ScenarioError(observer_id.empty() ? "scenario has no controlled agent"
                                                      : "no agent with id '" + observer_id +
                                                            "'");
  if (robot == obstacle) throw ScenarioError("--agent must differ from the observer");

  const double grown = robot->radius + obstacle->radius;
  Trajectory future = obstacle->controlled()
                          ? predict_from_state(obstacle->position, obstacle->velocity,
                                               obstacle->acceleration)
                          : time_shifted(*obstacle->script, world.time);
  Trajectory relative = translated(future, -robot->position);

  ObstacleMap map;
  Vec2 highlight;
  if (kind == "vo") {
    map = build_map(VoSource{obstacle->position - robot->position, grown, obstacle->velocity},
                    cfg.planner.horizon, {}, obstacle->id);
    highlight = robot->velocity;
  } else if (kind == "nlvo") {
    map = build_map(NlvoSource{std::move(relative), grown}, cfg.planner.horizon, {},
                    obstacle->id);
    highlight = robot->velocity;
  } else if (kind == "ao") {
    map = build_map(RelativeDynamics{obstacle->position - robot->position,
                                     robot->velocity - obstacle->velocity,
                                     obstacle->acceleration, grown},
                    cfg.planner.horizon, {}, obstacle->id);
    highlight = robot->acceleration;
  } else if (kind == "nao") {
    map = build_map(NaoSource{std::move(relative), grown, robot->velocity},
                    cfg.planner.horizon, {}, obstacle->id);
    highlight = robot->acceleration;
  } else {
    throw CLI::ValidationError("--kind must be vo|nlvo|ao|nao");
  }

  fs::create_directories(out_dir);
  char stem[128];
  std::snprintf(stem, sizeof(stem), "%s/map_%s_%s_t%.3f", out_dir.c_str(),
                obstacle->id.c_str(), kind.c_str(), world.time);
  write_file(std::string(stem) + ".svg", render_map(map, highlight));
  {
    std::ostringstream csv;
    write_map_csv(map, csv);
    write_file(std::string(stem) + ".csv", csv.str());
  }

  const MembershipResult res = membership(map, highlight);
  std::cout << kind << " map of '" << obstacle->id << "' seen by '" << robot->id << "' at t="
            << world.time << "\ncandidate (" << highlight.x << ", " << highlight.y
            << "): " << (res.colliding ? "colliding" : "clear") << ", margin " << res.margin;
  if (res.first_collision_tau) std::cout << ", first collision tau " << *res.first_collision_tau;
  std::cout << "\nwrote " << stem << ".svg\n";
  return 0;
}

int cmd_compare(const std::string& scenario_arg, const std::string& out_dir) {
  const Scenario base = load_scenario(scenario_arg);
  struct Outcome {
    std::size_t collisions = 0;
    int adjustments = 0;
    std::string reached = "-";
  };
  const auto run_mode = [&](Mode mode) {
    Scenario s = base;
    s.mode = mode;
    const SimLog log = run(make_world(s), make_sim_config(s), s.duration);
    Outcome o;
    o.collisions = log.events.size();
    for (const auto& [id, n] : log.adjustments) o.adjustments += n;
    if (!log.reached.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", log.reached.begin()->second);
      o.reached = buf;
    }
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      std::ostringstream csv;
      write_log_csv(log, csv);
      write_file(out_dir + "/" + base.name + "_" + to_string(mode) + "_log.csv", csv.str());
    }
    return o;
  };
  const Outcome ao = run_mode(Mode::AO);
  const Outcome nao = run_mode(Mode::NAO);

  std::printf("scenario: %s\n", base.name.c_str());
  std::printf("%-14s %12s %12s %12s\n", "mode", "collisions", "adjustments", "goal time");
  std::printf("%-14s %12zu %12d %12s\n", "ao", ao.collisions, ao.adjustments,
              ao.reached.c_str());
  std::printf("%-14s %12zu %12d %12s\n", "nao", nao.collisions, nao.adjustments,
              nao.reached.c_str());
  return 0;
}

int cmd_validate(const std::string& scenario_arg, bool dump) {
  const Scenario s = load_scenario(scenario_arg);
  std::cout << "ok: " << s.name << " (" << s.agents.size() << " agents, mode "
            << to_string(s.mode) << ", duration " << s.duration << " s)\n";
  if (dump) std::cout << scenario_to_json(s).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Velocity/acceleration obstacle maps and a planning simulator"};
  app.require_subcommand(1);

  std::string scenario_arg, mode_flag, out_dir = "out", agent_id, observer_id, kind = "nao";
  std::string compare_out;
  double at_time = 0.0;
  int svg_every = 0;
  bool strict = false, dump = false;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write CSV/SVG output");
  run_cmd->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
  run_cmd->add_option("--mode", mode_flag, "Override the scenario mode (vo|nlvo|ao|nao)");
  run_cmd->add_option("--out", out_dir, "Output directory (default: out)");
  run_cmd->add_option("--svg-every", svg_every, "Render a frame every N steps");
  run_cmd->add_flag("--strict", strict, "Exit with code 3 if any collision occurred");

  auto* map_cmd = app.add_subcommand("map", "Dump one obstacle map as SVG and CSV");
  map_cmd->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
  map_cmd->add_option("--agent", agent_id, "Obstacle agent id")->required();
  map_cmd->add_option("--time", at_time, "Sim time at which to build the map");
  map_cmd->add_option("--kind", kind, "vo|nlvo|ao|nao (default nao)");
  map_cmd->add_option("--observer", observer_id, "Observing agent (default: first controlled)");
  map_cmd->add_option("--out", out_dir, "Output directory (default: out)");

  auto* cmp_cmd = app.add_subcommand("compare", "Run ao and nao modes side by side");
  cmp_cmd->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
  cmp_cmd->add_option("--out", compare_out, "Also write per-mode CSV logs here");

  auto* val_cmd = app.add_subcommand("validate", "Parse and validate a scenario");
  val_cmd->add_option("scenario", scenario_arg, "Scenario file or built-in name")->required();
  val_cmd->add_flag("--dump", dump, "Print the canonical JSON form");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(scenario_arg, mode_flag, out_dir, svg_every, strict);
    if (map_cmd->parsed()) return cmd_map(scenario_arg, agent_id, at_time, kind, observer_id,
                                          out_dir);
    if (cmp_cmd->parsed()) return cmd_compare(scenario_arg, compare_out);
    if (val_cmd->parsed()) return cmd_validate(scenario_arg, dump);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
