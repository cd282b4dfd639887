#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aonav/geometry.hpp"
#include "aonav/obstacle_map.hpp"
#include "aonav/planner.hpp"
#include "aonav/trajectory.hpp"

namespace aonav {

// Commanded-acceleration change that counts as an "adjustment".
inline constexpr double kEpsAdjust = 1e-3;  // m/s^2

enum class Mode { VO, NLVO, AO, NAO };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::VO: return "vo";
    case Mode::NLVO: return "nlvo";
    case Mode::AO: return "ao";
    case Mode::NAO: return "nao";
  }
  return "?";
}

/// One agent. Scripted agents carry their declared trajectory (anchored at
/// sim time 0) and have their states overwritten from it every step;
/// controlled agents run the planner.
struct AgentState {
  std::string id;
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
  double radius = 1.0;
  std::optional<Vec2> goal;
  std::optional<Trajectory> script;

  bool controlled() const { return !script.has_value(); }
};

struct World {
  std::vector<AgentState> agents;
  double time = 0.0;
  double dt = 0.02;
  double replan_interval = 0.1;  // integer multiple of dt
  long step_count = 0;
};

struct SimConfig {
  Mode mode = Mode::NAO;
  PlannerConfig planner;
  ControlConstraint constraint{4.0};
  double goal_radius = 1.5;  // m, "reached goal" threshold
};

// Row flags in snapshots / CSV output.
inline constexpr unsigned kFlagColliding = 1u;
inline constexpr unsigned kFlagReplanned = 2u;
inline constexpr unsigned kFlagUnsafe = 4u;
inline constexpr unsigned kFlagInVo = 8u;
inline constexpr unsigned kFlagInNlvo = 16u;

struct AgentRow {
  std::string id;
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
  double min_dist = std::numeric_limits<double>::infinity();  // clearance to nearest agent
  unsigned flags = 0;
};

struct StepRecord {
  double time = 0.0;
  std::vector<AgentRow> agents;
};

struct CollisionEvent {
  std::string a;
  std::string b;
  double time = 0.0;
  double depth = 0.0;
};

/// Per-obstacle membership of a controlled agent's current velocity, logged
/// in the VO/NLVO diagnostic modes.
struct DiagRecord {
  double time = 0.0;
  std::string agent;
  std::string obstacle;
  bool in_vo = false;
  bool in_nlvo = false;
};

struct SimLog {
  std::vector<StepRecord> steps;  // one per step plus the final state
  std::vector<CollisionEvent> events;
  std::map<std::string, int> adjustments;
  std::vector<DiagRecord> diag;
  std::map<std::string, double> reached;  // first time within goal_radius
};

/// Current pairwise overlaps: center distance strictly below summed radii.
struct Overlap {
  std::size_t i = 0, j = 0;
  double depth = 0.0;
};

inline std::vector<Overlap> detect_collisions(const std::vector<AgentState>& agents) {
  std::vector<Overlap> out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const double dist = (agents[i].position - agents[j].position).norm();
      const double touch = agents[i].radius + agents[j].radius;
      if (dist < touch) out.push_back({i, j, touch - dist});
    }
  }
  return out;
}

namespace detail {

inline long replan_stride(const World& w) {
  const long k = std::lround(w.replan_interval / w.dt);
  return std::max<long>(1, k);
}

// Maps of every other agent as seen by `self`, in self's frame. Controlled
// neighbours are always predicted as constant-acceleration from the snapshot;
// scripted neighbours use their declared trajectory when the mode says so.
inline std::vector<ObstacleMap> maps_for_agent(const std::vector<AgentState>& snapshot,
                                               std::size_t self, double now,
                                               const SimConfig& cfg) {
  std::vector<ObstacleMap> maps;
  const AgentState& me = snapshot[self];
  const SamplingPolicy policy;  // defaults; membership does not depend on it for AO
  for (std::size_t j = 0; j < snapshot.size(); ++j) {
    if (j == self) continue;
    const AgentState& other = snapshot[j];
    const double grown = me.radius + other.radius + cfg.planner.safety_margin;
    if (cfg.mode == Mode::NAO && !other.controlled()) {
      Trajectory rel =
          translated(time_shifted(*other.script, now), -me.position);
      maps.push_back(build_map(NaoSource{std::move(rel), grown, me.velocity},
                               cfg.planner.horizon, policy, other.id));
    } else {
      const RelativeDynamics rd{other.position - me.position, me.velocity - other.velocity,
                                other.acceleration, grown};
      maps.push_back(build_map(rd, cfg.planner.horizon, policy, other.id));
    }
  }
  return maps;
}

}  // namespace detail

struct StepOutput {
  World next;
  StepRecord snapshot;              // states at the start of the step
  std::vector<Overlap> overlaps;    // measured after integration
  std::vector<DiagRecord> diag;
  std::vector<std::string> adjusted;  // controlled agents whose command changed
};

/// One synchronous step: snapshot, plan (on replan boundaries), integrate
/// everyone under constant acceleration, measure collisions. Scripted agents
/// are pinned to their trajectory exactly.
inline StepOutput step(const World& w, const SimConfig& cfg) {
  StepOutput out;
  out.next = w;
  const double now = w.time;
  const std::vector<AgentState> snapshot = w.agents;

  // Snapshot rows (pre-integration).
  out.snapshot.time = now;
  out.snapshot.agents.reserve(snapshot.size());
  const auto overlaps_now = detect_collisions(snapshot);
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    AgentRow row{snapshot[i].id, snapshot[i].position, snapshot[i].velocity,
                 snapshot[i].acceleration};
    for (std::size_t j = 0; j < snapshot.size(); ++j) {
      if (j == i) continue;
      const double clear = (snapshot[i].position - snapshot[j].position).norm() -
                           snapshot[i].radius - snapshot[j].radius;
      row.min_dist = std::min(row.min_dist, clear);
    }
    for (const auto& o : overlaps_now)
      if (o.i == i || o.j == i) row.flags |= kFlagColliding;
    out.snapshot.agents.push_back(std::move(row));
  }

  const bool planning_mode = cfg.mode == Mode::AO || cfg.mode == Mode::NAO;
  const bool replan = planning_mode && (w.step_count % detail::replan_stride(w) == 0);

  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    if (!snapshot[i].controlled()) continue;

    if (replan) {
      const auto maps = detail::maps_for_agent(snapshot, i, now, cfg);
      const PlanResult plan = select_acceleration(snapshot[i].position, snapshot[i].velocity,
                                                  snapshot[i].goal, maps, cfg.constraint,
                                                  cfg.planner);
      if ((plan.acceleration - snapshot[i].acceleration).norm() > kEpsAdjust)
        out.adjusted.push_back(snapshot[i].id);
      out.next.agents[i].acceleration = plan.acceleration;
      out.snapshot.agents[i].flags |= kFlagReplanned;
      if (!plan.safe) out.snapshot.agents[i].flags |= kFlagUnsafe;
    }

    if (cfg.mode == Mode::VO || cfg.mode == Mode::NLVO) {
      // Diagnostics only: where does the current velocity sit relative to the
      // linear and nonlinear velocity obstacles of every neighbour?
      for (std::size_t j = 0; j < snapshot.size(); ++j) {
        if (j == i) continue;
        const AgentState& other = snapshot[j];
        const double grown = snapshot[i].radius + other.radius;
        const VoSource vo{other.position - snapshot[i].position, grown, other.velocity};
        Trajectory fut = other.controlled()
                             ? predict_from_state(other.position, other.velocity,
                                                  other.acceleration)
                             : time_shifted(*other.script, now);
        const NlvoSource nlvo{translated(std::move(fut), -snapshot[i].position), grown};
        DiagRecord rec;
        rec.time = now;
        rec.agent = snapshot[i].id;
        rec.obstacle = other.id;
        rec.in_vo = membership(build_map(vo, cfg.planner.horizon), snapshot[i].velocity)
                        .colliding;
        rec.in_nlvo = membership(build_map(nlvo, cfg.planner.horizon), snapshot[i].velocity)
                          .colliding;
        if (rec.in_vo) out.snapshot.agents[i].flags |= kFlagInVo;
        if (rec.in_nlvo) out.snapshot.agents[i].flags |= kFlagInNlvo;
        out.diag.push_back(std::move(rec));
      }
    }
  }

  // Integrate exactly under constant acceleration; scripted agents take their
  // trajectory value at the new time.
  const double dt = w.dt;
  const double t_next = (w.step_count + 1) * dt;
  for (std::size_t i = 0; i < out.next.agents.size(); ++i) {
    AgentState& a = out.next.agents[i];
    if (a.controlled()) {
      a.position = a.position + a.velocity * dt + a.acceleration * (0.5 * dt * dt);
      a.velocity = a.velocity + a.acceleration * dt;
    } else {
      const TrajQuery q = eval(*a.script, t_next);
      a.position = q.position;
      a.velocity = q.velocity;
      a.acceleration = q.acceleration;
    }
  }
  out.next.step_count = w.step_count + 1;
  out.next.time = t_next;
  out.overlaps = detect_collisions(out.next.agents);
  return out;
}

/// Runs ceil(duration/dt) steps and aggregates the full log. Collisions are
/// recorded at onset (a pair entering contact) and never halt the run.
inline SimLog run(World world, const SimConfig& cfg, double duration) {
  if (duration <= 0.0) throw std::invalid_argument("duration must be > 0");
  SimLog log;
  const long n_steps = static_cast<long>(std::ceil(duration / world.dt - 1e-9));
  std::set<std::pair<std::size_t, std::size_t>> in_contact;
  for (const auto& o : detect_collisions(world.agents)) {
    in_contact.insert({o.i, o.j});  // pre-existing overlaps do not re-trigger
    log.events.push_back({world.agents[o.i].id, world.agents[o.j].id, world.time, o.depth});
  }
  for (const auto& a : world.agents)
    if (a.controlled()) log.adjustments[a.id] = 0;

  for (long s = 0; s < n_steps; ++s) {
    StepOutput o = step(world, cfg);
    log.steps.push_back(std::move(o.snapshot));
    for (const auto& id : o.adjusted) log.adjustments[id] += 1;
    for (auto& d : o.diag) log.diag.push_back(std::move(d));

    std::set<std::pair<std::size_t, std::size_t>> now_contact;
    for (const auto& ov : o.overlaps) {
      now_contact.insert({ov.i, ov.j});
      if (!in_contact.count({ov.i, ov.j})) {
        log.events.push_back(
            {o.next.agents[ov.i].id, o.next.agents[ov.j].id, o.next.time, ov.depth});
      }
    }
    in_contact = std::move(now_contact);
    world = std::move(o.next);

    for (const auto& a : world.agents) {
      if (a.controlled() && a.goal && !log.reached.count(a.id) &&
          (a.position - *a.goal).norm() <= cfg.goal_radius) {
        log.reached[a.id] = world.time;
      }
    }
  }

  // Final state snapshot for completeness.
  StepRecord final_rec;
  final_rec.time = world.time;
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    AgentRow row{world.agents[i].id, world.agents[i].position, world.agents[i].velocity,
                 world.agents[i].acceleration};
    for (std::size_t j = 0; j < world.agents.size(); ++j) {
      if (j == i) continue;
      row.min_dist = std::min(row.min_dist, (world.agents[i].position -
                                             world.agents[j].position)
                                                    .norm() -
                                                world.agents[i].radius - world.agents[j].radius);
    }
    final_rec.agents.push_back(std::move(row));
  }
  log.steps.push_back(std::move(final_rec));
  return log;
}

/// Min pairwise clearance per logged step (negative while overlapping).
inline std::vector<double> min_clearance_series(const SimLog& log) {
  std::vector<double> out;
  out.reserve(log.steps.size());
  for (const auto& rec : log.steps) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : rec.agents) m = std::min(m, row.min_dist);
    out.push_back(m);
  }
  return out;
}

/// Total VO / NLVO membership-flag transitions over the run, summed over
/// (agent, obstacle) pairs.
inline std::pair<int, int> diag_flag_changes(const SimLog& log) {
  std::map<std::pair<std::string, std::string>, std::pair<bool, bool>> last;
  int vo_changes = 0, nlvo_changes = 0;
  for (const auto& d : log.diag) {
    const auto key = std::make_pair(d.agent, d.obstacle);
    const auto it = last.find(key);
    if (it != last.end()) {
      if (it->second.first != d.in_vo) ++vo_changes;
      if (it->second.second != d.in_nlvo) ++nlvo_changes;
    }
    last[key] = {d.in_vo, d.in_nlvo};
  }
  return {vo_changes, nlvo_changes};
}

}  // namespace aonav
