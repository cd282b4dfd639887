#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

#include "aonav/geometry.hpp"
#include "aonav/obstacle_map.hpp"

namespace aonav {

/// Admissible control set: accelerations with |a| <= a_max.
struct ControlConstraint {
  double a_max = 4.0;
};

enum class Heuristic { MinDeviation, MaxClearance, GoalGreedy };

struct PlannerConfig {
  double horizon = 10.0;       // s, truncation of the "for all t > t0" unions
  int n_radial = 12;           // candidate magnitudes (log-spaced)
  int n_angular = 36;          // candidate directions (uniform)
  double safety_margin = 0.05; // m added to grown radii before map construction
  double kp = 1.0;             // goal attraction gain
  double kd = 2.0;             // velocity damping gain
  Heuristic heuristic = Heuristic::MinDeviation;
  double goal_lookahead = 0.5; // s, velocity projection used by GoalGreedy
};

struct PlanResult {
  Vec2 acceleration;
  bool safe = false;
  int candidates_evaluated = 0;
  double min_margin = 0.0;  // min clearance of the returned acceleration over all maps
};

inline Vec2 clamp_norm(Vec2 v, double max_norm) {
  const double n = v.norm();
  return (n > max_norm && n > 0.0) ? v * (max_norm / n) : v;
}

/// PD law toward the goal, clamped to the admissible set.
inline Vec2 desired_acceleration(Vec2 position, Vec2 velocity, Vec2 goal,
                                 const PlannerConfig& cfg, const ControlConstraint& constraint) {
  require_finite(position, "position");
  require_finite(velocity, "velocity");
  require_finite(goal, "goal");
  const Vec2 raw = (goal - position) * cfg.kp - velocity * cfg.kd;
  return clamp_norm(raw, constraint.a_max);
}

namespace detail {

struct CandidateScore {
  Vec2 accel;
  bool safe = false;
  double min_margin = 0.0;
  double deviation = 0.0;  // from the desired acceleration
  double angle = 0.0;
  double magnitude = 0.0;
  double goal_speed = 0.0;  // projected closing speed toward the goal
};

// Lexicographic orderings keep the selection deterministic regardless of the
// evaluation order of the candidates.
inline bool better_safe(const CandidateScore& a, const CandidateScore& b, Heuristic h,
                        bool has_goal) {
  auto tail = [](const CandidateScore& c) {
    return std::tuple(c.deviation, -c.min_margin, c.angle, c.magnitude);
  };
  switch (h) {
    case Heuristic::MaxClearance: {
      if (a.min_margin != b.min_margin) return a.min_margin > b.min_margin;
      return tail(a) < tail(b);
    }
    case Heuristic::GoalGreedy: {
      if (has_goal && a.goal_speed != b.goal_speed) return a.goal_speed > b.goal_speed;
      return tail(a) < tail(b);
    }
    case Heuristic::MinDeviation:
    default:
      return tail(a) < tail(b);
  }
}

}  // namespace detail

/// Picks a constant acceleration outside every map, inside the admissible
/// disk. The desired acceleration wins untouched whenever it is already safe.
/// With no safe candidate on the grid the result carries safe = false and the
/// least-bad (max-margin, braking-biased) choice; deciding what to do with
/// that is the caller's business.
inline PlanResult select_acceleration(Vec2 position, Vec2 velocity, std::optional<Vec2> goal,
                                      const std::vector<ObstacleMap>& maps,
                                      const ControlConstraint& constraint,
                                      const PlannerConfig& cfg) {
  require_finite(position, "position");
  require_finite(velocity, "velocity");
  if (constraint.a_max <= 0.0) throw std::invalid_argument("a_max must be > 0");

  const Vec2 a_des = goal ? desired_acceleration(position, velocity, *goal, cfg, constraint)
                          : Vec2{0.0, 0.0};

  const auto min_margin_over_maps = [&](Vec2 cand) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& map : maps) m = std::min(m, membership(map, cand).margin);
    return m;
  };
  const auto is_safe = [](double margin) { return margin > kEpsMember; };

  const double des_margin = min_margin_over_maps(a_des);
  if (is_safe(des_margin)) {
    return {a_des, true, 1, des_margin};
  }

  // Fixed polar grid over the admissible disk, plus the desired acceleration
  // and the zero acceleration.
  std::vector<Vec2> candidates;
  candidates.reserve(static_cast<std::size_t>(cfg.n_radial) * cfg.n_angular + 2);
  candidates.push_back(a_des);
  candidates.push_back({0.0, 0.0});
  const double mag_lo = constraint.a_max / 50.0;
  for (int i = 0; i < cfg.n_radial; ++i) {
    const double frac = (cfg.n_radial == 1)
                            ? 1.0
                            : static_cast<double>(i) / (cfg.n_radial - 1);
    const double mag = mag_lo * std::pow(constraint.a_max / mag_lo, frac);
    for (int j = 0; j < cfg.n_angular; ++j) {
      const double ang = 2.0 * M_PI * j / cfg.n_angular;
      candidates.push_back(Vec2{std::cos(ang), std::sin(ang)} * mag);
    }
  }

  const Vec2 goal_dir = goal ? (*goal - position).normalized() : Vec2{0.0, 0.0};
  const Vec2 brake = velocity.norm() > 0.0 ? velocity.normalized() * -constraint.a_max
                                           : Vec2{0.0, 0.0};

  std::optional<detail::CandidateScore> best_safe;
  std::optional<detail::CandidateScore> best_any;  // max margin, braking-biased
  int evaluated = 0;
  for (const Vec2 cand : candidates) {
    ++evaluated;
    detail::CandidateScore s;
    s.accel = cand;
    s.min_margin = (cand == a_des) ? des_margin : min_margin_over_maps(cand);
    s.safe = is_safe(s.min_margin);
    s.deviation = (cand - a_des).norm();
    s.angle = cand.angle();
    s.magnitude = cand.norm();
    s.goal_speed = (velocity + cand * cfg.goal_lookahead).dot(goal_dir);

    if (s.safe &&
        (!best_safe || detail::better_safe(s, *best_safe, cfg.heuristic, goal.has_value()))) {
      best_safe = s;
    }
    if (!best_any) {
      best_any = s;
    } else {
      const auto key = [&](const detail::CandidateScore& c) {
        return std::tuple(-c.min_margin, (c.accel - brake).norm(), c.angle, c.magnitude);
      };
      if (key(s) < key(*best_any)) best_any = s;
    }
  }

  if (best_safe) return {best_safe->accel, true, evaluated, best_safe->min_margin};
  return {best_any->accel, false, evaluated, best_any->min_margin};
}

}  // namespace aonav
