#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "aonav/planner.hpp"

using namespace aonav;
using Catch::Approx;

namespace {

// The same polar grid the planner walks, rebuilt independently for use as a
// brute-force selection oracle.
std::vector<Vec2> full_grid(Vec2 a_des, const ControlConstraint& c, const PlannerConfig& cfg) {
  std::vector<Vec2> out{a_des, {0.0, 0.0}};
  const double mag_lo = c.a_max / 50.0;
  for (int i = 0; i < cfg.n_radial; ++i) {
    const double frac = (cfg.n_radial == 1) ? 1.0 : static_cast<double>(i) / (cfg.n_radial - 1);
    const double mag = mag_lo * std::pow(c.a_max / mag_lo, frac);
    for (int j = 0; j < cfg.n_angular; ++j) {
      const double ang = 2.0 * M_PI * j / cfg.n_angular;
      out.push_back(Vec2{std::cos(ang), std::sin(ang)} * mag);
    }
  }
  return out;
}

double min_margin(const std::vector<ObstacleMap>& maps, Vec2 cand) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& map : maps) m = std::min(m, membership(map, cand).margin);
  return m;
}

// Dense forward integration of robot-vs-obstacle separation under the chosen
// constant acceleration.
double dense_min_separation(const std::vector<RelativeDynamics>& obstacles, Vec2 v_rob,
                            Vec2 a_rob, double horizon, double dtau) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& rd : obstacles) {
    for (double tau = kTauMin; tau <= horizon; tau += dtau) {
      // Absolute kinematics with the obstacle velocity recovered from v_rel.
      const Vec2 v_obs = v_rob - rd.v_rel;
      const Vec2 p_obs = rd.c0 + v_obs * tau + rd.a_obs * (0.5 * tau * tau);
      const Vec2 p_rob = v_rob * tau + a_rob * (0.5 * tau * tau);
      worst = std::min(worst, (p_obs - p_rob).norm() - rd.radius);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("desired acceleration is a clamped PD law") {
  PlannerConfig cfg;
  cfg.kp = 1.0;
  cfg.kd = 2.0;

  CHECK(desired_acceleration({3.0, -1.0}, {0.0, 0.0}, {3.0, -1.0}, cfg, {5.0}) ==
        Vec2{0.0, 0.0});

  const Vec2 clamped = desired_acceleration({0.0, 0.0}, {0.0, 0.0}, {10.0, 0.0}, cfg, {5.0});
  CHECK(clamped.x == Approx(5.0).epsilon(1e-12));
  CHECK(clamped.y == 0.0);

  const Vec2 damping = desired_acceleration({0.0, 0.0}, {3.0, 0.0}, {0.0, 0.0}, cfg, {10.0});
  CHECK(damping.x == Approx(-6.0).epsilon(1e-12));
  CHECK(damping.y == 0.0);
}

TEST_CASE("no obstacles: the desired acceleration is returned untouched") {
  PlannerConfig cfg;
  const ControlConstraint c{4.0};
  const PlanResult res =
      select_acceleration({0.0, 0.0}, {1.0, 0.0}, Vec2{20.0, 0.0}, {}, c, cfg);
  CHECK(res.safe);
  CHECK(res.candidates_evaluated == 1);
  const Vec2 a_des = desired_acceleration({0.0, 0.0}, {1.0, 0.0}, {20.0, 0.0}, cfg, c);
  CHECK(res.acceleration.x == a_des.x);  // bit-identical
  CHECK(res.acceleration.y == a_des.y);
}

TEST_CASE("head-on conflict: min-deviation picks the closest safe grid point") {
  // Robot cruising at 5 m/s straight into a static obstacle; holding course
  // collides, so the planner must deviate as little as possible.
  PlannerConfig cfg;
  cfg.heuristic = Heuristic::MinDeviation;
  const ControlConstraint c{4.0};
  const Vec2 v_rob{5.0, 0.0};
  std::vector<ObstacleMap> maps;
  maps.push_back(build_map(RelativeDynamics{{15.0, 0.0}, v_rob, {0.0, 0.0}, 2.0}, cfg.horizon));

  const PlanResult res = select_acceleration({0.0, 0.0}, v_rob, std::nullopt, maps, c, cfg);
  REQUIRE(res.safe);
  CHECK(res.acceleration.norm() <= c.a_max + kEpsGeom);
  CHECK_FALSE(membership(maps[0], res.acceleration).colliding);

  // Brute force over the full candidate set: nothing safe sits closer to the
  // desired acceleration (0,0 here: no goal).
  const Vec2 a_des{0.0, 0.0};
  const double chosen_dev = (res.acceleration - a_des).norm();
  for (const Vec2 cand : full_grid(a_des, c, cfg)) {
    if (min_margin(maps, cand) > kEpsMember) {
      CHECK(chosen_dev <= (cand - a_des).norm() + 1e-12);
    }
  }
}

TEST_CASE("overwhelmed planner reports unsafe and maximizes margin") {
  // Obstacle already overlapping and closing fast, with a token acceleration
  // budget: nothing on the grid is safe.
  PlannerConfig cfg;
  const ControlConstraint c{0.001};
  const Vec2 v_rob{3.0, 0.0};
  std::vector<ObstacleMap> maps;
  maps.push_back(build_map(RelativeDynamics{{0.5, 0.0}, v_rob, {0.0, 0.0}, 2.0}, cfg.horizon));

  const PlanResult res = select_acceleration({0.0, 0.0}, v_rob, std::nullopt, maps, c, cfg);
  CHECK_FALSE(res.safe);
  CHECK(res.acceleration.norm() <= c.a_max + kEpsGeom);

  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2 cand : full_grid({0.0, 0.0}, c, cfg)) {
    const double m = min_margin(maps, cand);
    CHECK(m <= kEpsMember);  // grid oracle: everything collides
    best = std::max(best, m);
  }
  CHECK(res.min_margin == Approx(best).margin(1e-12));
}

TEST_CASE("safe desired accelerations pass through bit-identically") {
  PlannerConfig cfg;
  const ControlConstraint c{4.0};
  std::vector<ObstacleMap> maps;
  maps.push_back(
      build_map(RelativeDynamics{{0.0, 40.0}, {0.0, -1.0}, {0.0, 0.0}, 2.0}, cfg.horizon));
  const Vec2 pos{2.0, 3.0}, vel{0.5, -0.25}, goal{-7.0, 3.0};
  const PlanResult a = select_acceleration(pos, vel, goal, maps, c, cfg);
  const PlanResult b = select_acceleration(pos, vel, goal, maps, c, cfg);
  REQUIRE(a.safe);
  CHECK(std::memcmp(&a.acceleration, &b.acceleration, sizeof(Vec2)) == 0);
  const Vec2 a_des = desired_acceleration(pos, vel, goal, cfg, c);
  CHECK(std::memcmp(&a.acceleration, &a_des, sizeof(Vec2)) == 0);
}

TEST_CASE("constraint compliance and determinism on random scenes") {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  std::uniform_real_distribution<double> vel(-8.0, 8.0);
  std::uniform_real_distribution<double> acc(-3.0, 3.0);
  std::uniform_real_distribution<double> rad(1.0, 3.0);
  std::uniform_int_distribution<int> n_obs(1, 3);
  PlannerConfig cfg;
  const ControlConstraint c{4.0};

  for (int i = 0; i < 60; ++i) {
    const Vec2 v_rob{vel(rng), vel(rng)};
    std::vector<ObstacleMap> maps;
    for (int k = n_obs(rng); k > 0; --k) {
      maps.push_back(build_map(RelativeDynamics{{pos(rng), pos(rng)},
                                                {vel(rng), vel(rng)},
                                                {acc(rng), acc(rng)},
                                                rad(rng)},
                               cfg.horizon));
    }
    const Vec2 goal{pos(rng), pos(rng)};
    const PlanResult r1 = select_acceleration({0.0, 0.0}, v_rob, goal, maps, c, cfg);
    const PlanResult r2 = select_acceleration({0.0, 0.0}, v_rob, goal, maps, c, cfg);
    CHECK(r1.acceleration.norm() <= c.a_max + kEpsGeom);
    CHECK(r1.acceleration == r2.acceleration);
    CHECK(r1.safe == r2.safe);
    CHECK(r1.candidates_evaluated == r2.candidates_evaluated);
  }
}

TEST_CASE("safety soundness: safe plans keep clear of every obstacle") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  std::uniform_real_distribution<double> vel(-6.0, 6.0);
  std::uniform_real_distribution<double> acc(-2.0, 2.0);
  std::uniform_real_distribution<double> rad(1.0, 3.0);
  std::uniform_int_distribution<int> n_obs(1, 3);
  PlannerConfig cfg;
  const ControlConstraint c{4.0};

  int safe_count = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec2 v_rob{vel(rng), vel(rng)};
    std::vector<RelativeDynamics> obstacles;
    std::vector<ObstacleMap> maps;
    for (int k = n_obs(rng); k > 0; --k) {
      RelativeDynamics rd{{pos(rng), pos(rng)}, {vel(rng), vel(rng)}, {acc(rng), acc(rng)},
                          rad(rng)};
      if (rd.c0.norm() <= rd.radius + 0.2) rd.c0 = rd.c0.normalized() * (rd.radius + 1.0);
      obstacles.push_back(rd);
      maps.push_back(build_map(rd, cfg.horizon));
    }
    const PlanResult res =
        select_acceleration({0.0, 0.0}, v_rob, Vec2{pos(rng), pos(rng)}, maps, c, cfg);
    if (!res.safe) continue;
    ++safe_count;
    const double sep = dense_min_separation(obstacles, v_rob, res.acceleration, cfg.horizon,
                                            1e-3);
    CHECK(sep > 0.0);
  }
  CHECK(safe_count > 50);  // the scenes should mostly be solvable
}

TEST_CASE("max-clearance prefers wider margins over smaller deviation") {
  PlannerConfig cfg;
  const Vec2 v_rob{5.0, 0.0};
  std::vector<ObstacleMap> maps;
  maps.push_back(build_map(RelativeDynamics{{12.0, 0.0}, v_rob, {0.0, 0.0}, 2.0}, cfg.horizon));
  const ControlConstraint c{4.0};

  cfg.heuristic = Heuristic::MinDeviation;
  const PlanResult dev = select_acceleration({0.0, 0.0}, v_rob, std::nullopt, maps, c, cfg);
  cfg.heuristic = Heuristic::MaxClearance;
  const PlanResult clr = select_acceleration({0.0, 0.0}, v_rob, std::nullopt, maps, c, cfg);
  REQUIRE(dev.safe);
  REQUIRE(clr.safe);
  CHECK(clr.min_margin >= dev.min_margin - 1e-12);
  CHECK((dev.acceleration - Vec2{0.0, 0.0}).norm() <=
        (clr.acceleration - Vec2{0.0, 0.0}).norm() + 1e-12);
}

TEST_CASE("goal-greedy maximizes projected closing speed among safe candidates") {
  PlannerConfig cfg;
  cfg.heuristic = Heuristic::GoalGreedy;
  const ControlConstraint c{4.0};
  const Vec2 v_rob{5.0, 0.0};
  const Vec2 goal{40.0, 0.0};
  std::vector<ObstacleMap> maps;
  maps.push_back(build_map(RelativeDynamics{{15.0, 0.0}, v_rob, {0.0, 0.0}, 2.0}, cfg.horizon));

  const PlanResult res = select_acceleration({0.0, 0.0}, v_rob, goal, maps, c, cfg);
  REQUIRE(res.safe);
  const Vec2 goal_dir = goal.normalized();
  const double chosen = (v_rob + res.acceleration * cfg.goal_lookahead).dot(goal_dir);
  const Vec2 a_des = desired_acceleration({0.0, 0.0}, v_rob, goal, cfg, c);
  for (const Vec2 cand : full_grid(a_des, c, cfg)) {
    if (min_margin(maps, cand) > kEpsMember) {
      CHECK(chosen >= (v_rob + cand * cfg.goal_lookahead).dot(goal_dir) - 1e-12);
    }
  }
}
