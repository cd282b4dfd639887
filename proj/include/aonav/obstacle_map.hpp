#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aonav/geometry.hpp"
#include "aonav/roots.hpp"
#include "aonav/trajectory.hpp"

namespace aonav {

// Temporal disks scale like 1/tau (velocity space) or 1/tau^2 (acceleration
// space), so the maps are truncated below kTauMin. A configuration already in
// contact at tau = 0 is the simulator's business, not the map's.
inline constexpr double kTauMin = 1e-3;   // s
inline constexpr double kEpsMember = 1e-6;  // map units; conservative boundary band

enum class MapKind { VO, NLVO, AO, NAO };

inline const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::VO: return "vo";
    case MapKind::NLVO: return "nlvo";
    case MapKind::AO: return "ao";
    case MapKind::NAO: return "nao";
  }
  return "?";
}

/// Disk of velocities/accelerations that collide exactly at elapsed time tau.
struct TemporalDisk {
  double tau = 0.0;
  Disk disk;
};

struct SamplingPolicy {
  enum class Spacing { Log, Linear };
  int samples = 200;
  Spacing spacing = Spacing::Log;
};

/// Inputs for a VO: obstacle at c0 (relative to the robot), already grown,
/// moving at constant velocity v_b.
struct VoSource {
  Vec2 c0;
  double radius = 0.0;
  Vec2 v_b;
};

/// Inputs for an NLVO: obstacle trajectory expressed relative to the robot's
/// position at tau = 0 (inertial axes), grown radius.
struct NlvoSource {
  Trajectory traj;
  double radius = 0.0;
};

/// Inputs for an AO: everything Eq-of-motion needs at tau = 0. v_rel is the
/// robot velocity minus the obstacle velocity; a_obs is the obstacle's
/// constant acceleration.
struct RelativeDynamics {
  Vec2 c0;
  Vec2 v_rel;
  Vec2 a_obs;
  double radius = 0.0;
};

/// Inputs for an NAO: obstacle trajectory relative to the robot's position at
/// tau = 0, grown radius, and the robot's current velocity.
struct NaoSource {
  Trajectory traj;
  double radius = 0.0;
  Vec2 v_a;
};

using MapSource = std::variant<VoSource, NlvoSource, RelativeDynamics, NaoSource>;

/// Candidate-independent probe grid for sources whose relative motion is not
/// polynomial in tau. offsets holds c(tau) for velocity-space maps and
/// c(tau) - v_a*tau for acceleration-space maps, so a membership scan reduces
/// to pure arithmetic per candidate.
struct ScanCache {
  std::vector<double> taus;
  std::vector<Vec2> offsets;
};

/// A sampled union of temporal disks plus the generating data. Membership
/// queries go back to the generator (closed form where possible), so they are
/// not limited by the sampling; the disks serve rendering and inspection.
struct ObstacleMap {
  MapKind kind = MapKind::VO;
  MapSource source;
  std::vector<TemporalDisk> elements;
  double horizon = 0.0;  // effective; clamped to the trajectory domain
  SamplingPolicy policy;
  std::string source_id;
  ScanCache scan;  // only populated for non-polynomial trajectories
};

struct MembershipResult {
  bool colliding = false;
  std::optional<double> first_collision_tau;
  double margin = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void check_tau(double tau) {
  require_finite(tau, "tau");
  if (tau < kTauMin) throw std::domain_error("tau below the temporal-disk cutoff");
}

inline void check_radius(double radius) {
  require_finite(radius, "radius");
  if (radius <= 0.0) throw std::invalid_argument("grown obstacle radius must be > 0");
}

}  // namespace detail

/// Velocities colliding with a constant-velocity obstacle exactly at tau:
/// the grown disk mapped by the homothety k = 1/tau, translated by v_b.
inline Disk vo_temporal(Vec2 c0, double radius, Vec2 v_b, double tau) {
  detail::check_tau(tau);
  detail::check_radius(radius);
  require_finite(c0, "c0");
  require_finite(v_b, "v_b");
  return {v_b + c0 / tau, radius / tau};
}

/// Velocities colliding at tau with an obstacle following a known trajectory:
/// the disk at c(tau) scaled about the robot by 1/tau.
inline Disk nlvo_temporal(const Trajectory& traj, double radius, double tau) {
  detail::check_tau(tau);
  detail::check_radius(radius);
  const Vec2 c = eval(traj, tau).position;
  return {c / tau, radius / tau};
}

/// Constant robot accelerations colliding at tau with an obstacle moving at
/// constant acceleration, both initial velocities accounted for.
inline Disk ao_temporal(const RelativeDynamics& rd, double tau) {
  detail::check_tau(tau);
  detail::check_radius(rd.radius);
  require_finite(rd.c0, "c0");
  require_finite(rd.v_rel, "v_rel");
  require_finite(rd.a_obs, "a_obs");
  const double inv_t2 = 1.0 / (tau * tau);
  return {rd.c0 * (2.0 * inv_t2) - rd.v_rel * (2.0 / tau) + rd.a_obs, 2.0 * rd.radius * inv_t2};
}

/// Acceleration-space analogue of the NLVO: obstacle on an arbitrary
/// trajectory, robot at initial velocity v_a.
inline Disk nao_temporal(const Trajectory& traj, double radius, Vec2 v_a, double tau) {
  detail::check_tau(tau);
  detail::check_radius(radius);
  require_finite(v_a, "v_a");
  const Vec2 c = eval(traj, tau).position;
  const double inv_t2 = 1.0 / (tau * tau);
  return {c * (2.0 * inv_t2) - v_a * (2.0 / tau), 2.0 * radius * inv_t2};
}

namespace detail {

inline std::vector<double> sample_taus(double horizon, const SamplingPolicy& policy) {
  const int n = std::max(2, policy.samples);
  std::vector<double> taus(n);
  if (policy.spacing == SamplingPolicy::Spacing::Log) {
    const double ratio = horizon / kTauMin;
    for (int i = 0; i < n; ++i)
      taus[i] = kTauMin * std::pow(ratio, static_cast<double>(i) / (n - 1));
  } else {
    for (int i = 0; i < n; ++i)
      taus[i] = kTauMin + (horizon - kTauMin) * static_cast<double>(i) / (n - 1);
  }
  taus.front() = kTauMin;
  taus.back() = horizon;
  return taus;
}

inline double clamped_horizon(const Trajectory& traj, double horizon) {
  return std::min(horizon, domain_end(traj));
}

inline std::vector<double> merged_scan_taus(double lo, double hi, int n_scan) {
  const int n = std::max(64, n_scan);
  std::vector<double> taus;
  taus.reserve(2 * n);
  const double ratio = hi / lo;
  for (int i = 0; i < n; ++i)
    taus.push_back(lo * std::pow(ratio, static_cast<double>(i) / (n - 1)));
  for (int i = 0; i < n; ++i)
    taus.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  return taus;
}

// offsets[i] = c(tau_i) - linear_term * tau_i; the candidate-dependent part of
// the relative offset is added per query.
inline ScanCache build_scan_cache(const Trajectory& traj, Vec2 linear_term, double lo,
                                  double hi, int n_scan) {
  ScanCache cache;
  cache.taus = merged_scan_taus(lo, hi, n_scan);
  cache.offsets.reserve(cache.taus.size());
  for (double t : cache.taus)
    cache.offsets.push_back(eval(traj, t).position - linear_term * t);
  return cache;
}

// Non-polynomial sources carry the velocity-like term the scan cache folded
// into its offsets.
inline bool needs_scan(const MapSource& source, Vec2* linear_term = nullptr,
                       const Trajectory** traj = nullptr) {
  const auto polynomial = [](const Trajectory& t) {
    return std::holds_alternative<Linear>(t) || std::holds_alternative<ConstAccel>(t);
  };
  if (const auto* nl = std::get_if<NlvoSource>(&source)) {
    if (polynomial(nl->traj)) return false;
    if (linear_term) *linear_term = {0.0, 0.0};
    if (traj) *traj = &nl->traj;
    return true;
  }
  if (const auto* nao = std::get_if<NaoSource>(&source)) {
    if (polynomial(nao->traj)) return false;
    if (linear_term) *linear_term = nao->v_a;
    if (traj) *traj = &nao->traj;
    return true;
  }
  return false;
}

}  // namespace detail

inline ObstacleMap build_map(const VoSource& src, double horizon, SamplingPolicy policy = {},
                             std::string source_id = {}) {
  require_finite(horizon, "horizon");
  if (horizon <= kTauMin) throw std::invalid_argument("horizon must exceed the tau cutoff");
  ObstacleMap map{MapKind::VO, src, {}, horizon, policy, std::move(source_id)};
  for (double tau : detail::sample_taus(horizon, policy))
    map.elements.push_back({tau, vo_temporal(src.c0, src.radius, src.v_b, tau)});
  return map;
}

inline ObstacleMap build_map(const NlvoSource& src, double horizon, SamplingPolicy policy = {},
                             std::string source_id = {}) {
  require_finite(horizon, "horizon");
  if (horizon <= kTauMin) throw std::invalid_argument("horizon must exceed the tau cutoff");
  validate(src.traj);
  const double h = detail::clamped_horizon(src.traj, horizon);
  if (h <= kTauMin) throw std::invalid_argument("trajectory domain ends before the tau cutoff");
  ObstacleMap map{MapKind::NLVO, src, {}, h, policy, std::move(source_id)};
  for (double tau : detail::sample_taus(h, policy))
    map.elements.push_back({tau, nlvo_temporal(src.traj, src.radius, tau)});
  if (detail::needs_scan(map.source))
    map.scan = detail::build_scan_cache(src.traj, {0.0, 0.0}, kTauMin, h,
                                        std::max(256, policy.samples));
  return map;
}

inline ObstacleMap build_map(const RelativeDynamics& src, double horizon,
                             SamplingPolicy policy = {}, std::string source_id = {}) {
  require_finite(horizon, "horizon");
  if (horizon <= kTauMin) throw std::invalid_argument("horizon must exceed the tau cutoff");
  ObstacleMap map{MapKind::AO, src, {}, horizon, policy, std::move(source_id)};
  for (double tau : detail::sample_taus(horizon, policy))
    map.elements.push_back({tau, ao_temporal(src, tau)});
  return map;
}

inline ObstacleMap build_map(const NaoSource& src, double horizon, SamplingPolicy policy = {},
                             std::string source_id = {}) {
  require_finite(horizon, "horizon");
  if (horizon <= kTauMin) throw std::invalid_argument("horizon must exceed the tau cutoff");
  validate(src.traj);
  const double h = detail::clamped_horizon(src.traj, horizon);
  if (h <= kTauMin) throw std::invalid_argument("trajectory domain ends before the tau cutoff");
  ObstacleMap map{MapKind::NAO, src, {}, h, policy, std::move(source_id)};
  for (double tau : detail::sample_taus(h, policy))
    map.elements.push_back({tau, nao_temporal(src.traj, src.radius, src.v_a, tau)});
  if (detail::needs_scan(map.source))
    map.scan = detail::build_scan_cache(src.traj, src.v_a, kTauMin, h,
                                        std::max(256, policy.samples));
  return map;
}

namespace detail {

// Relative offset obstacle-minus-robot as a quadratic in tau:
// d(tau) = q0 + q1*tau + q2*tau^2. Available whenever both motions are
// polynomial, which makes the membership test exact.
struct QuadraticPath {
  Vec2 q0, q1, q2;
};

inline std::optional<QuadraticPath> polynomial_path(const MapSource& source, Vec2 cand) {
  if (const auto* vo = std::get_if<VoSource>(&source))
    return QuadraticPath{vo->c0, vo->v_b - cand, {0.0, 0.0}};
  if (const auto* rd = std::get_if<RelativeDynamics>(&source))
    return QuadraticPath{rd->c0, -rd->v_rel, (rd->a_obs - cand) * 0.5};
  if (const auto* nl = std::get_if<NlvoSource>(&source)) {
    if (const auto* l = std::get_if<Linear>(&nl->traj))
      return QuadraticPath{l->c0, l->v - cand, {0.0, 0.0}};
    if (const auto* ca = std::get_if<ConstAccel>(&nl->traj))
      return QuadraticPath{ca->c0, ca->v - cand, ca->a * 0.5};
    return std::nullopt;
  }
  const auto& nao = std::get<NaoSource>(source);
  if (const auto* l = std::get_if<Linear>(&nao.traj))
    return QuadraticPath{l->c0, l->v - nao.v_a, cand * -0.5};
  if (const auto* ca = std::get_if<ConstAccel>(&nao.traj))
    return QuadraticPath{ca->c0, ca->v - nao.v_a, (ca->a - cand) * 0.5};
  return std::nullopt;
}

struct ProfileResult {
  double min_dist = std::numeric_limits<double>::infinity();
  double argmin_tau = 0.0;
  std::optional<double> first_below;  // earliest tau with dist <= radius
};

// Exact route: |d(tau)|^2 - r^2 is a quartic; its stationary points come from
// the derivative cubic, and between consecutive stationary points the sign can
// flip at most once.
inline ProfileResult analyze_polynomial(const QuadraticPath& q, double radius, double lo,
                                        double hi) {
  const double A = q.q2.norm_sq();
  const double B = 2.0 * q.q1.dot(q.q2);
  const double C = q.q1.norm_sq() + 2.0 * q.q0.dot(q.q2);
  const double D = 2.0 * q.q0.dot(q.q1);
  const double E = q.q0.norm_sq() - radius * radius;
  const auto g = [&](double t) { return (((A * t + B) * t + C) * t + D) * t + E; };

  double brk[6] = {lo, hi};
  int nbrk = 2;
  double crit[3];
  const int nc = real_roots_cubic(4.0 * A, 3.0 * B, 2.0 * C, D, crit);
  for (int i = 0; i < nc; ++i)
    if (crit[i] > lo && crit[i] < hi) brk[nbrk++] = crit[i];
  std::sort(brk, brk + nbrk);

  ProfileResult res;
  double g_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nbrk; ++i) {
    const double gv = g(brk[i]);
    if (gv < g_min) {
      g_min = gv;
      res.argmin_tau = brk[i];
    }
  }
  res.min_dist = std::sqrt(std::max(0.0, g_min + radius * radius));

  if (g(lo) <= 0.0) {
    res.first_below = lo;
  } else {
    for (int i = 0; i + 1 < nbrk; ++i) {
      if (g(brk[i]) > 0.0 && g(brk[i + 1]) <= 0.0) {
        res.first_below = bisect_root(g, brk[i], brk[i + 1], 1e-9);
        break;
      }
    }
  }
  return res;
}

inline std::vector<double> merged_scan_taus(double lo, double hi, int n_scan) {
  const int n = std::max(64, n_scan);
  std::vector<double> taus;
  taus.reserve(2 * n);
  const double ratio = hi / lo;
  for (int i = 0; i < n; ++i)
    taus.push_back(lo * std::pow(ratio, static_cast<double>(i) / (n - 1)));
  for (int i = 0; i < n; ++i)
    taus.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  return taus;
}

// offsets[i] = c(tau_i) - linear_term * tau_i; the candidate-dependent part of
// the relative offset is added per query.
inline ScanCache build_scan_cache(const Trajectory& traj, Vec2 linear_term, double lo,
                                  double hi, int n_scan) {
  ScanCache cache;
  cache.taus = merged_scan_taus(lo, hi, n_scan);
  cache.offsets.reserve(cache.taus.size());
  for (double t : cache.taus)
    cache.offsets.push_back(eval(traj, t).position - linear_term * t);
  return cache;
}

// Sampled route for non-polynomial relative motion: scan the cached grid,
// refine every local minimum by golden section, and bisect for the earliest
// crossing. `grid_dist` must agree with the continuous `dist` at the grid.
template <typename GridDist, typename DistFn>
ProfileResult analyze_sampled(const std::vector<double>& taus, GridDist&& grid_dist,
                              DistFn&& dist, double radius) {
  const std::size_t m = taus.size();
  ProfileResult res;

  double prev2 = std::numeric_limits<double>::infinity();
  double prev = grid_dist(0);
  res.min_dist = prev;
  res.argmin_tau = taus.front();
  std::size_t first_sample_below = (prev <= radius) ? 0 : m;

  // Refined local minima as (left-bracket sample index, tau*, dist*).
  struct Dip {
    std::size_t left;
    double tau;
    double d;
  };
  std::vector<Dip> dips;

  for (std::size_t i = 1; i <= m; ++i) {
    const double cur = (i < m) ? grid_dist(i) : std::numeric_limits<double>::infinity();
    if (i < m) {
      if (cur < res.min_dist) {
        res.min_dist = cur;
        res.argmin_tau = taus[i];
      }
      if (first_sample_below == m && cur <= radius) first_sample_below = i;
    }
    // prev at index i-1 is a local minimum against both neighbours.
    if (i >= 2 && prev <= prev2 && prev <= cur && i < m) {
      const double t_star = golden_min(dist, taus[i - 2], taus[i], 1e-6);
      const double d_star = dist(t_star);
      dips.push_back({i - 2, t_star, d_star});
      if (d_star < res.min_dist) {
        res.min_dist = d_star;
        res.argmin_tau = t_star;
      }
    }
    prev2 = prev;
    prev = cur;
  }

  const auto f = [&](double t) { return dist(t) - radius; };
  double first = std::numeric_limits<double>::infinity();
  if (first_sample_below == 0) {
    first = taus.front();
  } else if (first_sample_below < m) {
    first = bisect_root(f, taus[first_sample_below - 1], taus[first_sample_below], 1e-9);
  }
  for (const Dip& dip : dips) {
    if (dip.d > radius) continue;
    if (taus[dip.left] >= first) break;  // dips are in tau order
    first = std::min(first, bisect_root(f, taus[dip.left], dip.tau, 1e-9));
  }
  if (std::isfinite(first)) res.first_below = first;
  return res;
}

inline double source_radius(const MapSource& source) {
  return std::visit([](const auto& s) { return s.radius; }, source);
}

// Non-polynomial sources carry the velocity-like term the scan cache folded
// into its offsets.
inline bool needs_scan(const MapSource& source, Vec2* linear_term = nullptr,
                       const Trajectory** traj = nullptr) {
  const auto polynomial = [](const Trajectory& t) {
    return std::holds_alternative<Linear>(t) || std::holds_alternative<ConstAccel>(t);
  };
  if (const auto* nl = std::get_if<NlvoSource>(&source)) {
    if (polynomial(nl->traj)) return false;
    if (linear_term) *linear_term = {0.0, 0.0};
    if (traj) *traj = &nl->traj;
    return true;
  }
  if (const auto* nao = std::get_if<NaoSource>(&source)) {
    if (polynomial(nao->traj)) return false;
    if (linear_term) *linear_term = nao->v_a;
    if (traj) *traj = &nao->traj;
    return true;
  }
  return false;
}

inline ProfileResult profile(const ObstacleMap& map, Vec2 candidate) {
  const double r = source_radius(map.source);
  if (auto q = polynomial_path(map.source, candidate))
    return analyze_polynomial(*q, r, kTauMin, map.horizon);

  Vec2 linear_term;
  const Trajectory* traj = nullptr;
  needs_scan(map.source, &linear_term, &traj);

  const ScanCache* cache = &map.scan;
  ScanCache local;
  if (cache->taus.empty()) {
    // Hand-assembled map: build the probe grid on the fly.
    local = build_scan_cache(*traj, linear_term, kTauMin, map.horizon,
                             std::max(256, map.policy.samples));
    cache = &local;
  }

  if (map.kind == MapKind::NLVO) {
    const auto grid_dist = [&](std::size_t i) {
      return (cache->offsets[i] - candidate * cache->taus[i]).norm();
    };
    const auto dist = [&](double t) {
      return (eval(*traj, t).position - candidate * t).norm();
    };
    return analyze_sampled(cache->taus, grid_dist, dist, r);
  }
  const auto grid_dist = [&](std::size_t i) {
    return (cache->offsets[i] - candidate * (0.5 * cache->taus[i] * cache->taus[i])).norm();
  };
  const auto dist = [&](double t) {
    return (eval(*traj, t).position - linear_term * t - candidate * (0.5 * t * t)).norm();
  };
  return analyze_sampled(cache->taus, grid_dist, dist, r);
}

}  // namespace detail

/// Does this velocity/acceleration collide anywhere in [kTauMin, horizon]?
/// margin is the minimum clearance over the window (negative inside the map);
/// candidates within kEpsMember of the boundary classify as colliding.
inline MembershipResult membership(const ObstacleMap& map, Vec2 candidate) {
  require_finite(candidate, "candidate");
  const double r = detail::source_radius(map.source);
  const detail::ProfileResult prof = detail::profile(map, candidate);
  MembershipResult res;
  res.margin = prof.min_dist - r;
  res.colliding = res.margin <= kEpsMember;
  if (res.colliding)
    res.first_collision_tau = prof.first_below ? *prof.first_below : prof.argmin_tau;
  return res;
}

/// Signed clearance only (cheaper to read at call sites).
inline double clearance(const ObstacleMap& map, Vec2 candidate) {
  return membership(map, candidate).margin;
}

/// Tangent points of every temporal disk as seen from the map's asymptotic
/// apex; elements that contain the apex are reported separately and render as
/// full circles.
struct BoundaryEnvelope {
  Vec2 apex;
  std::vector<Vec2> left;
  std::vector<Vec2> right;
  std::vector<std::size_t> degenerate;  // indices into map.elements
};

inline Vec2 map_apex(const ObstacleMap& map) {
  switch (map.kind) {
    case MapKind::VO:
      // The VO cone converges on the obstacle velocity; tangents from there
      // reproduce the relative-velocity cone translated by v_b.
      return std::get<VoSource>(map.source).v_b;
    case MapKind::AO:
      return std::get<RelativeDynamics>(map.source).a_obs;
    default:
      return {0.0, 0.0};
  }
}

inline BoundaryEnvelope boundary_polyline(const ObstacleMap& map) {
  if (map.elements.size() < 2)
    throw std::invalid_argument("boundary_polyline needs at least 2 temporal disks");
  BoundaryEnvelope env;
  env.apex = map_apex(map);
  env.left.reserve(map.elements.size());
  env.right.reserve(map.elements.size());
  for (std::size_t i = 0; i < map.elements.size(); ++i) {
    const Disk& d = map.elements[i].disk;
    const Vec2 rel = d.center - env.apex;
    const double dist = rel.norm();
    if (dist <= d.radius) {
      env.degenerate.push_back(i);
      continue;
    }
    const double reach = std::sqrt(dist * dist - d.radius * d.radius);
    const double alpha = std::asin(d.radius / dist);
    const Vec2 dir = rel / dist;
    env.left.push_back(env.apex + dir.rotated(alpha) * reach);
    env.right.push_back(env.apex + dir.rotated(-alpha) * reach);
  }
  return env;
}

/// CSV dump (tau, cx, cy, radius) for external plotting.
inline void write_map_csv(const ObstacleMap& map, std::ostream& os) {
  os << "tau,cx,cy,radius\n";
  char buf[160];
  for (const auto& e : map.elements) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", e.tau, e.disk.center.x,
                  e.disk.center.y, e.disk.radius);
    os << buf;
  }
}

}  // namespace aonav
