#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace aonav {

// Absolute tolerance for geometric comparisons. Scenario scale is 1-100 m,
// which leaves ~9 digits of double headroom.
inline constexpr double kEpsGeom = 1e-9;

/// Planar vector. Units depend on context: m, m/s or m/s^2.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  /// z-component of the 3-D cross product; sign gives orientation.
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  constexpr double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }

  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  Vec2 rotated(double radians) const {
    const double c = std::cos(radians), s = std::sin(radians);
    return {c * x - s * y, s * x + c * y};
  }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

inline void require_finite(double s, const char* what) {
  if (!std::isfinite(s)) throw std::invalid_argument(std::string(what) + " must be finite");
}

inline void require_finite(Vec2 v, const char* what) {
  if (!is_finite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

/// Disk in the plane: the universal obstacle shape once everything is grown
/// into configuration space.
struct Disk {
  Vec2 center;
  double radius = 0.0;

  constexpr bool operator==(const Disk&) const = default;

  bool contains(Vec2 p, double eps = 0.0) const {
    return (p - center).norm() <= radius + eps;
  }
};

/// Configuration-space growth: inflate an obstacle by the robot radius so the
/// robot becomes a point.
inline Disk grow(const Disk& obstacle, double robot_radius) {
  require_finite(obstacle.center, "obstacle center");
  require_finite(robot_radius, "robot_radius");
  if (robot_radius < 0.0) throw std::invalid_argument("robot_radius must be >= 0");
  if (obstacle.radius < 0.0) throw std::invalid_argument("obstacle radius must be >= 0");
  return {obstacle.center, obstacle.radius + robot_radius};
}

/// Homothety H_{center,ratio}: scaling about `center` by `ratio`.
inline Vec2 homothety(Vec2 center, double ratio, Vec2 p) {
  require_finite(center, "homothety center");
  require_finite(ratio, "homothety ratio");
  require_finite(p, "homothety point");
  return center + (p - center) * ratio;
}

/// Homothety applied to a disk: scales center distance and radius together,
/// so tangent rays from the homothety center are preserved.
inline Disk homothety_disk(Vec2 center, double ratio, const Disk& d) {
  require_finite(ratio, "homothety ratio");
  if (ratio <= 0.0) throw std::invalid_argument("homothety_disk requires ratio > 0");
  return {homothety(center, ratio, d.center), ratio * d.radius};
}

}  // namespace aonav
