#pragma once

#include <limits>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "aonav/geometry.hpp"

namespace aonav {

/// Obstacle motion models. All time arguments are elapsed seconds from the
/// moment the trajectory was anchored (tau = t - t0), never absolute time.

struct Linear {
  Vec2 c0;  // position at tau = 0
  Vec2 v;
  constexpr bool operator==(const Linear&) const = default;
};

struct ConstAccel {
  Vec2 c0;
  Vec2 v;
  Vec2 a;
  constexpr bool operator==(const ConstAccel&) const = default;
};

struct Circular {
  Vec2 center;
  double path_radius = 1.0;   // m, > 0
  double angular_rate = 0.0;  // rad/s, signed
  double phase = 0.0;         // rad at tau = 0
  constexpr bool operator==(const Circular&) const = default;
};

/// Sampled trajectory interpolated with a natural cubic spline. Analytic
/// first/second derivatives come with the spline; no extrapolation past the
/// last sample.
class Piecewise {
 public:
  explicit Piecewise(std::vector<std::pair<double, Vec2>> samples) {
    if (samples.size() < 2) throw std::invalid_argument("Piecewise needs at least 2 samples");
    if (std::fabs(samples.front().first) > 1e-12)
      throw std::invalid_argument("Piecewise samples must start at tau = 0");
    samples.front().first = 0.0;
    t_.reserve(samples.size());
    p_.reserve(samples.size());
    for (const auto& [tau, pos] : samples) {
      require_finite(tau, "Piecewise sample time");
      require_finite(pos, "Piecewise sample position");
      if (!t_.empty() && tau <= t_.back())
        throw std::invalid_argument("Piecewise sample times must be strictly increasing");
      t_.push_back(tau);
      p_.push_back(pos);
    }
    solve_second_derivatives();
  }

  double domain_end() const { return t_.back(); }

  std::vector<std::pair<double, Vec2>> samples() const {
    std::vector<std::pair<double, Vec2>> out;
    out.reserve(t_.size());
    for (std::size_t i = 0; i < t_.size(); ++i) out.emplace_back(t_[i], p_[i]);
    return out;
  }

  bool operator==(const Piecewise& o) const { return t_ == o.t_ && p_ == o.p_; }

  void eval(double tau, Vec2& pos, Vec2& vel, Vec2& acc) const {
    if (tau > t_.back() + 1e-12)
      throw std::domain_error("Piecewise trajectory evaluated past its domain");
    tau = std::min(tau, t_.back());
    std::size_t i = segment_index(tau);
    const double h = t_[i + 1] - t_[i];
    const double sl = tau - t_[i];        // distance from left knot
    const double sr = t_[i + 1] - tau;    // distance from right knot
    const Vec2 al = p_[i] / h - m_[i] * (h / 6.0);
    const Vec2 ar = p_[i + 1] / h - m_[i + 1] * (h / 6.0);
    pos = m_[i] * (sr * sr * sr / (6.0 * h)) + m_[i + 1] * (sl * sl * sl / (6.0 * h)) +
          al * sr + ar * sl;
    vel = m_[i] * (-sr * sr / (2.0 * h)) + m_[i + 1] * (sl * sl / (2.0 * h)) - al + ar;
    acc = m_[i] * (sr / h) + m_[i + 1] * (sl / h);
  }

 private:
  std::size_t segment_index(double tau) const {
    // Last segment owns its right endpoint.
    std::size_t lo = 0, hi = t_.size() - 2;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (t_[mid] <= tau)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  // Natural spline: second derivatives vanish at both ends; the interior ones
  // solve a tridiagonal system (Thomas algorithm, run on Vec2 directly).
  void solve_second_derivatives() {
    const std::size_t n = t_.size();
    m_.assign(n, Vec2{});
    if (n == 2) return;
    std::vector<double> diag(n), upper(n);
    std::vector<Vec2> rhs(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = t_[i] - t_[i - 1];
      const double hr = t_[i + 1] - t_[i];
      diag[i] = 2.0 * (hl + hr);
      upper[i] = hr;
      rhs[i] = ((p_[i + 1] - p_[i]) / hr - (p_[i] - p_[i - 1]) / hl) * 6.0;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double hl = t_[i] - t_[i - 1];
      const double w = hl / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= rhs[i - 1] * w;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      Vec2 next = (i + 2 < n) ? m_[i + 1] : Vec2{};
      m_[i] = (rhs[i] - next * upper[i]) / diag[i];
    }
  }

  std::vector<double> t_;
  std::vector<Vec2> p_;
  std::vector<Vec2> m_;  // spline second derivatives at the knots
};

using Trajectory = std::variant<Linear, ConstAccel, Circular, Piecewise>;

struct TrajQuery {
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
};

inline void validate(const Trajectory& traj) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Linear>) {
          require_finite(t.c0, "Linear c0");
          require_finite(t.v, "Linear v");
        } else if constexpr (std::is_same_v<T, ConstAccel>) {
          require_finite(t.c0, "ConstAccel c0");
          require_finite(t.v, "ConstAccel v");
          require_finite(t.a, "ConstAccel a");
        } else if constexpr (std::is_same_v<T, Circular>) {
          require_finite(t.center, "Circular center");
          require_finite(t.path_radius, "Circular path_radius");
          require_finite(t.angular_rate, "Circular angular_rate");
          require_finite(t.phase, "Circular phase");
          if (t.path_radius <= 0.0)
            throw std::invalid_argument("Circular path_radius must be > 0");
        }
        // Piecewise validates in its constructor.
      },
      traj);
}

/// Position, velocity and acceleration at elapsed time tau >= 0.
inline TrajQuery eval(const Trajectory& traj, double tau) {
  require_finite(tau, "tau");
  if (tau < 0.0) throw std::domain_error("trajectory eval requires tau >= 0");
  TrajQuery q;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Linear>) {
          q.position = t.c0 + t.v * tau;
          q.velocity = t.v;
          q.acceleration = {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, ConstAccel>) {
          q.position = t.c0 + t.v * tau + t.a * (0.5 * tau * tau);
          q.velocity = t.v + t.a * tau;
          q.acceleration = t.a;
        } else if constexpr (std::is_same_v<T, Circular>) {
          const double ang = t.angular_rate * tau + t.phase;
          const Vec2 radial{std::cos(ang), std::sin(ang)};
          const Vec2 tangent{-std::sin(ang), std::cos(ang)};
          q.position = t.center + radial * t.path_radius;
          q.velocity = tangent * (t.path_radius * t.angular_rate);
          q.acceleration = radial * (-t.path_radius * t.angular_rate * t.angular_rate);
        } else {
          t.eval(tau, q.position, q.velocity, q.acceleration);
        }
      },
      traj);
  return q;
}

/// Largest admissible tau; infinite for the closed-form models.
inline double domain_end(const Trajectory& traj) {
  if (const auto* pw = std::get_if<Piecewise>(&traj)) return pw->domain_end();
  return std::numeric_limits<double>::infinity();
}

/// Constant-acceleration prediction from an observed state.
inline Trajectory predict_from_state(Vec2 position, Vec2 velocity, Vec2 acceleration) {
  require_finite(position, "position");
  require_finite(velocity, "velocity");
  require_finite(acceleration, "acceleration");
  return ConstAccel{position, velocity, acceleration};
}

/// Same motion expressed with all positions offset (e.g. into a frame
/// centered on the robot).
inline Trajectory translated(const Trajectory& traj, Vec2 offset) {
  return std::visit(
      [&](const auto& t) -> Trajectory {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return Linear{t.c0 + offset, t.v};
        } else if constexpr (std::is_same_v<T, ConstAccel>) {
          return ConstAccel{t.c0 + offset, t.v, t.a};
        } else if constexpr (std::is_same_v<T, Circular>) {
          Circular c = t;
          c.center += offset;
          return c;
        } else {
          auto samples = t.samples();
          for (auto& [tau, pos] : samples) pos += offset;
          return Piecewise{std::move(samples)};
        }
      },
      traj);
}

/// Re-anchors the trajectory so that new tau = 0 corresponds to old tau = t0.
/// For Piecewise this keeps the remaining knots (the spline is re-fit), so the
/// domain shrinks accordingly.
inline Trajectory time_shifted(const Trajectory& traj, double t0) {
  require_finite(t0, "t0");
  if (t0 < 0.0) throw std::domain_error("time_shifted requires t0 >= 0");
  if (t0 == 0.0) return traj;
  return std::visit(
      [&](const auto& t) -> Trajectory {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return Linear{t.c0 + t.v * t0, t.v};
        } else if constexpr (std::is_same_v<T, ConstAccel>) {
          return ConstAccel{t.c0 + t.v * t0 + t.a * (0.5 * t0 * t0), t.v + t.a * t0, t.a};
        } else if constexpr (std::is_same_v<T, Circular>) {
          Circular c = t;
          c.phase += c.angular_rate * t0;
          return c;
        } else {
          if (t0 >= t.domain_end() - 1e-12)
            throw std::domain_error("time_shifted past Piecewise domain");
          Vec2 pos, vel, acc;
          t.eval(t0, pos, vel, acc);
          std::vector<std::pair<double, Vec2>> samples;
          samples.emplace_back(0.0, pos);
          for (const auto& [tau, p] : t.samples()) {
            if (tau > t0 + 1e-9) samples.emplace_back(tau - t0, p);
          }
          if (samples.size() < 2) throw std::domain_error("time_shifted past Piecewise domain");
          return Piecewise{std::move(samples)};
        }
      },
      traj);
}

}  // namespace aonav
