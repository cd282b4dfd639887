#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aonav/obstacle_map.hpp"
#include "aonav/simulator.hpp"

namespace aonav {

namespace detail {

// Fixed-decimal formatting keeps SVG output byte-stable across runs.
inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace detail

/// Minimal SVG 1.1 canvas with a y-up world frame.
class SvgCanvas {
 public:
  SvgCanvas(double min_x, double min_y, double max_x, double max_y, int width_px = 800) {
    const double pad_x = 0.05 * std::max(1e-6, max_x - min_x);
    const double pad_y = 0.05 * std::max(1e-6, max_y - min_y);
    min_x_ = min_x - pad_x;
    max_x_ = max_x + pad_x;
    min_y_ = min_y - pad_y;
    max_y_ = max_y + pad_y;
    width_ = width_px;
    scale_ = width_ / (max_x_ - min_x_);
    height_ = static_cast<int>(scale_ * (max_y_ - min_y_)) + 1;
  }

  double sx(double x) const { return (x - min_x_) * scale_; }
  double sy(double y) const { return (max_y_ - y) * scale_; }
  double sr(double r) const { return r * scale_; }

  void circle(Vec2 c, double r, const std::string& cls) {
    body_ << "<circle class=\"" << cls << "\" cx=\"" << detail::fmt(sx(c.x)) << "\" cy=\""
          << detail::fmt(sy(c.y)) << "\" r=\"" << detail::fmt(sr(r)) << "\"/>\n";
  }

  void line(Vec2 a, Vec2 b, const std::string& cls) {
    body_ << "<line class=\"" << cls << "\" x1=\"" << detail::fmt(sx(a.x)) << "\" y1=\""
          << detail::fmt(sy(a.y)) << "\" x2=\"" << detail::fmt(sx(b.x)) << "\" y2=\""
          << detail::fmt(sy(b.y)) << "\"/>\n";
  }

  void polyline(const std::vector<Vec2>& pts, const std::string& cls) {
    if (pts.size() < 2) return;
    body_ << "<polyline class=\"" << cls << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ << ' ';
      body_ << detail::fmt(sx(pts[i].x)) << ',' << detail::fmt(sy(pts[i].y));
    }
    body_ << "\"/>\n";
  }

  void arrow(Vec2 from, Vec2 to, const std::string& cls) {
    line(from, to, cls);
    const Vec2 dir = (to - from).normalized();
    if (dir == Vec2{0.0, 0.0}) return;
    const double head = 8.0 / scale_;  // screen-sized arrowhead
    const Vec2 l = to - dir.rotated(0.45) * head;
    const Vec2 r = to - dir.rotated(-0.45) * head;
    body_ << "<polygon class=\"" << cls << "\" points=\"" << detail::fmt(sx(to.x)) << ','
          << detail::fmt(sy(to.y)) << ' ' << detail::fmt(sx(l.x)) << ',' << detail::fmt(sy(l.y))
          << ' ' << detail::fmt(sx(r.x)) << ',' << detail::fmt(sy(r.y)) << "\"/>\n";
  }

  void text(Vec2 at, const std::string& s) {
    body_ << "<text x=\"" << detail::fmt(sx(at.x)) << "\" y=\"" << detail::fmt(sy(at.y))
          << "\">" << s << "</text>\n";
  }

  void axes() {
    if (min_x_ < 0.0 && max_x_ > 0.0) line({0.0, min_y_}, {0.0, max_y_}, "axis");
    if (min_y_ < 0.0 && max_y_ > 0.0) line({min_x_, 0.0}, {max_x_, 0.0}, "axis");
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
        << "<style>\n"
           ".axis{stroke:#999;stroke-width:1;stroke-dasharray:4 4;}\n"
           ".lane{fill:none;stroke:#bbb;stroke-width:1;stroke-dasharray:6 4;}\n"
           ".agent{fill:#5b8dd911;stroke:#5b8dd9;stroke-width:1.5;}\n"
           ".ego{fill:#d9534f22;stroke:#d9534f;stroke-width:2;}\n"
           ".goal{stroke:#3c9a3c;stroke-width:2;}\n"
           ".path{fill:none;stroke:#888;stroke-width:1;}\n"
           ".env{fill:none;stroke:#444;stroke-width:1.5;}\n"
           ".tdisk{fill:none;stroke:#d9a45b;stroke-width:0.8;}\n"
           ".tdisk-degenerate{fill:none;stroke:#c45;stroke-width:1.2;}\n"
           ".apex{fill:#222;}\n"
           ".arrow{stroke:#d9534f;stroke-width:2;fill:#d9534f;}\n"
           "text{font:12px sans-serif;fill:#333;}\n"
           "</style>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  std::ostringstream body_;
  double min_x_ = 0, max_x_ = 1, min_y_ = 0, max_y_ = 1;
  double scale_ = 1;
  int width_ = 800, height_ = 800;
};

/// Workspace snapshot: agents as circles, circular lanes as dashed guides,
/// other declared trajectories as sampled paths, goals as crosses.
inline std::string render_frame(const World& world) {
  double min_x = -1, max_x = 1, min_y = -1, max_y = 1;
  const auto grow_bounds = [&](Vec2 p, double r) {
    min_x = std::min(min_x, p.x - r);
    max_x = std::max(max_x, p.x + r);
    min_y = std::min(min_y, p.y - r);
    max_y = std::max(max_y, p.y + r);
  };
  std::vector<std::pair<Vec2, double>> lanes;
  for (const auto& a : world.agents) {
    grow_bounds(a.position, a.radius);
    if (a.goal) grow_bounds(*a.goal, 1.0);
    if (a.script) {
      if (const auto* c = std::get_if<Circular>(&*a.script)) {
        const std::pair<Vec2, double> lane{c->center, c->path_radius};
        if (std::find(lanes.begin(), lanes.end(), lane) == lanes.end()) lanes.push_back(lane);
        grow_bounds(c->center + Vec2{c->path_radius, c->path_radius}, 0.0);
        grow_bounds(c->center - Vec2{c->path_radius, c->path_radius}, 0.0);
      }
    }
  }

  SvgCanvas svg(min_x, min_y, max_x, max_y);
  svg.axes();
  for (const auto& [center, radius] : lanes) svg.circle(center, radius, "lane");
  for (const auto& a : world.agents) {
    if (a.script) {
      if (!std::get_if<Circular>(&*a.script)) {
        // Sample the remaining trajectory as a path.
        std::vector<Vec2> pts;
        const double end = std::min(domain_end(*a.script), world.time + 10.0);
        for (int i = 0; i <= 100; ++i) {
          const double t = world.time + (end - world.time) * i / 100.0;
          if (t < world.time) continue;
          pts.push_back(eval(*a.script, t).position);
        }
        svg.polyline(pts, "path");
      }
    }
    svg.circle(a.position, a.radius, a.controlled() ? "ego" : "agent");
    if (a.goal) {
      svg.line(*a.goal - Vec2{0.8, 0.0}, *a.goal + Vec2{0.8, 0.0}, "goal");
      svg.line(*a.goal - Vec2{0.0, 0.8}, *a.goal + Vec2{0.0, 0.8}, "goal");
    }
  }
  svg.text({min_x, max_y}, "t=" + detail::fmt(world.time));
  return svg.finish();
}

/// Map-space snapshot: boundary envelopes, a subset of the temporal disks,
/// the apex, and an optional highlighted candidate drawn as an arrow from the
/// origin.
inline std::string render_map(const ObstacleMap& map, std::optional<Vec2> highlight = {}) {
  const BoundaryEnvelope env = boundary_polyline(map);
  double min_x = -1, max_x = 1, min_y = -1, max_y = 1;
  const auto grow_bounds = [&](Vec2 p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const auto& p : env.left) grow_bounds(p);
  for (const auto& p : env.right) grow_bounds(p);
  grow_bounds(env.apex);
  if (highlight) grow_bounds(*highlight);
  // The first couple of temporal disks are huge; bound the view by the later
  // two thirds of the elements instead so the cone structure stays readable.
  for (std::size_t i = map.elements.size() / 3; i < map.elements.size(); ++i) {
    const Disk& d = map.elements[i].disk;
    grow_bounds(d.center + Vec2{d.radius, d.radius});
    grow_bounds(d.center - Vec2{d.radius, d.radius});
  }

  SvgCanvas svg(min_x, min_y, max_x, max_y);
  svg.axes();
  const std::set<std::size_t> degenerate(env.degenerate.begin(), env.degenerate.end());
  const std::size_t stride = std::max<std::size_t>(1, map.elements.size() / 24);
  for (std::size_t i = 0; i < map.elements.size(); ++i) {
    if (degenerate.count(i)) {
      svg.circle(map.elements[i].disk.center, map.elements[i].disk.radius, "tdisk-degenerate");
    } else if (i % stride == 0 || i + 1 == map.elements.size()) {
      svg.circle(map.elements[i].disk.center, map.elements[i].disk.radius, "tdisk");
    }
  }
  svg.polyline(env.left, "env");
  svg.polyline(env.right, "env");
  svg.circle(env.apex, 2.5 / 100.0 * (max_x - min_x), "apex");
  if (highlight) svg.arrow({0.0, 0.0}, *highlight, "arrow");
  svg.text({min_x, max_y}, std::string(to_string(map.kind)) + " " + map.source_id);
  return svg.finish();
}

}  // namespace aonav
