#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "aonav/simulator.hpp"

namespace aonav {

/// Step log as CSV, one row per agent per step:
/// time,id,px,py,vx,vy,ax,ay,min_dist,flags
/// min_dist is the clearance to the nearest other agent (negative while
/// overlapping); flags is the bitmask documented in simulator.hpp.
inline void write_log_csv(const SimLog& log, std::ostream& os) {
  os << "time,id,px,py,vx,vy,ax,ay,min_dist,flags\n";
  char buf[256];
  for (const auto& rec : log.steps) {
    for (const auto& row : rec.agents) {
      std::snprintf(buf, sizeof(buf), "%.9g,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%u\n",
                    rec.time, row.id.c_str(), row.position.x, row.position.y, row.velocity.x,
                    row.velocity.y, row.acceleration.x, row.acceleration.y, row.min_dist,
                    row.flags);
      os << buf;
    }
  }
}

/// Collision events as CSV: time,a,b,depth.
inline void write_events_csv(const SimLog& log, std::ostream& os) {
  os << "time,a,b,depth\n";
  char buf[192];
  for (const auto& e : log.events) {
    std::snprintf(buf, sizeof(buf), "%.9g,%s,%s,%.9g\n", e.time, e.a.c_str(), e.b.c_str(),
                  e.depth);
    os << buf;
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace aonav
