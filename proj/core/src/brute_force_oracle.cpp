#include "conflictfuzz/brute_force_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace conflictfuzz {

namespace {

constexpr double kAreaEps = 1e-8;

struct Run {
  int first;
  int last;
};

struct PairHit {
  int npc_id;
  Cell cell;
  int gap;
  int later_enter;
  bool ev_first;
};

bool clipped_overlap(const OrientedBox& box, const Cell& c, double size) {
  const auto corners = box.corners();
  const Polygon subject(corners.begin(), corners.end());
  const double x0 = c.ix * size;
  const double y0 = c.iy * size;
  const Polygon square{{x0, y0}, {x0 + size, y0}, {x0 + size, y0 + size}, {x0, y0 + size}};
  return polygon_area(clip_convex(subject, square)) > kAreaEps;
}

std::vector<Run> runs_of(const std::vector<int>& steps) {
  std::vector<Run> out;
  for (const int s : steps) {
    if (!out.empty() && out.back().last + 1 == s) {
      out.back().last = s;
    } else {
      out.push_back({s, s});
    }
  }
  return out;
}

}  // namespace

std::vector<OracleEvent> brute_force_conflicts(const Trace& trace, const ConflictParams& params) {
  const double size = params.cell_size;
  const double reach = std::hypot(kVehicleLength, kVehicleWidth) / 2.0 + size;

  // (cell, vehicle) -> occupied steps, ascending.
  std::map<std::pair<Cell, int>, std::vector<int>> occupied;
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    for (const auto& v : trace.steps[n]) {
      const int x_lo = static_cast<int>(std::floor((v.xy.x - reach) / size));
      const int x_hi = static_cast<int>(std::floor((v.xy.x + reach) / size));
      const int y_lo = static_cast<int>(std::floor((v.xy.y - reach) / size));
      const int y_hi = static_cast<int>(std::floor((v.xy.y + reach) / size));
      for (int ix = x_lo; ix <= x_hi; ++ix) {
        for (int iy = y_lo; iy <= y_hi; ++iy) {
          if (clipped_overlap(v.footprint(), {ix, iy}, size)) occupied[{{ix, iy}, v.vehicle_id}].push_back(static_cast<int>(n));
        }
      }
    }
  }

  std::map<int, std::vector<PairHit>> hits;
  for (const auto& [key, ev_steps] : occupied) {
    if (key.second != 0) continue;
    const Cell cell = key.first;
    const auto ev_runs = runs_of(ev_steps);
    for (auto it = occupied.upper_bound(key); it != occupied.end() && it->first.first == cell; ++it) {
      const auto& [other, npc_steps] = *it;
      for (const auto& a : ev_runs) {
        for (const auto& b : runs_of(npc_steps)) {
          int gap;
          bool ev_first;
          if (a.last < b.first) {
            gap = b.first - a.last;
            ev_first = true;
          } else if (b.last < a.first) {
            gap = a.first - b.last;
            ev_first = false;
          } else {
            continue;
          }
          if (gap * trace.dt > params.t_s + 1e-9) continue;
          hits[other.second - 1].push_back({other.second - 1, cell, gap, ev_first ? b.first : a.first, ev_first});
        }
      }
    }
  }

  const double window = params.cluster_window + 1e-9;
  std::vector<OracleEvent> events;
  for (const auto& [npc_id, list] : hits) {
    const std::size_t h = list.size();
    // Every pair is tested; connected components are then labelled by flood fill.
    std::vector<std::vector<std::size_t>> linked(h);
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < h; ++j) {
        const bool near = std::abs(list[i].cell.ix - list[j].cell.ix) <= 1 &&
                          std::abs(list[i].cell.iy - list[j].cell.iy) <= 1 &&
                          std::abs(list[i].later_enter - list[j].later_enter) * trace.dt <= window;
        if (i != j && near) linked[i].push_back(j);
      }
    }
    std::vector<int> label(h, -1);
    for (std::size_t seed = 0; seed < h; ++seed) {
      if (label[seed] >= 0) continue;
      std::vector<std::size_t> frontier{seed};
      label[seed] = static_cast<int>(seed);
      while (!frontier.empty()) {
        const std::size_t i = frontier.back();
        frontier.pop_back();
        for (const auto j : linked[i]) {
          if (label[j] < 0) {
            label[j] = static_cast<int>(seed);
            frontier.push_back(j);
          }
        }
      }
    }
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < h; ++i) groups[label[i]].push_back(i);
    for (const auto& [l, members] : groups) {
      std::size_t best = members.front();
      for (const auto i : members) {
        if (std::tie(list[i].gap, list[i].later_enter, list[i].cell) <
            std::tie(list[best].gap, list[best].later_enter, list[best].cell)) {
          best = i;
        }
      }
      OracleEvent e;
      e.npc_id = npc_id;
      e.delta_t = list[best].gap * trace.dt;
      e.klass = e.delta_t <= params.t_c + 1e-9 ? ConflictClass::Conflict : ConflictClass::SpatialConflict;
      e.first_arriver = list[best].ev_first ? Arriver::EV : Arriver::NPC;
      e.t_event = list[best].later_enter * trace.dt;
      std::set<Cell> cells;
      for (const auto i : members) cells.insert(list[i].cell);
      e.cells.assign(cells.begin(), cells.end());
      events.push_back(std::move(e));
    }
  }
  std::sort(events.begin(), events.end(), [](const OracleEvent& a, const OracleEvent& b) {
    return std::tie(a.npc_id, a.t_event, a.cells.front()) < std::tie(b.npc_id, b.t_event, b.cells.front());
  });
  return events;
}

std::string format_oracle_listing(const std::vector<OracleEvent>& events) {
  std::string out;
  char line[256];
  for (const auto& e : events) {
    std::snprintf(line, sizeof(line), "npc=%d klass=%s delta_t=%.3f t_event=%.3f first=%s cells=%zu\n", e.npc_id,
                  std::string(to_string(e.klass)).c_str(), e.delta_t, e.t_event,
                  std::string(to_string(e.first_arriver)).c_str(), e.cells.size());
    out += line;
  }
  return out;
}

}  // namespace conflictfuzz
