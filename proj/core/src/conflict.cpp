#include "conflictfuzz/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace conflictfuzz {

namespace {

constexpr double kTimeEps = 1e-9;

/// A cell where the EV and one NPC pass at different times.
struct Hit {
  int npc_id;
  Cell cell;
  Interval ev;
  Interval npc;
  int gap_steps;
  int later_enter;
};

Hit make_hit(int npc_id, Cell cell, Interval ev, Interval npc) {
  const bool ev_first = ev.exit_step < npc.enter_step;
  const Interval& earlier = ev_first ? ev : npc;
  const Interval& later = ev_first ? npc : ev;
  return {npc_id, cell, ev, npc, later.enter_step - earlier.exit_step, later.enter_step};
}

bool overlapping(const Interval& a, const Interval& b) {
  return a.enter_step <= b.exit_step && b.enter_step <= a.exit_step;
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    return std::hash<long long>()((static_cast<long long>(c.ix) << 32) ^ static_cast<unsigned int>(c.iy));
  }
};

ConflictRecord record_from_cluster(const std::vector<Hit>& hits, const std::vector<std::size_t>& members, double dt,
                                   const ConflictParams& params) {
  const Hit* best = nullptr;
  for (const auto i : members) {
    const Hit& h = hits[i];
    if (!best || std::tie(h.gap_steps, h.later_enter, h.cell) < std::tie(best->gap_steps, best->later_enter, best->cell)) {
      best = &h;
    }
  }
  ConflictRecord r;
  r.npc_id = best->npc_id;
  for (const auto i : members) r.cells.push_back(hits[i].cell);
  std::sort(r.cells.begin(), r.cells.end());
  r.cells.erase(std::unique(r.cells.begin(), r.cells.end()), r.cells.end());
  r.ev_step = best->ev.enter_step;
  r.npc_step = best->npc.enter_step;
  r.ev_time = r.ev_step * dt;
  r.npc_time = r.npc_step * dt;
  r.delta_t = best->gap_steps * dt;
  r.first_arriver = best->ev.exit_step < best->npc.enter_step ? Arriver::EV : Arriver::NPC;
  r.klass = r.delta_t <= params.t_c + kTimeEps ? ConflictClass::Conflict : ConflictClass::SpatialConflict;
  r.t_event = best->later_enter * dt;
  return r;
}

}  // namespace

Cell cell_of(Vec2 p, double cell_size) {
  return {static_cast<int>(std::floor(p.x / cell_size)), static_cast<int>(std::floor(p.y / cell_size))};
}

std::vector<Cell> covered_cells(const OrientedBox& box, double cell_size) {
  const auto corners = box.corners();
  double lo_x = corners[0].x, hi_x = corners[0].x, lo_y = corners[0].y, hi_y = corners[0].y;
  for (const auto& c : corners) {
    lo_x = std::min(lo_x, c.x);
    hi_x = std::max(hi_x, c.x);
    lo_y = std::min(lo_y, c.y);
    hi_y = std::max(hi_y, c.y);
  }
  std::vector<Cell> out;
  const Cell lo = cell_of({lo_x, lo_y}, cell_size);
  const Cell hi = cell_of({hi_x, hi_y}, cell_size);
  for (int ix = lo.ix; ix <= hi.ix; ++ix) {
    for (int iy = lo.iy; iy <= hi.iy; ++iy) {
      if (overlaps_square(box, {ix * cell_size, iy * cell_size}, cell_size)) out.push_back({ix, iy});
    }
  }
  return out;
}

OccupancyGrid rasterize(const Trace& trace, double cell_size) {
  if (trace.steps.empty()) throw std::invalid_argument("cannot rasterize an empty trace");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  OccupancyGrid grid;
  grid.cell_size = cell_size;
  grid.dt = trace.dt;
  grid.step_count = static_cast<int>(trace.steps.size());
  grid.vehicle_count = static_cast<int>(trace.vehicle_count());
  const auto nv = static_cast<std::size_t>(grid.vehicle_count);
  for (int n = 0; n < grid.step_count; ++n) {
    const auto& row = trace.steps[static_cast<std::size_t>(n)];
    for (std::size_t v = 0; v < nv; ++v) {
      for (const Cell& c : covered_cells(row[v].footprint(), cell_size)) {
        auto [it, inserted] = grid.cells.try_emplace(c, nv);
        auto& intervals = it->second[v];
        if (!intervals.empty() && intervals.back().exit_step == n - 1) {
          intervals.back().exit_step = n;
        } else {
          intervals.push_back({n, n});
        }
      }
    }
  }
  return grid;
}

std::string_view to_string(ConflictClass c) {
  return c == ConflictClass::Conflict ? "conflict" : "spatial_conflict";
}

std::string_view to_string(ConflictType t) {
  switch (t) {
    case ConflictType::MP: return "MP";
    case ConflictType::CP: return "CP";
    case ConflictType::OP: return "OP";
    case ConflictType::UHP: return "UHP";
    case ConflictType::CHP: return "CHP";
  }
  return "?";
}

std::string_view to_string(Arriver a) { return a == Arriver::EV ? "EV" : "NPC"; }

ConflictType parse_conflict_type(std::string_view text) {
  for (auto t : {ConflictType::MP, ConflictType::CP, ConflictType::OP, ConflictType::UHP, ConflictType::CHP}) {
    if (to_string(t) == text) return t;
  }
  throw std::invalid_argument("unknown conflict type '" + std::string(text) + "'");
}

Arriver parse_arriver(std::string_view text) {
  if (text == "EV") return Arriver::EV;
  if (text == "NPC") return Arriver::NPC;
  throw std::invalid_argument("unknown arriver '" + std::string(text) + "'");
}

std::vector<const ConflictRecord*> ConflictSet::spatial_for(int npc_id) const {
  std::vector<const ConflictRecord*> out;
  for (const auto& r : spatial) {
    if (r.npc_id == npc_id) out.push_back(&r);
  }
  return out;
}

bool ConflictSet::involves(int npc_id) const {
  const auto match = [npc_id](const ConflictRecord& r) { return r.npc_id == npc_id; };
  return std::any_of(conflicts.begin(), conflicts.end(), match) || std::any_of(spatial.begin(), spatial.end(), match);
}

ConflictSet find_conflicts(const OccupancyGrid& grid, const ConflictParams& params) {
  ConflictSet out;
  if (grid.vehicle_count < 2) return out;
  const double dt = grid.dt;
  const int max_gap = static_cast<int>(std::floor(params.t_s / dt + kTimeEps));
  const int window = static_cast<int>(std::floor(params.cluster_window / dt + kTimeEps));

  // Hits grouped by NPC, in cell order.
  std::vector<std::vector<Hit>> by_npc(static_cast<std::size_t>(grid.vehicle_count - 1));
  for (const auto& [cell, per_vehicle] : grid.cells) {
    const auto& ev_intervals = per_vehicle[0];
    if (ev_intervals.empty()) continue;
    for (std::size_t v = 1; v < per_vehicle.size(); ++v) {
      for (const auto& npc : per_vehicle[v]) {
        for (const auto& ev : ev_intervals) {
          if (overlapping(ev, npc)) continue;
          Hit h = make_hit(static_cast<int>(v) - 1, cell, ev, npc);
          if (h.gap_steps <= max_gap) by_npc[v - 1].push_back(h);
        }
      }
    }
  }

  std::vector<ConflictRecord> events;
  for (const auto& hits : by_npc) {
    if (hits.empty()) continue;
    std::unordered_map<Cell, std::vector<std::size_t>, CellHash> index;
    for (std::size_t i = 0; i < hits.size(); ++i) index[hits[i].cell].push_back(i);

    DisjointSet sets(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          const auto it = index.find({hits[i].cell.ix + dx, hits[i].cell.iy + dy});
          if (it == index.end()) continue;
          for (const auto j : it->second) {
            if (j > i && std::abs(hits[i].later_enter - hits[j].later_enter) <= window) sets.unite(i, j);
          }
        }
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < hits.size(); ++i) clusters[sets.find(i)].push_back(i);
    for (const auto& [root, members] : clusters) events.push_back(record_from_cluster(hits, members, dt, params));
  }

  std::sort(events.begin(), events.end(), [](const ConflictRecord& a, const ConflictRecord& b) {
    return std::tie(a.npc_id, a.t_event, a.cells.front()) < std::tie(b.npc_id, b.t_event, b.cells.front());
  });
  for (auto& e : events) (e.klass == ConflictClass::Conflict ? out.conflicts : out.spatial).push_back(std::move(e));
  return out;
}

Classification classify_conflict(const ConflictRecord& event, const Trace& trace, const LaneGraph& graph) {
  const auto last = trace.steps.size() - 1;
  const VehicleState& ev = trace.steps[std::min<std::size_t>(static_cast<std::size_t>(event.ev_step), last)][0];
  const VehicleState& npc =
      trace.steps[std::min<std::size_t>(static_cast<std::size_t>(event.npc_step), last)][static_cast<std::size_t>(event.npc_id) + 1];
  const LaneRelation rel = graph.lane_relation(ev.base_lane(), npc.base_lane());
  const double heading_gap = heading_difference(ev.heading, npc.heading);

  if (rel == LaneRelation::Same && heading_gap <= kPi / 6.0 + 1e-12) return {ConflictType::OP, false};
  if (rel == LaneRelation::OpposingConstrained) return {ConflictType::CHP, false};
  if (rel == LaneRelation::OpposingUnconstrained) return {ConflictType::UHP, false};
  if (rel == LaneRelation::Crossing) return {ConflictType::CP, false};
  if (rel == LaneRelation::Merging) return {ConflictType::MP, false};
  const auto cutting_into = [&graph](const VehicleState& mover, const VehicleState& other) {
    if (!mover.changing_lanes()) return false;
    const LaneRelation r = graph.lane_relation(mover.maneuver.to_lane, other.base_lane());
    return r == LaneRelation::Same;
  };
  if (cutting_into(npc, ev) || cutting_into(ev, npc)) return {ConflictType::MP, false};
  return {ConflictType::MP, true};
}

ConflictSet analyze(const Trace& trace, const LaneGraph& graph, const ConflictParams& params) {
  ConflictSet set = find_conflicts(rasterize(trace, params.cell_size), params);
  for (auto* list : {&set.conflicts, &set.spatial}) {
    for (auto& r : *list) {
      const auto c = classify_conflict(r, trace, graph);
      r.ctype = c.ctype;
      r.unclassified = c.unclassified;
    }
  }
  return set;
}

int conflict_count(const ConflictSet& set) { return static_cast<int>(set.conflicts.size()); }

}  // namespace conflictfuzz
