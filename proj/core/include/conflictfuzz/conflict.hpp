#pragma once

#include <compare>
#include <map>
#include <string_view>
#include <vector>

#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz {

inline constexpr double kDefaultCellSize = 2.5;

struct Cell {
  int ix = 0;
  int iy = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Cell containing a world point.
Cell cell_of(Vec2 p, double cell_size);

/// Occupancy of one cell by one vehicle over consecutive recorded steps, inclusive.
struct Interval {
  int enter_step = 0;
  int exit_step = 0;
  bool operator==(const Interval&) const = default;
};

/// Per-cell, per-vehicle occupancy intervals. A vehicle occupies a cell at a
/// step when its footprint shares interior area with the cell square.
struct OccupancyGrid {
  double cell_size = kDefaultCellSize;
  double dt = 0.1;
  int step_count = 0;
  int vehicle_count = 0;
  // cells[c][v] holds vehicle v's sorted, disjoint intervals in cell c.
  std::map<Cell, std::vector<std::vector<Interval>>> cells;

  double seconds(int step) const { return step * dt; }
};

/// Cells whose square shares interior area with the footprint.
std::vector<Cell> covered_cells(const OrientedBox& box, double cell_size);

OccupancyGrid rasterize(const Trace& trace, double cell_size = kDefaultCellSize);

enum class ConflictClass { Conflict, SpatialConflict };
enum class ConflictType { MP, CP, OP, UHP, CHP };
enum class Arriver { EV, NPC };

std::string_view to_string(ConflictClass c);
std::string_view to_string(ConflictType t);
std::string_view to_string(Arriver a);
ConflictType parse_conflict_type(std::string_view text);
Arriver parse_arriver(std::string_view text);

struct ConflictParams {
  double t_c = 3.0;
  double t_s = 15.0;
  double cell_size = kDefaultCellSize;
  double cluster_window = 1.0;  // s, max event-time spread for merging neighbouring cells
};

/// One space-sharing event between the EV and an NPC.
struct ConflictRecord {
  int npc_id = 0;            // genome NPC index
  std::vector<Cell> cells;   // sorted conflict space
  int ev_step = 0;           // EV arrival at the decisive cell
  int npc_step = 0;          // NPC arrival at the decisive cell
  double ev_time = 0.0;
  double npc_time = 0.0;
  double delta_t = 0.0;      // exit-to-enter gap, s
  Arriver first_arriver = Arriver::EV;
  ConflictClass klass = ConflictClass::Conflict;
  ConflictType ctype = ConflictType::MP;
  bool unclassified = false;  // geometry matched no rule; typed MP by convention
  double t_event = 0.0;       // when the later vehicle reaches the space

  bool operator==(const ConflictRecord&) const = default;
};

struct ConflictSet {
  std::vector<ConflictRecord> conflicts;  // klass == Conflict
  std::vector<ConflictRecord> spatial;    // klass == SpatialConflict

  /// Spatial conflicts involving one NPC.
  std::vector<const ConflictRecord*> spatial_for(int npc_id) const;
  bool involves(int npc_id) const;
};

/// Events between the EV and each NPC, untyped (ctype left at MP).
ConflictSet find_conflicts(const OccupancyGrid& grid, const ConflictParams& params = {});

struct Classification {
  ConflictType ctype = ConflictType::MP;
  bool unclassified = false;
};

Classification classify_conflict(const ConflictRecord& event, const Trace& trace, const LaneGraph& graph);

/// rasterize + find_conflicts + classify_conflict.
ConflictSet analyze(const Trace& trace, const LaneGraph& graph, const ConflictParams& params = {});

int conflict_count(const ConflictSet& set);

}  // namespace conflictfuzz
