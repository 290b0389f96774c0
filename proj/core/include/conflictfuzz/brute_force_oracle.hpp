#pragma once

#include <string>
#include <vector>

#include "conflictfuzz/conflict.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz {

struct OracleEvent {
  int npc_id = 0;
  double delta_t = 0.0;
  ConflictClass klass = ConflictClass::Conflict;
  Arriver first_arriver = Arriver::EV;
  double t_event = 0.0;
  std::vector<Cell> cells;
};

/// Reference conflict detector: rasterizes by exact polygon clipping, compares
/// every pair of occupancy intervals in every shared cell, and groups hits by
/// exhaustive pairwise scan. Slow by design; used to check find_conflicts.
std::vector<OracleEvent> brute_force_conflicts(const Trace& trace, const ConflictParams& params = {});

/// One line per event, sorted by (npc, t_event, first cell).
std::string format_oracle_listing(const std::vector<OracleEvent>& events);

}  // namespace conflictfuzz
