#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conflictfuzz/ledger.hpp"

namespace conflictfuzz {

/// Mean conflict count of the scenarios selected for collision search in
/// the window (checkpoint - 100, checkpoint]; checkpoint 0 averages the
/// random scenarios drawn in the first 100 steps.
struct CheckpointValue {
  int checkpoint = 0;
  std::optional<double> mean_conflicts;
  int samples = 0;
};

inline constexpr int kCheckpointWindow = 100;
inline const std::vector<int> kConflictCheckpoints = {0, 200, 400, 800, 1600};

struct CampaignMetrics {
  int executed_steps = 0;
  int total_collisions = 0;       // EV-attributed only
  int npc_fault_collisions = 0;
  int distinct_types = 0;
  std::optional<int> steps_to_first_collision;
  std::optional<int> avg_steps_per_collision;
  std::optional<int> steps_to_all_types;
  std::vector<int> type_growth;          // type_growth[i]: distinct types after step i + 1
  std::vector<std::string> heat_strip;   // heat_strip[i]: type key of step i + 1, empty when none
  std::optional<std::vector<CheckpointValue>> conflicts_per_generation;  // conflict-search campaigns only
};

CampaignMetrics compute_metrics(const std::vector<CampaignEvent>& ledger);

/// The checkpoint statistic for any ledger, including ones without a
/// conflict-search stage (used to compare variants).
CheckpointValue checkpoint_value(const std::vector<CampaignEvent>& ledger, int checkpoint);

}  // namespace conflictfuzz
