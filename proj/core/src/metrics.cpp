#include "conflictfuzz/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace conflictfuzz {

CheckpointValue checkpoint_value(const std::vector<CampaignEvent>& ledger, int checkpoint) {
  CheckpointValue v;
  v.checkpoint = checkpoint;
  double sum = 0.0;
  for (const auto& e : ledger) {
    if (checkpoint == 0) {
      if (e.step <= kCheckpointWindow && e.parent_ids.empty()) {
        sum += e.n_conflicts;
        ++v.samples;
      }
    } else if (e.step > checkpoint - kCheckpointWindow && e.step <= checkpoint) {
      for (const auto& h : e.handoffs) {
        sum += h.n_conflicts;
        ++v.samples;
      }
    }
  }
  if (v.samples > 0) v.mean_conflicts = sum / v.samples;
  return v;
}

CampaignMetrics compute_metrics(const std::vector<CampaignEvent>& ledger) {
  CampaignMetrics m;
  std::vector<const CampaignEvent*> ordered;
  ordered.reserve(ledger.size());
  for (const auto& e : ledger) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->step < b->step; });

  m.executed_steps = static_cast<int>(ordered.size());
  std::set<std::string> seen;
  for (const auto* e : ordered) {
    std::string cell;
    if (e->collision) {
      if (e->collision->ev_fault) {
        ++m.total_collisions;
        cell = e->collision->type_key;
        if (!m.steps_to_first_collision) m.steps_to_first_collision = e->step;
        if (seen.insert(cell).second) m.steps_to_all_types = e->step;
      } else {
        ++m.npc_fault_collisions;
      }
    }
    m.heat_strip.push_back(cell);
    m.type_growth.push_back(static_cast<int>(seen.size()));
  }
  m.distinct_types = static_cast<int>(seen.size());
  if (m.total_collisions > 0) {
    m.avg_steps_per_collision =
        static_cast<int>(std::lround(static_cast<double>(m.executed_steps) / m.total_collisions));
  }

  const bool has_conflict_search =
      std::any_of(ledger.begin(), ledger.end(), [](const auto& e) { return e.stage == Stage::Conflict; });
  if (has_conflict_search) {
    std::vector<CheckpointValue> series;
    for (const int c : kConflictCheckpoints) {
      if (c > m.executed_steps) break;
      series.push_back(checkpoint_value(ledger, c));
    }
    m.conflicts_per_generation = std::move(series);
  }
  return m;
}

}  // namespace conflictfuzz
