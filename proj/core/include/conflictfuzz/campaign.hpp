#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "conflictfuzz/collision_type.hpp"
#include "conflictfuzz/conflict.hpp"
#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/genome.hpp"
#include "conflictfuzz/ledger.hpp"
#include "conflictfuzz/metrics.hpp"
#include "conflictfuzz/search.hpp"
#include "conflictfuzz/simulator.hpp"
#include "conflictfuzz/trace_io.hpp"

namespace conflictfuzz {

enum class Variant { Full, CollisionOnly, CollisionOnlyRandom };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

struct CampaignConfig {
  GaConfig ga;
  TemplateId template_id = TemplateId::Straight3;
  double road_length = 800.0;
  double speed_limit = 20.0;
  double lane_width = kDefaultLaneWidth;
  EgoControllerSpec ego;
  SimulationParams sim;
  ConflictParams conflict;
  int n_npcs = 2;
  int duration_s = 30;
  int budget_steps = 1600;
  Variant variant = Variant::Full;
  PlacementPolicy placement = PlacementPolicy::Fixed;

  TraceEnvironment environment() const;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const CampaignConfig& cfg);

/// A collision kept for replay: the genome, its trace and how it was typed.
struct ArchiveEntry {
  int step = 0;
  ScenarioGenome genome;
  TraceDocument trace;
  CollisionTypeKey type_key;
  bool ev_fault = true;
};

struct CampaignResult {
  std::vector<CampaignEvent> ledger;
  std::vector<ArchiveEntry> archive;
  CampaignMetrics metrics;
};

/// Runs the configured variant until the simulation budget is spent.
/// `workers` only changes wall-clock time, never the result.
CampaignResult run_campaign(const CampaignConfig& cfg, int workers = 1);

/// Ledger entry for one evaluated scenario.
CampaignEvent make_event(const SimulationRecord& sim, Stage stage, const LaneGraph& graph);

// -- Archive files -----------------------------------------------------------

std::string archive_stem(int step);  // "step_00012"
void write_archive_entry(const std::filesystem::path& dir, const ArchiveEntry& entry);

struct ReplayOutcome {
  bool reproduced = false;
  std::string detail;
  Trace trace;  // the re-simulated trace
  ScenarioGenome genome;
  TraceEnvironment environment;
};

/// Re-simulates an archived genome under the archived environment and checks
/// the collision recurs at the same step with the same contact point (1e-6 m).
/// `entry` may name the genome file, the trace file or their common stem.
ReplayOutcome replay_archive_entry(const std::filesystem::path& entry);

}  // namespace conflictfuzz
