#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conflictfuzz/random.hpp"
#include "conflictfuzz/road_model.hpp"

namespace conflictfuzz {

class GenomeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Action : std::uint8_t { Straight, LaneLeft, LaneRight };

std::string_view to_string(Action a);
Action parse_action(std::string_view text);

struct LanePosition {
  LaneId lane;
  double s = 0.0;
  bool operator==(const LanePosition&) const = default;
};

/// Per-NPC chromosome: one speed gene and one action gene per second.
struct NpcChromosome {
  int npc_id = 0;
  LanePosition start;
  std::vector<double> speeds;
  std::vector<Action> actions;

  int duration() const { return static_cast<int>(speeds.size()); }
  bool operator==(const NpcChromosome&) const = default;
};

struct SpeedRange {
  double min = 0.0;
  double max = 20.0;
};

struct ScenarioGenome {
  std::string scenario_id;
  TemplateId template_id = TemplateId::Straight3;
  int duration_s = 30;
  LanePosition ego_start;
  std::vector<LaneId> ego_route;
  std::vector<NpcChromosome> npcs;
  std::vector<std::string> parent_ids;
  std::uint64_t rng_seed = 0;

  bool operator==(const ScenarioGenome&) const = default;
};

enum class PlacementPolicy { Fixed, Random };

std::string_view to_string(PlacementPolicy p);
PlacementPolicy parse_placement_policy(std::string_view text);

struct Placement {
  LanePosition ego_start;
  std::vector<LaneId> ego_route;
  std::vector<LanePosition> npc_starts;  // cycled when more NPCs are requested
};

/// Predefined interaction layout for a template (the fixed placement policy).
Placement default_placement(const LaneGraph& graph);

/// Ego route starting at `start`: the lane followed by its first successors.
std::vector<LaneId> route_from(const LaneGraph& graph, LaneId start);

inline constexpr double kMinStartSeparation = 6.0;
inline constexpr double kInitialSpeedStep = 0.5;
inline constexpr double kGeneResolution = 1e-3;
inline constexpr double kRandomPlacementRadius = 80.0;

/// Rounds a speed to the gene grid so the 3-decimal document form is exact.
double quantize_gene(double v);

/// Throws GenomeError when the genome does not fit the graph or breaks an invariant.
void validate(const ScenarioGenome& genome, const LaneGraph& graph);

ScenarioGenome random_genome(Rng& rng, const LaneGraph& graph, int n_npcs, int duration_s, PlacementPolicy policy,
                             const Placement* fixed = nullptr);

/// Swaps NPC chromosomes at the indices where `swap_mask` is true.
std::pair<ScenarioGenome, ScenarioGenome> crossover_with_mask(const ScenarioGenome& a, const ScenarioGenome& b,
                                                              const std::vector<bool>& swap_mask);

/// Swaps a uniformly chosen non-empty proper subset of NPC indices.
std::pair<ScenarioGenome, ScenarioGenome> crossover(Rng& rng, const ScenarioGenome& a, const ScenarioGenome& b);

// -- Conflict-search operators ---------------------------------------------

NpcChromosome mutate_long_acceleration(const NpcChromosome& chrom, int t_arrive, double speed_limit);
NpcChromosome mutate_long_deceleration(const NpcChromosome& chrom, int t_arrive);
NpcChromosome mutate_speed_random(Rng& rng, const NpcChromosome& chrom, SpeedRange range);
NpcChromosome mutate_action_random(Rng& rng, const NpcChromosome& chrom);

// -- Collision-search operators --------------------------------------------
// Each has a fixed-magnitude form (used by the random form and by tests).

/// First gene index of the approach window [t - ceil(dt_conflict), t].
int approach_window_start(int t, double dt_conflict);

NpcChromosome mutate_deceleration(const NpcChromosome& chrom, int t, double dt_conflict, double magnitude);
NpcChromosome mutate_deceleration(Rng& rng, const NpcChromosome& chrom, int t, double dt_conflict);

NpcChromosome mutate_brake(const NpcChromosome& chrom, int t, double magnitude);
NpcChromosome mutate_brake(Rng& rng, const NpcChromosome& chrom, int t);

NpcChromosome mutate_acceleration(const NpcChromosome& chrom, int t, double dt_conflict, double magnitude,
                                  double speed_limit);
NpcChromosome mutate_acceleration(Rng& rng, const NpcChromosome& chrom, int t, double dt_conflict,
                                  double speed_limit);

inline constexpr double kDecelerationMax = 2.0;
inline constexpr double kBrakeMin = 2.0;
inline constexpr double kBrakeMax = 6.0;
inline constexpr double kAccelerationMax = 3.0;
inline constexpr double kLongStep = 1.0;

// -- Document form -----------------------------------------------------------

std::string to_document(const ScenarioGenome& genome);
ScenarioGenome genome_from_document(std::string_view text);

}  // namespace conflictfuzz
