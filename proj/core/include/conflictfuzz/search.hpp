#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "conflictfuzz/conflict.hpp"
#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/genome.hpp"
#include "conflictfuzz/random.hpp"
#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz {

struct GaConfig {
  int population_size = 8;              // k
  double threshold_m = 0.4;             // conflict-search mutation threshold
  double threshold_c = 0.4;             // conflict-search crossover threshold
  bool invert_thresholds = false;       // apply when r < threshold instead of r > threshold
  int m_generations_per_handoff = 5;    // m
  double collision_threshold_m = 0.8;   // collision-search mutation threshold
  int collision_iterations = 5;
  int collision_batch = 8;              // mutants per collision-search iteration
  int restart_stagnation_R = 4;         // handoffs without improvement before a restart
  double restart_similarity_eps = 0.01; // mean pairwise genome distance floor
  std::uint64_t rng_seed = 1;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const GaConfig& cfg);

/// The comparison used for every probabilistic operation: by default an
/// operation fires when the draw exceeds its threshold.
bool fires(double r, double threshold, bool inverted);

struct EvaluatedScenario {
  ScenarioGenome genome;
  Trace trace;
  ConflictSet conflicts;
  double fitness_conflict = 0.0;
  double fitness_collision = 0.0;
  bool collided = false;
  bool failed = false;       // simulation or analysis raised; scores are zero
  std::string diagnostic;
};

using ScenarioPtr = std::shared_ptr<const EvaluatedScenario>;

double fitness_conflict(const ConflictSet& set);

/// Mean headroom below t_c plus the headroom of the tightest conflict.
/// Conflict times at or below zero count as dt/2; an empty set scores 0.
double fitness_collision(const ConflictSet& set, double t_c, double dt = 0.1);

/// Runs simulation and conflict analysis for genomes; results align with input.
using BatchEvaluator = std::function<std::vector<EvaluatedScenario>(const std::vector<ScenarioGenome>&)>;

/// Simulates and scores genomes on one road, optionally across worker threads.
class Evaluator {
 public:
  Evaluator(const LaneGraph& graph, EgoControllerSpec ego, SimulationParams sim, ConflictParams conflict);

  EvaluatedScenario evaluate(const ScenarioGenome& genome) const;
  std::vector<EvaluatedScenario> evaluate_batch(const std::vector<ScenarioGenome>& genomes, int workers) const;

  const LaneGraph& graph() const { return *graph_; }
  const SimulationParams& sim() const { return sim_; }
  const ConflictParams& conflict() const { return conflict_; }
  const EgoControllerSpec& ego() const { return ego_; }

 private:
  const LaneGraph* graph_;
  EgoControllerSpec ego_;
  SimulationParams sim_;
  ConflictParams conflict_;
};

/// Shared inputs for the search operators.
struct SearchContext {
  const LaneGraph* graph = nullptr;
  double dt = 0.1;
  double t_c = 3.0;
  BatchEvaluator evaluate;
};

/// Simulation budget shared by every stage; each simulation is one step.
class StepCounter {
 public:
  explicit StepCounter(int budget) : budget_(budget) {}
  int executed() const { return executed_; }
  int remaining() const { return budget_ - executed_; }
  int budget() const { return budget_; }
  /// Reserves the next step number (1-based).
  int take() { return ++executed_; }

 private:
  int budget_;
  int executed_ = 0;
};

/// One simulation performed by a search stage, in ledger order.
struct SimulationRecord {
  int step = 0;
  int generation = -1;  // conflict-search generation, -1 elsewhere
  std::uint64_t rng_child_seed = 0;
  ScenarioPtr scenario;
};

// -- Conflict search ---------------------------------------------------------

/// Stage-1 edits: NPCs in spatial conflicts move toward the shared space
/// (earlier when the EV arrived first, later otherwise); NPCs in no event get
/// one random speed or action edit; NPCs in conflicts only are left alone.
ScenarioGenome select_conflict_mutation(const ScenarioGenome& genome, const ConflictSet& set, Rng& rng,
                                        double speed_limit);

/// k draws with replacement, proportional to score; all-zero scores draw uniformly.
std::vector<std::size_t> roulette_select(const std::vector<double>& scores, std::size_t k, Rng& rng);

struct MemberPlan {
  bool mutated = false;
  bool crossed = false;
  bool crossover_rejected = false;  // child broke a placement invariant; parent kept
  std::size_t partner = 0;
  bool simulated = false;
};

struct GenerationResult {
  std::vector<ScenarioPtr> next_population;
  std::vector<ScenarioPtr> offspring;  // PN, before selection
  std::vector<MemberPlan> plans;
  std::vector<SimulationRecord> simulations;
};

/// One pass of the genetic algorithm over `population`. `round` keys the
/// per-member child streams so the outcome does not depend on scheduling.
GenerationResult conflict_search_generation(const std::vector<ScenarioPtr>& population, int generation,
                                            std::uint64_t round, const GaConfig& cfg, const SearchContext& ctx,
                                            StepCounter& steps);

// -- Collision search --------------------------------------------------------

enum class CollisionMutationMode { Targeted, Random };

struct CollisionIterationResult {
  ScenarioPtr next_target;
  std::vector<SimulationRecord> simulations;
  std::string diagnostic;  // set when the target offered nothing to fuzz
};

/// Picks the conflict to fuzz and applies the operator its geometry calls for.
/// Returns false when no edit applies (an OP conflict with the EV ahead twice).
bool apply_collision_mutation(ScenarioGenome& genome, const EvaluatedScenario& target, Rng& rng, double speed_limit);

CollisionIterationResult collision_search_iteration(const ScenarioPtr& target, std::uint64_t round,
                                                    CollisionMutationMode mode, const GaConfig& cfg,
                                                    const SearchContext& ctx, StepCounter& steps);

// -- Diversity ---------------------------------------------------------------

/// Normalised L1 over speed genes plus normalised Hamming over action genes,
/// averaged over NPC indices. 0 for identical genomes.
double genome_distance(const ScenarioGenome& a, const ScenarioGenome& b, double speed_limit);
double mean_pairwise_distance(const std::vector<ScenarioGenome>& population, double speed_limit);

/// True when the best handoff score has not moved for R handoffs, or the
/// population has collapsed below the similarity floor.
bool restart_check(const std::vector<double>& best_history, const std::vector<ScenarioGenome>& population,
                   const GaConfig& cfg, double speed_limit);

}  // namespace conflictfuzz
