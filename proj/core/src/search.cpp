#include "conflictfuzz/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace conflictfuzz {

namespace {

constexpr double kTimeEps = 1e-9;

int arrival_second(double time, int duration) {
  return std::clamp(static_cast<int>(std::ceil(time - kTimeEps)), 1, duration);
}

int event_second(double time, int duration) {
  return std::clamp(static_cast<int>(std::floor(time + kTimeEps)), 0, duration - 1);
}

const ConflictRecord& pick_target_conflict(const std::vector<ConflictRecord>& conflicts, Rng& rng) {
  if (rng.bernoulli(0.5)) {
    const auto it = std::min_element(conflicts.begin(), conflicts.end(), [](const auto& a, const auto& b) {
      return a.delta_t < b.delta_t;
    });
    return *it;
  }
  return conflicts[rng.index(conflicts.size())];
}

bool npc_ahead_at(const Trace& trace, const ConflictRecord& c) {
  const auto step = std::min(static_cast<std::size_t>(std::lround(c.t_event / trace.dt)), trace.steps.size() - 1);
  const VehicleState& ev = trace.steps[step][0];
  const VehicleState& npc = trace.steps[step][static_cast<std::size_t>(c.npc_id) + 1];
  return dot(npc.xy - ev.xy, unit_from_heading(ev.heading)) > 0.0;
}

NpcChromosome slow_down(Rng& rng, const NpcChromosome& chrom, int t, double dt_conflict) {
  if (rng.bernoulli(0.5)) return mutate_deceleration(rng, chrom, t, dt_conflict);
  return mutate_brake(rng, chrom, t);
}

}  // namespace

void validate(const GaConfig& cfg) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (cfg.population_size < 2) throw std::invalid_argument("population_size must be at least 2");
  if (!in_unit(cfg.threshold_m)) throw std::invalid_argument("threshold_m must lie in [0, 1]");
  if (!in_unit(cfg.threshold_c)) throw std::invalid_argument("threshold_c must lie in [0, 1]");
  if (!in_unit(cfg.collision_threshold_m)) throw std::invalid_argument("collision_threshold_m must lie in [0, 1]");
  if (cfg.m_generations_per_handoff < 1) throw std::invalid_argument("m_generations_per_handoff must be at least 1");
  if (cfg.collision_iterations < 0) throw std::invalid_argument("collision_iterations must be >= 0");
  if (cfg.collision_batch < 1) throw std::invalid_argument("collision_batch must be at least 1");
  if (cfg.restart_stagnation_R < 1) throw std::invalid_argument("restart_stagnation_R must be at least 1");
  if (cfg.restart_similarity_eps < 0.0) throw std::invalid_argument("restart_similarity_eps must be >= 0");
}

bool fires(double r, double threshold, bool inverted) { return inverted ? r < threshold : r > threshold; }

double fitness_conflict(const ConflictSet& set) { return static_cast<double>(conflict_count(set)); }

double fitness_collision(const ConflictSet& set, double t_c, double dt) {
  if (set.conflicts.empty()) return 0.0;
  double sum = 0.0;
  double tightest = std::numeric_limits<double>::infinity();
  for (const auto& c : set.conflicts) {
    const double gap = c.delta_t <= 0.0 ? dt / 2.0 : c.delta_t;
    sum += t_c - gap;
    tightest = std::min(tightest, gap);
  }
  return sum / static_cast<double>(set.conflicts.size()) + (t_c - tightest);
}

Evaluator::Evaluator(const LaneGraph& graph, EgoControllerSpec ego, SimulationParams sim, ConflictParams conflict)
    : graph_(&graph), ego_(std::move(ego)), sim_(sim), conflict_(conflict) {}

EvaluatedScenario Evaluator::evaluate(const ScenarioGenome& genome) const {
  EvaluatedScenario out;
  out.genome = genome;
  try {
    out.trace = simulate(genome, *graph_, ego_, sim_);
    out.conflicts = analyze(out.trace, *graph_, conflict_);
    out.collided = out.trace.collision.has_value();
    out.fitness_conflict = fitness_conflict(out.conflicts);
    out.fitness_collision = fitness_collision(out.conflicts, conflict_.t_c, sim_.dt);
  } catch (const std::exception& e) {
    out.failed = true;
    out.diagnostic = e.what();
    out.trace = {};
    out.conflicts = {};
    out.collided = false;
    out.fitness_conflict = 0.0;
    out.fitness_collision = 0.0;
  }
  return out;
}

std::vector<EvaluatedScenario> Evaluator::evaluate_batch(const std::vector<ScenarioGenome>& genomes,
                                                         int workers) const {
  std::vector<EvaluatedScenario> out(genomes.size());
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1 || genomes.size() < 2) {
    for (std::size_t i = 0; i < genomes.size(); ++i) out[i] = evaluate(genomes[i]);
    return out;
  }
  // Results land in their input slot, so completion order is irrelevant.
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(n_workers, genomes.size()); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < genomes.size(); i = next++) out[i] = evaluate(genomes[i]);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

ScenarioGenome select_conflict_mutation(const ScenarioGenome& genome, const ConflictSet& set, Rng& rng,
                                        double speed_limit) {
  ScenarioGenome out = genome;
  for (std::size_t a = 0; a < out.npcs.size(); ++a) {
    const int npc_id = static_cast<int>(a);
    auto& chrom = out.npcs[a];
    const auto spatial = set.spatial_for(npc_id);
    if (!spatial.empty()) {
      const ConflictRecord& sc = *spatial[rng.index(spatial.size())];
      const int t_arrive = arrival_second(sc.npc_time, chrom.duration());
      chrom = sc.first_arriver == Arriver::EV ? mutate_long_acceleration(chrom, t_arrive, speed_limit)
                                              : mutate_long_deceleration(chrom, t_arrive);
    } else if (!set.involves(npc_id)) {
      chrom = rng.bernoulli(0.5) ? mutate_speed_random(rng, chrom, SpeedRange{0.0, speed_limit})
                                 : mutate_action_random(rng, chrom);
    }
  }
  return out;
}

std::vector<std::size_t> roulette_select(const std::vector<double>& scores, std::size_t k, Rng& rng) {
  if (scores.empty()) throw std::invalid_argument("roulette selection over an empty population");
  double total = 0.0;
  for (double s : scores) {
    if (s < 0.0 || std::isnan(s)) throw std::invalid_argument("roulette selection requires non-negative scores");
    total += s;
  }
  std::vector<std::size_t> picks;
  picks.reserve(k);
  for (std::size_t n = 0; n < k; ++n) {
    if (total <= 0.0) {
      picks.push_back(rng.index(scores.size()));
      continue;
    }
    const double r = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = scores.size() - 1;
    while (chosen > 0 && scores[chosen] == 0.0) --chosen;  // never land on a zero-weight tail
    for (std::size_t i = 0; i < scores.size(); ++i) {
      acc += scores[i];
      if (r < acc && scores[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    picks.push_back(chosen);
  }
  return picks;
}

GenerationResult conflict_search_generation(const std::vector<ScenarioPtr>& population, int generation,
                                            std::uint64_t round, const GaConfig& cfg, const SearchContext& ctx,
                                            StepCounter& steps) {
  const std::size_t k = population.size();
  if (k < 2) throw std::invalid_argument("conflict search needs at least two members");
  const double limit = ctx.graph->speed_limit();

  GenerationResult result;
  result.plans.resize(k);
  std::vector<ScenarioGenome> pending;
  std::vector<std::size_t> pending_member;
  std::vector<std::uint64_t> pending_seed;

  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t seed = derive_seed(cfg.rng_seed, round, i);
    Rng rng(seed);
    MemberPlan& plan = result.plans[i];
    const EvaluatedScenario& parent = *population[i];
    ScenarioGenome child = parent.genome;

    const double r_m = rng.uniform();
    if (fires(r_m, cfg.threshold_m, cfg.invert_thresholds)) {
      plan.mutated = true;
      child = select_conflict_mutation(child, parent.conflicts, rng, limit);
      child.parent_ids = {parent.genome.scenario_id};
    }
    const double r_c = rng.uniform();
    if (fires(r_c, cfg.threshold_c, cfg.invert_thresholds)) {
      plan.crossed = true;
      std::size_t j = rng.index(k - 1);
      if (j >= i) ++j;
      plan.partner = j;
      auto [c1, c2] = crossover(rng, child, population[j]->genome);
      c1.parent_ids = {parent.genome.scenario_id, population[j]->genome.scenario_id};
      try {
        validate(c1, *ctx.graph);
        child = std::move(c1);
      } catch (const GenomeError&) {
        plan.crossover_rejected = true;
      }
    }
    if (plan.mutated || (plan.crossed && !plan.crossover_rejected)) {
      if (steps.remaining() <= 0) continue;
      const int step = steps.take();
      child.scenario_id = "s" + std::to_string(step);
      child.rng_seed = seed;
      plan.simulated = true;
      pending.push_back(std::move(child));
      pending_member.push_back(i);
      pending_seed.push_back(seed);
      result.simulations.push_back({step, generation, seed, nullptr});
    }
  }

  auto evaluated = ctx.evaluate(pending);
  std::vector<ScenarioPtr> offspring(population.begin(), population.end());
  for (std::size_t p = 0; p < pending.size(); ++p) {
    auto ptr = std::make_shared<const EvaluatedScenario>(std::move(evaluated[p]));
    offspring[pending_member[p]] = ptr;
    result.simulations[p].scenario = ptr;
  }

  std::vector<double> scores;
  scores.reserve(k);
  for (const auto& s : offspring) scores.push_back(s->fitness_conflict);
  Rng select_rng(derive_seed(cfg.rng_seed, round, k));
  for (const auto idx : roulette_select(scores, k, select_rng)) result.next_population.push_back(offspring[idx]);
  result.offspring = std::move(offspring);
  return result;
}

bool apply_collision_mutation(ScenarioGenome& genome, const EvaluatedScenario& target, Rng& rng,
                              double speed_limit) {
  const auto& conflicts = target.conflicts.conflicts;
  if (conflicts.empty()) return false;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ConflictRecord& c = pick_target_conflict(conflicts, rng);
    auto& chrom = genome.npcs[static_cast<std::size_t>(c.npc_id)];
    const int t = event_second(c.t_event, chrom.duration());
    const double gap = std::max(c.delta_t, 0.0);
    if (c.ctype == ConflictType::OP) {
      // Only an NPC in front can be made to obstruct the EV.
      if (!npc_ahead_at(target.trace, c)) continue;
      chrom = slow_down(rng, chrom, t, gap);
      return true;
    }
    if (c.first_arriver == Arriver::NPC) {
      chrom = slow_down(rng, chrom, t, gap);
    } else {
      chrom = mutate_acceleration(rng, chrom, t, gap, speed_limit);
    }
    return true;
  }
  return false;
}

CollisionIterationResult collision_search_iteration(const ScenarioPtr& target, std::uint64_t round,
                                                    CollisionMutationMode mode, const GaConfig& cfg,
                                                    const SearchContext& ctx, StepCounter& steps) {
  CollisionIterationResult result;
  result.next_target = target;
  if (mode == CollisionMutationMode::Targeted && target->conflicts.conflicts.empty()) {
    result.diagnostic = "target has no conflicts to fuzz";
    return result;
  }
  const double limit = ctx.graph->speed_limit();

  std::vector<ScenarioGenome> pending;
  for (int j = 0; j < cfg.collision_batch; ++j) {
    const std::uint64_t seed = derive_seed(cfg.rng_seed, round, static_cast<std::uint64_t>(j));
    Rng rng(seed);
    if (!fires(rng.uniform(), cfg.collision_threshold_m, cfg.invert_thresholds)) continue;
    ScenarioGenome mutant = target->genome;
    if (mode == CollisionMutationMode::Targeted) {
      if (!apply_collision_mutation(mutant, *target, rng, limit)) continue;
    } else {
      auto& chrom = mutant.npcs[rng.index(mutant.npcs.size())];
      chrom = rng.bernoulli(0.5) ? mutate_speed_random(rng, chrom, SpeedRange{0.0, limit})
                                 : mutate_action_random(rng, chrom);
    }
    if (steps.remaining() <= 0) break;
    const int step = steps.take();
    mutant.scenario_id = "s" + std::to_string(step);
    mutant.parent_ids = {target->genome.scenario_id};
    mutant.rng_seed = seed;
    pending.push_back(std::move(mutant));
    result.simulations.push_back({step, -1, seed, nullptr});
  }

  auto evaluated = ctx.evaluate(pending);
  ScenarioPtr best;
  for (std::size_t p = 0; p < pending.size(); ++p) {
    auto ptr = std::make_shared<const EvaluatedScenario>(std::move(evaluated[p]));
    result.simulations[p].scenario = ptr;
    if (ptr->collided || ptr->failed) continue;
    if (!best || ptr->fitness_collision > best->fitness_collision) best = ptr;
  }
  if (best) result.next_target = best;
  return result;
}

double genome_distance(const ScenarioGenome& a, const ScenarioGenome& b, double speed_limit) {
  const std::size_t n = std::min(a.npcs.size(), b.npcs.size());
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ca = a.npcs[i];
    const auto& cb = b.npcs[i];
    const std::size_t t = std::min(ca.speeds.size(), cb.speeds.size());
    if (t == 0) continue;
    double l1 = 0.0;
    double hamming = 0.0;
    for (std::size_t s = 0; s < t; ++s) {
      l1 += std::abs(ca.speeds[s] - cb.speeds[s]);
      hamming += ca.actions[s] != cb.actions[s] ? 1.0 : 0.0;
    }
    total += l1 / (static_cast<double>(t) * speed_limit) + hamming / static_cast<double>(t);
  }
  return total / static_cast<double>(n);
}

double mean_pairwise_distance(const std::vector<ScenarioGenome>& population, double speed_limit) {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    for (std::size_t j = i + 1; j < population.size(); ++j) {
      sum += genome_distance(population[i], population[j], speed_limit);
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

bool restart_check(const std::vector<double>& best_history, const std::vector<ScenarioGenome>& population,
                   const GaConfig& cfg, double speed_limit) {
  const auto r = static_cast<std::size_t>(cfg.restart_stagnation_R);
  if (best_history.size() > r) {
    const double latest = best_history.back();
    const bool flat = std::all_of(best_history.end() - static_cast<std::ptrdiff_t>(r) - 1, best_history.end(),
                                  [latest](double v) { return v == latest; });
    if (flat) return true;
  }
  return population.size() >= 2 && mean_pairwise_distance(population, speed_limit) < cfg.restart_similarity_eps;
}

}  // namespace conflictfuzz
