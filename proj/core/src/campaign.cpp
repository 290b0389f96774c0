#include "conflictfuzz/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conflictfuzz/fileio.hpp"

namespace conflictfuzz {

namespace {

constexpr double kContactTolerance = 1e-6;

class CampaignRunner {
 public:
  CampaignRunner(const CampaignConfig& cfg, int workers)
      : cfg_(cfg),
        graph_(build_template(cfg.template_id, cfg.road_length, cfg.speed_limit, cfg.lane_width)),
        evaluator_(graph_, cfg.ego, cfg.sim, cfg.conflict),
        steps_(cfg.budget_steps) {
    ctx_.graph = &graph_;
    ctx_.dt = cfg.sim.dt;
    ctx_.t_c = cfg.conflict.t_c;
    ctx_.evaluate = [this, workers](const std::vector<ScenarioGenome>& genomes) {
      return evaluator_.evaluate_batch(genomes, workers);
    };
  }

  CampaignResult run() {
    if (cfg_.variant == Variant::Full) {
      run_full();
    } else {
      run_collision_only(cfg_.variant == Variant::CollisionOnly ? CollisionMutationMode::Targeted
                                                                : CollisionMutationMode::Random);
    }
    result_.metrics = compute_metrics(result_.ledger);
    return std::move(result_);
  }

 private:
  void log(const std::vector<SimulationRecord>& sims, Stage stage) {
    for (const auto& s : sims) {
      result_.ledger.push_back(make_event(s, stage, graph_));
      const EvaluatedScenario& sc = *s.scenario;
      if (sc.collided && sc.trace.collision) {
        ArchiveEntry a;
        a.step = s.step;
        a.genome = sc.genome;
        a.trace = TraceDocument{cfg_.environment(), sc.trace};
        a.type_key = classify_collision(sc.trace, graph_);
        a.ev_fault = sc.trace.collision->ev_fault;
        result_.archive.push_back(std::move(a));
      }
    }
  }

  void annotate_handoff(const EvaluatedScenario& chosen) {
    if (result_.ledger.empty()) return;
    result_.ledger.back().handoffs.push_back({chosen.genome.scenario_id, conflict_count(chosen.conflicts)});
  }

  /// Fresh random scenarios, simulated as far as the budget allows.
  std::vector<ScenarioPtr> random_population(int count, Stage stage) {
    const std::uint64_t round = next_round();
    std::vector<ScenarioGenome> genomes;
    std::vector<SimulationRecord> sims;
    for (int i = 0; i < count && steps_.remaining() > 0; ++i) {
      const std::uint64_t seed = derive_seed(cfg_.ga.rng_seed, round, static_cast<std::uint64_t>(i));
      Rng rng(seed);
      ScenarioGenome g = random_genome(rng, graph_, cfg_.n_npcs, cfg_.duration_s, cfg_.placement);
      const int step = steps_.take();
      g.scenario_id = "s" + std::to_string(step);
      g.rng_seed = seed;
      genomes.push_back(std::move(g));
      sims.push_back({step, stage == Stage::Collision ? -1 : 0, seed, nullptr});
    }
    auto evaluated = ctx_.evaluate(genomes);
    std::vector<ScenarioPtr> out;
    for (std::size_t i = 0; i < evaluated.size(); ++i) {
      auto ptr = std::make_shared<const EvaluatedScenario>(std::move(evaluated[i]));
      sims[i].scenario = ptr;
      out.push_back(ptr);
    }
    log(sims, stage);
    return out;
  }

  void collision_phase(ScenarioPtr target, CollisionMutationMode mode) {
    for (int it = 0; it < cfg_.ga.collision_iterations && steps_.remaining() > 0; ++it) {
      auto res = collision_search_iteration(target, next_round(), mode, cfg_.ga, ctx_, steps_);
      log(res.simulations, Stage::Collision);
      if (!res.diagnostic.empty()) break;
      target = res.next_target;
    }
  }

  void run_full() {
    const int k = cfg_.ga.population_size;
    std::vector<ScenarioPtr> population = random_population(k, Stage::Conflict);
    std::vector<double> best_history;
    int generation = 0;
    while (steps_.remaining() > 0 && static_cast<int>(population.size()) == k) {
      ScenarioPtr window_best;
      for (int g = 0; g < cfg_.ga.m_generations_per_handoff && steps_.remaining() > 0; ++g) {
        ++generation;
        auto res = conflict_search_generation(population, generation, next_round(), cfg_.ga, ctx_, steps_);
        log(res.simulations, Stage::Conflict);
        for (const auto& s : res.offspring) {
          if (!window_best || s->fitness_conflict > window_best->fitness_conflict) window_best = s;
        }
        population = std::move(res.next_population);
      }
      if (steps_.remaining() <= 0 || !window_best) break;

      annotate_handoff(*window_best);
      best_history.push_back(window_best->fitness_conflict);
      collision_phase(window_best, CollisionMutationMode::Targeted);
      if (steps_.remaining() <= 0) break;

      std::vector<ScenarioGenome> genomes;
      for (const auto& p : population) genomes.push_back(p->genome);
      if (restart_check(best_history, genomes, cfg_.ga, graph_.speed_limit())) {
        population = random_population(k, Stage::Restart);
        best_history.clear();
      }
    }
  }

  void run_collision_only(CollisionMutationMode mode) {
    while (steps_.remaining() > 0) {
      const auto seeds = random_population(1, Stage::Collision);
      if (seeds.empty()) break;
      annotate_handoff(*seeds.front());
      collision_phase(seeds.front(), mode);
    }
  }

  std::uint64_t next_round() { return round_++; }

  const CampaignConfig& cfg_;
  LaneGraph graph_;
  Evaluator evaluator_;
  StepCounter steps_;
  SearchContext ctx_;
  std::uint64_t round_ = 0;
  CampaignResult result_;
};

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::CollisionOnly: return "collision_only";
    case Variant::CollisionOnlyRandom: return "collision_only_random";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  if (text == "full") return Variant::Full;
  if (text == "collision_only") return Variant::CollisionOnly;
  if (text == "collision_only_random") return Variant::CollisionOnlyRandom;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "'");
}

TraceEnvironment CampaignConfig::environment() const {
  return {template_id, road_length, speed_limit, lane_width, ego, sim};
}

void validate(const CampaignConfig& cfg) {
  validate(cfg.ga);
  if (cfg.road_length < kMinRoadLength) throw std::invalid_argument("road length must be at least 100 m");
  if (!(cfg.speed_limit > 0.0)) throw std::invalid_argument("speed_limit must be positive");
  if (!(cfg.lane_width > 0.0)) throw std::invalid_argument("lane_width must be positive");
  if (cfg.n_npcs < 1) throw std::invalid_argument("n_npcs must be at least 1");
  if (cfg.duration_s < 10) throw std::invalid_argument("duration_s must be at least 10");
  if (!(cfg.conflict.t_c > 0.0)) throw std::invalid_argument("t_c must be positive");
  if (cfg.conflict.t_c > cfg.conflict.t_s) throw std::invalid_argument("t_c must not exceed t_s");
  if (!(cfg.conflict.cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
  if (cfg.budget_steps < cfg.ga.population_size) throw std::invalid_argument("budget_steps must be at least population_size");
  steps_per_second(cfg.sim.dt);
}

CampaignResult run_campaign(const CampaignConfig& cfg, int workers) {
  validate(cfg);
  CampaignRunner runner(cfg, workers);
  return runner.run();
}

CampaignEvent make_event(const SimulationRecord& sim, Stage stage, const LaneGraph& graph) {
  const EvaluatedScenario& sc = *sim.scenario;
  CampaignEvent e;
  e.step = sim.step;
  e.stage = stage;
  e.scenario_id = sc.genome.scenario_id;
  e.parent_ids = sc.genome.parent_ids;
  if (sim.generation >= 0) e.generation = sim.generation;
  e.n_conflicts = conflict_count(sc.conflicts);
  e.n_spatial = static_cast<int>(sc.conflicts.spatial.size());
  e.fitness_conflict = sc.fitness_conflict;
  e.fitness_collision = sc.fitness_collision;
  e.rng_child_seed = sim.rng_child_seed;
  e.failed = sc.failed;
  if (sc.collided && sc.trace.collision) {
    e.collision = LedgerCollision{sc.trace.collision->npc_id, classify_collision(sc.trace, graph).str(),
                                  sc.trace.collision->ev_fault};
  }
  for (const auto* list : {&sc.conflicts.conflicts, &sc.conflicts.spatial}) {
    for (const auto& c : *list) e.conflicts.push_back({c.ctype, c.klass, c.delta_t, c.t_event, c.first_arriver, c.npc_id});
  }
  std::sort(e.conflicts.begin(), e.conflicts.end(), [](const LedgerConflict& a, const LedgerConflict& b) {
    return std::tie(a.npc_id, a.t_event) < std::tie(b.npc_id, b.t_event);
  });
  return e;
}

std::string archive_stem(int step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%05d", step);
  return buf;
}

void write_archive_entry(const std::filesystem::path& dir, const ArchiveEntry& entry) {
  const std::string stem = archive_stem(entry.step);
  write_file_atomic(dir / (stem + ".genome.json"), to_document(entry.genome));
  write_trace(dir / (stem + ".trace.jsonl"), entry.trace);
}

ReplayOutcome replay_archive_entry(const std::filesystem::path& entry) {
  namespace fs = std::filesystem;
  std::string base = entry.string();
  for (const std::string suffix : {".genome.json", ".trace.jsonl"}) {
    if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
      base.resize(base.size() - suffix.size());
    }
  }
  const TraceDocument archived = read_trace(base + ".trace.jsonl");
  ReplayOutcome out;
  out.genome = genome_from_document(read_file(base + ".genome.json"));
  out.environment = archived.environment;
  const LaneGraph graph = archived.environment.build_graph();
  out.trace = simulate(out.genome, graph, archived.environment.ego, archived.environment.sim);

  const auto& want = archived.trace.collision;
  const auto& got = out.trace.collision;
  if (!want) {
    out.detail = "archived trace records no collision";
  } else if (!got) {
    out.detail = "collision did not recur";
  } else if (got->step != want->step) {
    out.detail = "collision moved from step " + std::to_string(want->step) + " to " + std::to_string(got->step);
  } else if (norm(got->ev_contact_point - want->ev_contact_point) > kContactTolerance) {
    out.detail = "contact point moved by " + std::to_string(norm(got->ev_contact_point - want->ev_contact_point)) + " m";
  } else if (got->npc_id != want->npc_id) {
    out.detail = "collision partner changed";
  } else {
    out.reproduced = true;
    out.detail = "collision reproduced at step " + std::to_string(got->step);
  }
  return out;
}

}  // namespace conflictfuzz
