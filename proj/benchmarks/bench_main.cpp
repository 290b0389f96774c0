#include <benchmark/benchmark.h>

#include "conflictfuzz/brute_force_oracle.hpp"
#include "conflictfuzz/campaign.hpp"
#include "conflictfuzz/conflict.hpp"
#include "conflictfuzz/genome.hpp"
#include "conflictfuzz/search.hpp"
#include "conflictfuzz/simulator.hpp"

namespace cf = conflictfuzz;

namespace {

struct Scenario {
  cf::LaneGraph graph = cf::build_template(cf::TemplateId::Straight3, 800, 20);
  cf::ScenarioGenome genome;
  cf::Trace trace;

  explicit Scenario(int n_npcs, int duration = 30) {
    cf::Rng rng(42);
    genome = cf::random_genome(rng, graph, n_npcs, duration, cf::PlacementPolicy::Fixed);
    trace = cf::simulate(genome, graph, cf::EgoControllerSpec{});
  }
};

void BM_Simulate(benchmark::State& state) {
  const Scenario s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cf::simulate(s.genome, s.graph, cf::EgoControllerSpec{}));
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_AnalyzeConflicts(benchmark::State& state) {
  const Scenario s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cf::analyze(s.trace, s.graph));
}
BENCHMARK(BM_AnalyzeConflicts)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

void BM_BruteForceOracle(benchmark::State& state) {
  const Scenario s(2, 15);
  for (auto _ : state) benchmark::DoNotOptimize(cf::brute_force_conflicts(s.trace));
}
BENCHMARK(BM_BruteForceOracle)->Unit(benchmark::kMillisecond);

void BM_ConflictSearchGeneration(benchmark::State& state) {
  const cf::LaneGraph graph = cf::build_template(cf::TemplateId::Straight3, 800, 20);
  const cf::Evaluator evaluator(graph, cf::EgoControllerSpec{}, cf::SimulationParams{}, cf::ConflictParams{});
  const int workers = static_cast<int>(state.range(0));
  cf::SearchContext ctx;
  ctx.graph = &graph;
  ctx.evaluate = [&](const std::vector<cf::ScenarioGenome>& g) { return evaluator.evaluate_batch(g, workers); };
  cf::GaConfig cfg;
  std::vector<cf::ScenarioPtr> pop;
  for (int i = 0; i < cfg.population_size; ++i) {
    cf::Rng rng(static_cast<std::uint64_t>(i));
    pop.push_back(std::make_shared<cf::EvaluatedScenario>(
        evaluator.evaluate(cf::random_genome(rng, graph, 2, 30, cf::PlacementPolicy::Fixed))));
  }
  std::uint64_t round = 0;
  for (auto _ : state) {
    cf::StepCounter steps(1 << 30);
    benchmark::DoNotOptimize(cf::conflict_search_generation(pop, 1, round++, cfg, ctx, steps));
  }
}
BENCHMARK(BM_ConflictSearchGeneration)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SmallCampaign(benchmark::State& state) {
  cf::CampaignConfig cfg;
  cfg.budget_steps = 100;
  for (auto _ : state) benchmark::DoNotOptimize(cf::run_campaign(cfg, 1));
}
BENCHMARK(BM_SmallCampaign)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
