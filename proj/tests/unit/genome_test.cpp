#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "conflictfuzz/genome.hpp"
#include "conflictfuzz/random.hpp"
#include "fixtures.hpp"

namespace conflictfuzz {
namespace {

using testing::constant_chromosome;

class GenomeTest : public ::testing::Test {
 protected:
  LaneGraph graph = build_template(TemplateId::Straight3, 800, 20);
};

TEST_F(GenomeTest, RandomGenomeIsDeterministicAndValid) {
  Rng a(7), b(7);
  const ScenarioGenome g1 = random_genome(a, graph, 2, 30, PlacementPolicy::Fixed);
  const ScenarioGenome g2 = random_genome(b, graph, 2, 30, PlacementPolicy::Fixed);
  EXPECT_EQ(g1, g2);
  ASSERT_EQ(g1.npcs.size(), 2u);
  for (const auto& c : g1.npcs) {
    EXPECT_EQ(c.duration(), 30);
    EXPECT_EQ(c.actions.size(), 30u);
  }
  EXPECT_NO_THROW(validate(g1, graph));
}

TEST_F(GenomeTest, RandomSpeedsStayInRange) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto policy = seed % 2 ? PlacementPolicy::Random : PlacementPolicy::Fixed;
    const ScenarioGenome g = random_genome(rng, graph, 3, 30, policy);
    EXPECT_NO_THROW(validate(g, graph));
    for (const auto& c : g.npcs) {
      for (double v : c.speeds) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 20.0);
      }
    }
  }
}

TEST_F(GenomeTest, StraightActionShareIsEightyPercent) {
  std::size_t straight = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    for (const auto& c : random_genome(rng, graph, 2, 30, PlacementPolicy::Fixed).npcs) {
      straight += static_cast<std::size_t>(std::count(c.actions.begin(), c.actions.end(), Action::Straight));
      total += c.actions.size();
    }
  }
  const double share = static_cast<double>(straight) / static_cast<double>(total);
  EXPECT_GE(share, 0.78);
  EXPECT_LE(share, 0.82);
}

TEST_F(GenomeTest, ValidateRejectsBrokenGenomes) {
  Rng rng(1);
  ScenarioGenome g = random_genome(rng, graph, 2, 30, PlacementPolicy::Fixed);
  ScenarioGenome bad_speed = g;
  bad_speed.npcs[0].speeds[3] = 25.0;
  EXPECT_THROW(validate(bad_speed, graph), GenomeError);
  ScenarioGenome bad_length = g;
  bad_length.npcs[1].actions.pop_back();
  EXPECT_THROW(validate(bad_length, graph), GenomeError);
  ScenarioGenome bad_lane = g;
  bad_lane.npcs[0].start.lane = LaneId{9};
  EXPECT_THROW(validate(bad_lane, graph), GenomeError);
  ScenarioGenome overlapping = g;
  overlapping.npcs[0].start = overlapping.ego_start;
  EXPECT_THROW(validate(overlapping, graph), GenomeError);
}

TEST_F(GenomeTest, CrossoverWithMaskSwapsChosenIndices) {
  Rng ra(1), rb(2);
  const ScenarioGenome a = random_genome(ra, graph, 2, 30, PlacementPolicy::Fixed);
  const ScenarioGenome b = random_genome(rb, graph, 2, 30, PlacementPolicy::Fixed);
  const auto [c1, c2] = crossover_with_mask(a, b, {true, false});
  EXPECT_EQ(c1.npcs[0], b.npcs[0]);
  EXPECT_EQ(c1.npcs[1], a.npcs[1]);
  EXPECT_EQ(c2.npcs[0], a.npcs[0]);
  EXPECT_EQ(c2.npcs[1], b.npcs[1]);
}

TEST_F(GenomeTest, CrossoverOfEqualParentsIsIdentity) {
  Rng r(3), rng(4);
  const ScenarioGenome a = random_genome(r, graph, 2, 30, PlacementPolicy::Fixed);
  const auto [c1, c2] = crossover(rng, a, a);
  EXPECT_EQ(c1.npcs, a.npcs);
  EXPECT_EQ(c2.npcs, a.npcs);
}

TEST_F(GenomeTest, CrossoverConservesChromosomes) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const ScenarioGenome a = random_genome(rng, graph, 3, 20, PlacementPolicy::Random);
    const ScenarioGenome b = random_genome(rng, graph, 3, 20, PlacementPolicy::Random);
    const auto [c1, c2] = crossover(rng, a, b);
    for (std::size_t k = 0; k < 3; ++k) {
      const bool swapped = c1.npcs[k] == b.npcs[k] && c2.npcs[k] == a.npcs[k];
      const bool kept = c1.npcs[k] == a.npcs[k] && c2.npcs[k] == b.npcs[k];
      EXPECT_TRUE(swapped || kept);
    }
    EXPECT_NE(c1.npcs, a.npcs) << "a crossover must swap at least one chromosome";
  }
}

TEST(MutationOperators, LongAccelerationWorkedExample) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  const NpcChromosome m = mutate_long_acceleration(c, 5, 20.0);
  for (int t = 0; t < 30; ++t) EXPECT_EQ(m.speeds[t], t < 5 ? 11.0 : 10.0) << t;
  EXPECT_EQ(m.actions, c.actions);
}

TEST(MutationOperators, LongAccelerationSaturatesAtLimit) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 20.0);
  EXPECT_EQ(mutate_long_acceleration(c, 10, 20.0), c);
}

TEST(MutationOperators, LongDecelerationWorkedExample) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  const NpcChromosome m = mutate_long_deceleration(c, 5);
  for (int t = 0; t < 30; ++t) EXPECT_EQ(m.speeds[t], t < 5 ? 9.0 : 10.0) << t;
}

TEST(MutationOperators, LongDecelerationFloorsAtZero) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 0.0);
  EXPECT_EQ(mutate_long_deceleration(c, 10), c);
}

TEST(MutationOperators, DecelerationWorkedExample) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  const NpcChromosome m = mutate_deceleration(c, 8, 2.0, 1.5);
  for (int t = 0; t < 30; ++t) EXPECT_EQ(m.speeds[t], t >= 6 && t <= 8 ? 8.5 : 10.0) << t;
  EXPECT_EQ(mutate_deceleration(c, 8, 2.0, 0.0), c);
  const NpcChromosome early = mutate_deceleration(c, 1, 3.0, 1.0);
  EXPECT_EQ(early.speeds[0], 9.0);
  EXPECT_EQ(early.speeds[1], 9.0);
  EXPECT_EQ(early.speeds[2], 10.0);
}

TEST(MutationOperators, BrakeWorkedExample) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  const NpcChromosome m = mutate_brake(c, 5, 4.0);
  for (int t = 0; t < 30; ++t) EXPECT_EQ(m.speeds[t], t == 4 || t == 5 ? 6.0 : 10.0) << t;
  const NpcChromosome slow = constant_chromosome(0, {}, 30, 1.0);
  const NpcChromosome floored = mutate_brake(slow, 5, 4.0);
  EXPECT_EQ(floored.speeds[4], 0.0);
  EXPECT_EQ(floored.speeds[5], 0.0);
}

TEST(MutationOperators, AccelerationWorkedExample) {
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  const NpcChromosome m = mutate_acceleration(c, 8, 3.0, 2.0, 20.0);
  for (int t = 0; t < 30; ++t) EXPECT_EQ(m.speeds[t], t >= 5 && t <= 8 ? 12.0 : 10.0) << t;
  const NpcChromosome fast = constant_chromosome(0, {}, 30, 20.0);
  EXPECT_EQ(mutate_acceleration(fast, 8, 3.0, 2.0, 20.0), fast);
}

TEST(MutationOperators, SpeedMutationChangesOneGene) {
  Rng rng(9);
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  const NpcChromosome m = mutate_speed_random(rng, c, {0.0, 20.0});
  int changed = 0;
  for (int t = 0; t < 30; ++t) changed += m.speeds[t] != c.speeds[t];
  EXPECT_EQ(changed, 1);
  EXPECT_EQ(m.actions, c.actions);
}

TEST(MutationOperators, SpeedMutationIsUniformOverOtherValues) {
  Rng rng(123);
  const NpcChromosome c = constant_chromosome(0, {}, 1, 10.0);
  std::map<double, double> counts;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) counts[mutate_speed_random(rng, c, {0.0, 20.0}).speeds[0]] += 1;
  EXPECT_EQ(counts.count(10.0), 0u);
  ASSERT_EQ(counts.size(), 40u);  // 41 grid values minus the old one
  std::vector<double> observed, expected;
  for (const auto& [v, n] : counts) {
    observed.push_back(n);
    expected.push_back(kDraws / 40.0);
  }
  EXPECT_GT(testing::chi_square_p(testing::chi_square_statistic(observed, expected), 39), 0.01);
}

TEST(MutationOperators, ActionMutationAlwaysPicksAnotherAction) {
  Rng rng(5);
  const NpcChromosome c = constant_chromosome(0, {}, 30, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const NpcChromosome m = mutate_action_random(rng, c);
    int changed = 0;
    for (int t = 0; t < 30; ++t) {
      if (m.actions[t] != c.actions[t]) {
        ++changed;
        EXPECT_NE(m.actions[t], Action::Straight);
      }
    }
    ASSERT_EQ(changed, 1);
    ASSERT_EQ(m.speeds, c.speeds);
  }
}

TEST(MutationOperators, ApproachWindowStart) {
  EXPECT_EQ(approach_window_start(8, 2.0), 6);
  EXPECT_EQ(approach_window_start(8, 2.3), 5);
  EXPECT_EQ(approach_window_start(1, 3.0), 0);
}

TEST_F(GenomeTest, DocumentRoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    ScenarioGenome g = random_genome(rng, graph, 2, 30, PlacementPolicy::Random);
    g.npcs[0] = mutate_deceleration(rng, g.npcs[0], 12, 2.7);
    g.npcs[1] = mutate_acceleration(rng, g.npcs[1], 20, 1.3, 20.0);
    for (auto& c : g.npcs) {
      for (auto& v : c.speeds) v = quantize_gene(v);
    }
    g.parent_ids = {"s1", "s2"};
    g.rng_seed = 0xFFFFFFFFFFFFFFFFULL - seed;
    const std::string doc = to_document(g);
    const ScenarioGenome back = genome_from_document(doc);
    EXPECT_EQ(back, g);
    EXPECT_EQ(to_document(back), doc);
  }
}

TEST(GenomeDocument, RejectsMalformedInput) {
  EXPECT_THROW(genome_from_document("not json"), GenomeError);
  EXPECT_THROW(genome_from_document("{}"), GenomeError);
}

}  // namespace
}  // namespace conflictfuzz
