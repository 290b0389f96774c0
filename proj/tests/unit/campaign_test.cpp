#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "conflictfuzz/campaign.hpp"
#include "conflictfuzz/fileio.hpp"
#include "fixtures.hpp"

namespace conflictfuzz {
namespace {

CampaignConfig small_config(Variant variant, std::uint64_t seed, int budget) {
  CampaignConfig cfg;
  cfg.variant = variant;
  cfg.ga.rng_seed = seed;
  cfg.ga.population_size = 4;
  cfg.ga.collision_batch = 4;
  cfg.budget_steps = budget;
  cfg.duration_s = 15;
  return cfg;
}

TEST(Campaign, LedgerHasOneEventPerStep) {
  const CampaignResult r = run_campaign(small_config(Variant::Full, 1, 40));
  ASSERT_EQ(r.ledger.size(), 40u);
  for (std::size_t i = 0; i < r.ledger.size(); ++i) EXPECT_EQ(r.ledger[i].step, static_cast<int>(i) + 1);
  EXPECT_EQ(r.metrics.executed_steps, 40);
  std::set<std::string> ids;
  for (const auto& e : r.ledger) EXPECT_TRUE(ids.insert(e.scenario_id).second) << e.scenario_id;
}

TEST(Campaign, InitialPopulationIsParentless) {
  const CampaignResult r = run_campaign(small_config(Variant::Full, 2, 40));
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(r.ledger[i].parent_ids.empty());
    EXPECT_EQ(r.ledger[i].stage, Stage::Conflict);
  }
}

TEST(Campaign, CollisionOnlyVariantsSkipConflictSearch) {
  for (auto v : {Variant::CollisionOnly, Variant::CollisionOnlyRandom}) {
    const CampaignResult r = run_campaign(small_config(v, 3, 40));
    EXPECT_EQ(r.ledger.size(), 40u);
    for (const auto& e : r.ledger) {
      EXPECT_NE(e.stage, Stage::Conflict);
      EXPECT_FALSE(e.generation.has_value());
    }
    EXPECT_FALSE(r.metrics.conflicts_per_generation.has_value());
  }
}

TEST(Campaign, ResultDoesNotDependOnWorkerCount) {
  for (auto v : {Variant::Full, Variant::CollisionOnly}) {
    const CampaignConfig cfg = small_config(v, 4, 60);
    EXPECT_EQ(ledger_to_jsonl(run_campaign(cfg, 1).ledger), ledger_to_jsonl(run_campaign(cfg, 4).ledger));
  }
}

TEST(Campaign, CollisionsAreArchivedAndReplay) {
  CampaignConfig cfg = small_config(Variant::CollisionOnly, 5, 120);
  const CampaignResult r = run_campaign(cfg);
  const int collisions = static_cast<int>(std::count_if(r.ledger.begin(), r.ledger.end(),
                                                        [](const auto& e) { return e.collision.has_value(); }));
  ASSERT_EQ(static_cast<int>(r.archive.size()), collisions);
  ASSERT_GT(collisions, 0) << "seed 5 should find at least one collision in 120 steps";
  const auto dir = testing::scratch_dir("campaign_archive");
  for (const auto& entry : r.archive) {
    write_archive_entry(dir, entry);
    const ReplayOutcome out = replay_archive_entry(dir / (archive_stem(entry.step) + ".genome.json"));
    EXPECT_TRUE(out.reproduced) << out.detail;
  }
}

TEST(Campaign, TamperedGenomeDoesNotReplay) {
  const CampaignResult r = run_campaign(small_config(Variant::CollisionOnly, 5, 120));
  ASSERT_FALSE(r.archive.empty());
  ArchiveEntry entry = r.archive.front();
  // Park the colliding NPC far away at a standstill.
  const int npc = entry.trace.trace.collision->npc_id;
  auto& chrom = entry.genome.npcs[static_cast<std::size_t>(npc)];
  std::fill(chrom.speeds.begin(), chrom.speeds.end(), 0.0);
  std::fill(chrom.actions.begin(), chrom.actions.end(), Action::Straight);
  const auto dir = testing::scratch_dir("campaign_tamper");
  write_archive_entry(dir, entry);
  const ReplayOutcome out = replay_archive_entry(dir / archive_stem(entry.step));
  EXPECT_FALSE(out.reproduced);
  EXPECT_FALSE(out.detail.empty());
}

TEST(Campaign, ArchiveStemIsZeroPadded) {
  EXPECT_EQ(archive_stem(12), "step_00012");
  EXPECT_EQ(archive_stem(800), "step_00800");
}

TEST(Campaign, VariantNamesRoundTrip) {
  for (auto v : {Variant::Full, Variant::CollisionOnly, Variant::CollisionOnlyRandom}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_THROW(parse_variant("partial"), std::invalid_argument);
}

}  // namespace
}  // namespace conflictfuzz
