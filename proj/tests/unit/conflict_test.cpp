#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "conflictfuzz/brute_force_oracle.hpp"
#include "conflictfuzz/conflict.hpp"
#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/random.hpp"
#include "fixtures.hpp"

namespace conflictfuzz {
namespace {

using testing::linear_trace;

/// Interval ends are sampled every 0.1 s, so gaps are exact to one step.
constexpr double kSampleTolerance = 0.1 + 1e-9;

class ConflictTest : public ::testing::Test {
 protected:
  // Cross template of length 800: road A along +x, road B along +y, meeting at (400, 0).
  LaneGraph cross = build_template(TemplateId::Cross, 800, 20);
  LaneId a = cross.lane_by_name("A");
  LaneId b = cross.lane_by_name("B");
  LaneGraph straight = build_template(TemplateId::Straight3, 800, 20);

  /// Both vehicles at 10 m/s. The NPC clears the crossing cells `gap`
  /// seconds before the EV reaches them; the tightest shared cell is the
  /// one the EV enters first and the NPC leaves last, which puts the
  /// exit-to-enter gap at (390.5 - x0 + y0) / 10.
  Trace crossing(double gap, double duration) const {
    const double y0 = -80.0;
    const double x0 = 390.5 + y0 - 10.0 * gap;
    return linear_trace(cross, {{a, x0, 10.0}, {b, y0 + 400.0, 10.0}}, duration);
  }
};

TEST_F(ConflictTest, StationaryVehicleHoldsEachCellForTheWholeTrace) {
  const Trace t = linear_trace(straight, {{straight.lane_by_name("L1"), 41.0, 0.0}}, 10);
  const OccupancyGrid grid = rasterize(t);
  // x in [38.75, 43.25] spans three columns; y in [2.5, 4.5] sits inside one row.
  EXPECT_EQ(grid.cells.size(), 3u);
  for (const auto& [cell, per_vehicle] : grid.cells) {
    ASSERT_EQ(per_vehicle[0].size(), 1u);
    EXPECT_EQ(per_vehicle[0][0], (Interval{0, 100}));
  }
}

TEST_F(ConflictTest, MovingVehicleHoldsEachCellForLengthOverSpeed) {
  const Trace t = linear_trace(straight, {{straight.lane_by_name("L1"), 40.0, 10.0}}, 10);
  const OccupancyGrid grid = rasterize(t);
  int interior = 0;
  for (const auto& [cell, per_vehicle] : grid.cells) {
    const Interval iv = per_vehicle[0].front();
    if (iv.enter_step == 0 || iv.exit_step == 100) continue;
    ++interior;
    // (4.5 + 2.5) / 10 = 0.7 s; inclusive sampling gives 7 steps.
    EXPECT_EQ(iv.exit_step - iv.enter_step + 1, 7) << cell.ix << "," << cell.iy;
  }
  EXPECT_GT(interior, 20);
}

TEST_F(ConflictTest, RasterizeAgreesWithPointInRectangleCount) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const OrientedBox box{{rng.uniform(0, 50), rng.uniform(-10, 10)}, rng.uniform(-kPi, kPi)};
    const auto cells = covered_cells(box, 2.5);
    // A cell is covered iff some fine sample inside the cell lies inside the box.
    const Vec2 u = unit_from_heading(box.heading);
    const Vec2 v{-u.y, u.x};
    for (int ix = -5; ix < 25; ++ix) {
      for (int iy = -8; iy < 8; ++iy) {
        bool hit = false;
        for (int sx = 0; sx < 25 && !hit; ++sx) {
          for (int sy = 0; sy < 25 && !hit; ++sy) {
            const Vec2 p{(ix + (sx + 0.5) / 25) * 2.5, (iy + (sy + 0.5) / 25) * 2.5};
            const Vec2 r = p - box.center;
            hit = std::abs(dot(r, u)) < box.length / 2 && std::abs(dot(r, v)) < box.width / 2;
          }
        }
        const bool listed = std::find(cells.begin(), cells.end(), Cell{ix, iy}) != cells.end();
        // Sampling can miss a sliver but never invent one.
        if (hit) {
          EXPECT_TRUE(listed) << ix << "," << iy;
        }
      }
    }
  }
}

TEST_F(ConflictTest, ParallelLanesProduceNothing) {
  const Trace t = linear_trace(straight, {{straight.lane_by_name("L1"), 40, 10}, {straight.lane_by_name("L0"), 40, 10}}, 15);
  const ConflictSet set = analyze(t, straight);
  EXPECT_TRUE(set.conflicts.empty());
  EXPECT_TRUE(set.spatial.empty());
  EXPECT_TRUE(brute_force_conflicts(t).empty());
  EXPECT_EQ(format_oracle_listing(brute_force_conflicts(t)), "");
}

TEST_F(ConflictTest, CrossingTwoSecondsAheadIsAConflict) {
  const ConflictSet set = analyze(crossing(2.0, 25), cross);
  ASSERT_EQ(set.conflicts.size(), 1u);
  EXPECT_TRUE(set.spatial.empty());
  const ConflictRecord& c = set.conflicts.front();
  EXPECT_NEAR(c.delta_t, 2.0, kSampleTolerance);
  EXPECT_EQ(c.first_arriver, Arriver::NPC);
  EXPECT_EQ(c.klass, ConflictClass::Conflict);
  EXPECT_EQ(c.ctype, ConflictType::CP);
  EXPECT_EQ(c.npc_id, 0);
}

TEST_F(ConflictTest, CrossingTenSecondsAheadIsSpatial) {
  const ConflictSet set = analyze(crossing(10.0, 25), cross);
  EXPECT_TRUE(set.conflicts.empty());
  ASSERT_EQ(set.spatial.size(), 1u);
  EXPECT_NEAR(set.spatial.front().delta_t, 10.0, kSampleTolerance);
  EXPECT_EQ(set.spatial.front().klass, ConflictClass::SpatialConflict);
}

TEST_F(ConflictTest, GapBeyondSpatialLimitIsIgnored) {
  const ConflictSet set = analyze(crossing(16.0, 35), cross);
  EXPECT_TRUE(set.conflicts.empty());
  EXPECT_TRUE(set.spatial.empty());
}

TEST_F(ConflictTest, OracleMatchesAnalyticCrossing) {
  const auto events = brute_force_conflicts(crossing(2.0, 25));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_NEAR(events.front().delta_t, 2.0, kSampleTolerance);
  EXPECT_EQ(events.front().first_arriver, Arriver::NPC);
}

TEST_F(ConflictTest, FollowingInOneLaneIsOpposite) {
  const LaneId l1 = straight.lane_by_name("L1");
  const ConflictSet set = analyze(linear_trace(straight, {{l1, 40, 10}, {l1, 55, 10}}, 10), straight);
  ASSERT_EQ(set.conflicts.size(), 1u);
  EXPECT_EQ(set.conflicts.front().ctype, ConflictType::OP);
  EXPECT_EQ(set.conflicts.front().first_arriver, Arriver::NPC);
}

TEST_F(ConflictTest, CutInIsMerging) {
  const LaneId l0 = straight.lane_by_name("L0"), l1 = straight.lane_by_name("L1");
  // The NPC changes from L0 into the EV's lane ahead of it; nobody collides.
  ScenarioGenome g = testing::make_genome(straight, {l1, 40}, {{{l0, 80}, 20.0}}, 15);
  g.npcs[0].actions[1] = Action::LaneLeft;
  const Trace t = simulate(g, straight, EgoControllerSpec{});
  ASSERT_FALSE(t.collision.has_value());
  const ConflictSet set = analyze(t, straight);
  ASSERT_FALSE(set.conflicts.empty());
  EXPECT_EQ(set.conflicts.front().ctype, ConflictType::MP);
  EXPECT_FALSE(set.conflicts.front().unclassified);
}

TEST(ConflictCount, CountsConflictsOnly) {
  ConflictSet set;
  EXPECT_EQ(conflict_count(set), 0);
  set.conflicts.resize(2);
  set.spatial.resize(3);
  EXPECT_EQ(conflict_count(set), 2);
}

TEST(ConflictNames, RoundTrip) {
  for (auto t : {ConflictType::MP, ConflictType::CP, ConflictType::OP, ConflictType::UHP, ConflictType::CHP}) {
    EXPECT_EQ(parse_conflict_type(to_string(t)), t);
  }
  EXPECT_EQ(parse_arriver(to_string(Arriver::NPC)), Arriver::NPC);
  EXPECT_THROW(parse_conflict_type("XX"), std::invalid_argument);
}

TEST(ConflictOracle, AgreesWithFastPathOnSimulatedTraces) {
  const LaneGraph g = build_template(TemplateId::Straight3, 400, 20);
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    Rng rng(seed);
    const Trace t = simulate(random_genome(rng, g, 2, 12, PlacementPolicy::Random), g, EgoControllerSpec{});
    const ConflictSet fast = find_conflicts(rasterize(t));
    const auto slow = brute_force_conflicts(t);
    ASSERT_EQ(fast.conflicts.size() + fast.spatial.size(), slow.size()) << seed;
  }
}

}  // namespace
}  // namespace conflictfuzz
