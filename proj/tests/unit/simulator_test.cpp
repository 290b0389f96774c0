#include <gtest/gtest.h>

#include <cmath>

#include "conflictfuzz/collision_type.hpp"
#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/simulator.hpp"
#include "fixtures.hpp"

namespace conflictfuzz {
namespace {

using testing::make_genome;

/// Two coincident lanes in opposite directions, so oncoming vehicles share
/// the same strip of road (the stock two-way template keeps them apart).
LaneGraph head_on_corridor() {
  Lane east{LaneId{0}, "E", 0, Polyline({{0, 0}, {400, 0}}), kNarrowLaneWidth, {}, {}, {}, 0};
  Lane west{LaneId{1}, "W", 1, Polyline({{400, 0}, {0, 0}}), kNarrowLaneWidth, {}, {}, {}, 0};
  return LaneGraph(TemplateId::TwoWay2, 400, 20, {east, west});
}

class SimulatorTest : public ::testing::Test {
 protected:
  LaneGraph straight = build_template(TemplateId::Straight3, 800, 20);
  EgoControllerSpec ego;
  LaneId l0 = straight.lane_by_name("L0");
  LaneId l1 = straight.lane_by_name("L1");
  LaneId l2 = straight.lane_by_name("L2");
};

TEST_F(SimulatorTest, ConstantSpeedNpcCoversSpeedTimesDuration) {
  const ScenarioGenome g = make_genome(straight, {l1, 40}, {{{l0, 60}, 10.0}}, 30);
  const Trace trace = simulate(g, straight, ego);
  ASSERT_FALSE(trace.collision.has_value());
  EXPECT_EQ(trace.terminated_reason, TerminationReason::DurationExpired);
  ASSERT_EQ(trace.steps.size(), 301u);
  EXPECT_NEAR(trace.steps.back()[1].s, 60.0 + 10.0 * 30, 0.5);
}

TEST_F(SimulatorTest, LaneRightInRightmostLaneIsIgnored) {
  ScenarioGenome g = make_genome(straight, {l2, 40}, {{{l0, 60}, 10.0}}, 30);
  g.npcs[0].actions.assign(30, Action::LaneRight);
  const Trace trace = simulate(g, straight, ego);
  for (const auto& row : trace.steps) {
    ASSERT_EQ(row[1].lane, l0);
    ASSERT_EQ(row[1].maneuver.kind, ManeuverKind::KeepLane);
    ASSERT_NEAR(row[1].d, 0.0, 1e-12);
  }
}

TEST_F(SimulatorTest, LaneChangeTakesTwoSeconds) {
  ScenarioGenome g = make_genome(straight, {l2, 40}, {{{l0, 60}, 10.0}}, 30);
  g.npcs[0].actions[3] = Action::LaneLeft;
  const Trace trace = simulate(g, straight, ego);
  EXPECT_EQ(trace.steps[30][1].maneuver.kind, ManeuverKind::KeepLane);
  EXPECT_EQ(trace.steps[31][1].maneuver.kind, ManeuverKind::ChangingLeft);
  EXPECT_EQ(trace.steps[49][1].maneuver.kind, ManeuverKind::ChangingLeft);
  EXPECT_EQ(trace.steps[50][1].maneuver.kind, ManeuverKind::KeepLane);
  EXPECT_EQ(trace.steps[50][1].lane, l1);
  EXPECT_NEAR(trace.steps[50][1].xy.y, straight.to_world(l1, 0, 0).xy.y, 1e-9);
}

TEST_F(SimulatorTest, HeadOnCollisionTruncatesTrace) {
  const LaneGraph corridor = head_on_corridor();
  const ScenarioGenome g = make_genome(corridor, {LaneId{0}, 40}, {{{LaneId{1}, 200}, 10.0}}, 30);
  const Trace trace = simulate(g, corridor, ego);
  ASSERT_TRUE(trace.collision.has_value());
  EXPECT_EQ(trace.terminated_reason, TerminationReason::Collision);
  // EV at x = 40 doing 20 m/s, NPC at x = 200 doing 10 m/s: bumpers meet after 155.5 / 30 s.
  const double expected = (200.0 - 40.0 - kVehicleLength) / 30.0;
  EXPECT_NEAR(trace.collision->step * trace.dt, expected, 0.15);
  EXPECT_EQ(trace.steps.size(), static_cast<std::size_t>(trace.collision->step) + 1);
  EXPECT_TRUE(trace.collision->ev_fault);
  const CollisionTypeKey key = classify_collision(trace, corridor);
  EXPECT_EQ(key.str(), "front|opposite|KeepLane|KeepLane|opposing_constrained");
}

TEST_F(SimulatorTest, SimulationIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    const ScenarioGenome g = random_genome(a, straight, 2, 30, PlacementPolicy::Random);
    EXPECT_EQ(simulate(g, straight, ego), simulate(g, straight, ego));
    EXPECT_EQ(g, random_genome(b, straight, 2, 30, PlacementPolicy::Random));
  }
}

TEST_F(SimulatorTest, FinerTimestepAgreesOnConstantSpeedMotion) {
  const ScenarioGenome g = make_genome(straight, {l1, 40}, {{{l0, 60}, 10.0}, {{l2, 90}, 14.0}}, 20);
  SimulationParams fine;
  fine.dt = 0.05;
  const Trace coarse_trace = simulate(g, straight, ego);
  const Trace fine_trace = simulate(g, straight, ego, fine);
  ASSERT_EQ(fine_trace.steps.size(), 2 * (coarse_trace.steps.size() - 1) + 1);
  for (std::size_t v = 0; v < 3; ++v) {
    EXPECT_NEAR(fine_trace.steps.back()[v].s, coarse_trace.steps.back()[v].s, 0.5) << v;
  }
}

TEST(StepsPerSecond, RequiresIntegralRate) {
  EXPECT_EQ(steps_per_second(0.1), 10);
  EXPECT_EQ(steps_per_second(0.05), 20);
  EXPECT_THROW(steps_per_second(0.3), SimulationError);
  EXPECT_THROW(steps_per_second(0.0), SimulationError);
}

TEST_F(SimulatorTest, IdmAcceleratesToTheLimitOnAnEmptyRoad) {
  BaselineEgo controller(ego, 0.1);
  const std::vector<LaneId> route{l1};
  Observation obs;
  obs.graph = &straight;
  obs.route = route;
  obs.speed_limit = 20.0;
  obs.ego = testing::state_on_lane(straight, 0, l1, 40, 0.0);
  EXPECT_GT(controller.decide(obs), 0.0);
  obs.ego.speed = 10.0;
  EXPECT_GT(controller.decide(obs), 0.0);
  obs.ego.speed = 20.0;
  EXPECT_NEAR(controller.decide(obs), 0.0, 1e-9);
}

TEST_F(SimulatorTest, EgoStopsBehindStoppedLeader) {
  const ScenarioGenome g = make_genome(straight, {l1, 40}, {{{l1, 140}, 0.0}}, 30);
  const Trace trace = simulate(g, straight, ego);
  ASSERT_FALSE(trace.collision.has_value());
  const auto& last = trace.steps.back();
  EXPECT_NEAR(last[0].speed, 0.0, 1e-3);
  // IDM settles on the minimum gap; discrete steps may undershoot it slightly.
  EXPECT_NEAR(last[1].s - last[0].s - kVehicleLength, 2.0, 0.1);
}

TEST_F(SimulatorTest, LateCutInCollides) {
  // NPC 8 m ahead in the right lane, 8 m/s slower, cutting in immediately.
  ScenarioGenome g = make_genome(straight, {l1, 40}, {{{l0, 40 + kVehicleLength + 8}, 12.0}}, 30);
  g.npcs[0].actions[0] = Action::LaneLeft;
  const Trace trace = simulate(g, straight, ego);
  ASSERT_TRUE(trace.collision.has_value());
  EXPECT_TRUE(trace.collision->ev_fault);
  EXPECT_LT(trace.collision->step, 30);
  EXPECT_EQ(classify_collision(trace, straight).str(), "front|same|KeepLane|ChangingLeft|adjacent_same_dir");
}

TEST_F(SimulatorTest, ObserverSeesOnlyNpcsInRange) {
  BaselineEgo controller(ego, 0.1);
  const std::vector<LaneId> route{l1};
  Observation obs;
  obs.graph = &straight;
  obs.route = route;
  obs.speed_limit = 20.0;
  obs.ego = testing::state_on_lane(straight, 0, l1, 40, 20.0);
  // W1: a vehicle centred in the next lane is not a leader.
  obs.npcs = {testing::state_on_lane(straight, 1, l0, 50, 0.0)};
  EXPECT_FALSE(controller.find_leader(obs).has_value());
  obs.npcs = {testing::state_on_lane(straight, 1, l1, 50, 0.0)};
  const auto leader = controller.find_leader(obs);
  ASSERT_TRUE(leader.has_value());
  EXPECT_NEAR(leader->gap, 10.0 - kVehicleLength, 1e-9);
}

TEST(CollisionCheck, OverlapAndFault) {
  const LaneGraph g = build_template(TemplateId::Straight3, 300, 20);
  const LaneId l1 = g.lane_by_name("L1");
  const VehicleState ev = testing::state_on_lane(g, 0, l1, 50, 10.0);
  EXPECT_TRUE(detect_collision(ev, ev).has_value());
  EXPECT_FALSE(detect_collision(ev, testing::state_on_lane(g, 1, l1, 60, 10.0)).has_value());
  // A faster NPC running into the EV's rear quarter is the NPC's fault.
  const VehicleState rear = testing::state_on_lane(g, 1, l1, 46, 15.0);
  const auto contact = detect_collision(ev, rear);
  ASSERT_TRUE(contact.has_value());
  EXPECT_FALSE(ev_at_fault(ev, rear, contact->point));
  // The EV running into a slower NPC ahead is the EV's fault.
  const VehicleState ahead = testing::state_on_lane(g, 1, l1, 54, 5.0);
  const auto front = detect_collision(ev, ahead);
  ASSERT_TRUE(front.has_value());
  EXPECT_TRUE(ev_at_fault(ev, ahead, front->point));
}

}  // namespace
}  // namespace conflictfuzz
