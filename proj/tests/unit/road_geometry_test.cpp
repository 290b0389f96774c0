#include <gtest/gtest.h>

#include <cmath>

#include "conflictfuzz/geometry.hpp"
#include "conflictfuzz/random.hpp"
#include "conflictfuzz/road_model.hpp"

namespace conflictfuzz {
namespace {

TEST(RoadTemplates, Straight3HasThreeMutuallyReachableLanes) {
  const LaneGraph g = build_template(TemplateId::Straight3, 500, 20);
  ASSERT_EQ(g.lanes().size(), 3u);
  for (const auto& lane : g.lanes()) EXPECT_NEAR(lane.length(), 500.0, 1e-9);
  const LaneId l0 = g.lane_by_name("L0"), l1 = g.lane_by_name("L1"), l2 = g.lane_by_name("L2");
  EXPECT_EQ(g.lane(l0).left_neighbor, l1);
  EXPECT_EQ(g.lane(l1).left_neighbor, l2);
  EXPECT_EQ(g.lane(l2).right_neighbor, l1);
  EXPECT_FALSE(g.lane(l0).right_neighbor.has_value());
  EXPECT_EQ(g.lane_relation(l0, l2), LaneRelation::AdjacentSameDir);
}

TEST(RoadTemplates, TwoWayHasNoNeighboursAndSharesOncomingGroup) {
  const LaneGraph g = build_template(TemplateId::TwoWay2, 500, 20);
  ASSERT_EQ(g.lanes().size(), 2u);
  for (const auto& lane : g.lanes()) {
    EXPECT_FALSE(lane.left_neighbor.has_value());
    EXPECT_FALSE(lane.right_neighbor.has_value());
    ASSERT_TRUE(lane.oncoming_group.has_value());
  }
  EXPECT_EQ(g.lanes()[0].oncoming_group, g.lanes()[1].oncoming_group);
  EXPECT_EQ(g.lane_relation(g.lane_by_name("E"), g.lane_by_name("W")), LaneRelation::OpposingConstrained);
}

TEST(RoadTemplates, CrossCentrelinesIntersectOnce) {
  const LaneGraph g = build_template(TemplateId::Cross, 200, 15);
  ASSERT_EQ(g.lanes().size(), 2u);
  const LaneId a = g.lane_by_name("A"), b = g.lane_by_name("B");
  EXPECT_EQ(g.lane_relation(a, b), LaneRelation::Crossing);
  const auto p = g.convergence_point(a, b);
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR(p->x, 100.0, 1e-9);
  EXPECT_NEAR(p->y, 0.0, 1e-9);
}

TEST(RoadTemplates, MergeRampMergesIntoRightLane) {
  const LaneGraph g = build_template(TemplateId::Merge, 300, 20);
  EXPECT_EQ(g.lane_relation(g.lane_by_name("R"), g.lane_by_name("M0a")), LaneRelation::Merging);
}

TEST(RoadTemplates, RejectsShortRoads) {
  EXPECT_THROW(build_template(TemplateId::Straight3, 50, 20), RoadModelError);
}

TEST(RoadTemplates, ParseRoundTrip) {
  for (auto id : {TemplateId::Straight3, TemplateId::TwoWay2, TemplateId::Merge, TemplateId::Cross}) {
    EXPECT_EQ(parse_template_id(to_string(id)), id);
  }
  EXPECT_THROW(parse_template_id("roundabout"), RoadModelError);
}

TEST(ToWorld, StraightLaneOffsets) {
  const LaneGraph g = build_template(TemplateId::Straight3, 500, 20);
  const LaneId l1 = g.lane_by_name("L1");
  const double y = g.to_world(l1, 0, 0).xy.y;
  const WorldPose p = g.to_world(l1, 10, 0);
  EXPECT_DOUBLE_EQ(p.xy.x, 10.0);
  EXPECT_DOUBLE_EQ(p.xy.y, y);
  EXPECT_DOUBLE_EQ(p.heading, 0.0);
  const WorldPose q = g.to_world(l1, 10, 1.0);
  EXPECT_DOUBLE_EQ(q.xy.x, 10.0);
  EXPECT_DOUBLE_EQ(q.xy.y, y + 1.0);
}

TEST(ToWorld, CurvedRampFollowsArclength) {
  const LaneGraph g = build_template(TemplateId::Merge, 300, 20);
  const LaneId ramp = g.lane_by_name("R");
  const double mid = g.lane(ramp).length() / 2;
  const double eps = 1e-3;
  const Vec2 a = g.to_world(ramp, mid, 0).xy;
  const Vec2 b = g.to_world(ramp, mid + eps, 0).xy;
  EXPECT_NEAR(norm(b - a), eps, 1e-9);
}

TEST(ToWorld, ProjectInvertsToWorld) {
  Rng rng(5);
  for (auto id : {TemplateId::Straight3, TemplateId::TwoWay2, TemplateId::Merge, TemplateId::Cross}) {
    const LaneGraph g = build_template(id, 300, 20);
    for (int i = 0; i < 200; ++i) {
      const Lane& lane = g.lanes()[rng.index(g.lanes().size())];
      const double s = rng.uniform(1.0, lane.length() - 1.0);
      const double d = rng.uniform(-1.0, 1.0);
      const LaneCoord c = g.project(lane.id, g.to_world(lane.id, s, d).xy);
      EXPECT_NEAR(c.s, s, 1e-6);
      EXPECT_NEAR(c.d, d, 1e-6);
    }
  }
}

TEST(LaneRelation, IsSymmetricAndReflexive) {
  for (auto id : {TemplateId::Straight3, TemplateId::TwoWay2, TemplateId::Merge, TemplateId::Cross}) {
    const LaneGraph g = build_template(id, 300, 20);
    for (const auto& a : g.lanes()) {
      EXPECT_EQ(g.lane_relation(a.id, a.id), LaneRelation::Same);
      for (const auto& b : g.lanes()) EXPECT_EQ(g.lane_relation(a.id, b.id), g.lane_relation(b.id, a.id));
    }
  }
}

TEST(Geometry, IdenticalBoxesOverlap) {
  const OrientedBox a{{0, 0}, 0.3};
  EXPECT_TRUE(intersect(a, a).has_value());
}

TEST(Geometry, BoxesTenMetresApartDoNotOverlap) {
  EXPECT_FALSE(intersect(OrientedBox{{0, 0}, 0}, OrientedBox{{10, 0}, 0}).has_value());
}

TEST(Geometry, TouchingBoxesDoNotOverlap) {
  EXPECT_FALSE(intersect(OrientedBox{{0, 0}, 0}, OrientedBox{{4.5, 0}, 0}).has_value());
}

/// Dense point sampling over the boundary and interior of one box.
bool sampled_overlap(const OrientedBox& a, const OrientedBox& b) {
  auto inside = [](const OrientedBox& box, Vec2 p) {
    const Vec2 u = unit_from_heading(box.heading);
    const Vec2 v{-u.y, u.x};
    const Vec2 r = p - box.center;
    return std::abs(dot(r, u)) < box.length / 2 && std::abs(dot(r, v)) < box.width / 2;
  };
  const auto check = [&](const OrientedBox& src, const OrientedBox& dst) {
    const Vec2 u = unit_from_heading(src.heading);
    const Vec2 v{-u.y, u.x};
    constexpr int kN = 100;  // 10^4 samples per box
    for (int i = 0; i < kN; ++i) {
      for (int j = 0; j < kN; ++j) {
        const double a1 = (i + 0.5) / kN - 0.5;
        const double a2 = (j + 0.5) / kN - 0.5;
        if (inside(dst, src.center + u * (a1 * src.length) + v * (a2 * src.width))) return true;
      }
    }
    return false;
  };
  return check(a, b) || check(b, a);
}

TEST(Geometry, SeparatingAxisAgreesWithSampling) {
  Rng rng(42);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox a{{0, 0}, rng.uniform(-kPi, kPi)};
    const OrientedBox b{{rng.uniform(-6, 6), rng.uniform(-6, 6)}, rng.uniform(-kPi, kPi)};
    const bool sat = intersect(a, b).has_value();
    const bool sampled = sampled_overlap(a, b);
    if (sat == sampled) {
      ++checked;
      continue;
    }
    // Sampling can only miss slivers thinner than its grid.
    EXPECT_TRUE(sat && !sampled) << "sampling saw an overlap the separating-axis test missed";
    EXPECT_LT(intersect(a, b)->depth, 0.06);
  }
  EXPECT_GT(checked, 990);
}

TEST(Geometry, ClipAreaOfHalfOverlappingSquares) {
  const Polygon a{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  const Polygon b{{1, 0}, {3, 0}, {3, 2}, {1, 2}};
  EXPECT_NEAR(polygon_area(clip_convex(a, b)), 2.0, 1e-12);
}

TEST(Geometry, WrapAngle) {
  EXPECT_NEAR(wrap_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-12);
  EXPECT_NEAR(heading_difference(0.1, -0.1), 0.2, 1e-12);
  EXPECT_NEAR(heading_difference(kPi - 0.1, -kPi + 0.1), 0.2, 1e-12);
}

}  // namespace
}  // namespace conflictfuzz
