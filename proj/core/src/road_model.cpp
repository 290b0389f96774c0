#include "conflictfuzz/road_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace conflictfuzz {

namespace {

constexpr double kArclengthTolerance = 1e-9;
constexpr double kCrossingMinDeg = 45.0;
constexpr double kCrossingMaxDeg = 135.0;
constexpr double kOpposingDeg = 135.0;

double degrees(double rad) { return rad * 180.0 / kPi; }

double overall_heading(const Lane& lane) {
  const auto& pts = lane.centerline.points();
  const Vec2 d = pts.back() - pts.front();
  return std::atan2(d.y, d.x);
}

bool contains_id(const std::vector<LaneId>& ids, LaneId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

struct SegmentHit {
  Vec2 point;
  double angle;  // folded to [0, pi]
};

std::optional<SegmentHit> segment_intersection(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1) {
  const Vec2 r = p1 - p0;
  const Vec2 s = q1 - q0;
  const double denom = cross(r, s);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = cross(q0 - p0, s) / denom;
  const double u = cross(q0 - p0, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  const double angle = heading_difference(std::atan2(r.y, r.x), std::atan2(s.y, s.x));
  return SegmentHit{p0 + r * t, angle};
}

std::optional<SegmentHit> first_intersection(const Polyline& a, const Polyline& b) {
  const auto& pa = a.points();
  const auto& pb = b.points();
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      if (auto hit = segment_intersection(pa[i], pa[i + 1], pb[j], pb[j + 1])) return hit;
    }
  }
  return std::nullopt;
}

Lane straight_lane(int id, std::string name, int road, Vec2 from, Vec2 to, double width) {
  return Lane{LaneId{id}, std::move(name), road, Polyline({from, to}), width, {}, {}, {}, {}};
}

void link_neighbors(std::vector<Lane>& lanes, int right, int left) {
  lanes[static_cast<std::size_t>(right)].left_neighbor = LaneId{left};
  lanes[static_cast<std::size_t>(left)].right_neighbor = LaneId{right};
}

}  // namespace

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::Straight3: return "straight3";
    case TemplateId::TwoWay2: return "twoway2";
    case TemplateId::Merge: return "merge";
    case TemplateId::Cross: return "cross";
  }
  return "?";
}

TemplateId parse_template_id(std::string_view text) {
  if (text == "straight3") return TemplateId::Straight3;
  if (text == "twoway2") return TemplateId::TwoWay2;
  if (text == "merge") return TemplateId::Merge;
  if (text == "cross") return TemplateId::Cross;
  throw RoadModelError("unknown template id '" + std::string(text) + "'");
}

std::string_view to_string(LaneRelation rel) {
  switch (rel) {
    case LaneRelation::Same: return "same";
    case LaneRelation::AdjacentSameDir: return "adjacent_same_dir";
    case LaneRelation::Merging: return "merging";
    case LaneRelation::Crossing: return "crossing";
    case LaneRelation::OpposingConstrained: return "opposing_constrained";
    case LaneRelation::OpposingUnconstrained: return "opposing_unconstrained";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Polyline

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw RoadModelError("centerline needs at least two points");
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double seg = norm(points_[i] - points_[i - 1]);
    if (!(seg > 0.0)) throw RoadModelError("centerline arclength must be strictly increasing");
    cumulative_.push_back(cumulative_.back() + seg);
  }
}

std::size_t Polyline::segment_for(double s) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(idx, points_.size() - 2);
}

Polyline::Sample Polyline::sample(double s) const {
  if (s < -kArclengthTolerance || s > length() + kArclengthTolerance) {
    throw RoadModelError("arclength out of range");
  }
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_for(s);
  const Vec2 a = points_[i];
  const Vec2 b = points_[i + 1];
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / seg;
  const Vec2 d = b - a;
  return {a + d * t, std::atan2(d.y, d.x)};
}

Polyline::Projection Polyline::project(Vec2 p) const {
  Projection best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double seg = cumulative_[i + 1] - cumulative_[i];
    const double t = std::clamp(dot(p - a, d) / (seg * seg), 0.0, 1.0);
    const Vec2 foot = a + d * t;
    const double dist = norm(p - foot);
    if (dist < best.distance) {
      const double signed_d = cross(d, p - foot) >= 0.0 ? dist : -dist;
      best = {cumulative_[i] + t * seg, signed_d, dist};
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// LaneGraph

LaneGraph::LaneGraph(TemplateId template_id, double length, double speed_limit, std::vector<Lane> lanes)
    : template_id_(template_id), length_(length), speed_limit_(speed_limit), lanes_(std::move(lanes)) {
  if (!(speed_limit_ > 0.0)) throw RoadModelError("speed limit must be positive");
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    const Lane& l = lanes_[i];
    if (l.id.value != static_cast<int>(i)) throw RoadModelError("lane ids must be dense and ordered");
    if (!(l.width > 0.0)) throw RoadModelError("lane width must be positive: " + l.name);
  }
  for (const Lane& l : lanes_) {
    for (const auto& s : l.successors) {
      if (!contains(s)) throw RoadModelError("dangling successor on lane " + l.name);
    }
    if (l.left_neighbor) {
      if (!contains(*l.left_neighbor)) throw RoadModelError("dangling left neighbor on lane " + l.name);
      if (lane(*l.left_neighbor).right_neighbor != l.id) throw RoadModelError("asymmetric neighbors at " + l.name);
    }
    if (l.right_neighbor) {
      if (!contains(*l.right_neighbor)) throw RoadModelError("dangling right neighbor on lane " + l.name);
      if (lane(*l.right_neighbor).left_neighbor != l.id) throw RoadModelError("asymmetric neighbors at " + l.name);
    }
  }
}

bool LaneGraph::contains(LaneId id) const {
  return id.value >= 0 && static_cast<std::size_t>(id.value) < lanes_.size();
}

const Lane& LaneGraph::lane(LaneId id) const {
  if (!contains(id)) throw RoadModelError("unknown lane id " + std::to_string(id.value));
  return lanes_[static_cast<std::size_t>(id.value)];
}

LaneId LaneGraph::lane_by_name(std::string_view name) const {
  for (const auto& l : lanes_) {
    if (l.name == name) return l.id;
  }
  throw RoadModelError("unknown lane name '" + std::string(name) + "'");
}

WorldPose LaneGraph::to_world(LaneId id, double s, double d) const {
  const auto smp = lane(id).centerline.sample(s);
  const Vec2 left{-std::sin(smp.heading), std::cos(smp.heading)};
  return {smp.point + left * d, smp.heading};
}

LaneCoord LaneGraph::project(LaneId id, Vec2 xy) const {
  const auto p = lane(id).centerline.project(xy);
  return {id, p.s, p.d};
}

bool LaneGraph::same_direction_reachable(LaneId a, LaneId b) const {
  const int road = lane(a).road;
  std::set<int> seen{a.value};
  std::deque<LaneId> open{a};
  while (!open.empty()) {
    const Lane& cur = lane(open.front());
    open.pop_front();
    std::vector<LaneId> next = cur.successors;
    if (cur.left_neighbor) next.push_back(*cur.left_neighbor);
    if (cur.right_neighbor) next.push_back(*cur.right_neighbor);
    for (const Lane& other : lanes_) {
      if (contains_id(other.successors, cur.id)) next.push_back(other.id);
    }
    for (LaneId n : next) {
      if (lane(n).road != road || !seen.insert(n.value).second) continue;
      if (n == b) return true;
      open.push_back(n);
    }
  }
  return false;
}

bool LaneGraph::converges(LaneId a, LaneId b) const {
  const Lane& la = lane(a);
  const Lane& lb = lane(b);
  if (contains_id(la.successors, b) || contains_id(lb.successors, a)) return true;
  auto near = [&](LaneId x, LaneId y) {
    const Lane& lx = lane(x);
    return x == y || lx.left_neighbor == y || lx.right_neighbor == y;
  };
  for (LaneId sa : la.successors) {
    if (near(sa, b)) return true;
    for (LaneId sb : lb.successors) {
      if (near(sa, sb)) return true;
    }
  }
  for (LaneId sb : lb.successors) {
    if (near(sb, a)) return true;
  }
  return false;
}

std::optional<double> LaneGraph::crossing_angle(LaneId a, LaneId b) const {
  if (auto hit = first_intersection(lane(a).centerline, lane(b).centerline)) return hit->angle;
  return std::nullopt;
}

LaneRelation LaneGraph::lane_relation(LaneId a, LaneId b) const {
  const Lane& la = lane(a);
  const Lane& lb = lane(b);
  if (a == b) return LaneRelation::Same;
  const bool same_road = la.road == lb.road;
  if (same_road && (contains_id(la.successors, b) || contains_id(lb.successors, a))) return LaneRelation::Same;
  if (same_road && same_direction_reachable(a, b)) return LaneRelation::AdjacentSameDir;
  if (!same_road && converges(a, b)) return LaneRelation::Merging;
  if (auto angle = crossing_angle(a, b)) {
    const double deg = degrees(*angle);
    if (deg >= kCrossingMinDeg && deg <= kCrossingMaxDeg) return LaneRelation::Crossing;
  }
  const double diff = degrees(heading_difference(overall_heading(la), overall_heading(lb)));
  if (diff > kOpposingDeg) {
    const bool corridor = la.oncoming_group && la.oncoming_group == lb.oncoming_group;
    const bool no_escape = !la.left_neighbor && !la.right_neighbor && !lb.left_neighbor && !lb.right_neighbor;
    return corridor && no_escape ? LaneRelation::OpposingConstrained : LaneRelation::OpposingUnconstrained;
  }
  if (diff < kCrossingMinDeg) return same_road ? LaneRelation::AdjacentSameDir : LaneRelation::Merging;
  return LaneRelation::Crossing;
}

std::optional<Vec2> LaneGraph::convergence_point(LaneId a, LaneId b) const {
  const Lane& la = lane(a);
  const Lane& lb = lane(b);
  for (LaneId sa : la.successors) {
    if (contains_id(lb.successors, sa)) return lane(sa).centerline.points().front();
  }
  if (contains_id(la.successors, b)) return lb.centerline.points().front();
  if (contains_id(lb.successors, a)) return la.centerline.points().front();
  if (auto hit = first_intersection(la.centerline, lb.centerline)) return hit->point;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Templates

LaneGraph build_template(TemplateId id, double length, double speed_limit, double lane_width) {
  if (!(length >= kMinRoadLength)) throw RoadModelError("road length must be at least 100 m");
  if (!(lane_width > 0.0)) throw RoadModelError("lane width must be positive");
  const double w = lane_width;
  std::vector<Lane> lanes;
  switch (id) {
    case TemplateId::Straight3: {
      for (int i = 0; i < 3; ++i) {
        const double y = w * i;
        lanes.push_back(straight_lane(i, "L" + std::to_string(i), 0, {0.0, y}, {length, y}, w));
      }
      link_neighbors(lanes, 0, 1);
      link_neighbors(lanes, 1, 2);
      break;
    }
    case TemplateId::TwoWay2: {
      const double nw = std::min(w, kNarrowLaneWidth);
      lanes.push_back(straight_lane(0, "E", 0, {0.0, 0.0}, {length, 0.0}, nw));
      lanes.push_back(straight_lane(1, "W", 1, {length, nw}, {0.0, nw}, nw));
      lanes[0].oncoming_group = 0;
      lanes[1].oncoming_group = 0;
      break;
    }
    case TemplateId::Merge: {
      const double h = length / 2.0;
      lanes.push_back(straight_lane(0, "M0a", 0, {0.0, 0.0}, {h, 0.0}, w));
      lanes.push_back(straight_lane(1, "M0b", 0, {h, 0.0}, {length, 0.0}, w));
      lanes.push_back(straight_lane(2, "M1a", 0, {0.0, w}, {h, w}, w));
      lanes.push_back(straight_lane(3, "M1b", 0, {h, w}, {length, w}, w));
      // Quadratic ramp that meets the mainline tangentially at x = h. The dense
      // sampling keeps per-vertex turning small enough for sub-millimetre
      // round trips through project().
      const double offset = 4.0 * w;
      constexpr int kRampSegments = 4000;
      std::vector<Vec2> ramp;
      ramp.reserve(kRampSegments + 1);
      for (int i = 0; i <= kRampSegments; ++i) {
        const double x = h * i / kRampSegments;
        const double u = 1.0 - x / h;
        ramp.push_back({x, -offset * u * u});
      }
      lanes.push_back(Lane{LaneId{4}, "R", 1, Polyline(std::move(ramp)), w, {}, {}, {}, {}});
      link_neighbors(lanes, 0, 2);
      link_neighbors(lanes, 1, 3);
      lanes[0].successors = {LaneId{1}};
      lanes[2].successors = {LaneId{3}};
      lanes[4].successors = {LaneId{1}};
      break;
    }
    case TemplateId::Cross: {
      const double c = length / 2.0;
      lanes.push_back(straight_lane(0, "A", 0, {0.0, 0.0}, {length, 0.0}, w));
      lanes.push_back(straight_lane(1, "B", 1, {c, -c}, {c, c}, w));
      break;
    }
  }
  return LaneGraph(id, length, speed_limit, std::move(lanes));
}

}  // namespace conflictfuzz
