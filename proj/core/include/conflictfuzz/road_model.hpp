#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conflictfuzz/geometry.hpp"

namespace conflictfuzz {

class RoadModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LaneId {
  int value = -1;
  friend constexpr auto operator<=>(const LaneId&, const LaneId&) = default;
};

enum class TemplateId { Straight3, TwoWay2, Merge, Cross };

std::string_view to_string(TemplateId id);
TemplateId parse_template_id(std::string_view text);

enum class LaneRelation {
  Same,
  AdjacentSameDir,
  Merging,
  Crossing,
  OpposingConstrained,
  OpposingUnconstrained,
};

std::string_view to_string(LaneRelation rel);

/// Piecewise-linear curve parameterised by arclength.
class Polyline {
 public:
  explicit Polyline(std::vector<Vec2> points);

  double length() const { return cumulative_.back(); }
  const std::vector<Vec2>& points() const { return points_; }

  struct Sample {
    Vec2 point;
    double heading;
  };
  Sample sample(double s) const;

  struct Projection {
    double s;
    double d;  // signed, positive to the left of travel
    double distance;
  };
  Projection project(Vec2 p) const;

 private:
  std::size_t segment_for(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

struct Lane {
  LaneId id;
  std::string name;
  int road = 0;  // lanes sharing a road id and direction form one carriageway
  Polyline centerline;
  double width = 3.5;
  std::optional<LaneId> left_neighbor;
  std::optional<LaneId> right_neighbor;
  std::vector<LaneId> successors;
  std::optional<int> oncoming_group;

  double length() const { return centerline.length(); }
};

struct WorldPose {
  Vec2 xy;
  double heading;
};

struct LaneCoord {
  LaneId lane;
  double s;
  double d;
};

/// Immutable lane graph. Construction validates id resolution, neighbour
/// symmetry and lane widths.
class LaneGraph {
 public:
  LaneGraph(TemplateId template_id, double length, double speed_limit, std::vector<Lane> lanes);

  TemplateId template_id() const { return template_id_; }
  double length() const { return length_; }
  double speed_limit() const { return speed_limit_; }
  const std::vector<Lane>& lanes() const { return lanes_; }

  bool contains(LaneId id) const;
  const Lane& lane(LaneId id) const;
  LaneId lane_by_name(std::string_view name) const;

  /// Point at arclength `s` offset `d` to the left; heading is the centreline tangent.
  WorldPose to_world(LaneId lane, double s, double d) const;
  LaneCoord project(LaneId lane, Vec2 xy) const;

  LaneRelation lane_relation(LaneId a, LaneId b) const;

  /// Where two lanes' paths meet: the transversal centreline intersection, or
  /// the entry of a shared successor. Empty when the paths never meet.
  std::optional<Vec2> convergence_point(LaneId a, LaneId b) const;

 private:
  bool same_direction_reachable(LaneId a, LaneId b) const;
  bool converges(LaneId a, LaneId b) const;
  std::optional<double> crossing_angle(LaneId a, LaneId b) const;

  TemplateId template_id_;
  double length_;
  double speed_limit_;
  std::vector<Lane> lanes_;
};

inline constexpr double kDefaultLaneWidth = 3.5;
inline constexpr double kNarrowLaneWidth = 2.5;
inline constexpr double kMinRoadLength = 100.0;

LaneGraph build_template(TemplateId id, double length, double speed_limit, double lane_width = kDefaultLaneWidth);

}  // namespace conflictfuzz
