#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/simulator.hpp"
#include "conflictfuzz/vehicle.hpp"

namespace conflictfuzz {

enum class ImpactZone { Front, Rear, Left, Right };
enum class HeadingBucket { Same, Opposite, Crossing };

std::string_view to_string(ImpactZone z);
std::string_view to_string(HeadingBucket h);

/// Categorical description of a collision; two collisions are the same type
/// exactly when their keys compare equal.
struct CollisionTypeKey {
  ImpactZone impact_zone_ev = ImpactZone::Front;
  HeadingBucket npc_rel_heading = HeadingBucket::Same;
  ManeuverKind ev_maneuver_at_impact = ManeuverKind::KeepLane;
  ManeuverKind npc_maneuver_at_impact = ManeuverKind::KeepLane;
  LaneRelation lane_relation_1s_prior = LaneRelation::Same;

  friend auto operator<=>(const CollisionTypeKey&, const CollisionTypeKey&) = default;

  /// "front|same|KeepLane|ChangingLeft|adjacent_same_dir"
  std::string str() const;
  static CollisionTypeKey parse(std::string_view text);
};

/// Where the contact point sits around the EV: four 90-degree sectors
/// centred on the forward, rearward, left and right axes.
ImpactZone impact_zone(const VehicleState& ev, Vec2 contact_point);

/// same within 30 degrees, opposite beyond 150 degrees, crossing otherwise.
HeadingBucket heading_bucket(double relative_heading);

/// Classifies the collision ending `trace`. The lane relation is read one
/// second before impact, or at the first step when the trace is shorter.
CollisionTypeKey classify_collision(const Trace& trace, const LaneGraph& graph);

}  // namespace conflictfuzz
