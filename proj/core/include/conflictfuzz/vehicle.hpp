#pragma once

#include <string_view>

#include "conflictfuzz/geometry.hpp"
#include "conflictfuzz/road_model.hpp"

namespace conflictfuzz {

inline constexpr double kVehicleLength = 4.5;
inline constexpr double kVehicleWidth = 2.0;

enum class ManeuverKind { KeepLane, ChangingLeft, ChangingRight };

std::string_view to_string(ManeuverKind m);
ManeuverKind parse_maneuver(std::string_view text);

struct Maneuver {
  ManeuverKind kind = ManeuverKind::KeepLane;
  double progress = 0.0;  // 0..1 while changing lanes
  LaneId from_lane;
  LaneId to_lane;

  bool operator==(const Maneuver&) const = default;
};

struct VehicleState {
  int vehicle_id = 0;  // 0 is the ego vehicle, NPC k is k + 1
  LaneId lane;
  double s = 0.0;
  double d = 0.0;
  Vec2 xy;
  double heading = 0.0;
  double speed = 0.0;
  Maneuver maneuver;

  bool changing_lanes() const { return maneuver.kind != ManeuverKind::KeepLane; }

  /// The lane a vehicle is committed to: its origin lane while a change is in progress.
  LaneId base_lane() const { return changing_lanes() ? maneuver.from_lane : lane; }

  OrientedBox footprint() const { return {xy, heading, kVehicleLength, kVehicleWidth}; }

  bool operator==(const VehicleState&) const = default;
};

}  // namespace conflictfuzz
