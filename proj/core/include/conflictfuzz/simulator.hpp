#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/genome.hpp"
#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/vehicle.hpp"

namespace conflictfuzz {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulationParams {
  double dt = 0.1;
  double npc_max_accel = 6.0;         // m/s^2, tracking rate limit
  double lane_change_duration = 2.0;  // s
  std::optional<double> ego_initial_speed;  // defaults to the speed limit

  bool operator==(const SimulationParams&) const = default;
};

struct CollisionEvent {
  int step = 0;
  Vec2 ev_contact_point;
  Vec2 normal;
  int npc_id = 0;  // genome NPC index
  double relative_heading = 0.0;
  bool ev_fault = true;

  bool operator==(const CollisionEvent&) const = default;
};

enum class TerminationReason { Collision, DurationExpired };

std::string_view to_string(TerminationReason r);

struct Trace {
  double dt = 0.1;
  int duration_s = 0;
  std::vector<std::vector<VehicleState>> steps;  // steps[n][0] is the ego vehicle
  std::optional<CollisionEvent> collision;
  TerminationReason terminated_reason = TerminationReason::DurationExpired;

  std::size_t vehicle_count() const { return steps.empty() ? 0 : steps.front().size(); }
  double time_at(std::size_t step) const { return static_cast<double>(step) * dt; }
  double end_time() const { return steps.empty() ? 0.0 : time_at(steps.size() - 1); }

  bool operator==(const Trace&) const = default;
};

/// Steps per second for `dt`; throws unless 1/dt is an integer.
int steps_per_second(double dt);

/// Runs the genome to duration expiry or the first EV-involved footprint overlap.
Trace simulate(const ScenarioGenome& genome, const LaneGraph& graph, const EgoControllerSpec& ego,
               const SimulationParams& params = {});

std::optional<Contact> detect_collision(const VehicleState& a, const VehicleState& b);

/// False when the NPC ran into the ego vehicle's rear quarter faster than the
/// ego vehicle was travelling.
bool ev_at_fault(const VehicleState& ev, const VehicleState& npc, Vec2 contact_point);

}  // namespace conflictfuzz
