#pragma once

#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/vehicle.hpp"

namespace conflictfuzz {

/// Parameters of the controller under test. The controller is opaque to the
/// search: it only ever sees the same observation a real stack would.
struct EgoControllerSpec {
  std::string name = "baseline";
  double desired_headway = 1.5;    // s
  double min_gap = 2.0;            // m, standstill bumper gap
  double max_accel = 2.0;          // m/s^2
  double comfortable_decel = 3.0;  // m/s^2
  double max_decel = 6.0;          // m/s^2, emergency cap
  double reaction_delay = 0.5;     // s between decision and actuation (W3)
  double perception_range = 60.0;  // m
  bool ignore_outside_lane = true;  // W1: leaders must have their centre inside the ego lane
  bool ignore_oncoming = true;      // W2: opposing traffic is never a leader

  bool operator==(const EgoControllerSpec&) const = default;
};

struct Observation {
  double time = 0.0;
  const LaneGraph* graph = nullptr;
  VehicleState ego;
  std::vector<VehicleState> npcs;  // only those within perception range
  std::span<const LaneId> route;
  double speed_limit = 0.0;
};

enum class LaneChangeRequest { None, Left, Right };

struct EgoCommand {
  double accel = 0.0;
  LaneChangeRequest lane_change = LaneChangeRequest::None;
};

class EgoController {
 public:
  virtual ~EgoController() = default;
  virtual EgoCommand step(const Observation& obs) = 0;
};

/// Lane keeping plus IDM car following against the nearest same-lane leader.
/// Known weaknesses: W1 late reaction to cut-ins, W2 blind to oncoming
/// traffic, W3 actuation lags the decision by `reaction_delay`.
class BaselineEgo final : public EgoController {
 public:
  BaselineEgo(EgoControllerSpec spec, double dt);

  EgoCommand step(const Observation& obs) override;

  /// Undelayed IDM decision for an observation.
  double decide(const Observation& obs) const;

  struct Leader {
    int vehicle_id;
    double gap;    // bumper to bumper, m
    double speed;  // m/s
  };
  std::optional<Leader> find_leader(const Observation& obs) const;

 private:
  EgoControllerSpec spec_;
  std::deque<double> pending_;
};

std::unique_ptr<EgoController> make_ego_controller(const EgoControllerSpec& spec, double dt);

}  // namespace conflictfuzz
