#include "conflictfuzz/ego.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conflictfuzz {

BaselineEgo::BaselineEgo(EgoControllerSpec spec, double dt) : spec_(std::move(spec)) {
  const auto lag = static_cast<std::size_t>(std::lround(std::max(0.0, spec_.reaction_delay) / dt));
  pending_.assign(lag, 0.0);
}

std::optional<BaselineEgo::Leader> BaselineEgo::find_leader(const Observation& obs) const {
  const LaneGraph& graph = *obs.graph;
  const VehicleState& ego = obs.ego;

  // The ego lane and, when the route continues, the next lane with its arclength offset.
  std::vector<std::pair<LaneId, double>> corridor{{ego.lane, 0.0}};
  const auto at = std::find(obs.route.begin(), obs.route.end(), ego.lane);
  if (at != obs.route.end() && std::next(at) != obs.route.end()) {
    corridor.emplace_back(*std::next(at), graph.lane(ego.lane).length());
  }

  std::optional<Leader> best;
  for (const auto& npc : obs.npcs) {
    if (spec_.ignore_oncoming && heading_difference(npc.heading, ego.heading) > kPi / 2.0) continue;
    for (const auto& [lane_id, offset] : corridor) {
      const Lane& lane = graph.lane(lane_id);
      const auto proj = lane.centerline.project(npc.xy);
      if (proj.s <= 0.0 && offset > 0.0) continue;
      if (proj.s >= lane.length()) continue;
      const double half = lane.width / 2.0 + (spec_.ignore_outside_lane ? 0.0 : kVehicleWidth / 2.0);
      if (std::abs(proj.d) > half) continue;
      const double ahead = offset + proj.s - ego.s;
      if (ahead > 0.0 && (!best || ahead - kVehicleLength < best->gap)) {
        best = Leader{npc.vehicle_id, ahead - kVehicleLength, npc.speed};
      }
      break;
    }
  }
  return best;
}

double BaselineEgo::decide(const Observation& obs) const {
  const double v = obs.ego.speed;
  const double v0 = obs.speed_limit;
  const double a = spec_.max_accel;
  const double b = spec_.comfortable_decel;
  double accel = a * (1.0 - std::pow(v / v0, 4.0));
  if (const auto leader = find_leader(obs)) {
    const double dv = v - leader->speed;
    const double desired = spec_.min_gap + std::max(0.0, v * spec_.desired_headway + v * dv / (2.0 * std::sqrt(a * b)));
    const double gap = std::max(leader->gap, 0.1);
    accel -= a * (desired / gap) * (desired / gap);
  }
  return std::clamp(accel, -spec_.max_decel, spec_.max_accel);
}

EgoCommand BaselineEgo::step(const Observation& obs) {
  const double decision = decide(obs);
  if (pending_.empty()) return {decision, LaneChangeRequest::None};
  pending_.push_back(decision);
  const double applied = pending_.front();
  pending_.pop_front();
  return {applied, LaneChangeRequest::None};
}

std::unique_ptr<EgoController> make_ego_controller(const EgoControllerSpec& spec, double dt) {
  if (spec.name != "baseline") throw std::invalid_argument("unknown ego controller '" + spec.name + "'");
  return std::make_unique<BaselineEgo>(spec, dt);
}

}  // namespace conflictfuzz
