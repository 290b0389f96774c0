#include "conflictfuzz/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace conflictfuzz {

namespace {

struct Agent {
  VehicleState state;
  std::vector<LaneId> route;  // ego only
};

double smoothstep(double p) { return p * p * (3.0 - 2.0 * p); }
double smoothstep_rate(double p) { return 6.0 * p * (1.0 - p); }

double lateral_separation(const LaneGraph& graph, LaneId a, LaneId b) {
  return (graph.lane(a).width + graph.lane(b).width) / 2.0;
}

std::optional<LaneId> next_lane(const LaneGraph& graph, LaneId lane, const std::vector<LaneId>& route) {
  const auto at = std::find(route.begin(), route.end(), lane);
  if (at != route.end() && std::next(at) != route.end()) return *std::next(at);
  const auto& succ = graph.lane(lane).successors;
  if (succ.empty()) return std::nullopt;
  return succ.front();
}

/// Offset from the lane the vehicle currently occupies, and heading rate, during a change.
void apply_lateral(const LaneGraph& graph, VehicleState& v, double change_duration) {
  if (!v.changing_lanes()) {
    v.d = 0.0;
    return;
  }
  const double sign = v.maneuver.kind == ManeuverKind::ChangingLeft ? 1.0 : -1.0;
  const double sep = lateral_separation(graph, v.maneuver.from_lane, v.maneuver.to_lane);
  const double p = v.maneuver.progress;
  if (p < 0.5) {
    v.lane = v.maneuver.from_lane;
    v.d = sign * sep * smoothstep(p);
  } else {
    v.lane = v.maneuver.to_lane;
    v.d = -sign * sep * (1.0 - smoothstep(p));
  }
  (void)change_duration;
}

void place(const LaneGraph& graph, VehicleState& v, double change_duration) {
  const auto pose = graph.to_world(v.lane, v.s, v.d);
  v.xy = pose.xy;
  v.heading = pose.heading;
  if (v.changing_lanes()) {
    const double sign = v.maneuver.kind == ManeuverKind::ChangingLeft ? 1.0 : -1.0;
    const double sep = lateral_separation(graph, v.maneuver.from_lane, v.maneuver.to_lane);
    const double lateral_rate = sign * sep * smoothstep_rate(v.maneuver.progress) / change_duration;
    v.heading = wrap_angle(v.heading + std::atan2(lateral_rate, std::max(v.speed, 1.0)));
  }
}

/// Moves `v` across lane ends. Returns false when the road ends.
bool advance_lanes(const LaneGraph& graph, VehicleState& v, const std::vector<LaneId>& route) {
  while (v.s > graph.lane(v.lane).length()) {
    const auto next = next_lane(graph, v.lane, route);
    if (!next) {
      v.s = graph.lane(v.lane).length();
      return false;
    }
    v.s -= graph.lane(v.lane).length();
    if (v.changing_lanes()) {
      const auto from = next_lane(graph, v.maneuver.from_lane, {});
      const auto to = next_lane(graph, v.maneuver.to_lane, {});
      if (from && to) {
        v.maneuver.from_lane = *from;
        v.maneuver.to_lane = *to;
      } else {
        v.maneuver = Maneuver{ManeuverKind::KeepLane, 0.0, *next, *next};
      }
    }
    v.lane = *next;
  }
  return true;
}

double target_speed(const NpcChromosome& c, double t) {
  const int last = c.duration() - 1;
  const double clamped = std::clamp(t, 0.0, static_cast<double>(last));
  const int i = std::min(static_cast<int>(std::floor(clamped)), last);
  if (i >= last) return c.speeds[static_cast<std::size_t>(last)];
  const double frac = clamped - i;
  const double a = c.speeds[static_cast<std::size_t>(i)];
  const double b = c.speeds[static_cast<std::size_t>(i) + 1];
  return a + (b - a) * frac;
}

VehicleState initial_state(const LaneGraph& graph, int id, LanePosition start, double speed) {
  VehicleState v;
  v.vehicle_id = id;
  v.lane = start.lane;
  v.s = start.s;
  v.d = 0.0;
  v.speed = speed;
  v.maneuver = Maneuver{ManeuverKind::KeepLane, 0.0, start.lane, start.lane};
  const auto pose = graph.to_world(v.lane, v.s, 0.0);
  v.xy = pose.xy;
  v.heading = pose.heading;
  return v;
}

bool boxes_overlap(const VehicleState& a, const VehicleState& b) {
  return intersect(a.footprint(), b.footprint()).has_value();
}

}  // namespace

std::string_view to_string(ManeuverKind m) {
  switch (m) {
    case ManeuverKind::KeepLane: return "KeepLane";
    case ManeuverKind::ChangingLeft: return "ChangingLeft";
    case ManeuverKind::ChangingRight: return "ChangingRight";
  }
  return "?";
}

ManeuverKind parse_maneuver(std::string_view text) {
  if (text == "KeepLane") return ManeuverKind::KeepLane;
  if (text == "ChangingLeft") return ManeuverKind::ChangingLeft;
  if (text == "ChangingRight") return ManeuverKind::ChangingRight;
  throw std::invalid_argument("unknown maneuver '" + std::string(text) + "'");
}

std::string_view to_string(TerminationReason r) {
  return r == TerminationReason::Collision ? "collision" : "duration_expired";
}

int steps_per_second(double dt) {
  if (!(dt > 0.0)) throw SimulationError("dt must be positive");
  const double inv = 1.0 / dt;
  const long rounded = std::lround(inv);
  if (rounded < 1 || std::abs(inv - static_cast<double>(rounded)) > 1e-6) {
    throw SimulationError("dt must divide one second");
  }
  return static_cast<int>(rounded);
}

std::optional<Contact> detect_collision(const VehicleState& a, const VehicleState& b) {
  return intersect(a.footprint(), b.footprint());
}

bool ev_at_fault(const VehicleState& ev, const VehicleState& npc, Vec2 contact_point) {
  const Vec2 forward = unit_from_heading(ev.heading);
  const double local_x = dot(contact_point - ev.xy, forward);
  const bool rear_quarter = local_x < -kVehicleLength / 4.0;
  const double npc_along = dot(unit_from_heading(npc.heading) * npc.speed, forward);
  return !(rear_quarter && npc_along > ev.speed);
}

Trace simulate(const ScenarioGenome& genome, const LaneGraph& graph, const EgoControllerSpec& ego_spec,
               const SimulationParams& params) {
  validate(genome, graph);
  const int sps = steps_per_second(params.dt);
  const int n_steps = genome.duration_s * sps;
  const double dt = params.dt;
  const double limit = graph.speed_limit();
  const double max_dv = params.npc_max_accel * dt;
  const double change_rate = dt / params.lane_change_duration;

  auto controller = make_ego_controller(ego_spec, dt);

  std::vector<Agent> agents;
  agents.push_back({initial_state(graph, 0, genome.ego_start, std::clamp(params.ego_initial_speed.value_or(limit), 0.0, limit)),
                    genome.ego_route});
  for (std::size_t k = 0; k < genome.npcs.size(); ++k) {
    const auto& c = genome.npcs[k];
    agents.push_back({initial_state(graph, static_cast<int>(k) + 1, c.start, c.speeds.front()), {}});
  }

  Trace trace;
  trace.dt = dt;
  trace.duration_s = genome.duration_s;
  trace.steps.reserve(static_cast<std::size_t>(n_steps) + 1);

  auto snapshot = [&] {
    std::vector<VehicleState> row;
    row.reserve(agents.size());
    for (const auto& a : agents) row.push_back(a.state);
    trace.steps.push_back(std::move(row));
  };
  auto check_collision = [&](int step) {
    const VehicleState& ev = agents[0].state;
    for (std::size_t k = 1; k < agents.size(); ++k) {
      if (const auto contact = detect_collision(ev, agents[k].state)) {
        const VehicleState& npc = agents[k].state;
        trace.collision = CollisionEvent{step,
                                         contact->point,
                                         contact->normal,
                                         static_cast<int>(k) - 1,
                                         wrap_angle(npc.heading - ev.heading),
                                         ev_at_fault(ev, npc, contact->point)};
        trace.terminated_reason = TerminationReason::Collision;
        return true;
      }
    }
    return false;
  };

  snapshot();
  if (check_collision(0)) return trace;

  for (int n = 0; n < n_steps; ++n) {
    const double t_next = (n + 1) * dt;

    // Ego decision from the current state.
    Observation obs;
    obs.time = n * dt;
    obs.graph = &graph;
    obs.ego = agents[0].state;
    obs.route = agents[0].route;
    obs.speed_limit = limit;
    for (std::size_t k = 1; k < agents.size(); ++k) {
      if (norm(agents[k].state.xy - obs.ego.xy) <= ego_spec.perception_range) obs.npcs.push_back(agents[k].state);
    }
    const EgoCommand cmd = controller->step(obs);

    {
      VehicleState& ev = agents[0].state;
      const double v_new = std::clamp(ev.speed + cmd.accel * dt, 0.0, limit);
      ev.s += 0.5 * (ev.speed + v_new) * dt;
      ev.speed = v_new;
      if (!advance_lanes(graph, ev, agents[0].route)) ev.speed = 0.0;
      place(graph, ev, params.lane_change_duration);
    }

    for (std::size_t k = 1; k < agents.size(); ++k) {
      const NpcChromosome& chrom = genome.npcs[k - 1];
      const VehicleState before = agents[k].state;
      VehicleState v = before;

      if (n % sps == 0) {
        const int second = n / sps;
        if (second < chrom.duration() && !v.changing_lanes()) {
          const Action act = chrom.actions[static_cast<std::size_t>(second)];
          const Lane& lane = graph.lane(v.lane);
          // Illegal requests (no neighbour in that direction) are dropped.
          if (act == Action::LaneLeft && lane.left_neighbor) {
            v.maneuver = Maneuver{ManeuverKind::ChangingLeft, 0.0, v.lane, *lane.left_neighbor};
          } else if (act == Action::LaneRight && lane.right_neighbor) {
            v.maneuver = Maneuver{ManeuverKind::ChangingRight, 0.0, v.lane, *lane.right_neighbor};
          }
        }
      }

      const double target = target_speed(chrom, t_next);
      const double v_new = std::clamp(v.speed + std::clamp(target - v.speed, -max_dv, max_dv), 0.0, limit);
      v.s += 0.5 * (v.speed + v_new) * dt;
      v.speed = v_new;

      if (v.changing_lanes()) {
        v.maneuver.progress = std::min(1.0, v.maneuver.progress + change_rate);
        if (v.maneuver.progress >= 1.0 - 1e-12) {
          v.lane = v.maneuver.to_lane;
          v.maneuver = Maneuver{ManeuverKind::KeepLane, 0.0, v.lane, v.lane};
        }
      }
      // Lateral offset is expressed on the origin lane until the midpoint.
      if (v.changing_lanes()) v.lane = v.maneuver.progress < 0.5 ? v.maneuver.from_lane : v.maneuver.to_lane;
      if (!advance_lanes(graph, v, {})) v.speed = 0.0;
      apply_lateral(graph, v, params.lane_change_duration);
      if (!v.changing_lanes()) v.maneuver.from_lane = v.maneuver.to_lane = v.lane;
      place(graph, v, params.lane_change_duration);

      // NPCs never drive into one another; a blocked NPC waits in place.
      bool blocked = false;
      for (std::size_t j = 1; j < agents.size() && !blocked; ++j) {
        if (j == k) continue;
        if (boxes_overlap(v, agents[j].state) && !boxes_overlap(before, agents[j].state)) blocked = true;
      }
      if (blocked) {
        v = before;
        v.speed = std::max(0.0, before.speed - max_dv);
      }
      agents[k].state = v;
    }

    snapshot();
    if (check_collision(n + 1)) return trace;
  }
  return trace;
}

}  // namespace conflictfuzz
