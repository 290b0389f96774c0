#pragma once

// Hand-built scenarios and traces shared by the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "conflictfuzz/genome.hpp"
#include "conflictfuzz/ledger.hpp"
#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz::testing {

/// A vehicle moving at constant speed along one lane's centreline.
struct LinearMotion {
  LaneId lane;
  double s0 = 0.0;
  double speed = 0.0;
};

inline VehicleState state_on_lane(const LaneGraph& graph, int vehicle_id, LaneId lane, double s, double speed) {
  VehicleState v;
  v.vehicle_id = vehicle_id;
  v.lane = lane;
  v.s = s;
  v.d = 0.0;
  const WorldPose pose = graph.to_world(lane, s, 0.0);
  v.xy = pose.xy;
  v.heading = pose.heading;
  v.speed = speed;
  v.maneuver = {ManeuverKind::KeepLane, 0.0, lane, lane};
  return v;
}

/// Trace of constant-speed vehicles (index 0 is the EV), sampled every dt.
inline Trace linear_trace(const LaneGraph& graph, const std::vector<LinearMotion>& motions, double duration_s,
                          double dt = 0.1) {
  Trace trace;
  trace.dt = dt;
  trace.duration_s = static_cast<int>(std::lround(duration_s));
  const int n_steps = static_cast<int>(std::lround(duration_s / dt));
  for (int n = 0; n <= n_steps; ++n) {
    std::vector<VehicleState> row;
    for (std::size_t i = 0; i < motions.size(); ++i) {
      const auto& m = motions[i];
      row.push_back(state_on_lane(graph, static_cast<int>(i), m.lane, m.s0 + m.speed * n * dt, m.speed));
    }
    trace.steps.push_back(std::move(row));
  }
  return trace;
}

inline NpcChromosome constant_chromosome(int npc_id, LanePosition start, int duration_s, double speed,
                                         Action action = Action::Straight) {
  NpcChromosome c;
  c.npc_id = npc_id;
  c.start = start;
  c.speeds.assign(static_cast<std::size_t>(duration_s), speed);
  c.actions.assign(static_cast<std::size_t>(duration_s), action);
  return c;
}

/// Genome with the EV at `ego` and one constant-speed NPC per entry of `npcs`.
inline ScenarioGenome make_genome(const LaneGraph& graph, LanePosition ego,
                                  const std::vector<std::pair<LanePosition, double>>& npcs, int duration_s) {
  ScenarioGenome g;
  g.scenario_id = "fixture";
  g.template_id = graph.template_id();
  g.duration_s = duration_s;
  g.ego_start = ego;
  g.ego_route = route_from(graph, ego.lane);
  for (std::size_t i = 0; i < npcs.size(); ++i) {
    g.npcs.push_back(constant_chromosome(static_cast<int>(i), npcs[i].first, duration_s, npcs[i].second));
  }
  return g;
}

/// Ledger events for steps 1..n without collisions.
inline std::vector<CampaignEvent> quiet_ledger(int n) {
  std::vector<CampaignEvent> events;
  for (int step = 1; step <= n; ++step) {
    CampaignEvent e;
    e.step = step;
    e.stage = Stage::Collision;
    e.scenario_id = "s" + std::to_string(step);
    events.push_back(e);
  }
  return events;
}

inline void add_collision(CampaignEvent& e, const std::string& type_key, bool ev_fault = true) {
  e.collision = LedgerCollision{0, type_key, ev_fault};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("conflictfuzz_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Upper tail probability of a chi-square statistic.
inline double chi_square_p(double statistic, int dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

inline double chi_square_statistic(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

}  // namespace conflictfuzz::testing
