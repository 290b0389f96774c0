#include "conflictfuzz/genome.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conflictfuzz {

namespace {

constexpr double kStraightProbability = 0.8;
constexpr int kMaxPlacementAttempts = 100;
constexpr double kSameSpeedTolerance = 1e-9;

double clamp_speed(double v, double limit) { return std::clamp(quantize_gene(std::clamp(v, 0.0, limit)), 0.0, limit); }

int clamp_anchor(int t, int duration) { return std::clamp(t, 0, duration - 1); }

NpcChromosome shift_window(const NpcChromosome& chrom, int first, int last, double delta, double limit) {
  NpcChromosome out = chrom;
  for (int i = std::max(first, 0); i <= last && i < out.duration(); ++i) {
    out.speeds[static_cast<std::size_t>(i)] = clamp_speed(out.speeds[static_cast<std::size_t>(i)] + delta, limit);
  }
  return out;
}

Vec2 world_of(const LaneGraph& graph, const LanePosition& p) { return graph.to_world(p.lane, p.s, 0.0).xy; }

bool separated(const LaneGraph& graph, const LanePosition& p, const std::vector<LanePosition>& others) {
  const Vec2 xy = world_of(graph, p);
  return std::all_of(others.begin(), others.end(),
                     [&](const LanePosition& o) { return norm(world_of(graph, o) - xy) >= kMinStartSeparation; });
}

Action random_action(Rng& rng) {
  const double r = rng.uniform();
  if (r < kStraightProbability) return Action::Straight;
  return r < kStraightProbability + (1.0 - kStraightProbability) / 2.0 ? Action::LaneLeft : Action::LaneRight;
}

double random_speed(Rng& rng, double limit) {
  const auto steps = static_cast<std::size_t>(std::floor(limit / kInitialSpeedStep + 1e-9));
  return static_cast<double>(rng.index(steps + 1)) * kInitialSpeedStep;
}

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Straight: return "Straight";
    case Action::LaneLeft: return "LaneLeft";
    case Action::LaneRight: return "LaneRight";
  }
  return "?";
}

Action parse_action(std::string_view text) {
  if (text == "Straight") return Action::Straight;
  if (text == "LaneLeft") return Action::LaneLeft;
  if (text == "LaneRight") return Action::LaneRight;
  throw GenomeError("unknown action '" + std::string(text) + "'");
}

std::string_view to_string(PlacementPolicy p) { return p == PlacementPolicy::Fixed ? "fixed" : "random"; }

PlacementPolicy parse_placement_policy(std::string_view text) {
  if (text == "fixed") return PlacementPolicy::Fixed;
  if (text == "random") return PlacementPolicy::Random;
  throw GenomeError("unknown placement policy '" + std::string(text) + "'");
}

// Integer-over-1000 division is correctly rounded, so the result is the same
// double strtod produces for the 3-decimal text.
double quantize_gene(double v) { return std::round(v * 1000.0) / 1000.0; }

std::vector<LaneId> route_from(const LaneGraph& graph, LaneId start) {
  std::vector<LaneId> route{start};
  while (!graph.lane(route.back()).successors.empty() && route.size() <= graph.lanes().size()) {
    route.push_back(graph.lane(route.back()).successors.front());
  }
  return route;
}

Placement default_placement(const LaneGraph& graph) {
  const double len = graph.length();
  auto at = [&](std::string_view name, double s) {
    const LaneId id = graph.lane_by_name(name);
    return LanePosition{id, std::clamp(s, 0.0, graph.lane(id).length())};
  };
  Placement p;
  switch (graph.template_id()) {
    case TemplateId::Straight3:
      p.ego_start = at("L1", 40.0);
      p.npc_starts = {at("L0", 60.0), at("L2", 75.0), at("L1", 95.0), at("L0", 110.0)};
      break;
    case TemplateId::TwoWay2:
      p.ego_start = at("E", 40.0);
      p.npc_starts = {at("E", 80.0), at("W", len / 2.0), at("E", 110.0), at("W", len / 2.0 - 40.0)};
      break;
    case TemplateId::Merge:
      p.ego_start = at("M0a", 20.0);
      p.npc_starts = {at("R", 25.0), at("M1a", 45.0), at("M0a", 60.0), at("R", 5.0)};
      break;
    case TemplateId::Cross: {
      const double c = len / 2.0;
      p.ego_start = at("A", c - 60.0);
      p.npc_starts = {at("B", c - 60.0), at("B", c - 100.0), at("A", c - 20.0), at("B", c - 30.0)};
      break;
    }
  }
  p.ego_route = route_from(graph, p.ego_start.lane);
  return p;
}

void validate(const ScenarioGenome& g, const LaneGraph& graph) {
  if (g.template_id != graph.template_id()) throw GenomeError("genome template does not match the lane graph");
  if (g.duration_s < 1) throw GenomeError("scenario duration must be positive");
  if (g.npcs.empty()) throw GenomeError("scenario needs at least one NPC");
  if (g.ego_route.empty() || g.ego_route.front() != g.ego_start.lane) {
    throw GenomeError("ego route must start on the ego start lane");
  }
  for (std::size_t i = 0; i < g.ego_route.size(); ++i) {
    if (!graph.contains(g.ego_route[i])) throw GenomeError("ego route references an unknown lane");
    if (i > 0) {
      const auto& succ = graph.lane(g.ego_route[i - 1]).successors;
      if (std::find(succ.begin(), succ.end(), g.ego_route[i]) == succ.end()) {
        throw GenomeError("ego route lanes must be successors");
      }
    }
  }
  std::vector<LanePosition> starts{g.ego_start};
  for (const auto& n : g.npcs) starts.push_back(n.start);
  for (const auto& p : starts) {
    if (!graph.contains(p.lane)) throw GenomeError("start on unknown lane");
    if (p.s < 0.0 || p.s > graph.lane(p.lane).length()) throw GenomeError("start arclength out of range");
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::vector<LanePosition> rest(starts.begin() + static_cast<std::ptrdiff_t>(i) + 1, starts.end());
    if (!separated(graph, starts[i], rest)) throw GenomeError("initial footprints closer than 6 m");
  }
  for (const auto& n : g.npcs) {
    if (n.duration() != g.duration_s || n.actions.size() != n.speeds.size()) {
      throw GenomeError("chromosome length must equal scenario duration");
    }
    for (double v : n.speeds) {
      if (!(v >= 0.0 && v <= graph.speed_limit())) throw GenomeError("speed gene outside [0, speed_limit]");
    }
  }
}

ScenarioGenome random_genome(Rng& rng, const LaneGraph& graph, int n_npcs, int duration_s, PlacementPolicy policy,
                             const Placement* fixed) {
  if (n_npcs < 1) throw GenomeError("n_npcs must be at least 1");
  if (duration_s < 10) throw GenomeError("scenario duration must be at least 10 s");

  ScenarioGenome g;
  g.template_id = graph.template_id();
  g.duration_s = duration_s;

  std::vector<LanePosition> npc_starts;
  if (policy == PlacementPolicy::Fixed) {
    const Placement p = fixed ? *fixed : default_placement(graph);
    if (p.npc_starts.empty()) throw GenomeError("fixed placement lists no NPC starts");
    g.ego_start = p.ego_start;
    g.ego_route = p.ego_route.empty() ? route_from(graph, p.ego_start.lane) : p.ego_route;
    for (int i = 0; i < n_npcs; ++i) npc_starts.push_back(p.npc_starts[static_cast<std::size_t>(i) % p.npc_starts.size()]);
  } else {
    const auto& lanes = graph.lanes();
    const Lane& ego_lane = lanes[rng.index(lanes.size())];
    const double ego_s = std::floor(rng.uniform(0.0, ego_lane.length() / 2.0) / kInitialSpeedStep) * kInitialSpeedStep;
    g.ego_start = {ego_lane.id, ego_s};
    g.ego_route = route_from(graph, ego_lane.id);
    const Vec2 ego_xy = world_of(graph, g.ego_start);
    std::vector<LanePosition> placed{g.ego_start};
    for (int i = 0; i < n_npcs; ++i) {
      bool ok = false;
      for (int attempt = 0; attempt < kMaxPlacementAttempts && !ok; ++attempt) {
        const Lane& lane = lanes[rng.index(lanes.size())];
        const double s = std::floor(rng.uniform(0.0, lane.length()) / kInitialSpeedStep) * kInitialSpeedStep;
        const LanePosition cand{lane.id, s};
        if (norm(world_of(graph, cand) - ego_xy) > kRandomPlacementRadius) continue;
        if (!separated(graph, cand, placed)) continue;
        placed.push_back(cand);
        npc_starts.push_back(cand);
        ok = true;
      }
      if (!ok) throw GenomeError("could not place NPC after 100 attempts");
    }
  }

  for (int i = 0; i < n_npcs; ++i) {
    NpcChromosome c;
    c.npc_id = i;
    c.start = npc_starts[static_cast<std::size_t>(i)];
    c.speeds.reserve(static_cast<std::size_t>(duration_s));
    c.actions.reserve(static_cast<std::size_t>(duration_s));
    for (int t = 0; t < duration_s; ++t) c.speeds.push_back(random_speed(rng, graph.speed_limit()));
    for (int t = 0; t < duration_s; ++t) c.actions.push_back(random_action(rng));
    g.npcs.push_back(std::move(c));
  }
  if (policy == PlacementPolicy::Fixed) validate(g, graph);
  return g;
}

std::pair<ScenarioGenome, ScenarioGenome> crossover_with_mask(const ScenarioGenome& a, const ScenarioGenome& b,
                                                              const std::vector<bool>& swap_mask) {
  if (a.template_id != b.template_id || a.duration_s != b.duration_s || a.npcs.size() != b.npcs.size() ||
      swap_mask.size() != a.npcs.size()) {
    throw GenomeError("crossover requires genomes of identical shape");
  }
  ScenarioGenome c1 = a;
  ScenarioGenome c2 = b;
  for (std::size_t i = 0; i < swap_mask.size(); ++i) {
    if (swap_mask[i]) std::swap(c1.npcs[i], c2.npcs[i]);
    c1.npcs[i].npc_id = static_cast<int>(i);
    c2.npcs[i].npc_id = static_cast<int>(i);
  }
  c1.parent_ids = {a.scenario_id, b.scenario_id};
  c2.parent_ids = {b.scenario_id, a.scenario_id};
  c1.scenario_id.clear();
  c2.scenario_id.clear();
  return {std::move(c1), std::move(c2)};
}

std::pair<ScenarioGenome, ScenarioGenome> crossover(Rng& rng, const ScenarioGenome& a, const ScenarioGenome& b) {
  const std::size_t n = a.npcs.size();
  if (n == 0 || n != b.npcs.size()) throw GenomeError("crossover requires genomes of identical shape");
  if (n > 62) throw GenomeError("crossover supports at most 62 NPCs");
  std::vector<bool> mask(n, false);
  if (n == 1) {
    // No non-empty proper subset exists; the lone chromosome is exchanged.
    mask[0] = true;
  } else {
    const std::uint64_t subsets = (std::uint64_t{1} << n) - 2;  // excludes empty and full
    const std::uint64_t pick = 1 + static_cast<std::uint64_t>(rng.index(static_cast<std::size_t>(subsets)));
    for (std::size_t i = 0; i < n; ++i) mask[i] = ((pick >> i) & 1U) != 0;
  }
  return crossover_with_mask(a, b, mask);
}

NpcChromosome mutate_long_acceleration(const NpcChromosome& chrom, int t_arrive, double speed_limit) {
  return shift_window(chrom, 0, std::min(t_arrive, chrom.duration()) - 1, kLongStep, speed_limit);
}

NpcChromosome mutate_long_deceleration(const NpcChromosome& chrom, int t_arrive) {
  const double no_cap = std::numeric_limits<double>::max();
  return shift_window(chrom, 0, std::min(t_arrive, chrom.duration()) - 1, -kLongStep, no_cap);
}

NpcChromosome mutate_speed_random(Rng& rng, const NpcChromosome& chrom, SpeedRange range) {
  NpcChromosome out = chrom;
  if (out.speeds.empty()) return out;
  const std::size_t t = rng.index(out.speeds.size());
  const double old = out.speeds[t];
  const auto steps = static_cast<std::size_t>(std::floor((range.max - range.min) / kInitialSpeedStep + 1e-9));
  std::vector<double> choices;
  choices.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double v = range.min + static_cast<double>(i) * kInitialSpeedStep;
    if (std::abs(v - old) > kSameSpeedTolerance) choices.push_back(v);
  }
  if (!choices.empty()) out.speeds[t] = quantize_gene(choices[rng.index(choices.size())]);
  return out;
}

NpcChromosome mutate_action_random(Rng& rng, const NpcChromosome& chrom) {
  NpcChromosome out = chrom;
  if (out.actions.empty()) return out;
  const std::size_t t = rng.index(out.actions.size());
  std::vector<Action> others;
  for (Action a : {Action::Straight, Action::LaneLeft, Action::LaneRight}) {
    if (a != out.actions[t]) others.push_back(a);
  }
  out.actions[t] = others[rng.index(others.size())];
  return out;
}

int approach_window_start(int t, double dt_conflict) {
  return std::max(0, t - static_cast<int>(std::ceil(dt_conflict - 1e-9)));
}

NpcChromosome mutate_deceleration(const NpcChromosome& chrom, int t, double dt_conflict, double magnitude) {
  if (chrom.speeds.empty()) return chrom;
  const int anchor = clamp_anchor(t, chrom.duration());
  return shift_window(chrom, approach_window_start(anchor, dt_conflict), anchor, -magnitude,
                      std::numeric_limits<double>::max());
}

NpcChromosome mutate_deceleration(Rng& rng, const NpcChromosome& chrom, int t, double dt_conflict) {
  return mutate_deceleration(chrom, t, dt_conflict, rng.uniform(0.0, kDecelerationMax));
}

NpcChromosome mutate_brake(const NpcChromosome& chrom, int t, double magnitude) {
  if (chrom.speeds.empty()) return chrom;
  const int anchor = std::max(1, clamp_anchor(t, chrom.duration()));
  return shift_window(chrom, anchor - 1, anchor, -magnitude, std::numeric_limits<double>::max());
}

NpcChromosome mutate_brake(Rng& rng, const NpcChromosome& chrom, int t) {
  return mutate_brake(chrom, t, rng.uniform(kBrakeMin, kBrakeMax));
}

NpcChromosome mutate_acceleration(const NpcChromosome& chrom, int t, double dt_conflict, double magnitude,
                                  double speed_limit) {
  if (chrom.speeds.empty()) return chrom;
  const int anchor = clamp_anchor(t, chrom.duration());
  return shift_window(chrom, approach_window_start(anchor, dt_conflict), anchor, magnitude, speed_limit);
}

NpcChromosome mutate_acceleration(Rng& rng, const NpcChromosome& chrom, int t, double dt_conflict,
                                  double speed_limit) {
  return mutate_acceleration(chrom, t, dt_conflict, rng.uniform(0.0, kAccelerationMax), speed_limit);
}

}  // namespace conflictfuzz
