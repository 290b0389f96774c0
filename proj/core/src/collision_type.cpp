#include "conflictfuzz/collision_type.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace conflictfuzz {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const E (&values)[N], const char* what) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr ImpactZone kZones[] = {ImpactZone::Front, ImpactZone::Rear, ImpactZone::Left, ImpactZone::Right};
constexpr HeadingBucket kBuckets[] = {HeadingBucket::Same, HeadingBucket::Opposite, HeadingBucket::Crossing};
constexpr LaneRelation kRelations[] = {LaneRelation::Same,
                                       LaneRelation::AdjacentSameDir,
                                       LaneRelation::Merging,
                                       LaneRelation::Crossing,
                                       LaneRelation::OpposingConstrained,
                                       LaneRelation::OpposingUnconstrained};

}  // namespace

std::string_view to_string(ImpactZone z) {
  switch (z) {
    case ImpactZone::Front: return "front";
    case ImpactZone::Rear: return "rear";
    case ImpactZone::Left: return "left";
    case ImpactZone::Right: return "right";
  }
  return "?";
}

std::string_view to_string(HeadingBucket h) {
  switch (h) {
    case HeadingBucket::Same: return "same";
    case HeadingBucket::Opposite: return "opposite";
    case HeadingBucket::Crossing: return "crossing";
  }
  return "?";
}

std::string CollisionTypeKey::str() const {
  std::string out;
  out += to_string(impact_zone_ev);
  out += '|';
  out += to_string(npc_rel_heading);
  out += '|';
  out += to_string(ev_maneuver_at_impact);
  out += '|';
  out += to_string(npc_maneuver_at_impact);
  out += '|';
  out += to_string(lane_relation_1s_prior);
  return out;
}

CollisionTypeKey CollisionTypeKey::parse(std::string_view text) {
  const auto parts = split(text, '|');
  if (parts.size() != 5) throw std::invalid_argument("collision type key needs 5 fields: '" + std::string(text) + "'");
  CollisionTypeKey k;
  k.impact_zone_ev = parse_enum(parts[0], kZones, "impact zone");
  k.npc_rel_heading = parse_enum(parts[1], kBuckets, "heading bucket");
  k.ev_maneuver_at_impact = parse_maneuver(parts[2]);
  k.npc_maneuver_at_impact = parse_maneuver(parts[3]);
  k.lane_relation_1s_prior = parse_enum(parts[4], kRelations, "lane relation");
  return k;
}

ImpactZone impact_zone(const VehicleState& ev, Vec2 contact_point) {
  const Vec2 rel = contact_point - ev.xy;
  const Vec2 fwd = unit_from_heading(ev.heading);
  const Vec2 left{-fwd.y, fwd.x};
  const double angle = std::atan2(dot(rel, left), dot(rel, fwd));
  // Four 90-degree sectors centred on the EV's axes.
  const double quarter = kPi / 4.0;
  if (std::abs(angle) <= quarter) return ImpactZone::Front;
  if (std::abs(angle) >= kPi - quarter) return ImpactZone::Rear;
  return angle > 0.0 ? ImpactZone::Left : ImpactZone::Right;
}

HeadingBucket heading_bucket(double relative_heading) {
  const double diff = std::abs(wrap_angle(relative_heading));
  if (diff <= kPi / 6.0 + 1e-12) return HeadingBucket::Same;
  if (diff >= 5.0 * kPi / 6.0 - 1e-12) return HeadingBucket::Opposite;
  return HeadingBucket::Crossing;
}

CollisionTypeKey classify_collision(const Trace& trace, const LaneGraph& graph) {
  if (!trace.collision) throw std::invalid_argument("trace has no collision to classify");
  const CollisionEvent& c = *trace.collision;
  const auto npc_index = static_cast<std::size_t>(c.npc_id) + 1;
  const auto& at_impact = trace.steps.at(static_cast<std::size_t>(c.step));
  const VehicleState& ev = at_impact[0];
  const VehicleState& npc = at_impact.at(npc_index);

  const int lookback = static_cast<int>(std::lround(1.0 / trace.dt));
  const auto prior_step = static_cast<std::size_t>(std::max(0, c.step - lookback));
  const auto& prior = trace.steps[prior_step];

  CollisionTypeKey k;
  k.impact_zone_ev = impact_zone(ev, c.ev_contact_point);
  k.npc_rel_heading = heading_bucket(npc.heading - ev.heading);
  k.ev_maneuver_at_impact = ev.maneuver.kind;
  k.npc_maneuver_at_impact = npc.maneuver.kind;
  k.lane_relation_1s_prior = graph.lane_relation(prior[0].base_lane(), prior[npc_index].base_lane());
  return k;
}

}  // namespace conflictfuzz
