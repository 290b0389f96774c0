#pragma once

// Private JSON helpers shared by the trace, config and archive codecs.

#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz::detail {

using nlohmann::json;

/// Raised for a well-formed document with an unexpected shape. `key` is the
/// dotted path of the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!obj.is_object()) throw SchemaError(prefix, "'" + prefix + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw SchemaError(join_key(prefix, key), "unknown key '" + join_key(prefix, key) + "'");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& prefix) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(join_key(prefix, key), "invalid value for '" + join_key(prefix, key) + "'");
  }
}

template <typename T>
void read_optional(const json& obj, const std::string& key, const std::string& prefix, T& out) {
  if (obj.contains(key)) out = get_as<T>(obj, key, prefix);
}

template <typename T>
T require_key(const json& obj, const std::string& key, const std::string& prefix) {
  if (!obj.contains(key)) throw SchemaError(join_key(prefix, key), "missing key '" + join_key(prefix, key) + "'");
  return get_as<T>(obj, key, prefix);
}

inline json to_json(const EgoControllerSpec& e) {
  return json{{"name", e.name},
              {"desired_headway", e.desired_headway},
              {"min_gap", e.min_gap},
              {"max_accel", e.max_accel},
              {"comfortable_decel", e.comfortable_decel},
              {"max_decel", e.max_decel},
              {"reaction_delay", e.reaction_delay},
              {"perception_range", e.perception_range},
              {"ignore_outside_lane", e.ignore_outside_lane},
              {"ignore_oncoming", e.ignore_oncoming}};
}

inline EgoControllerSpec ego_from_json(const json& j, const std::string& prefix) {
  reject_unknown(j,
                 {"name", "desired_headway", "min_gap", "max_accel", "comfortable_decel", "max_decel",
                  "reaction_delay", "perception_range", "ignore_outside_lane", "ignore_oncoming"},
                 prefix);
  EgoControllerSpec e;
  read_optional(j, "name", prefix, e.name);
  read_optional(j, "desired_headway", prefix, e.desired_headway);
  read_optional(j, "min_gap", prefix, e.min_gap);
  read_optional(j, "max_accel", prefix, e.max_accel);
  read_optional(j, "comfortable_decel", prefix, e.comfortable_decel);
  read_optional(j, "max_decel", prefix, e.max_decel);
  read_optional(j, "reaction_delay", prefix, e.reaction_delay);
  read_optional(j, "perception_range", prefix, e.perception_range);
  read_optional(j, "ignore_outside_lane", prefix, e.ignore_outside_lane);
  read_optional(j, "ignore_oncoming", prefix, e.ignore_oncoming);
  if (e.name != "baseline") throw SchemaError(join_key(prefix, "name"), "unknown ego controller '" + e.name + "'");
  if (!(e.max_accel > 0.0) || !(e.comfortable_decel > 0.0) || !(e.max_decel > 0.0)) {
    throw SchemaError(join_key(prefix, "max_accel"), "ego accelerations must be positive");
  }
  if (e.reaction_delay < 0.0) throw SchemaError(join_key(prefix, "reaction_delay"), "reaction_delay must be >= 0");
  return e;
}

inline json to_json(const SimulationParams& p) {
  json j{{"dt", p.dt}, {"npc_max_accel", p.npc_max_accel}, {"lane_change_duration", p.lane_change_duration}};
  j["ego_initial_speed"] = p.ego_initial_speed ? json(*p.ego_initial_speed) : json(nullptr);
  return j;
}

inline SimulationParams sim_from_json(const json& j, const std::string& prefix) {
  reject_unknown(j, {"dt", "npc_max_accel", "lane_change_duration", "ego_initial_speed"}, prefix);
  SimulationParams p;
  read_optional(j, "dt", prefix, p.dt);
  read_optional(j, "npc_max_accel", prefix, p.npc_max_accel);
  read_optional(j, "lane_change_duration", prefix, p.lane_change_duration);
  if (j.contains("ego_initial_speed") && !j.at("ego_initial_speed").is_null()) {
    p.ego_initial_speed = get_as<double>(j, "ego_initial_speed", prefix);
  }
  try {
    steps_per_second(p.dt);
  } catch (const SimulationError& e) {
    throw SchemaError(join_key(prefix, "dt"), std::string("invalid 'dt': ") + e.what());
  }
  if (!(p.npc_max_accel > 0.0)) throw SchemaError(join_key(prefix, "npc_max_accel"), "npc_max_accel must be positive");
  if (!(p.lane_change_duration > 0.0)) {
    throw SchemaError(join_key(prefix, "lane_change_duration"), "lane_change_duration must be positive");
  }
  return p;
}

}  // namespace conflictfuzz::detail
