#include "conflictfuzz/config.hpp"

#include "conflictfuzz/fileio.hpp"
#include "json_codec.hpp"

namespace conflictfuzz {

namespace {

using detail::get_as;
using detail::json;
using detail::read_optional;
using detail::reject_unknown;
using detail::require_key;
using detail::SchemaError;

template <typename Fn>
auto enum_field(const json& obj, const std::string& key, const std::string& prefix, Fn parse) {
  const auto text = get_as<std::string>(obj, key, prefix);
  try {
    return parse(text);
  } catch (const std::exception&) {
    throw SchemaError(detail::join_key(prefix, key), "invalid value '" + text + "' for '" + detail::join_key(prefix, key) + "'");
  }
}

void check(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw SchemaError(key, "invalid '" + key + "': " + why);
}

CampaignConfig parse_document(const json& doc) {
  reject_unknown(doc,
                 {"schema_version", "rng_seed", "variant", "budget_steps", "road", "scenario", "conflict", "search",
                  "ego", "simulation"},
                 "");
  const int version = require_key<int>(doc, "schema_version", "");
  check(version == kConfigSchemaVersion, "schema_version",
        "unsupported version " + std::to_string(version) + " (expected " + std::to_string(kConfigSchemaVersion) + ")");

  CampaignConfig cfg;
  cfg.ga.rng_seed = require_key<std::uint64_t>(doc, "rng_seed", "");
  if (doc.contains("variant")) cfg.variant = enum_field(doc, "variant", "", parse_variant);
  read_optional(doc, "budget_steps", "", cfg.budget_steps);

  if (doc.contains("road")) {
    const json& r = doc.at("road");
    reject_unknown(r, {"template", "length", "speed_limit", "lane_width"}, "road");
    if (r.contains("template")) cfg.template_id = enum_field(r, "template", "road", parse_template_id);
    read_optional(r, "length", "road", cfg.road_length);
    read_optional(r, "speed_limit", "road", cfg.speed_limit);
    read_optional(r, "lane_width", "road", cfg.lane_width);
  }
  if (doc.contains("scenario")) {
    const json& s = doc.at("scenario");
    reject_unknown(s, {"n_npcs", "duration_s", "placement"}, "scenario");
    read_optional(s, "n_npcs", "scenario", cfg.n_npcs);
    read_optional(s, "duration_s", "scenario", cfg.duration_s);
    if (s.contains("placement")) cfg.placement = enum_field(s, "placement", "scenario", parse_placement_policy);
  }
  if (doc.contains("conflict")) {
    const json& c = doc.at("conflict");
    reject_unknown(c, {"t_c", "t_s", "cell_size", "cluster_window"}, "conflict");
    read_optional(c, "t_c", "conflict", cfg.conflict.t_c);
    read_optional(c, "t_s", "conflict", cfg.conflict.t_s);
    read_optional(c, "cell_size", "conflict", cfg.conflict.cell_size);
    read_optional(c, "cluster_window", "conflict", cfg.conflict.cluster_window);
  }
  bool batch_given = false;
  if (doc.contains("search")) {
    const json& g = doc.at("search");
    reject_unknown(g,
                   {"population_size", "threshold_m", "threshold_c", "invert_thresholds", "m_generations_per_handoff",
                    "collision_threshold_m", "collision_iterations", "collision_batch", "restart_stagnation_R",
                    "restart_similarity_eps"},
                   "search");
    read_optional(g, "population_size", "search", cfg.ga.population_size);
    read_optional(g, "threshold_m", "search", cfg.ga.threshold_m);
    read_optional(g, "threshold_c", "search", cfg.ga.threshold_c);
    read_optional(g, "invert_thresholds", "search", cfg.ga.invert_thresholds);
    read_optional(g, "m_generations_per_handoff", "search", cfg.ga.m_generations_per_handoff);
    read_optional(g, "collision_threshold_m", "search", cfg.ga.collision_threshold_m);
    read_optional(g, "collision_iterations", "search", cfg.ga.collision_iterations);
    batch_given = g.contains("collision_batch");
    read_optional(g, "collision_batch", "search", cfg.ga.collision_batch);
    read_optional(g, "restart_stagnation_R", "search", cfg.ga.restart_stagnation_R);
    read_optional(g, "restart_similarity_eps", "search", cfg.ga.restart_similarity_eps);
  }
  // The collision batch follows the population size unless set explicitly.
  if (!batch_given) cfg.ga.collision_batch = cfg.ga.population_size;
  if (doc.contains("ego")) cfg.ego = detail::ego_from_json(doc.at("ego"), "ego");
  if (doc.contains("simulation")) cfg.sim = detail::sim_from_json(doc.at("simulation"), "simulation");

  check(cfg.budget_steps >= 1, "budget_steps", "must be at least 1");
  check(cfg.road_length >= kMinRoadLength, "road.length", "must be at least 100");
  check(cfg.speed_limit > 0.0, "road.speed_limit", "must be positive");
  check(cfg.lane_width > 0.0, "road.lane_width", "must be positive");
  check(cfg.n_npcs >= 1, "scenario.n_npcs", "must be at least 1");
  check(cfg.duration_s >= 10, "scenario.duration_s", "must be at least 10");
  check(cfg.conflict.t_c > 0.0, "conflict.t_c", "must be positive");
  check(cfg.conflict.t_c <= cfg.conflict.t_s, "conflict.t_c", "t_c must not exceed t_s");
  check(cfg.conflict.cell_size > 0.0, "conflict.cell_size", "must be positive");
  check(cfg.conflict.cluster_window >= 0.0, "conflict.cluster_window", "must be >= 0");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  check(cfg.ga.population_size >= 2, "search.population_size", "must be at least 2");
  check(unit(cfg.ga.threshold_m), "search.threshold_m", "must lie in [0, 1]");
  check(unit(cfg.ga.threshold_c), "search.threshold_c", "must lie in [0, 1]");
  check(unit(cfg.ga.collision_threshold_m), "search.collision_threshold_m", "must lie in [0, 1]");
  check(cfg.ga.m_generations_per_handoff >= 1, "search.m_generations_per_handoff", "must be at least 1");
  check(cfg.ga.collision_iterations >= 0, "search.collision_iterations", "must be >= 0");
  check(cfg.ga.collision_batch >= 1, "search.collision_batch", "must be at least 1");
  check(cfg.ga.restart_stagnation_R >= 1, "search.restart_stagnation_R", "must be at least 1");
  check(cfg.ga.restart_similarity_eps >= 0.0, "search.restart_similarity_eps", "must be >= 0");
  check(cfg.budget_steps >= cfg.ga.population_size, "budget_steps", "must be at least search.population_size");
  return cfg;
}

}  // namespace

CampaignConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_document(doc);
  } catch (const SchemaError& e) {
    throw ConfigError(e.key(), e.what());
  }
}

CampaignConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError("", e.what());
  }
  return parse_config(text);
}

std::string config_to_document(const CampaignConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["rng_seed"] = cfg.ga.rng_seed;
  j["variant"] = std::string(to_string(cfg.variant));
  j["budget_steps"] = cfg.budget_steps;
  j["road"] = {{"template", std::string(to_string(cfg.template_id))},
               {"length", cfg.road_length},
               {"speed_limit", cfg.speed_limit},
               {"lane_width", cfg.lane_width}};
  j["scenario"] = {{"n_npcs", cfg.n_npcs},
                   {"duration_s", cfg.duration_s},
                   {"placement", std::string(to_string(cfg.placement))}};
  j["conflict"] = {{"t_c", cfg.conflict.t_c},
                   {"t_s", cfg.conflict.t_s},
                   {"cell_size", cfg.conflict.cell_size},
                   {"cluster_window", cfg.conflict.cluster_window}};
  j["search"] = {{"population_size", cfg.ga.population_size},
                 {"threshold_m", cfg.ga.threshold_m},
                 {"threshold_c", cfg.ga.threshold_c},
                 {"invert_thresholds", cfg.ga.invert_thresholds},
                 {"m_generations_per_handoff", cfg.ga.m_generations_per_handoff},
                 {"collision_threshold_m", cfg.ga.collision_threshold_m},
                 {"collision_iterations", cfg.ga.collision_iterations},
                 {"collision_batch", cfg.ga.collision_batch},
                 {"restart_stagnation_R", cfg.ga.restart_stagnation_R},
                 {"restart_similarity_eps", cfg.ga.restart_similarity_eps}};
  j["ego"] = nlohmann::ordered_json::parse(detail::to_json(cfg.ego).dump());
  j["simulation"] = nlohmann::ordered_json::parse(detail::to_json(cfg.sim).dump());
  return j.dump(2) + "\n";
}

}  // namespace conflictfuzz
