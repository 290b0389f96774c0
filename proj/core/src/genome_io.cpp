#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "conflictfuzz/genome.hpp"

namespace conflictfuzz {

namespace {

using nlohmann::json;

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string position(const LanePosition& p) {
  return "{\"lane\": " + std::to_string(p.lane.value) + ", \"s\": " + fixed3(p.s) + "}";
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw GenomeError(std::string("genome document missing key '") + key + "'");
  return obj.at(key);
}

LanePosition parse_position(const json& j) {
  return {LaneId{require(j, "lane").get<int>()}, quantize_gene(require(j, "s").get<double>())};
}

}  // namespace

std::string to_document(const ScenarioGenome& g) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"scenario_id\": " << quoted(g.scenario_id) << ",\n";
  out << "  \"template_id\": " << quoted(std::string(to_string(g.template_id))) << ",\n";
  out << "  \"T\": " << g.duration_s << ",\n";
  out << "  \"ego_start\": " << position(g.ego_start) << ",\n";
  out << "  \"ego_route\": [";
  for (std::size_t i = 0; i < g.ego_route.size(); ++i) out << (i ? ", " : "") << g.ego_route[i].value;
  out << "],\n";
  out << "  \"npcs\": [";
  for (std::size_t n = 0; n < g.npcs.size(); ++n) {
    const auto& c = g.npcs[n];
    out << (n ? ",\n" : "\n") << "    {\n";
    out << "      \"npc_id\": " << c.npc_id << ",\n";
    out << "      \"start\": " << position(c.start) << ",\n";
    out << "      \"SP\": [";
    for (std::size_t i = 0; i < c.speeds.size(); ++i) out << (i ? ", " : "") << fixed3(c.speeds[i]);
    out << "],\n";
    out << "      \"AC\": [";
    for (std::size_t i = 0; i < c.actions.size(); ++i) out << (i ? ", " : "") << '"' << to_string(c.actions[i]) << '"';
    out << "]\n    }";
  }
  out << (g.npcs.empty() ? "],\n" : "\n  ],\n");
  out << "  \"parent_ids\": [";
  for (std::size_t i = 0; i < g.parent_ids.size(); ++i) out << (i ? ", " : "") << quoted(g.parent_ids[i]);
  out << "],\n";
  out << "  \"rng_seed\": " << g.rng_seed << "\n";
  out << "}\n";
  return out.str();
}

ScenarioGenome genome_from_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GenomeError(std::string("malformed genome document: ") + e.what());
  }
  try {
    ScenarioGenome g;
    g.scenario_id = require(doc, "scenario_id").get<std::string>();
    g.template_id = parse_template_id(require(doc, "template_id").get<std::string>());
    g.duration_s = require(doc, "T").get<int>();
    g.ego_start = parse_position(require(doc, "ego_start"));
    for (const auto& id : require(doc, "ego_route")) g.ego_route.push_back(LaneId{id.get<int>()});
    for (const auto& jn : require(doc, "npcs")) {
      NpcChromosome c;
      c.npc_id = require(jn, "npc_id").get<int>();
      c.start = parse_position(require(jn, "start"));
      for (const auto& v : require(jn, "SP")) c.speeds.push_back(quantize_gene(v.get<double>()));
      for (const auto& a : require(jn, "AC")) c.actions.push_back(parse_action(a.get<std::string>()));
      g.npcs.push_back(std::move(c));
    }
    for (const auto& p : require(doc, "parent_ids")) g.parent_ids.push_back(p.get<std::string>());
    g.rng_seed = require(doc, "rng_seed").get<std::uint64_t>();
    return g;
  } catch (const json::exception& e) {
    throw GenomeError(std::string("malformed genome document: ") + e.what());
  } catch (const RoadModelError& e) {
    throw GenomeError(e.what());
  }
}

}  // namespace conflictfuzz
