#include "conflictfuzz/ledger.hpp"

#include <sstream>

#include <json.hpp>

#include "conflictfuzz/fileio.hpp"

namespace conflictfuzz {

namespace {

using ordered = nlohmann::ordered_json;
using nlohmann::json;

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Conflict: return "conflict";
    case Stage::Collision: return "collision";
    case Stage::Restart: return "restart";
  }
  return "?";
}

Stage parse_stage(std::string_view text) {
  if (text == "conflict") return Stage::Conflict;
  if (text == "collision") return Stage::Collision;
  if (text == "restart") return Stage::Restart;
  throw std::invalid_argument("unknown stage '" + std::string(text) + "'");
}

std::string to_json_line(const CampaignEvent& e) {
  ordered j;
  j["step"] = e.step;
  j["stage"] = std::string(to_string(e.stage));
  j["scenario_id"] = e.scenario_id;
  j["parent_ids"] = e.parent_ids;
  j["generation"] = e.generation ? ordered(*e.generation) : ordered(nullptr);
  j["n_conflicts"] = e.n_conflicts;
  j["n_spatial"] = e.n_spatial;
  j["fitness_conflict"] = e.fitness_conflict;
  j["fitness_collision"] = e.fitness_collision;
  if (e.collision) {
    j["collision"] = ordered{{"npc_id", e.collision->npc_id},
                             {"type_key", e.collision->type_key},
                             {"ev_fault", e.collision->ev_fault}};
  } else {
    j["collision"] = nullptr;
  }
  j["rng_child_seed"] = e.rng_child_seed;
  ordered conflicts = ordered::array();
  for (const auto& c : e.conflicts) {
    conflicts.push_back(ordered{{"npc_id", c.npc_id},
                                {"klass", std::string(to_string(c.klass))},
                                {"ctype", std::string(to_string(c.ctype))},
                                {"delta_t", c.delta_t},
                                {"t_event", c.t_event},
                                {"first_arriver", std::string(to_string(c.first_arriver))}});
  }
  j["conflicts"] = std::move(conflicts);
  ordered handoffs = ordered::array();
  for (const auto& h : e.handoffs) handoffs.push_back(ordered{{"scenario_id", h.scenario_id}, {"n_conflicts", h.n_conflicts}});
  j["handoffs"] = std::move(handoffs);
  if (e.failed) j["failed"] = true;
  return j.dump();
}

CampaignEvent parse_event(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw LedgerError(line_no, "not valid JSON");
  }
  try {
    CampaignEvent e;
    e.step = j.at("step").get<int>();
    e.stage = parse_stage(j.at("stage").get<std::string>());
    e.scenario_id = j.at("scenario_id").get<std::string>();
    e.parent_ids = j.at("parent_ids").get<std::vector<std::string>>();
    if (!j.at("generation").is_null()) e.generation = j.at("generation").get<int>();
    e.n_conflicts = j.at("n_conflicts").get<int>();
    e.n_spatial = j.at("n_spatial").get<int>();
    e.fitness_conflict = j.at("fitness_conflict").get<double>();
    e.fitness_collision = j.at("fitness_collision").get<double>();
    const json& c = j.at("collision");
    if (!c.is_null()) {
      e.collision = LedgerCollision{c.at("npc_id").get<int>(), c.at("type_key").get<std::string>(),
                                    c.at("ev_fault").get<bool>()};
    }
    e.rng_child_seed = j.at("rng_child_seed").get<std::uint64_t>();
    for (const auto& r : j.value("conflicts", json::array())) {
      LedgerConflict lc;
      lc.npc_id = r.at("npc_id").get<int>();
      lc.klass = r.at("klass").get<std::string>() == "conflict" ? ConflictClass::Conflict : ConflictClass::SpatialConflict;
      lc.ctype = parse_conflict_type(r.at("ctype").get<std::string>());
      lc.delta_t = r.at("delta_t").get<double>();
      lc.t_event = r.at("t_event").get<double>();
      lc.first_arriver = parse_arriver(r.at("first_arriver").get<std::string>());
      e.conflicts.push_back(lc);
    }
    for (const auto& h : j.value("handoffs", json::array())) {
      e.handoffs.push_back({h.at("scenario_id").get<std::string>(), h.at("n_conflicts").get<int>()});
    }
    e.failed = j.value("failed", false);
    return e;
  } catch (const json::exception& ex) {
    throw LedgerError(line_no, std::string("bad field: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw LedgerError(line_no, ex.what());
  }
}

std::string ledger_to_jsonl(const std::vector<CampaignEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json_line(e);
    out += '\n';
  }
  return out;
}

std::vector<CampaignEvent> ledger_from_jsonl(std::string_view text) {
  std::vector<CampaignEvent> events;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(parse_event(line, line_no));
  }
  return events;
}

std::vector<CampaignEvent> read_ledger(const std::filesystem::path& path) { return ledger_from_jsonl(read_file(path)); }

}  // namespace conflictfuzz
