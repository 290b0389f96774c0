#include "conflictfuzz/trace_io.hpp"

#include <sstream>

#include "conflictfuzz/fileio.hpp"
#include "json_codec.hpp"

namespace conflictfuzz {

namespace {

using detail::json;

json vehicle_record(const Trace& trace, std::size_t step, const VehicleState& v) {
  return json{{"t", trace.time_at(step)},
              {"step", step},
              {"vehicle_id", v.vehicle_id},
              {"x", v.xy.x},
              {"y", v.xy.y},
              {"heading", v.heading},
              {"speed", v.speed},
              {"lane", v.lane.value},
              {"s", v.s},
              {"d", v.d},
              {"maneuver", std::string(to_string(v.maneuver.kind))},
              {"progress", v.maneuver.progress},
              {"from_lane", v.maneuver.from_lane.value},
              {"to_lane", v.maneuver.to_lane.value}};
}

VehicleState vehicle_from_record(const json& r) {
  VehicleState v;
  v.vehicle_id = r.at("vehicle_id").get<int>();
  v.xy = {r.at("x").get<double>(), r.at("y").get<double>()};
  v.heading = r.at("heading").get<double>();
  v.speed = r.at("speed").get<double>();
  v.lane = LaneId{r.at("lane").get<int>()};
  v.s = r.at("s").get<double>();
  v.d = r.at("d").get<double>();
  v.maneuver.kind = parse_maneuver(r.at("maneuver").get<std::string>());
  v.maneuver.progress = r.at("progress").get<double>();
  v.maneuver.from_lane = LaneId{r.at("from_lane").get<int>()};
  v.maneuver.to_lane = LaneId{r.at("to_lane").get<int>()};
  return v;
}

}  // namespace

std::string trace_to_jsonl(const TraceDocument& doc) {
  const Trace& trace = doc.trace;
  const TraceEnvironment& env = doc.environment;
  std::ostringstream out;
  json header{{"record", "header"},
              {"template_id", std::string(to_string(env.template_id))},
              {"road_length", env.road_length},
              {"speed_limit", env.speed_limit},
              {"lane_width", env.lane_width},
              {"ego", detail::to_json(env.ego)},
              {"sim", detail::to_json(env.sim)},
              {"dt", trace.dt},
              {"duration_s", trace.duration_s},
              {"vehicle_count", trace.vehicle_count()},
              {"step_count", trace.steps.size()}};
  out << header.dump() << '\n';
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    for (const auto& v : trace.steps[n]) out << vehicle_record(trace, n, v).dump() << '\n';
  }
  json footer{{"record", "footer"}, {"terminated_reason", std::string(to_string(trace.terminated_reason))}};
  if (trace.collision) {
    const auto& c = *trace.collision;
    footer["collision"] = json{{"step", c.step},
                               {"contact_x", c.ev_contact_point.x},
                               {"contact_y", c.ev_contact_point.y},
                               {"normal_x", c.normal.x},
                               {"normal_y", c.normal.y},
                               {"npc_id", c.npc_id},
                               {"relative_heading", c.relative_heading},
                               {"ev_fault", c.ev_fault}};
  } else {
    footer["collision"] = nullptr;
  }
  out << footer.dump() << '\n';
  return out.str();
}

TraceDocument trace_from_jsonl(std::string_view text) {
  TraceDocument doc;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_footer = false;
  std::size_t vehicle_count = 0;
  std::size_t step_count = 0;

  auto fail = [&](const std::string& why) -> TraceFormatError {
    return TraceFormatError("trace line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_footer) throw fail("content after footer");
    json r;
    try {
      r = json::parse(line);
    } catch (const json::parse_error&) {
      throw fail("not valid JSON");
    }
    try {
      const std::string kind = r.value("record", std::string("vehicle"));
      if (!have_header) {
        if (kind != "header") throw fail("expected header record");
        auto& env = doc.environment;
        env.template_id = parse_template_id(r.at("template_id").get<std::string>());
        env.road_length = r.at("road_length").get<double>();
        env.speed_limit = r.at("speed_limit").get<double>();
        env.lane_width = r.at("lane_width").get<double>();
        env.ego = detail::ego_from_json(r.at("ego"), "ego");
        env.sim = detail::sim_from_json(r.at("sim"), "sim");
        doc.trace.dt = r.at("dt").get<double>();
        doc.trace.duration_s = r.at("duration_s").get<int>();
        vehicle_count = r.at("vehicle_count").get<std::size_t>();
        step_count = r.at("step_count").get<std::size_t>();
        if (vehicle_count == 0 || step_count == 0) throw fail("empty trace");
        doc.trace.steps.assign(step_count, {});
        have_header = true;
      } else if (kind == "footer") {
        const std::string reason = r.at("terminated_reason").get<std::string>();
        if (reason == "collision") {
          doc.trace.terminated_reason = TerminationReason::Collision;
        } else if (reason == "duration_expired") {
          doc.trace.terminated_reason = TerminationReason::DurationExpired;
        } else {
          throw fail("unknown terminated_reason '" + reason + "'");
        }
        const json& c = r.at("collision");
        if (!c.is_null()) {
          CollisionEvent e;
          e.step = c.at("step").get<int>();
          e.ev_contact_point = {c.at("contact_x").get<double>(), c.at("contact_y").get<double>()};
          e.normal = {c.at("normal_x").get<double>(), c.at("normal_y").get<double>()};
          e.npc_id = c.at("npc_id").get<int>();
          e.relative_heading = c.at("relative_heading").get<double>();
          e.ev_fault = c.at("ev_fault").get<bool>();
          doc.trace.collision = e;
        }
        have_footer = true;
      } else if (kind == "vehicle") {
        const auto step = r.at("step").get<std::size_t>();
        if (step >= step_count) throw fail("step out of range");
        auto& row = doc.trace.steps[step];
        VehicleState v = vehicle_from_record(r);
        if (v.vehicle_id != static_cast<int>(row.size())) throw fail("vehicle records out of order");
        row.push_back(v);
      } else {
        throw fail("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw fail(std::string("bad field: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    } catch (const detail::SchemaError& e) {
      throw fail(e.what());
    }
  }
  if (!have_header) throw TraceFormatError("trace has no header");
  if (!have_footer) throw TraceFormatError("trace has no footer");
  for (const auto& row : doc.trace.steps) {
    if (row.size() != vehicle_count) throw TraceFormatError("trace step has the wrong number of vehicles");
  }
  return doc;
}

void write_trace(const std::filesystem::path& path, const TraceDocument& doc) {
  write_file_atomic(path, trace_to_jsonl(doc));
}

TraceDocument read_trace(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw TraceFormatError(e.what());
  }
  return trace_from_jsonl(text);
}

}  // namespace conflictfuzz
