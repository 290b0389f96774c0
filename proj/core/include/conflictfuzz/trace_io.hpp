#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "conflictfuzz/ego.hpp"
#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything needed to rebuild the graph and re-run a trace's genome.
struct TraceEnvironment {
  TemplateId template_id = TemplateId::Straight3;
  double road_length = 500.0;
  double speed_limit = 20.0;
  double lane_width = kDefaultLaneWidth;
  EgoControllerSpec ego;
  SimulationParams sim;

  LaneGraph build_graph() const { return build_template(template_id, road_length, speed_limit, lane_width); }
  bool operator==(const TraceEnvironment&) const = default;
};

struct TraceDocument {
  TraceEnvironment environment;
  Trace trace;
};

/// Line-delimited form: one header record, one record per vehicle per step
/// {t, step, vehicle_id, x, y, heading, speed, lane, s, d, maneuver, ...},
/// then a footer carrying the termination reason and optional collision.
/// Doubles are written in shortest round-trip form, so reading is exact.
std::string trace_to_jsonl(const TraceDocument& doc);
TraceDocument trace_from_jsonl(std::string_view text);

void write_trace(const std::filesystem::path& path, const TraceDocument& doc);
TraceDocument read_trace(const std::filesystem::path& path);

}  // namespace conflictfuzz
