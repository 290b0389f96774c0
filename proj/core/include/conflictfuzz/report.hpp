#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "conflictfuzz/ledger.hpp"
#include "conflictfuzz/metrics.hpp"
#include "conflictfuzz/road_model.hpp"
#include "conflictfuzz/simulator.hpp"

namespace conflictfuzz {

std::string metrics_csv(const CampaignMetrics& m);
std::string type_growth_csv(const CampaignMetrics& m);
std::string heat_strip_csv(const CampaignMetrics& m);
/// Header only when the campaign had no conflict-search stage.
std::string conflicts_per_generation_csv(const CampaignMetrics& m);

/// One vertical bar per step: grey without an EV-attributed collision,
/// otherwise coloured by collision type.
std::string heat_strip_svg(const CampaignMetrics& m);
std::string type_growth_svg(const CampaignMetrics& m);
std::string conflicts_per_generation_svg(const CampaignMetrics& m);

/// Human-readable summary: one line per headline metric.
std::string summary_text(const CampaignMetrics& m);

/// File names written by write_report.
inline const std::vector<std::string> kReportFiles = {
    "metrics.csv",      "type_growth.csv",     "heat_strip.csv",
    "conflicts_per_generation.csv", "heat_strip.svg", "type_growth.svg",
    "conflicts_per_generation.svg"};

/// Writes every CSV and SVG derived from the ledger into `dir` atomically.
CampaignMetrics write_report(const std::filesystem::path& dir, const std::vector<CampaignEvent>& ledger);

/// Top-down frame of all footprints over the lane geometry at one step.
std::string frame_svg(const LaneGraph& graph, const Trace& trace, std::size_t step);

/// One frame per whole second 0..T (T + 1 files); seconds past the end of a
/// truncated trace repeat its final state. Returns the number written.
int write_frames(const std::filesystem::path& dir, const LaneGraph& graph, const Trace& trace);

}  // namespace conflictfuzz
