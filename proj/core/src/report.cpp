#include "conflictfuzz/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "conflictfuzz/fileio.hpp"
#include "conflictfuzz/vehicle.hpp"

namespace conflictfuzz {

namespace {

std::string fmt(double v, int precision = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Stable colour per type key, independent of discovery order.
std::string type_colour(const std::string& key) {
  static const char* palette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4",
                                  "#f032e6", "#bfef45", "#469990", "#9a6324", "#800000", "#808000",
                                  "#000075", "#ffe119", "#aaffc3", "#dcbeff"};
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : key) h = (h ^ c) * 1099511628211ULL;
  return palette[h % (sizeof(palette) / sizeof(palette[0]))];
}

struct Axes {
  double width = 640, height = 320, left = 56, right = 16, top = 24, bottom = 40;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  double px(double x) const { return left + (x - x_min) / std::max(1e-12, x_max - x_min) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y_min) / std::max(1e-12, y_max - y_min) * (height - top - bottom); }
};

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w, 0) + "\" height=\"" + fmt(h, 0) +
         "\" viewBox=\"0 0 " + fmt(w, 0) + " " + fmt(h, 0) + "\">\n";
}

std::string axes_svg(const Axes& a, const std::string& title, const std::string& x_label, const std::string& y_label) {
  std::ostringstream o;
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(a.width / 2, 1) << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(title)
    << "</text>\n";
  o << "<line x1=\"" << fmt(a.left, 1) << "\" y1=\"" << fmt(a.height - a.bottom, 1) << "\" x2=\"" << fmt(a.width - a.right, 1)
    << "\" y2=\"" << fmt(a.height - a.bottom, 1) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << fmt(a.left, 1) << "\" y1=\"" << fmt(a.top, 1) << "\" x2=\"" << fmt(a.left, 1) << "\" y2=\""
    << fmt(a.height - a.bottom, 1) << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << fmt(a.width / 2, 1) << "\" y=\"" << fmt(a.height - 8, 1)
    << "\" text-anchor=\"middle\" font-size=\"11\">" << xml_escape(x_label) << "</text>\n";
  o << "<text x=\"12\" y=\"" << fmt(a.height / 2, 1) << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 12 "
    << fmt(a.height / 2, 1) << ")\">" << xml_escape(y_label) << "</text>\n";
  o << "<text x=\"" << fmt(a.left - 4, 1) << "\" y=\"" << fmt(a.py(a.y_min) + 4, 1) << "\" text-anchor=\"end\" font-size=\"10\">"
    << fmt(a.y_min, 0) << "</text>\n";
  o << "<text x=\"" << fmt(a.left - 4, 1) << "\" y=\"" << fmt(a.py(a.y_max) + 4, 1) << "\" text-anchor=\"end\" font-size=\"10\">"
    << fmt(a.y_max, 1) << "</text>\n";
  o << "<text x=\"" << fmt(a.px(a.x_max), 1) << "\" y=\"" << fmt(a.height - a.bottom + 14, 1)
    << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(a.x_max, 0) << "</text>\n";
  return o.str();
}

}  // namespace

std::string metrics_csv(const CampaignMetrics& m) {
  std::string out =
      "executed_steps,total_collisions,distinct_types,steps_to_first_collision,avg_steps_per_collision,"
      "steps_to_all_types,npc_fault_collisions\n";
  out += std::to_string(m.executed_steps) + "," + std::to_string(m.total_collisions) + "," +
         std::to_string(m.distinct_types) + "," + opt(m.steps_to_first_collision) + "," +
         opt(m.avg_steps_per_collision) + "," + opt(m.steps_to_all_types) + "," +
         std::to_string(m.npc_fault_collisions) + "\n";
  return out;
}

std::string type_growth_csv(const CampaignMetrics& m) {
  std::string out = "step,distinct_types\n";
  for (std::size_t i = 0; i < m.type_growth.size(); ++i) {
    out += std::to_string(i + 1) + "," + std::to_string(m.type_growth[i]) + "\n";
  }
  return out;
}

std::string heat_strip_csv(const CampaignMetrics& m) {
  std::string out = "step,type_key\n";
  for (std::size_t i = 0; i < m.heat_strip.size(); ++i) out += std::to_string(i + 1) + "," + csv_field(m.heat_strip[i]) + "\n";
  return out;
}

std::string conflicts_per_generation_csv(const CampaignMetrics& m) {
  std::string out = "checkpoint,mean_conflicts,samples\n";
  if (!m.conflicts_per_generation) return out;
  for (const auto& c : *m.conflicts_per_generation) {
    out += std::to_string(c.checkpoint) + "," + (c.mean_conflicts ? fmt(*c.mean_conflicts) : std::string()) + "," +
           std::to_string(c.samples) + "\n";
  }
  return out;
}

std::string heat_strip_svg(const CampaignMetrics& m) {
  const std::size_t n = m.heat_strip.size();
  const double bar = n > 400 ? 1.0 : 3.0;
  const double width = 40.0 + bar * static_cast<double>(n);
  const double height = 80.0;
  std::ostringstream o;
  o << svg_open(width, height);
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"20\" y=\"14\" font-size=\"12\">Collisions per search step (" << n << " steps, " << m.distinct_types
    << " types)</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& key = m.heat_strip[i];
    const std::string colour = key.empty() ? "#d0d0d0" : type_colour(key);
    o << "<rect class=\"step\" x=\"" << fmt(20.0 + bar * static_cast<double>(i), 1) << "\" y=\"24\" width=\"" << fmt(bar, 1)
      << "\" height=\"40\" fill=\"" << colour << "\"";
    if (!key.empty()) o << "><title>step " << i + 1 << ": " << xml_escape(key) << "</title></rect>\n";
    else o << "/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string type_growth_svg(const CampaignMetrics& m) {
  Axes a;
  a.x_max = std::max<double>(1.0, static_cast<double>(m.type_growth.size()));
  a.y_max = std::max(1.0, static_cast<double>(m.distinct_types));
  std::ostringstream o;
  o << svg_open(a.width, a.height) << axes_svg(a, "Distinct collision types", "search step", "types");
  o << "<polyline fill=\"none\" stroke=\"#4363d8\" stroke-width=\"1.5\" points=\"" << fmt(a.px(0), 1) << ","
    << fmt(a.py(0), 1);
  for (std::size_t i = 0; i < m.type_growth.size(); ++i) {
    const double x = static_cast<double>(i + 1);
    const double y_prev = i == 0 ? 0.0 : m.type_growth[i - 1];
    o << " " << fmt(a.px(x), 1) << "," << fmt(a.py(y_prev), 1) << " " << fmt(a.px(x), 1) << ","
      << fmt(a.py(m.type_growth[i]), 1);
  }
  o << "\"/>\n</svg>\n";
  return o.str();
}

std::string conflicts_per_generation_svg(const CampaignMetrics& m) {
  Axes a;
  std::vector<std::pair<double, double>> pts;
  if (m.conflicts_per_generation) {
    for (const auto& c : *m.conflicts_per_generation) {
      if (c.mean_conflicts) pts.emplace_back(c.checkpoint, *c.mean_conflicts);
    }
  }
  for (const auto& [x, y] : pts) {
    a.x_max = std::max(a.x_max, x);
    a.y_max = std::max(a.y_max, y);
  }
  std::ostringstream o;
  o << svg_open(a.width, a.height) << axes_svg(a, "Conflicts per selected scenario", "search step", "mean conflicts");
  if (pts.empty()) {
    o << "<text x=\"" << fmt(a.width / 2, 1) << "\" y=\"" << fmt(a.height / 2, 1)
      << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#808080\">no conflict-search stage</text>\n";
  } else {
    o << "<polyline fill=\"none\" stroke=\"#e6194b\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << fmt(a.px(pts[i].first), 1) << "," << fmt(a.py(pts[i].second), 1);
    o << "\"/>\n";
    for (const auto& [x, y] : pts) {
      o << "<circle cx=\"" << fmt(a.px(x), 1) << "\" cy=\"" << fmt(a.py(y), 1) << "\" r=\"3\" fill=\"#e6194b\"><title>"
        << fmt(x, 0) << ": " << fmt(y, 2) << "</title></circle>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string summary_text(const CampaignMetrics& m) {
  auto row = [](const std::string& name, const std::string& value) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-40s %s\n", name.c_str(), value.c_str());
    return std::string(buf);
  };
  auto or_dash = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("-"); };
  std::string out = "Campaign summary\n";
  out += row("Search steps executed", std::to_string(m.executed_steps));
  out += row("Total collisions (EV-caused)", std::to_string(m.total_collisions));
  out += row("Collisions caused by NPCs (excluded)", std::to_string(m.npc_fault_collisions));
  out += row("Distinct collision types", std::to_string(m.distinct_types));
  out += row("Search steps for first collision", or_dash(m.steps_to_first_collision));
  out += row("Average search steps for one collision", or_dash(m.avg_steps_per_collision));
  out += row("Search steps to find all types", or_dash(m.steps_to_all_types));
  if (m.conflicts_per_generation) {
    for (const auto& c : *m.conflicts_per_generation) {
      out += row("Mean conflicts at step " + std::to_string(c.checkpoint), c.mean_conflicts ? fmt(*c.mean_conflicts, 2) : "-");
    }
  }
  return out;
}

CampaignMetrics write_report(const std::filesystem::path& dir, const std::vector<CampaignEvent>& ledger) {
  const CampaignMetrics m = compute_metrics(ledger);
  write_file_atomic(dir / "metrics.csv", metrics_csv(m));
  write_file_atomic(dir / "type_growth.csv", type_growth_csv(m));
  write_file_atomic(dir / "heat_strip.csv", heat_strip_csv(m));
  write_file_atomic(dir / "conflicts_per_generation.csv", conflicts_per_generation_csv(m));
  write_file_atomic(dir / "heat_strip.svg", heat_strip_svg(m));
  write_file_atomic(dir / "type_growth.svg", type_growth_svg(m));
  write_file_atomic(dir / "conflicts_per_generation.svg", conflicts_per_generation_svg(m));
  return m;
}

std::string frame_svg(const LaneGraph& graph, const Trace& trace, std::size_t step) {
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (const auto& lane : graph.lanes()) {
    for (const auto& p : lane.centerline.points()) {
      lo_x = std::min(lo_x, p.x - lane.width);
      hi_x = std::max(hi_x, p.x + lane.width);
      lo_y = std::min(lo_y, p.y - lane.width);
      hi_y = std::max(hi_y, p.y + lane.width);
    }
  }
  const double margin = 5.0;
  const double scale = 1200.0 / std::max(1.0, hi_x - lo_x + 2 * margin);
  const double w = (hi_x - lo_x + 2 * margin) * scale;
  const double h = std::max(60.0, (hi_y - lo_y + 2 * margin) * scale);
  auto sx = [&](double x) { return (x - lo_x + margin) * scale; };
  auto sy = [&](double y) { return h - (y - lo_y + margin) * scale; };

  std::ostringstream o;
  o << svg_open(w, h) << "<rect width=\"100%\" height=\"100%\" fill=\"#f4f4f4\"/>\n";
  for (const auto& lane : graph.lanes()) {
    const auto& pts = lane.centerline.points();
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 200);
    o << "<polyline fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"" << fmt(lane.width * scale, 2) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); i += stride) o << (i ? " " : "") << fmt(sx(pts[i].x), 1) << "," << fmt(sy(pts[i].y), 1);
    o << " " << fmt(sx(pts.back().x), 1) << "," << fmt(sy(pts.back().y), 1) << "\"/>\n";
  }
  const std::size_t n = std::min(step, trace.steps.size() - 1);
  for (const auto& v : trace.steps[n]) {
    const auto corners = v.footprint().corners();
    o << "<polygon fill=\"" << (v.vehicle_id == 0 ? "#4363d8" : "#f58231") << "\" points=\"";
    for (std::size_t i = 0; i < corners.size(); ++i) o << (i ? " " : "") << fmt(sx(corners[i].x), 2) << "," << fmt(sy(corners[i].y), 2);
    o << "\"><title>" << (v.vehicle_id == 0 ? std::string("EV") : "NPC " + std::to_string(v.vehicle_id - 1)) << " "
      << fmt(v.speed, 1) << " m/s</title></polygon>\n";
  }
  o << "<text x=\"8\" y=\"14\" font-size=\"12\">t = " << fmt(trace.time_at(n), 1) << " s"
    << (trace.collision && n + 1 == trace.steps.size() ? " (collision)" : "") << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

int write_frames(const std::filesystem::path& dir, const LaneGraph& graph, const Trace& trace) {
  std::filesystem::create_directories(dir);
  const int sps = steps_per_second(trace.dt);
  int written = 0;
  for (int t = 0; t <= trace.duration_s; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03d.svg", t);
    write_file_atomic(dir / name, frame_svg(graph, trace, static_cast<std::size_t>(t * sps)));
    ++written;
  }
  return written;
}

}  // namespace conflictfuzz
