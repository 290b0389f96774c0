#include "conflictfuzz/geometry.hpp"

#include <algorithm>
#include <limits>

namespace conflictfuzz {

namespace {

constexpr double kSeparationEps = 1e-9;

struct Interval1d {
  double lo;
  double hi;
};

template <std::size_t N>
Interval1d project(const std::array<Vec2, N>& pts, Vec2 axis) {
  Interval1d out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    const double v = dot(p, axis);
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  }
  return out;
}

}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

double heading_difference(double a, double b) { return std::abs(wrap_angle(a - b)); }

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 f = unit_from_heading(heading) * (length / 2.0);
  const Vec2 l = Vec2{-std::sin(heading), std::cos(heading)} * (width / 2.0);
  return {center + f + l, center - f + l, center - f - l, center + f - l};
}

std::optional<Contact> intersect(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {unit_from_heading(a.heading), unit_from_heading(a.heading + kPi / 2.0),
                                    unit_from_heading(b.heading), unit_from_heading(b.heading + kPi / 2.0)};
  double best_depth = std::numeric_limits<double>::infinity();
  Vec2 best_axis{};
  for (const auto& axis : axes) {
    const auto pa = project(ca, axis);
    const auto pb = project(cb, axis);
    const double overlap = std::min(pa.hi, pb.hi) - std::max(pa.lo, pb.lo);
    if (overlap <= kSeparationEps) return std::nullopt;
    if (overlap < best_depth) {
      best_depth = overlap;
      best_axis = axis;
    }
  }
  if (dot(b.center - a.center, best_axis) < 0.0) best_axis = best_axis * -1.0;

  const Polygon pa(ca.begin(), ca.end());
  const Polygon pb(cb.begin(), cb.end());
  const Polygon overlap = clip_convex(pa, pb);
  const Vec2 point = overlap.empty() ? (a.center + b.center) * 0.5 : polygon_centroid(overlap);
  return Contact{point, best_axis, best_depth};
}

bool overlaps_square(const OrientedBox& box, Vec2 square_min, double size) {
  const auto cb = box.corners();
  const std::array<Vec2, 4> sq = {square_min, square_min + Vec2{size, 0.0}, square_min + Vec2{size, size},
                                  square_min + Vec2{0.0, size}};
  const std::array<Vec2, 4> axes = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, unit_from_heading(box.heading),
                                    unit_from_heading(box.heading + kPi / 2.0)};
  for (const auto& axis : axes) {
    const auto p1 = project(cb, axis);
    const auto p2 = project(sq, axis);
    if (std::min(p1.hi, p2.hi) - std::max(p1.lo, p2.lo) <= kSeparationEps) return false;
  }
  return true;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clipper) {
  Polygon output = subject;
  const std::size_t n = clipper.size();
  for (std::size_t i = 0; i < n && !output.empty(); ++i) {
    const Vec2 e0 = clipper[i];
    const Vec2 e1 = clipper[(i + 1) % n];
    const Vec2 edge = e1 - e0;
    auto inside = [&](Vec2 p) { return cross(edge, p - e0) >= 0.0; };
    Polygon input;
    input.swap(output);
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Vec2 cur = input[j];
      const Vec2 prev = input[(j + input.size() - 1) % input.size()];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in != prev_in) {
        const Vec2 d = cur - prev;
        const double denom = cross(edge, d);
        if (denom != 0.0) {
          const double t = cross(e0 - prev, edge) / -denom;
          output.push_back(prev + d * std::clamp(t, 0.0, 1.0));
        }
      }
      if (cur_in) output.push_back(cur);
    }
  }
  return output;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  return std::abs(twice) / 2.0;
}

Vec2 polygon_centroid(const Polygon& poly) {
  double twice = 0.0;
  Vec2 acc{};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    const double c = cross(p, q);
    twice += c;
    acc = acc + (p + q) * c;
  }
  if (std::abs(twice) < 1e-12) {
    Vec2 mean{};
    for (const auto& p : poly) mean = mean + p;
    return poly.empty() ? mean : mean * (1.0 / static_cast<double>(poly.size()));
  }
  return acc * (1.0 / (3.0 * twice));
}

}  // namespace conflictfuzz
