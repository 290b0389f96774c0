#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace conflictfuzz {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Absolute heading difference in [0, pi].
double heading_difference(double a, double b);

/// Vehicle footprint: a rectangle centred on `center`, long axis along `heading`.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double length = 4.5;
  double width = 2.0;

  /// Counter-clockwise corners starting at front-left.
  std::array<Vec2, 4> corners() const;
};

struct Contact {
  Vec2 point;   // centroid of the overlap polygon
  Vec2 normal;  // unit axis of least penetration, pointing from the first box to the second
  double depth = 0.0;
};

/// Separating-axis test. Touching boxes (zero penetration) do not overlap.
std::optional<Contact> intersect(const OrientedBox& a, const OrientedBox& b);

/// True when the box and the axis-aligned square [min, min + size]^2 share interior area.
bool overlaps_square(const OrientedBox& box, Vec2 square_min, double size);

using Polygon = std::vector<Vec2>;

/// Sutherland-Hodgman clip of `subject` by the convex, counter-clockwise `clipper`.
Polygon clip_convex(const Polygon& subject, const Polygon& clipper);
double polygon_area(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);

}  // namespace conflictfuzz
