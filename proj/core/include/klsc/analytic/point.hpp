#pragma once

#include <cmath>

namespace klsc {

/// A point of the 2-D toy image space.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double c, Point a) { return {c * a.x, c * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
  constexpr Point& operator+=(Point b) {
    x += b.x;
    y += b.y;
    return *this;
  }
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline bool is_finite(Point a) { return std::isfinite(a.x) && std::isfinite(a.y); }

}  // namespace klsc
