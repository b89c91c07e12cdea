#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dsf {

// A planar location. The abscissa x is the space coordinate, the ordinate y
// is the time coordinate.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

inline bool finite(const Point& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

inline double dist2(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double dist(const Point& a, const Point& b) {
  return std::sqrt(dist2(a, b));
}

inline double norm2(const Point& p) { return p.x * p.x + p.y * p.y; }
inline double norm(const Point& p) { return std::sqrt(norm2(p)); }

// Ordering used to break ties between equidistant candidates: smaller
// ordinate first, then smaller abscissa.
inline bool lower_then_lefter(const Point& a, const Point& b) {
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Point& p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  bool degenerate() const { return x1 <= x0 || y1 <= y0; }
};

// Raised when a spatial search exceeds its radius cap.
struct SearchOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a store would exceed its memory budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsf
