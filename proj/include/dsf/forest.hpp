#pragma once

#include <span>
#include <vector>

#include "dsf/geometry.hpp"
#include "dsf/point.hpp"
#include "dsf/slab_store.hpp"

namespace dsf {

// A forest path as a piecewise-linear function of time: vertices with
// strictly increasing ordinates, evaluated by linear interpolation.
class PathPolyline {
 public:
  PathPolyline() = default;
  explicit PathPolyline(Point start) { vertices_.push_back(start); }

  void append(const Point& p);
  const std::vector<Point>& vertices() const { return vertices_; }
  double start_time() const { return vertices_.front().y; }
  double end_time() const { return vertices_.back().y; }
  // Linear interpolation; t outside [start_time, end_time] is a domain error.
  double eval(double t) const;

 private:
  std::vector<Point> vertices_;
};

struct AncestorOptions {
  double initial_radius = 0.0;  // 0 means 2/sqrt(intensity)
  double radius_cap = 1e6;
};

// The nearest candidate strictly above x. Candidates are the store points
// outside `exclude` plus the `extra` points (which are never excluded).
// Equidistant candidates are resolved by (smaller y, then smaller x).
Point ancestor(const Point& x, SlabStore& store, const HistorySet* exclude = nullptr,
               std::span<const Point> extra = {}, const AncestorOptions& opts = {});

// Iterates `ancestor` with no exclusions until the last vertex ordinate
// exceeds y_max.
PathPolyline trace_path(const Point& x, SlabStore& store, double y_max,
                        const AncestorOptions& opts = {});

}  // namespace dsf
