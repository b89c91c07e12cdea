#pragma once

#include <unordered_map>
#include <vector>

#include "dsf/point.hpp"
#include "dsf/slab_store.hpp"

namespace dsf {

// Tree ancestor: the nearest candidate among store points with strictly
// smaller Euclidean norm, plus the origin (which roots the tree).
Point rst_ancestor(const Point& x, SlabStore& store);

// Radial tree navigation with memoized parents, so merged paths are walked
// once.
class RstTracer {
 public:
  explicit RstTracer(SlabStore& store) : store_(store) {}

  Point parent(const Point& x);
  // Vertex sequence from x to the origin.
  std::vector<Point> path_to_root(const Point& x);

 private:
  SlabStore& store_;
  struct KeyHash {
    size_t operator()(uint64_t k) const { return k; }
  };
  std::unordered_map<uint64_t, Point, KeyHash> parents_;
};

// Traces tree paths from every store point with norm in [r_out, r_out + 1]
// and counts the distinct edges on which these paths cross the circle of
// radius r.
long annulus_crossing_count(double r, double r_out, SlabStore& store);

}  // namespace dsf
