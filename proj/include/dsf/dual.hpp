#pragma once

#include <optional>
#include <vector>

#include "dsf/forest.hpp"

namespace dsf {

// A vertex of the backward forest: the midpoint between a Poisson point and
// the path flanking it on one side at that point's level.
struct DualVertex {
  Point location;
  int side = 0;  // -1 left, +1 right
  Point parent_primal;
  bool boundary_flagged = false;  // flanking query touched the family edge
};

// A backward path, stored with decreasing ordinates.
struct DualPath {
  std::vector<Point> vertices;
  bool boundary_flagged = false;
  double start_time() const { return vertices.front().y; }
  double bottom_time() const { return vertices.back().y; }
  double eval(double t) const;
};

// The forest restricted to a window together with its backward dual. The
// path family is traced from every store point in the horizontally expanded
// window, so flanking queries inside the core are insulated from the edge.
class DualWindow {
 public:
  DualWindow(SlabStore& store, const Rect& core, double expand_factor = 2.0);

  const Rect& core() const { return core_; }
  const std::vector<PathPolyline>& primal_paths() const { return primal_paths_; }
  const std::vector<DualVertex>& dual_vertices() const { return dual_vertices_; }
  const std::vector<DualPath>& dual_paths() const { return dual_paths_; }

  // Nearest family path strictly on the given side of p at p's level;
  // side = +1 right, -1 left.
  std::optional<PathPolyline> flanking_path(const Point& p, int side) const;

  // One downward step of the dual forest from a dual vertex.
  std::optional<DualVertex> dual_ancestor(const DualVertex& v) const;

  // Dual edges as rows (from, to, side).
  struct Edge {
    Point from;
    Point to;
    int side;
  };
  std::vector<Edge> dual_edges() const;

 private:
  struct Crossing {
    double x;       // abscissa where the edge crosses the queried level
    size_t edge;    // index into edges_
  };
  struct FamilyEdge {
    Point lo;
    Point hi;
  };

  void build_family(SlabStore& store);
  void build_dual();
  // All family-edge crossings of the horizontal level t, excluding crossings
  // exactly at x.
  std::optional<Crossing> nearest_crossing(double x, double t, int side) const;
  PathPolyline path_from(const Point& start) const;
  std::optional<DualVertex> midpoint_vertex(const Point& primal, int side) const;

  Rect core_;
  Rect family_rect_;
  std::vector<Point> family_points_;
  std::vector<FamilyEdge> edges_;
  std::vector<PathPolyline> primal_paths_;
  std::vector<DualVertex> dual_vertices_;
  std::vector<DualPath> dual_paths_;
};

// Counts sign changes of (primal - dual) over the common domain, sampled on
// a uniform grid plus all vertex ordinates. Zero for a valid construction.
long check_noncrossing(const std::vector<PathPolyline>& primal,
                       const std::vector<DualPath>& dual, double grid_resolution = 0.1);

}  // namespace dsf
