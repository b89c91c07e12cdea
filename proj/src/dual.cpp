#include "dsf/dual.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace dsf {

namespace {

uint64_t point_key(const Point& p) {
  const uint64_t a = std::bit_cast<uint64_t>(p.x);
  const uint64_t b = std::bit_cast<uint64_t>(p.y);
  return a ^ (b * 0x9e3779b97f4a7c15ULL + (a << 13));
}

struct PointKeyed {
  Point p;
  bool operator==(const PointKeyed& o) const { return p == o.p; }
};

struct PointKeyedHash {
  size_t operator()(const PointKeyed& k) const { return point_key(k.p); }
};

using ParentMap = std::unordered_map<PointKeyed, Point, PointKeyedHash>;

}  // namespace

double DualPath::eval(double t) const {
  if (vertices.empty() || t > start_time() || t < bottom_time()) {
    throw std::domain_error("DualPath::eval: t outside path domain");
  }
  // Vertices are sorted by decreasing ordinate.
  auto it = std::lower_bound(vertices.begin(), vertices.end(), t,
                             [](const Point& p, double v) { return p.y > v; });
  if (it->y == t) return it->x;
  const Point& below = *it;
  const Point& above = *(it - 1);
  return below.x + (above.x - below.x) * (t - below.y) / (above.y - below.y);
}

DualWindow::DualWindow(SlabStore& store, const Rect& core, double expand_factor) : core_(core) {
  if (core.degenerate()) throw std::invalid_argument("DualWindow: degenerate core window");
  if (expand_factor < 1.0) throw std::invalid_argument("DualWindow: expand factor >= 1 required");
  const double extra = (expand_factor - 1.0) * core.width() / 2.0;
  family_rect_ = Rect{core.x0 - extra, core.y0, core.x1 + extra, core.y1};
  build_family(store);
  build_dual();
}

void DualWindow::build_family(SlabStore& store) {
  family_points_ = store.sample_region(family_rect_);
  ParentMap parents;
  for (const Point& start : family_points_) {
    PathPolyline poly(start);
    Point cur = start;
    while (cur.y <= core_.y1) {
      auto [it, fresh] = parents.try_emplace(PointKeyed{cur});
      if (fresh) {
        it->second = ancestor(cur, store);
        edges_.push_back(FamilyEdge{cur, it->second});
      }
      cur = it->second;
      poly.append(cur);
    }
    primal_paths_.push_back(std::move(poly));
  }
}

std::optional<DualWindow::Crossing> DualWindow::nearest_crossing(double x, double t,
                                                                 int side) const {
  std::optional<Crossing> best;
  double best_slope = 0.0;
  for (size_t i = 0; i < edges_.size(); ++i) {
    const FamilyEdge& e = edges_[i];
    if (!(e.lo.y < t && t <= e.hi.y)) continue;
    // Exact at the endpoint: crossings through a vertex must compare equal
    // to its abscissa so the strict side filter can exclude them.
    const double cx = t == e.hi.y
                          ? e.hi.x
                          : e.lo.x + (e.hi.x - e.lo.x) * (t - e.lo.y) / (e.hi.y - e.lo.y);
    if (side > 0 ? cx <= x : cx >= x) continue;
    // Edges merging into one vertex all cross its level at the same
    // abscissa; the one bounding the gap just below the level is the one
    // fanning least to the queried side.
    const double slope = (e.hi.x - e.lo.x) / (e.hi.y - e.lo.y);
    const bool better =
        !best ||
        (side > 0 ? cx < best->x || (cx == best->x && slope > best_slope)
                  : cx > best->x || (cx == best->x && slope < best_slope));
    if (better) {
      best = Crossing{cx, i};
      best_slope = slope;
    }
  }
  return best;
}

PathPolyline DualWindow::path_from(const Point& start) const {
  PathPolyline poly(start);
  Point cur = start;
  while (cur.y <= core_.y1) {
    bool advanced = false;
    for (const FamilyEdge& e : edges_) {
      if (e.lo == cur) {
        cur = e.hi;
        poly.append(cur);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return poly;
}

std::optional<PathPolyline> DualWindow::flanking_path(const Point& p, int side) const {
  auto c = nearest_crossing(p.x, p.y, side);
  if (!c) return std::nullopt;
  return path_from(edges_[c->edge].lo);
}

std::optional<DualVertex> DualWindow::midpoint_vertex(const Point& primal, int side) const {
  auto c = nearest_crossing(primal.x, primal.y, side);
  if (!c) return std::nullopt;
  DualVertex v;
  v.location = Point{(primal.x + c->x) / 2.0, primal.y};
  v.side = side;
  v.parent_primal = primal;
  v.boundary_flagged = c->x < core_.x0 || c->x > core_.x1;
  return v;
}

std::optional<DualVertex> DualWindow::dual_ancestor(const DualVertex& v) const {
  const auto right = nearest_crossing(v.location.x, v.location.y, +1);
  const auto left = nearest_crossing(v.location.x, v.location.y, -1);
  if (!right || !left) return std::nullopt;
  const Point q_right = edges_[right->edge].lo;
  const Point q_left = edges_[left->edge].lo;
  // Step to the flank of whichever neighbouring path starts higher; its
  // level is strictly below the current one.
  if (q_right.y > q_left.y) return midpoint_vertex(q_right, -1);
  return midpoint_vertex(q_left, +1);
}

void DualWindow::build_dual() {
  for (const Point& p : family_points_) {
    if (!core_.contains(p)) continue;
    for (int side : {-1, +1}) {
      auto start = midpoint_vertex(p, side);
      if (!start) continue;
      dual_vertices_.push_back(*start);
      DualPath path;
      path.vertices.push_back(start->location);
      path.boundary_flagged = start->boundary_flagged;
      DualVertex cur = *start;
      while (cur.location.y > core_.y0) {
        auto next = dual_ancestor(cur);
        if (!next) break;
        path.vertices.push_back(next->location);
        path.boundary_flagged = path.boundary_flagged || next->boundary_flagged;
        cur = *next;
      }
      dual_paths_.push_back(std::move(path));
    }
  }
}

std::vector<DualWindow::Edge> DualWindow::dual_edges() const {
  std::vector<Edge> out;
  for (const DualPath& path : dual_paths_) {
    for (size_t i = 0; i + 1 < path.vertices.size(); ++i) {
      out.push_back(Edge{path.vertices[i], path.vertices[i + 1], 0});
    }
  }
  return out;
}

long check_noncrossing(const std::vector<PathPolyline>& primal,
                       const std::vector<DualPath>& dual, double grid_resolution) {
  long violations = 0;
  std::vector<double> ts;
  for (const PathPolyline& p : primal) {
    if (p.vertices().size() < 2) continue;
    double pxmin = p.vertices().front().x, pxmax = pxmin;
    for (const Point& v : p.vertices()) {
      pxmin = std::min(pxmin, v.x);
      pxmax = std::max(pxmax, v.x);
    }
    for (const DualPath& d : dual) {
      if (d.vertices.size() < 2) continue;
      if (!(p.start_time() < d.start_time())) continue;
      const double lo = std::max(p.start_time(), d.bottom_time());
      const double hi = std::min(d.start_time(), p.end_time());
      if (!(lo < hi)) continue;
      double dxmin = d.vertices.front().x, dxmax = dxmin;
      for (const Point& v : d.vertices) {
        dxmin = std::min(dxmin, v.x);
        dxmax = std::max(dxmax, v.x);
      }
      if (pxmax < dxmin || dxmax < pxmin) continue;  // signs cannot flip

      ts.clear();
      for (double t = lo; t <= hi; t += grid_resolution) ts.push_back(t);
      ts.push_back(hi);
      for (const Point& v : p.vertices()) {
        if (v.y >= lo && v.y <= hi) ts.push_back(v.y);
      }
      for (const Point& v : d.vertices) {
        if (v.y >= lo && v.y <= hi) ts.push_back(v.y);
      }
      long pos = 0, neg = 0;
      for (double t : ts) {
        const double diff = p.eval(t) - d.eval(t);
        if (diff > 0.0) ++pos;
        else if (diff < 0.0) ++neg;
      }
      // Number of ordered sample pairs with a strictly negative product.
      violations += pos * neg;
    }
  }
  return violations;
}

}  // namespace dsf
