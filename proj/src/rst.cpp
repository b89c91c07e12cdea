#include "dsf/rst.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace dsf {

namespace {

uint64_t point_bits(const Point& p) {
  const uint64_t a = std::bit_cast<uint64_t>(p.x);
  const uint64_t b = std::bit_cast<uint64_t>(p.y);
  return a ^ (b * 0x9e3779b97f4a7c15ULL + (a << 13));
}

// Smallest norm attained on the segment [a, b].
double segment_min_norm(const Point& a, const Point& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return norm(a);
  double t = -(a.x * dx + a.y * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const Point q{a.x + t * dx, a.y + t * dy};
  return norm(q);
}

}  // namespace

Point rst_ancestor(const Point& x, SlabStore& store) {
  const double nx = norm(x);
  if (nx == 0.0) throw std::invalid_argument("rst_ancestor: undefined at the origin");

  // The origin is always a candidate at distance ||x||; any better point
  // must have smaller norm and lie within that distance.
  double best_d2 = nx * nx;
  Point best{0.0, 0.0};

  double r = std::min(nx, 2.0 / std::sqrt(store.intensity()));
  while (true) {
    const double r2 = r * r;
    store.for_each_candidate(Rect{x.x - r, x.y - r, x.x + r, x.y + r}, [&](const Point& p) {
      if (norm2(p) >= nx * nx) return;
      const double d2 = dist2(p, x);
      if (d2 > r2) return;
      if (d2 < best_d2 || (d2 == best_d2 && lower_then_lefter(p, best))) {
        best = p;
        best_d2 = d2;
      }
    });
    // The best candidate within radius r beats everything outside it.
    if (best_d2 <= r2) return best;
    r = std::min(nx, 2.0 * r);
  }
}

Point RstTracer::parent(const Point& x) {
  const uint64_t key = point_bits(x);
  auto it = parents_.find(key);
  if (it != parents_.end()) return it->second;
  const Point p = rst_ancestor(x, store_);
  parents_.emplace(key, p);
  return p;
}

std::vector<Point> RstTracer::path_to_root(const Point& x) {
  std::vector<Point> path{x};
  Point cur = x;
  while (!(cur == Point{0.0, 0.0})) {
    cur = parent(cur);
    path.push_back(cur);
  }
  return path;
}

long annulus_crossing_count(double r, double r_out, SlabStore& store) {
  if (!(r > 0.0) || !(r_out >= 2.0 * r)) {
    throw std::invalid_argument("annulus_crossing_count: require r > 0 and r_out >= 2r");
  }
  const double outer = r_out + 1.0;
  std::vector<Point> starts;
  store.for_each_candidate(Rect{-outer, -outer, outer, outer}, [&](const Point& p) {
    const double n = norm(p);
    if (n >= r_out && n <= outer) starts.push_back(p);
  });
  std::sort(starts.begin(), starts.end(), lower_then_lefter);

  RstTracer tracer(store);
  std::unordered_set<uint64_t> crossing_edges;
  std::unordered_set<uint64_t> visited;
  for (const Point& s : starts) {
    Point cur = s;
    while (norm(cur) > 0.0) {
      if (!visited.insert(point_bits(cur)).second) break;  // merged into a traced path
      const Point next = tracer.parent(cur);
      const double lo = segment_min_norm(cur, next);
      const double hi = std::max(norm(cur), norm(next));
      if (lo <= r && r <= hi) crossing_edges.insert(point_bits(cur));
      if (norm(next) < r) break;  // strictly inside; no further crossings of C_r
      cur = next;
    }
  }
  return static_cast<long>(crossing_edges.size());
}

}  // namespace dsf
