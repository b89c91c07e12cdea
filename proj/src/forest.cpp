#include "dsf/forest.hpp"

#include <algorithm>
#include <cmath>

namespace dsf {

void PathPolyline::append(const Point& p) {
  if (!vertices_.empty() && p.y <= vertices_.back().y) {
    throw std::invalid_argument("PathPolyline: ordinates must strictly increase");
  }
  vertices_.push_back(p);
}

double PathPolyline::eval(double t) const {
  if (vertices_.empty() || t < start_time() || t > end_time()) {
    throw std::domain_error("PathPolyline::eval: t outside path domain");
  }
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), t,
                             [](const Point& p, double v) { return p.y < v; });
  if (it->y == t) return it->x;
  const Point& b = *it;
  const Point& a = *(it - 1);
  return a.x + (b.x - a.x) * (t - a.y) / (b.y - a.y);
}

namespace {

struct Best {
  bool found = false;
  double d2 = 0.0;
  Point p;

  void offer(double cand_d2, const Point& cand) {
    if (!found || cand_d2 < d2 ||
        (cand_d2 == d2 && lower_then_lefter(cand, p))) {
      found = true;
      d2 = cand_d2;
      p = cand;
    }
  }
};

}  // namespace

Point ancestor(const Point& x, SlabStore& store, const HistorySet* exclude,
               std::span<const Point> extra, const AncestorOptions& opts) {
  if (!finite(x)) throw std::invalid_argument("ancestor: query point not finite");

  Best best_extra;
  for (const Point& p : extra) {
    if (p.y > x.y) best_extra.offer(dist2(p, x), p);
  }

  double r = opts.initial_radius > 0.0 ? opts.initial_radius : 2.0 / std::sqrt(store.intensity());
  while (true) {
    Best best;
    const double r2 = r * r;
    store.for_each_candidate(Rect{x.x - r, x.y, x.x + r, x.y + r}, [&](const Point& p) {
      if (p.y <= x.y) return;
      const double d2 = dist2(p, x);
      if (d2 > r2) return;
      if (exclude && exclude->contains(p)) return;
      best.offer(d2, p);
    });
    // The minimum over candidates within radius r beats everything outside,
    // so it is the global minimum once it exists.
    if (best_extra.found) best.offer(best_extra.d2, best_extra.p);
    if (best.found && best.d2 <= r2) return best.p;
    r *= 2.0;
    if (r > opts.radius_cap) {
      if (best_extra.found) return best_extra.p;
      throw SearchOverflowError("ancestor: search radius cap exceeded");
    }
  }
}

PathPolyline trace_path(const Point& x, SlabStore& store, double y_max,
                        const AncestorOptions& opts) {
  PathPolyline path(x);
  while (path.end_time() <= y_max) {
    path.append(ancestor(path.vertices().back(), store, nullptr, {}, opts));
  }
  return path;
}

}  // namespace dsf
