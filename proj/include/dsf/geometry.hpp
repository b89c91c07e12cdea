#pragma once

#include <algorithm>
#include <vector>

#include "dsf/point.hpp"

namespace dsf {

// Closed disc intersected with the closed half-plane above its center.
struct SemiBall {
  Point center;
  double radius = 0.0;

  double top() const { return center.y + radius; }
};

inline bool in_semiball(const Point& p, const SemiBall& b) {
  if (p.y < b.center.y) return false;
  return dist2(p, b.center) <= b.radius * b.radius;
}

// The explored region known to contain no Poisson points: a clip level plus
// the semi-balls whose top still lies above it. Balls that fall entirely at
// or below the clip are dropped.
class HistorySet {
 public:
  HistorySet() = default;
  explicit HistorySet(double clip_level) : clip_(clip_level) {}
  HistorySet(double clip_level, std::vector<SemiBall> balls) : clip_(clip_level) {
    for (const SemiBall& b : balls) add(b);
  }

  double clip_level() const { return clip_; }
  const std::vector<SemiBall>& balls() const { return balls_; }
  bool empty() const { return balls_.empty(); }

  void add(const SemiBall& b) {
    if (b.top() > clip_) balls_.push_back(b);
  }

  // Raises the clip level; balls whose top drops to or below it are removed.
  void prune(double new_clip) {
    if (new_clip < clip_) throw std::invalid_argument("prune: clip level may not decrease");
    clip_ = new_clip;
    std::erase_if(balls_, [&](const SemiBall& b) { return b.top() <= clip_; });
  }

  double height() const {
    double h = 0.0;
    for (const SemiBall& b : balls_) h = std::max(h, b.top() - clip_);
    return h;
  }

  bool contains(const Point& p) const {
    if (p.y < clip_) return false;
    for (const SemiBall& b : balls_) {
      if (in_semiball(p, b)) return true;
    }
    return false;
  }

 private:
  double clip_ = 0.0;
  std::vector<SemiBall> balls_;
};

inline bool in_history(const Point& p, const HistorySet& h) { return h.contains(p); }
inline double history_height(const HistorySet& h) { return h.height(); }

inline HistorySet prune(const HistorySet& h, double new_clip) {
  HistorySet out = h;
  out.prune(new_clip);
  return out;
}

// True iff p lies in the upward cone with apex `apex` whose boundary rays
// make an angle of pi/4 with the vertical. Boundary rays included, apex not.
inline bool cone_contains(const Point& apex, const Point& p) {
  const double dx = p.x - apex.x;
  const double dy = p.y - apex.y;
  return dy > 0.0 && std::abs(dx) <= dy;
}

}  // namespace dsf
