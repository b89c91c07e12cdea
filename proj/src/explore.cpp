#include "dsf/explore.hpp"

#include <algorithm>
#include <cmath>

namespace dsf {

namespace {

double min_ordinate(const std::vector<Point>& pts) {
  double m = pts.front().y;
  for (const Point& p : pts) m = std::min(m, p.y);
  return m;
}

}  // namespace

ExplorationState::ExplorationState(std::vector<Point> starts, int kappa)
    : ExplorationState(std::move(starts), kappa, HistorySet(), {}) {}

ExplorationState::ExplorationState(std::vector<Point> starts, int kappa,
                                   HistorySet initial_history, std::vector<Point> extra)
    : positions_(std::move(starts)),
      history_(std::move(initial_history)),
      extra_(std::move(extra)),
      kappa_(kappa) {
  if (positions_.empty()) throw std::invalid_argument("ExplorationState: k >= 1 required");
  if (kappa_ < 6) throw std::invalid_argument("ExplorationState: kappa must be an integer >= 6");
  // A default-constructed history means a cold start: empty at the walkers'
  // minimal ordinate.
  if (history_.empty() && history_.clip_level() == 0.0) {
    history_ = HistorySet(min_ordinate(positions_));
  }
  validate_initial();
  last_good_level_ = clip();
  paths_.reserve(positions_.size());
  for (const Point& p : positions_) paths_.emplace_back(p);
}

void ExplorationState::validate_initial() const {
  double lo = positions_.front().y, hi = lo;
  for (const Point& p : positions_) {
    if (!finite(p)) throw std::invalid_argument("ExplorationState: start point not finite");
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  if (hi - lo > kappa_) {
    throw std::invalid_argument("ExplorationState: start ordinate spread exceeds kappa");
  }
  if (history_.clip_level() != lo) {
    throw std::invalid_argument("ExplorationState: history clip must equal the minimal ordinate");
  }
  if (history_.height() > 1.0 + 1e-9) {
    throw std::invalid_argument("ExplorationState: initial history must fit in a unit strip");
  }
  for (const Point& e : extra_) {
    if (e.y > lo + 1.0 + 1e-9 || !history_.contains(e)) {
      throw std::invalid_argument(
          "ExplorationState: extra points must lie in the initial history within one unit of the clip");
    }
  }
}

int ExplorationState::distinct_position_count() const {
  int n = 0;
  for (size_t i = 0; i < positions_.size(); ++i) {
    bool seen = false;
    for (size_t j = 0; j < i; ++j) {
      if (positions_[j] == positions_[i]) {
        seen = true;
        break;
      }
    }
    if (!seen) ++n;
  }
  return n;
}

int ExplorationState::select_mover() const {
  int best = 0;
  for (int i = 1; i < k(); ++i) {
    if (lower_then_lefter(positions_[i], positions_[best])) best = i;
  }
  return best;
}

Point ExplorationState::mover_value() const { return positions_[select_mover()]; }

StepInfo ExplorationState::step(SlabStore& store) { return step_impl(store); }
StepInfo ExplorationState::step_resampled(SlabStore& fresh_store) { return step_impl(fresh_store); }

StepInfo ExplorationState::step_impl(SlabStore& candidate_store) {
  const Point w = mover_value();

  // Standing walkers and extra points enter the candidate set unfiltered.
  std::vector<Point> extra_candidates;
  extra_candidates.reserve(positions_.size() + extra_.size());
  for (const Point& p : positions_) {
    if (!(p == w)) extra_candidates.push_back(p);
  }
  extra_candidates.insert(extra_candidates.end(), extra_.begin(), extra_.end());

  const Point next = ancestor(w, candidate_store, &history_, extra_candidates);
  const double move_len = dist(next, w);

  StepInfo info;
  info.mover = select_mover();
  info.from = w;
  info.to = next;
  info.displacement = move_len;
  for (const Point& p : positions_) {
    if (!(p == w) && p == next) info.coalesced = true;
  }

  // All walkers sitting on the mover value advance together.
  for (int i = 0; i < k(); ++i) {
    if (positions_[i] == w) {
      positions_[i] = next;
      paths_[i].append(next);
    }
  }

  const double pre_height = history_.height();
  history_.add(SemiBall{w, move_len});
  history_.prune(min_ordinate(positions_));
  if (history_.height() > std::max(pre_height, move_len) + 1e-9) {
    throw std::logic_error("ExplorationState: history height induction violated");
  }

  // Extra points at or below the new clip can never be ancestors again.
  std::erase_if(extra_, [&](const Point& e) { return e.y <= clip(); });

  block_displacement_ += move_len;
  ++step_;
  return info;
}

bool ExplorationState::is_good_step() const {
  return step_ > 0 && step_ % k() == 0 && height() <= kappa_ &&
         clip() >= last_good_level_ + kappa_ + 1;
}

Point ExplorationState::cone_apex() const {
  const Point w = mover_value();
  return Point{w.x, w.y + cone_apex_lift()};
}

double ExplorationState::unexplored_cone_distance(SlabStore& store) const {
  const Point apex = cone_apex();

  // The cone must avoid the history set: test each retained ball against
  // both boundary rays exactly (a semi-ball reaching into the cone interior
  // necessarily crosses a boundary ray, since its center lies below apex).
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const SemiBall& b : history_.balls()) {
    for (double sx : {-1.0, 1.0}) {
      const double dx = sx * inv_sqrt2, dy = inv_sqrt2;
      double t = (b.center.x - apex.x) * dx + (b.center.y - apex.y) * dy;
      const double t_half = (b.center.y - apex.y) / dy;  // ray enters half-plane of b
      t = std::max({t, t_half, 0.0});
      const Point q{apex.x + t * dx, apex.y + t * dy};
      if (dist2(q, b.center) < b.radius * b.radius * (1.0 - 1e-12)) {
        throw std::logic_error("unexplored cone intersects the history set");
      }
    }
  }

  double r = 2.0 / std::sqrt(store.intensity());
  const double cap = 1e6;
  while (r <= cap) {
    double best = -1.0;
    const double r2 = r * r;
    store.for_each_candidate(
        Rect{apex.x - r * inv_sqrt2, apex.y, apex.x + r * inv_sqrt2, apex.y + r},
        [&](const Point& p) {
          if (!cone_contains(apex, p)) return;
          const double d2 = dist2(p, apex);
          if (d2 <= r2 && (best < 0.0 || d2 < best)) best = d2;
        });
    if (best >= 0.0) return std::sqrt(best);
    r *= 2.0;
  }
  throw SearchOverflowError("unexplored_cone_distance: search radius cap exceeded");
}

}  // namespace dsf
