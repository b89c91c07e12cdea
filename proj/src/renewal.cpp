#include "dsf/renewal.hpp"

#include <algorithm>

namespace dsf {

namespace {

std::vector<Point> distinct_values(const std::vector<Point>& pts) {
  std::vector<Point> out;
  for (const Point& p : pts) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

}  // namespace

std::optional<std::vector<Point>> check_renewal_event(const ExplorationState& state,
                                                      SlabStore& store) {
  if (!state.is_good_step()) {
    throw std::logic_error("check_renewal_event: only defined at good steps");
  }
  const double clip = state.clip();
  const double kappa = state.kappa();
  const double big_r = kappa + 1.0;

  // Evaluate once per distinct walker value; coalesced duplicates share the
  // outcome ("not necessarily distinct" event points are allowed anyway).
  struct Found {
    Point value;
    Point u;
  };
  std::vector<Found> found;
  for (const Point& v : distinct_values(state.positions())) {
    const SemiBall big{Point{v.x, clip}, big_r};
    const SemiBall small{Point{v.x, clip + kappa}, 1.0};
    int n_big = 0, n_small = 0;
    Point p_big, p_small;
    store.for_each_candidate(Rect{v.x - big_r, clip, v.x + big_r, clip + big_r},
                             [&](const Point& p) {
                               if (in_semiball(p, big) && !state.history().contains(p)) {
                                 ++n_big;
                                 p_big = p;
                               }
                               if (in_semiball(p, small)) {
                                 ++n_small;
                                 p_small = p;
                               }
                             });
    if (n_big != 1 || n_small != 1 || !(p_big == p_small)) return std::nullopt;
    found.push_back({v, p_small});
  }

  std::vector<Point> per_walker;
  per_walker.reserve(state.positions().size());
  for (const Point& p : state.positions()) {
    for (const Found& f : found) {
      if (f.value == p) {
        per_walker.push_back(f.u);
        break;
      }
    }
  }
  return per_walker;
}

RenewalRecord make_renewal_record(const ExplorationState& state,
                                  const std::vector<Point>& event_points) {
  RenewalRecord rec;
  rec.beta = state.step_count();
  rec.block_size = state.block_displacement();
  const double clip = state.clip();
  const double up = clip + state.kappa();
  for (const Point& p : state.positions()) rec.u_new.push_back(Point{p.x, up});
  rec.extra_new = distinct_values(event_points);
  for (const Point& v : distinct_values(state.positions())) {
    rec.h0_balls.push_back(SemiBall{Point{v.x, clip}, state.kappa() + 1.0});
  }
  return rec;
}

ExplorationState restart_from_renewal(const RenewalRecord& record, int kappa) {
  const double level = record.u_new.front().y;
  HistorySet h0(level);
  for (const SemiBall& b : record.h0_balls) h0.add(b);
  return ExplorationState(record.u_new, kappa, std::move(h0), record.extra_new);
}

RenewalRecord run_to_renewal(ExplorationState& state, SlabStore& store,
                             const RenewalOptions& opts) {
  if (state.step_count() != 0) {
    throw std::logic_error("run_to_renewal: state must be at a segment start");
  }
  long steps = 0;
  while (true) {
    if (steps >= opts.step_cap) {
      throw RenewalTimeoutError("run_to_renewal: step cap exceeded before a renewal event");
    }
    state.step(store);
    ++steps;
    if (!state.is_good_step()) continue;
    auto event_points = check_renewal_event(state, store);
    if (!event_points) {
      state.note_good_step();
      continue;
    }
    RenewalRecord rec = make_renewal_record(state, *event_points);
    state = restart_from_renewal(rec, state.kappa());
    return rec;
  }
}

std::vector<RenewalRecord> renewal_sequence(std::vector<Point> starts, SlabStore& store,
                                            int count, int kappa, const RenewalOptions& opts) {
  if (count < 1) throw std::invalid_argument("renewal_sequence: count >= 1 required");
  ExplorationState state(std::move(starts), kappa);
  std::vector<RenewalRecord> records;
  records.reserve(static_cast<size_t>(count));
  long total = 0;
  for (int ell = 1; ell <= count; ++ell) {
    RenewalRecord rec = run_to_renewal(state, store, opts);
    rec.ell = ell;
    total += rec.beta;
    rec.varrho = total;
    records.push_back(std::move(rec));
  }
  return records;
}

long steps_to_level(ExplorationState& state, SlabStore& store, double t) {
  if (t < state.clip()) throw std::invalid_argument("steps_to_level: t below the current level");
  long n = 0;
  while (true) {
    state.step(store);
    if (state.clip() > t) return n;
    ++n;
  }
}

}  // namespace dsf
