#pragma once

#include <optional>
#include <vector>

#include "dsf/explore.hpp"

namespace dsf {

struct RenewalTimeoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One renewal step of the regenerated chain.
struct RenewalRecord {
  long ell = 0;                    // renewal index
  long beta = 0;                   // steps since the previous renewal
  long varrho = 0;                 // cumulative steps
  std::vector<Point> u_new;        // restarted walker positions, shared ordinate
  std::vector<Point> extra_new;    // the fresh points found by the event (deduplicated)
  std::vector<SemiBall> h0_balls;  // generators of the restart history, radius kappa+1
  double block_size = 0.0;         // total move length over the segment
};

struct RenewalOptions {
  long step_cap = 1'000'000;
};

// At a good step: every walker's (kappa+1)-radius semi-ball above the clip,
// minus the history, must hold exactly one store point, and that point must
// sit in the unit semi-ball kappa above the walker. Returns one point per
// walker when the event occurs.
std::optional<std::vector<Point>> check_renewal_event(const ExplorationState& state,
                                                      SlabStore& store);

// Assembles the record for an event that just occurred: beta, block size,
// lifted positions, deduplicated event points and the ball generators.
RenewalRecord make_renewal_record(const ExplorationState& state,
                                  const std::vector<Point>& event_points);

// Builds the restarted state prescribed by a renewal event: lifted positions,
// the clipped ball generators as initial history, the event points as extras.
ExplorationState restart_from_renewal(const RenewalRecord& record, int kappa);

// Advances the state until the first good step at which the renewal event
// occurs, then replaces it with the restarted state. beta, block_size, u_new,
// extra_new and h0_balls are filled in; ell/varrho are left to the caller.
RenewalRecord run_to_renewal(ExplorationState& state, SlabStore& store,
                             const RenewalOptions& opts = {});

// A fresh chain from the given starts, run for `count` successive renewals.
std::vector<RenewalRecord> renewal_sequence(std::vector<Point> starts, SlabStore& store,
                                            int count, int kappa,
                                            const RenewalOptions& opts = {});

// Number of steps n with level(n) <= t < level(n+1).
long steps_to_level(ExplorationState& state, SlabStore& store, double t);

}  // namespace dsf
