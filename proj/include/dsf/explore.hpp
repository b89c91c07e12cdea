#pragma once

#include <vector>

#include "dsf/forest.hpp"
#include "dsf/geometry.hpp"
#include "dsf/point.hpp"
#include "dsf/slab_store.hpp"

namespace dsf {

struct StepInfo {
  int mover = 0;         // lowest index among walkers that moved this step
  Point from;
  Point to;
  double displacement = 0.0;
  bool coalesced = false;  // the move landed on another walker's position
};

// Joint exploration of k forest paths. One step moves the walker value with
// the minimal ordinate (leftmost on ties) to its nearest admissible candidate:
// store points outside the history set, plus the standing walkers, plus the
// extra points. Walkers sharing a position value move together, so coalesced
// walkers stay coalesced.
class ExplorationState {
 public:
  ExplorationState(std::vector<Point> starts, int kappa);
  ExplorationState(std::vector<Point> starts, int kappa, HistorySet initial_history,
                   std::vector<Point> extra);

  int k() const { return static_cast<int>(positions_.size()); }
  int kappa() const { return kappa_; }
  long step_count() const { return step_; }
  const std::vector<Point>& positions() const { return positions_; }
  const HistorySet& history() const { return history_; }
  const std::vector<Point>& extra() const { return extra_; }
  double clip() const { return history_.clip_level(); }
  double height() const { return history_.height(); }
  double last_good_level() const { return last_good_level_; }
  const std::vector<PathPolyline>& walker_paths() const { return paths_; }
  double block_displacement() const { return block_displacement_; }
  int distinct_position_count() const;
  bool fully_coalesced() const { return distinct_position_count() == 1; }

  // Index of the walker with minimal ordinate; minimal abscissa among equal
  // ordinates; lowest index among coalesced duplicates.
  int select_mover() const;

  StepInfo step(SlabStore& store);
  // Same transition rule, candidates drawn from an independent store.
  StepInfo step_resampled(SlabStore& fresh_store);

  // True iff the step count is a positive multiple of k, the history height
  // is at most kappa, and the current level has progressed by at least
  // kappa + 1 since the previous good step.
  bool is_good_step() const;
  void note_good_step() { last_good_level_ = clip(); }

  // Distance from the lifted apex to the nearest store point inside the
  // upward pi/2-aperture cone. Checks exactly that the cone avoids the
  // history set before searching.
  double unexplored_cone_distance(SlabStore& store) const;
  double cone_apex_lift() const { return std::max(height() / 2.0, 1.0); }
  Point cone_apex() const;

 private:
  StepInfo step_impl(SlabStore& candidate_store);
  void validate_initial() const;
  Point mover_value() const;

  std::vector<Point> positions_;
  HistorySet history_;
  std::vector<Point> extra_;
  long step_ = 0;
  double last_good_level_ = 0.0;
  int kappa_ = 6;
  std::vector<PathPolyline> paths_;
  double block_displacement_ = 0.0;
};

}  // namespace dsf
