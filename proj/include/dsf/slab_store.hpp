#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dsf/geometry.hpp"
#include "dsf/point.hpp"
#include "dsf/rng.hpp"

namespace dsf {

struct StoreOptions {
  double cell_size = 8.0;          // slab height and horizontal cell width
  uint64_t max_cells = 8'000'000;  // memory budget, in generated cells
  std::optional<HistorySet> forbidden;  // region thinned at generation time
  std::vector<Point> forced;            // points injected deterministically
  bool suppress_generation = false;     // explicit stores: forced points only
};

// Homogeneous Poisson point process realized lazily over a grid of square
// cells. Each cell's points are a pure function of (seed, cell index), so
// extension order never changes the realization and regeneration with the
// same seed is bit-identical. Conditioning: points falling in `forbidden`
// are discarded at generation time (valid thinning for a PPP), and `forced`
// points are present exactly once.
class SlabStore {
 public:
  SlabStore(double intensity, uint64_t seed, StoreOptions opts = {});

  // A store holding exactly the given points and nothing else.
  static SlabStore from_points(std::vector<Point> points);

  double intensity() const { return intensity_; }
  uint64_t seed() const { return seed_; }
  double cell_size() const { return cell_; }

  // Grows coverage to [-need_halfwidth, need_halfwidth] x (y_bottom, need_top].
  // Previously generated cells are never altered.
  void extend(double need_top, double need_halfwidth);

  // Grows coverage to include the rectangle (in any direction).
  void ensure_rect(const Rect& r);

  // All stored points inside r, sorted by (y, x).
  std::vector<Point> sample_region(const Rect& r);

  // Visits stored points of every cell overlapping r (callers filter).
  template <class F>
  void for_each_candidate(const Rect& r, F&& f) {
    const long ix0 = cell_of(r.x0), ix1 = cell_of(r.x1);
    const long iy0 = cell_of(r.y0), iy1 = cell_of(r.y1);
    for (long iy = iy0; iy <= iy1; ++iy) {
      for (long ix = ix0; ix <= ix1; ++ix) {
        for (const Point& p : cell_points(ix, iy)) f(p);
      }
    }
  }

  // CSV dump of a region: "x,y" per line, 17 significant digits.
  void dump_csv(const Rect& r, std::ostream& os);

  double x_halfwidth() const { return x_halfwidth_; }
  double y_top() const { return y_top_; }
  double y_bottom() const { return y_bottom_; }
  size_t cell_count() const { return cells_.size(); }
  size_t point_count() const;

  long cell_of(double v) const;
  const std::vector<Point>& cell_points(long ix, long iy);

 private:
  static uint64_t key_of(long ix, long iy);
  void generate_cell(uint64_t key, long ix, long iy);

  double intensity_;
  uint64_t seed_;
  StoreOptions opts_;
  double cell_;
  double x_halfwidth_ = 0.0;
  double y_top_ = 0.0;
  double y_bottom_ = 0.0;
  std::unordered_map<uint64_t, std::vector<Point>> cells_;
  std::unordered_map<uint64_t, std::vector<Point>> forced_by_cell_;
};

}  // namespace dsf
