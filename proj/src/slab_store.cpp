#include "dsf/slab_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace dsf {

SlabStore::SlabStore(double intensity, uint64_t seed, StoreOptions opts)
    : intensity_(intensity), seed_(seed), opts_(std::move(opts)), cell_(opts_.cell_size) {
  if (!(intensity_ > 0.0) || !std::isfinite(intensity_)) {
    throw std::invalid_argument("SlabStore: intensity must be positive");
  }
  if (!(cell_ > 0.0)) throw std::invalid_argument("SlabStore: cell_size must be positive");
  for (const Point& p : opts_.forced) {
    if (!finite(p)) throw std::invalid_argument("SlabStore: forced point not finite");
    forced_by_cell_[key_of(cell_of(p.x), cell_of(p.y))].push_back(p);
  }
}

SlabStore SlabStore::from_points(std::vector<Point> points) {
  StoreOptions opts;
  opts.forced = std::move(points);
  opts.suppress_generation = true;
  return SlabStore(1.0, 0, std::move(opts));
}

long SlabStore::cell_of(double v) const { return static_cast<long>(std::floor(v / cell_)); }

uint64_t SlabStore::key_of(long ix, long iy) {
  const uint64_t a = static_cast<uint32_t>(ix + (1L << 31));
  const uint64_t b = static_cast<uint32_t>(iy + (1L << 31));
  return (a << 32) | b;
}

const std::vector<Point>& SlabStore::cell_points(long ix, long iy) {
  const uint64_t key = key_of(ix, iy);
  auto it = cells_.find(key);
  if (it == cells_.end()) {
    generate_cell(key, ix, iy);
    it = cells_.find(key);
  }
  return it->second;
}

void SlabStore::generate_cell(uint64_t key, long ix, long iy) {
  if (cells_.size() >= opts_.max_cells) {
    throw ResourceError("SlabStore: cell budget exceeded");
  }
  std::vector<Point> pts;
  if (!opts_.suppress_generation) {
    CounterRng rng(hash_combine(hash_combine(seed_, static_cast<uint64_t>(ix + (1L << 31))),
                                static_cast<uint64_t>(iy + (1L << 31))));
    const double x0 = static_cast<double>(ix) * cell_;
    const double y0 = static_cast<double>(iy) * cell_;
    const long n = rng.poisson(intensity_ * cell_ * cell_);
    pts.reserve(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
      const Point p{rng.uniform(x0, x0 + cell_), rng.uniform(y0, y0 + cell_)};
      if (opts_.forbidden && opts_.forbidden->contains(p)) continue;
      pts.push_back(p);
    }
  }
  if (auto it = forced_by_cell_.find(key); it != forced_by_cell_.end()) {
    pts.insert(pts.end(), it->second.begin(), it->second.end());
  }
  x_halfwidth_ = std::max({x_halfwidth_, std::abs(static_cast<double>(ix) * cell_),
                           std::abs(static_cast<double>(ix + 1) * cell_)});
  y_top_ = std::max(y_top_, static_cast<double>(iy + 1) * cell_);
  y_bottom_ = std::min(y_bottom_, static_cast<double>(iy) * cell_);
  cells_.emplace(key, std::move(pts));
}

void SlabStore::extend(double need_top, double need_halfwidth) {
  if (!std::isfinite(need_top) || !std::isfinite(need_halfwidth)) {
    throw std::invalid_argument("extend: bounds must be finite");
  }
  ensure_rect(Rect{-need_halfwidth, y_bottom_, need_halfwidth, need_top});
}

void SlabStore::ensure_rect(const Rect& r) {
  const long ix0 = cell_of(r.x0), ix1 = cell_of(r.x1);
  const long iy0 = cell_of(r.y0), iy1 = cell_of(r.y1);
  for (long iy = iy0; iy <= iy1; ++iy) {
    for (long ix = ix0; ix <= ix1; ++ix) cell_points(ix, iy);
  }
}

std::vector<Point> SlabStore::sample_region(const Rect& r) {
  std::vector<Point> out;
  if (r.degenerate()) return out;
  for_each_candidate(r, [&](const Point& p) {
    if (r.contains(p)) out.push_back(p);
  });
  std::sort(out.begin(), out.end(), lower_then_lefter);
  return out;
}

size_t SlabStore::point_count() const {
  size_t n = 0;
  for (const auto& [k, v] : cells_) n += v.size();
  return n;
}

void SlabStore::dump_csv(const Rect& r, std::ostream& os) {
  os << "x,y\n";
  char buf[64];
  for (const Point& p : sample_region(r)) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
    os << buf;
  }
}

}  // namespace dsf
