#include "dsf/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "dsf/stats.hpp"

namespace dsf {

PathPolyline scale_path(const PathPolyline& path, const ScaleParams& p) {
  if (!(p.n >= 1) || !(p.gamma > 0.0) || !(p.sigma > 0.0)) {
    throw std::invalid_argument("scale_path: invalid parameters");
  }
  const double sx = 1.0 / (p.n * p.sigma);
  const double st = 1.0 / (static_cast<double>(p.n) * p.n * p.gamma);
  PathPolyline out;
  for (const Point& v : path.vertices()) out.append(Point{v.x * sx, v.y * st});
  return out;
}

GammaSigmaEstimate estimate_gamma_sigma(long replications, double intensity, int kappa,
                                        uint64_t seed, int renewals_per_chain,
                                        const RenewalOptions& opts) {
  if (replications < 100) {
    throw std::invalid_argument("estimate_gamma_sigma: at least 100 replications required");
  }
  if (renewals_per_chain < 2) {
    throw std::invalid_argument("estimate_gamma_sigma: need at least two renewals per chain");
  }
  Moments dy, dx, dy_first, dx_first;
  for (long rep = 0; rep < replications; ++rep) {
    SlabStore store(intensity, hash_combine(seed, static_cast<uint64_t>(rep)));
    const auto records = renewal_sequence({Point{0.0, 0.0}}, store, renewals_per_chain, kappa, opts);
    dy_first.add(records[0].u_new[0].y);
    dx_first.add(records[0].u_new[0].x);
    for (size_t i = 1; i < records.size(); ++i) {
      dy.add(records[i].u_new[0].y - records[i - 1].u_new[0].y);
      dx.add(records[i].u_new[0].x - records[i - 1].u_new[0].x);
    }
  }
  GammaSigmaEstimate est;
  est.increments = dy.count();
  est.gamma = dy.mean();
  est.gamma_se = dy.mean_se();
  est.sigma = std::sqrt(dx.variance());
  // Asymptotic standard error of a sample standard deviation.
  est.sigma_se = est.sigma / std::sqrt(2.0 * std::max<long>(1, dx.count() - 1));
  est.gamma_first = dy_first.mean();
  est.sigma_first = dx_first.count() > 1 ? std::sqrt(dx_first.variance()) : 0.0;
  return est;
}

long eta_count(const std::vector<PathPolyline>& paths, double t0, double t, double a, double b) {
  if (!(a < b) || !(t > 0.0)) throw std::invalid_argument("eta_count: require a < b and t > 0");
  std::vector<double> ends;
  for (const PathPolyline& p : paths) {
    if (p.start_time() > t0) continue;
    if (p.end_time() < t0 + t) continue;
    const double at_t0 = p.eval(t0);
    if (at_t0 < a || at_t0 > b) continue;
    ends.push_back(p.eval(t0 + t));
  }
  std::sort(ends.begin(), ends.end());
  long distinct = 0;
  for (size_t i = 0; i < ends.size(); ++i) {
    if (i == 0 || ends[i] - ends[i - 1] > 1e-9) ++distinct;
  }
  return distinct;
}

double bw_pair_survival(double d, double t) {
  if (!(d > 0.0) || !(t > 0.0)) throw std::invalid_argument("bw_pair_survival: d, t > 0 required");
  return std::erf(d / (2.0 * std::sqrt(t)));
}

}  // namespace dsf
