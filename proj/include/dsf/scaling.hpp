#pragma once

#include <cstdint>
#include <vector>

#include "dsf/forest.hpp"
#include "dsf/renewal.hpp"

namespace dsf {

// Diffusive scaling parameters: space is divided by n*sigma, time by
// n^2*gamma.
struct ScaleParams {
  int n = 1;
  double gamma = 1.0;
  double sigma = 1.0;
};

PathPolyline scale_path(const PathPolyline& path, const ScaleParams& p);

struct GammaSigmaEstimate {
  double gamma = 0.0;       // mean ordinate gain per renewal, stationary regime
  double gamma_se = 0.0;
  double sigma = 0.0;       // std dev of the abscissa increment, stationary regime
  double sigma_se = 0.0;
  double gamma_first = 0.0;  // same from the first increment only
  double sigma_first = 0.0;
  long increments = 0;
};

// Runs single-path renewal chains and estimates the normalizers from the
// stationary increments (the first increment has a different law and is
// reported separately).
GammaSigmaEstimate estimate_gamma_sigma(long replications, double intensity, int kappa,
                                        uint64_t seed, int renewals_per_chain = 8,
                                        const RenewalOptions& opts = {});

// Number of distinct positions at time t0 + t among paths born at or before
// t0 that pass through [a, b] at t0. Positions within 1e-9 count as one.
long eta_count(const std::vector<PathPolyline>& paths, double t0, double t, double a, double b);

// Probability that two coalescing standard Brownian motions started at
// distance d are still distinct at time t.
double bw_pair_survival(double d, double t);

}  // namespace dsf
