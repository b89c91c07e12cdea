#pragma once

#include <limits>
#include <vector>

#include "dsf/renewal.hpp"

namespace dsf {

// Outcome of tracing two paths until they meet (or until the cap).
struct CoalescenceSample {
  double z0 = 0.0;                  // initial abscissa gap
  double T = 0.0;                   // first time the interpolants agree
  bool censored = false;            // cap reached before coalescence
  long nu = 0;                      // renewal index at which the gap chain hits 0
  bool nu_censored = true;
  std::vector<double> z_path;       // gap chain trajectory, starting at z0
};

struct CoalesceOptions {
  bool track_renewals = true;
  double abscissa_tol = 1e-9;       // interpolant equality tolerance
  long step_cap = 200'000'000;      // hard safety cap on exploration steps
};

// Traces the two paths jointly on the store until they coalesce or the
// level exceeds t_cap. The gap chain is recorded from the renewal chain that
// restarts at every renewal event; the original paths (which determine T)
// are never restarted.
CoalescenceSample coalescence_time(const Point& u1, const Point& u2, SlabStore& store,
                                   double t_cap, int kappa = 6,
                                   const CoalesceOptions& opts = {});

// The strictly increasing concave transform (1/2 + 1/(x+2)) * x.
double f_transform(double x);

struct LaplaceBin {
  double z_lo = 0.0, z_hi = 0.0;
  long n = 0;
  double drift = 0.0, drift_se = 0.0;      // E[dY | Z in bin]
  double second = 0.0, second_se = 0.0;    // E[dY^2 | Z in bin]
  double third = 0.0, third_se = 0.0;      // E[|dY|^3 | Z in bin]
  bool excluded_small = false;             // fewer than 50 transitions
};

struct LaplaceReport {
  double m0 = 0.0;
  std::vector<LaplaceBin> bins;
  long transitions_used = 0;
};

// Bins gap-chain transitions (z, z') with z > m0 by unit intervals of z and
// reports the conditional moments of the increment of f(z) * 1{z > m0}.
LaplaceReport laplace_conditions(const std::vector<std::pair<double, double>>& transitions,
                                 double m0, int kappa, double bin_width = 1.0,
                                 double z_max = std::numeric_limits<double>::infinity());

struct SurvivalRow {
  double t = 0.0;
  double survival = 0.0;
  double se = 0.0;
  long n = 0;
};

// Direct empirical survival of T over the grid with binomial standard
// errors. Every sample must have been observed (or censored) beyond the
// largest grid point.
std::vector<SurvivalRow> tail_curve(const std::vector<CoalescenceSample>& samples,
                                    const std::vector<double>& t_grid, double t_cap);

}  // namespace dsf
