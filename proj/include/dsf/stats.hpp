#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace dsf {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
  long n = 0;
};

// Ordinary least squares on (x, y) pairs.
FitResult linear_fit(const std::vector<std::pair<double, double>>& points);

// OLS on (log t, log s); nonpositive coordinates are a domain error.
FitResult loglog_fit(const std::vector<std::pair<double, double>>& points);

struct KsResult {
  double statistic = 0.0;
  double p = 0.0;
};

// One-sample Kolmogorov-Smirnov test against a cdf; asymptotic p-value.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
// Two-sample Kolmogorov-Smirnov test; asymptotic p-value.
KsResult ks_test(std::vector<double> a, std::vector<double> b);

// Survival function of the asymptotic Kolmogorov distribution, truncated
// series, tolerance 1e-12.
double kolmogorov_sf(double x);

// Exact sum of doubles held as a fixed-point superaccumulator. Adds commute
// exactly, so merges and permutations of the input produce bit-identical
// results.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  double value() const;

 private:
  static constexpr int kLimbBits = 32;
  static constexpr int kLimbs = 72;
  static constexpr int kBias = 1152;  // lowest representable exponent offset

  void normalize() const;

  mutable std::array<int64_t, kLimbs> limb_{};
  mutable long pending_ = 0;
};

// Streaming first three moments with exact, order-independent accumulation.
class Moments {
 public:
  void add(double x);
  void merge(const Moments& other);
  long count() const { return n_; }
  double mean() const;
  double variance() const;  // unbiased
  double sum() const { return s1_.value(); }
  double sum_sq() const { return s2_.value(); }
  double sum_cube() const { return s3_.value(); }
  double mean_se() const;

 private:
  long n_ = 0;
  ExactSum s1_, s2_, s3_;
};

}  // namespace dsf
