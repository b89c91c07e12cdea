#include "dsf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsf {

FitResult linear_fit(const std::vector<std::pair<double, double>>& points) {
  const long n = static_cast<long>(points.size());
  if (n < 3) throw std::invalid_argument("linear_fit: at least 3 points required");
  double sx = 0, sy = 0;
  for (auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissas");
  FitResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  const double ss_res = std::max(0.0, syy - r.slope * sxy);
  r.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  r.slope_se = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return r;
}

FitResult loglog_fit(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> logs;
  logs.reserve(points.size());
  for (auto& [t, s] : points) {
    if (!(t > 0.0) || !(s > 0.0)) {
      throw std::domain_error("loglog_fit: coordinates must be positive");
    }
    logs.emplace_back(std::log(t), std::log(s));
  }
  return linear_fit(logs);
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * x * x);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  const size_t n = sample.size();
  if (n < 20) throw std::invalid_argument("ks_test: sample too small");
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max((i + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  return {d, kolmogorov_sf(std::sqrt(static_cast<double>(n)) * d)};
}

KsResult ks_test(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 20 || b.size() < 20) throw std::invalid_argument("ks_test: sample too small");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return {d, kolmogorov_sf(std::sqrt(n_eff) * d)};
}

void ExactSum::add(double x) {
  if (x == 0.0) return;
  if (!std::isfinite(x)) throw std::invalid_argument("ExactSum: non-finite input");
  int e = 0;
  const double m = std::frexp(x, &e);
  // x = sign * mant * 2^(e - 53) with mant < 2^53.
  const int64_t sign = m < 0.0 ? -1 : 1;
  const uint64_t mant = static_cast<uint64_t>(std::ldexp(std::abs(m), 53));
  const int eshift = e - 53 + kBias;
  const int idx = eshift / kLimbBits;
  const int off = eshift % kLimbBits;
  // Split the (up to 53+31)-bit shifted mantissa over three limbs.
  const unsigned __int128 v = static_cast<unsigned __int128>(mant) << off;
  limb_[idx] += sign * static_cast<int64_t>(static_cast<uint64_t>(v) & 0xffffffffULL);
  limb_[idx + 1] += sign * static_cast<int64_t>(static_cast<uint64_t>(v >> 32) & 0xffffffffULL);
  limb_[idx + 2] += sign * static_cast<int64_t>(static_cast<uint64_t>(v >> 64));
  if (++pending_ > (1L << 28)) normalize();
}

void ExactSum::normalize() const {
  int64_t carry = 0;
  for (int i = 0; i < kLimbs; ++i) {
    int64_t v = limb_[i] + carry;
    // Floor division by 2^32 keeps the representation canonical for
    // negative totals as well.
    carry = v >> kLimbBits;
    limb_[i] = v - (carry << kLimbBits);
  }
  // carry out of range would mean overflow far beyond double range
  if (carry != 0 && carry != -1) throw std::overflow_error("ExactSum: overflow");
  if (carry == -1) limb_[kLimbs - 1] -= (1LL << kLimbBits);
  pending_ = 0;
}

void ExactSum::merge(const ExactSum& other) {
  other.normalize();
  for (int i = 0; i < kLimbs; ++i) limb_[i] += other.limb_[i];
  if ((pending_ += 1) > (1L << 28)) normalize();
}

double ExactSum::value() const {
  normalize();
  double v = 0.0;
  for (int i = kLimbs - 1; i >= 0; --i) {
    if (limb_[i] != 0) v += std::ldexp(static_cast<double>(limb_[i]), i * kLimbBits - kBias);
  }
  return v;
}

void Moments::add(double x) {
  ++n_;
  s1_.add(x);
  s2_.add(x * x);
  s3_.add(x * x * x);
}

void Moments::merge(const Moments& other) {
  n_ += other.n_;
  s1_.merge(other.s1_);
  s2_.merge(other.s2_);
  s3_.merge(other.s3_);
}

double Moments::mean() const {
  if (n_ == 0) throw std::logic_error("Moments: empty");
  return s1_.value() / static_cast<double>(n_);
}

double Moments::variance() const {
  if (n_ < 2) throw std::logic_error("Moments: need two samples for variance");
  const double m = mean();
  return std::max(0.0, (s2_.value() - n_ * m * m) / static_cast<double>(n_ - 1));
}

double Moments::mean_se() const { return std::sqrt(variance() / static_cast<double>(n_)); }

}  // namespace dsf
