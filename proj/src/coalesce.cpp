#include "dsf/coalesce.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "dsf/stats.hpp"

namespace dsf {

namespace {

// First t at which the two interpolants agree within tol. The difference is
// piecewise linear with breakpoints at the union of vertex ordinates, so the
// first root is found by scanning segments.
double first_meeting_time(const PathPolyline& a, const PathPolyline& b, double tol) {
  const double t0 = std::max(a.start_time(), b.start_time());
  const double t1 = std::min(a.end_time(), b.end_time());
  std::vector<double> ts;
  ts.push_back(t0);
  for (const Point& p : a.vertices()) {
    if (p.y > t0 && p.y <= t1) ts.push_back(p.y);
  }
  for (const Point& p : b.vertices()) {
    if (p.y > t0 && p.y <= t1) ts.push_back(p.y);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  double prev_t = ts.front();
  double prev_d = b.eval(prev_t) - a.eval(prev_t);
  if (std::abs(prev_d) <= tol) return prev_t;
  for (size_t i = 1; i < ts.size(); ++i) {
    const double t = ts[i];
    const double d = b.eval(t) - a.eval(t);
    if (std::abs(d) <= tol || (prev_d > 0.0) != (d > 0.0)) {
      if (prev_d != d && (d <= tol)) {
        return prev_t + (t - prev_t) * prev_d / (prev_d - d);
      }
      return t;
    }
    prev_t = t;
    prev_d = d;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Advances a renewal chain by one step; on a renewal event the state is
// restarted and the new gap appended to z_path.
void advance_chain(ExplorationState& chain, SlabStore& store, int kappa,
                   std::vector<double>& z_path) {
  chain.step(store);
  if (!chain.is_good_step()) return;
  if (auto pts = check_renewal_event(chain, store)) {
    RenewalRecord rec = make_renewal_record(chain, *pts);
    chain = restart_from_renewal(rec, kappa);
    z_path.push_back(chain.positions()[1].x - chain.positions()[0].x);
  } else {
    chain.note_good_step();
  }
}

}  // namespace

CoalescenceSample coalescence_time(const Point& u1, const Point& u2, SlabStore& store,
                                   double t_cap, int kappa, const CoalesceOptions& opts) {
  if (u1.y != u2.y) throw std::invalid_argument("coalescence_time: starts must share an ordinate");
  CoalescenceSample out;
  out.z0 = u2.x - u1.x;
  out.z_path.push_back(out.z0);
  if (u1 == u2) {
    out.T = 0.0;
    out.nu = 0;
    out.nu_censored = false;
    return out;
  }
  if (!(u1.x < u2.x)) throw std::invalid_argument("coalescence_time: require u1.x < u2.x");

  // The original pair determines T. The renewal chain is forked from it at
  // the first renewal event and restarted at each of its own events; its
  // gap sequence is the z_path.
  ExplorationState original({u1, u2}, kappa);
  std::unique_ptr<ExplorationState> chain;

  bool original_done = false;
  long guard = 0;
  while (true) {
    if (++guard > opts.step_cap) {
      throw std::runtime_error("coalescence_time: step cap exceeded");
    }

    if (!original_done) {
      original.step(store);
      if (original.fully_coalesced()) {
        original_done = true;
        out.T = first_meeting_time(original.walker_paths()[0], original.walker_paths()[1],
                                   opts.abscissa_tol);
        if (std::isnan(out.T)) {
          throw std::logic_error("coalescence_time: coalesced walkers but no interpolant meeting");
        }
        if (!chain) {
          // The chain coincides with the original until the first renewal,
          // so its gap is zero from the next renewal on.
          out.z_path.push_back(0.0);
          out.nu = static_cast<long>(out.z_path.size()) - 1;
          out.nu_censored = false;
        }
      } else if (original.clip() > t_cap) {
        original_done = true;
        out.censored = true;
        out.T = std::numeric_limits<double>::infinity();
      }
      if (!chain && opts.track_renewals && !original_done && original.is_good_step()) {
        if (auto pts = check_renewal_event(original, store)) {
          RenewalRecord rec = make_renewal_record(original, *pts);
          chain = std::make_unique<ExplorationState>(restart_from_renewal(rec, kappa));
          out.z_path.push_back(chain->positions()[1].x - chain->positions()[0].x);
        } else {
          original.note_good_step();
        }
      }
    }

    if (chain) {
      if (out.z_path.back() == 0.0) {
        out.nu = static_cast<long>(out.z_path.size()) - 1;
        out.nu_censored = false;
        chain.reset();
      } else if (chain->fully_coalesced()) {
        // Gap is zero from the next renewal of the restarted cascade on.
        out.z_path.push_back(0.0);
        out.nu = static_cast<long>(out.z_path.size()) - 1;
        out.nu_censored = false;
        chain.reset();
      } else if (chain->clip() > t_cap) {
        chain.reset();  // gap chain censored at the cap
      } else {
        advance_chain(*chain, store, kappa, out.z_path);
      }
    }

    if (original_done && !chain) break;
  }
  return out;
}

double f_transform(double x) {
  if (x < 0.0) throw std::domain_error("f_transform: negative input");
  return (0.5 + 1.0 / (x + 2.0)) * x;
}

LaplaceReport laplace_conditions(const std::vector<std::pair<double, double>>& transitions,
                                 double m0, int kappa, double bin_width, double z_max) {
  if (m0 < 2.0 * (kappa + 1)) {
    throw std::invalid_argument("laplace_conditions: m0 must be at least 2*(kappa+1)");
  }
  struct Acc {
    Moments dy, dy2, dy3;
  };
  std::vector<Acc> accs;

  LaplaceReport report;
  report.m0 = m0;
  for (const auto& [z, z_next] : transitions) {
    if (!(z > m0) || z > z_max) continue;
    const long b = static_cast<long>(std::floor((z - m0) / bin_width));
    if (b < 0) continue;
    if (static_cast<size_t>(b) >= accs.size()) accs.resize(b + 1);
    const double y = f_transform(z);
    const double y_next = z_next > m0 ? f_transform(z_next) : 0.0;
    const double dy = y_next - y;
    accs[b].dy.add(dy);
    accs[b].dy2.add(dy * dy);
    accs[b].dy3.add(std::abs(dy * dy * dy));
    ++report.transitions_used;
  }

  for (size_t b = 0; b < accs.size(); ++b) {
    LaplaceBin bin;
    bin.z_lo = m0 + b * bin_width;
    bin.z_hi = m0 + (b + 1) * bin_width;
    bin.n = accs[b].dy.count();
    if (bin.n == 0) continue;
    if (bin.n < 50) {
      bin.excluded_small = true;
      report.bins.push_back(bin);
      continue;
    }
    bin.drift = accs[b].dy.mean();
    bin.drift_se = accs[b].dy.mean_se();
    bin.second = accs[b].dy2.mean();
    bin.second_se = accs[b].dy2.mean_se();
    bin.third = accs[b].dy3.mean();
    bin.third_se = accs[b].dy3.mean_se();
    report.bins.push_back(bin);
  }
  return report;
}

std::vector<SurvivalRow> tail_curve(const std::vector<CoalescenceSample>& samples,
                                    const std::vector<double>& t_grid, double t_cap) {
  if (samples.empty()) throw std::invalid_argument("tail_curve: empty sample set");
  if (t_grid.empty()) throw std::invalid_argument("tail_curve: empty grid");
  if (!(t_grid.front() > 0.0)) throw std::invalid_argument("tail_curve: grid must be positive");
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("tail_curve: grid must be increasing");
    }
  }
  if (t_cap < t_grid.back()) {
    throw std::invalid_argument("tail_curve: censoring cap below largest grid point");
  }
  std::vector<SurvivalRow> rows;
  rows.reserve(t_grid.size());
  const double n = static_cast<double>(samples.size());
  for (double t : t_grid) {
    long alive = 0;
    for (const CoalescenceSample& s : samples) {
      if (s.censored || s.T > t) ++alive;
    }
    SurvivalRow row;
    row.t = t;
    row.n = static_cast<long>(samples.size());
    row.survival = alive / n;
    row.se = std::sqrt(row.survival * (1.0 - row.survival) / n);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dsf
