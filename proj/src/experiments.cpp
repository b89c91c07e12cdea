#include "dsf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

namespace dsf {

namespace fs = std::filesystem;
using json = nlohmann::json;

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  long nthreads = threads > 0 ? threads : static_cast<long>(std::thread::hardware_concurrency());
  nthreads = std::max<long>(1, std::min<long>(nthreads, n));
  if (nthreads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t rep_seed(const ExperimentConfig& cfg, uint64_t stream, uint64_t rep) {
  return hash_combine(hash_combine(cfg.seed, stream), rep);
}

// Survival points (n, P(X >= n)) on the integer grid, restricted to levels
// supported by at least min_count tail observations.
std::vector<std::pair<double, double>> tail_survival_points(std::vector<double> values,
                                                            long min_count) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> pts;
  if (values.empty()) return pts;
  const double n = static_cast<double>(values.size());
  const long max_v = static_cast<long>(std::floor(values.back()));
  for (long v = 1; v <= max_v; ++v) {
    const auto it = std::lower_bound(values.begin(), values.end(), static_cast<double>(v));
    const long tail = static_cast<long>(values.end() - it);
    if (tail < min_count) break;
    pts.emplace_back(static_cast<double>(v), static_cast<double>(tail) / n);
  }
  return pts;
}

// Mean store point count over the walkers' event balls minus the history;
// the renewal event requires this count to be exactly one per walker.
double big_ball_count_probe(const ExplorationState& state, SlabStore& store) {
  const double clip = state.clip();
  const double big_r = state.kappa() + 1.0;
  double total = 0.0;
  long walkers = 0;
  for (const Point& v : state.positions()) {
    const SemiBall big{Point{v.x, clip}, big_r};
    long count = 0;
    store.for_each_candidate(Rect{v.x - big_r, clip, v.x + big_r, clip + big_r},
                             [&](const Point& p) {
                               if (in_semiball(p, big) && !state.history().contains(p)) ++count;
                             });
    total += static_cast<double>(count);
    ++walkers;
  }
  return total / static_cast<double>(walkers);
}

}  // namespace

double measure_diffusivity(double lambda, uint64_t seed, long paths, double horizon) {
  Moments endpoints;
  for (long i = 0; i < paths; ++i) {
    SlabStore store(lambda, hash_combine(seed, static_cast<uint64_t>(i) ^ 0xd1ffu));
    const PathPolyline path = trace_path(Point{0.0, 0.0}, store, horizon);
    endpoints.add(path.eval(horizon));
  }
  return std::sqrt(endpoints.variance() / horizon);
}

CoalescenceTailResult run_coalescence_tail(const ExperimentConfig& cfg) {
  CoalescenceTailResult out;
  std::vector<double> grid = cfg.t_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 8; ++i) grid.push_back(100.0 * std::pow(10.0, i / 8.0));
  }
  out.t_cap = 10.0 * grid.back();
  for (size_t zi = 0; zi < cfg.z0_list.size(); ++zi) {
    CoalescenceTailResult::Group group;
    group.z0 = cfg.z0_list[zi];
    group.samples.resize(cfg.replications);
    parallel_for(cfg.replications, cfg.threads, [&](long rep) {
      SlabStore store(cfg.lambda, rep_seed(cfg, 101 + zi, rep));
      group.samples[rep] = coalescence_time(Point{0.0, 0.0}, Point{group.z0, 0.0}, store,
                                            out.t_cap, cfg.kappa);
    });
    group.rows = tail_curve(group.samples, grid, out.t_cap);
    out.groups.push_back(std::move(group));
  }
  return out;
}

RenewalStatsResult run_renewal_stats(const ExperimentConfig& cfg) {
  RenewalStatsResult out;
  out.chains = cfg.replications;
  const long per_chain =
      std::max<long>(1, (cfg.renewals + cfg.replications - 1) / cfg.replications);

  struct ChainResult {
    std::vector<RenewalRecord> records;
    bool timeout = false;
    double big_count_sum = 0.0;
    long good_steps = 0;
  };
  std::vector<ChainResult> chains(cfg.replications);

  parallel_for(cfg.replications, cfg.threads, [&](long rep) {
    ChainResult& cr = chains[rep];
    SlabStore store(cfg.lambda, rep_seed(cfg, 201, rep));
    ExplorationState state({Point{0.0, 0.0}}, cfg.kappa);
    long total = 0;
    for (long ell = 1; ell <= per_chain; ++ell) {
      long steps = 0;
      bool done = false;
      while (!done) {
        if (steps >= cfg.step_cap) {
          cr.timeout = true;
          return;
        }
        state.step(store);
        ++steps;
        if (!state.is_good_step()) continue;
        cr.big_count_sum += big_ball_count_probe(state, store);
        ++cr.good_steps;
        if (auto pts = check_renewal_event(state, store)) {
          RenewalRecord rec = make_renewal_record(state, *pts);
          rec.ell = ell;
          total += rec.beta;
          rec.varrho = total;
          state = restart_from_renewal(rec, cfg.kappa);
          cr.records.push_back(std::move(rec));
          done = true;
        } else {
          state.note_good_step();
        }
      }
    }
  });

  double big_sum = 0.0;
  for (ChainResult& cr : chains) {
    out.timeouts += cr.timeout ? 1 : 0;
    big_sum += cr.big_count_sum;
    out.good_steps_probed += cr.good_steps;
    for (RenewalRecord& r : cr.records) out.records.push_back(std::move(r));
  }
  out.mean_big_ball_count =
      out.good_steps_probed > 0 ? big_sum / static_cast<double>(out.good_steps_probed) : 0.0;

  if (out.records.size() >= 100) {
    std::vector<double> betas, widths;
    betas.reserve(out.records.size());
    widths.reserve(out.records.size());
    for (const RenewalRecord& r : out.records) {
      betas.push_back(static_cast<double>(r.beta));
      widths.push_back(r.block_size);
    }
    auto beta_pts = tail_survival_points(std::move(betas), 10);
    auto width_pts = tail_survival_points(std::move(widths), 10);
    if (beta_pts.size() >= 3 && width_pts.size() >= 3) {
      std::vector<std::pair<double, double>> beta_xy, width_xy;
      for (auto& [v, p] : beta_pts) beta_xy.emplace_back(v, std::log(p));
      for (auto& [v, p] : width_pts) width_xy.emplace_back(std::sqrt(v), std::log(p));
      out.beta_fit = linear_fit(beta_xy);
      out.width_fit = linear_fit(width_xy);
      out.fits_valid = true;
    }
  }
  return out;
}

LaplaceResult run_laplace_check(const ExperimentConfig& cfg) {
  LaplaceResult out;
  out.chains = cfg.replications;
  const long per_chain_cap = 400;

  std::vector<std::vector<std::pair<double, double>>> slots(cfg.replications);
  std::vector<char> timeout_flags(cfg.replications, 0);

  parallel_for(cfg.replications, cfg.threads, [&](long rep) {
    SlabStore store(cfg.lambda, rep_seed(cfg, 301, rep));
    // Spread the starting gaps over the reported bin range.
    const double z0 = cfg.m0 + 0.75 + static_cast<double>(rep % 20);
    ExplorationState state({Point{0.0, 0.0}, Point{z0, 0.0}}, cfg.kappa);
    RenewalOptions opts{cfg.step_cap};
    double z_prev = -1.0;
    for (long ell = 1; ell <= per_chain_cap; ++ell) {
      RenewalRecord rec;
      try {
        rec = run_to_renewal(state, store, opts);
      } catch (const RenewalTimeoutError&) {
        timeout_flags[rep] = 1;
        return;
      }
      const double z = state.positions()[1].x - state.positions()[0].x;
      if (z_prev >= 0.0) slots[rep].emplace_back(z_prev, z);
      if (z <= cfg.m0) return;  // the indicator kills later transitions
      z_prev = z;
    }
  });

  std::vector<std::pair<double, double>> transitions;
  for (long rep = 0; rep < cfg.replications; ++rep) {
    out.timeouts += timeout_flags[rep];
    transitions.insert(transitions.end(), slots[rep].begin(), slots[rep].end());
  }
  out.report = laplace_conditions(transitions, cfg.m0, cfg.kappa, 1.0, cfg.m0 + 20.0);
  return out;
}

DonskerResult run_donsker(const ExperimentConfig& cfg) {
  DonskerResult out;

  // Stationary renewal increments from single-path chains.
  const long chains = std::max<long>(100, cfg.replications / 8);
  const int per_chain = 9;  // first increment discarded
  struct ChainInc {
    std::vector<double> dx, dy;
    bool timeout = false;
  };
  std::vector<ChainInc> incs(chains);
  parallel_for(chains, cfg.threads, [&](long rep) {
    SlabStore store(cfg.lambda, rep_seed(cfg, 401, rep));
    try {
      const auto records =
          renewal_sequence({Point{0.0, 0.0}}, store, per_chain, cfg.kappa, {cfg.step_cap});
      for (size_t i = 1; i < records.size(); ++i) {
        incs[rep].dx.push_back(records[i].u_new[0].x - records[i - 1].u_new[0].x);
        incs[rep].dy.push_back(records[i].u_new[0].y - records[i - 1].u_new[0].y);
      }
    } catch (const RenewalTimeoutError&) {
      incs[rep].timeout = true;
    }
  });
  Moments dx, dy;
  for (ChainInc& c : incs) {
    out.timeouts += c.timeout ? 1 : 0;
    for (double v : c.dx) {
      out.increments.push_back(v);
      dx.add(v);
    }
    for (double v : c.dy) dy.add(v);
  }
  if (dx.count() < 100) return out;  // renewal data unavailable; gs_valid stays false

  out.gs.gamma = dy.mean();
  out.gs.gamma_se = dy.mean_se();
  out.gs.sigma = std::sqrt(dx.variance());
  out.gs.sigma_se = out.gs.sigma / std::sqrt(2.0 * std::max<long>(1, dx.count() - 1));
  out.gs.increments = dx.count();
  out.gs_valid = true;

  // Standardized single-path endpoints at the diffusive horizon.
  const double horizon = static_cast<double>(cfg.n_scale) * cfg.n_scale * out.gs.gamma;
  out.standardized.resize(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](long rep) {
    SlabStore store(cfg.lambda, rep_seed(cfg, 402, rep));
    const PathPolyline path = trace_path(Point{0.0, 0.0}, store, horizon);
    out.standardized[rep] = path.eval(horizon) / (cfg.n_scale * out.gs.sigma);
  });

  out.ks_normal = ks_test(out.standardized,
                          [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  std::vector<double> negated = out.increments;
  for (double& v : negated) v = -v;
  out.ks_symmetry = ks_test(out.increments, negated);
  return out;
}

EtaResult run_eta(const ExperimentConfig& cfg) {
  EtaResult out;
  out.gamma_used = cfg.gamma;
  out.sigma_used = cfg.sigma;
  if (!(out.gamma_used > 0.0) || !(out.sigma_used > 0.0)) {
    // Renewal normalizers may be unavailable; fall back to the measured
    // single-path diffusivity with a unit time normalizer.
    out.gamma_used = 1.0;
    out.sigma_used = measure_diffusivity(cfg.lambda, hash_combine(cfg.seed, 0xe7a), 400, 100.0);
    out.used_diffusivity_fallback = true;
  }

  std::vector<double> eps = cfg.eps_list;
  std::sort(eps.begin(), eps.end());
  const double n = static_cast<double>(cfg.n_scale);
  const double horizon = n * n * out.gamma_used * cfg.t_eta;  // raw time span
  const double w_max = eps.back() * n * out.sigma_used;
  const double margin = 5.0 / std::sqrt(cfg.lambda);

  std::vector<std::vector<char>> split(eps.size(),
                                       std::vector<char>(cfg.replications, 0));
  parallel_for(cfg.replications, cfg.threads, [&](long rep) {
    SlabStore store(cfg.lambda, rep_seed(cfg, 501, rep));
    // Level-zero crossings: edges from points just below zero whose ancestor
    // lies at or above zero.
    struct CrossingPath {
      double x0;       // crossing abscissa at level zero
      double end;      // position at the horizon
    };
    std::vector<CrossingPath> crossings;
    store.ensure_rect(Rect{-margin - w_max, -margin, w_max + margin, 0.0});
    std::vector<Point> lows;
    store.for_each_candidate(Rect{-margin - w_max, -margin, w_max + margin, 0.0},
                             [&](const Point& p) {
                               if (p.y < 0.0 && p.y >= -margin && p.x >= -margin - w_max &&
                                   p.x <= w_max + margin) {
                                 lows.push_back(p);
                               }
                             });
    std::sort(lows.begin(), lows.end(), lower_then_lefter);
    for (const Point& v : lows) {
      const Point h = ancestor(v, store);
      if (h.y < 0.0) continue;
      const double xc = h.y == v.y ? v.x : v.x + (h.x - v.x) * (0.0 - v.y) / (h.y - v.y);
      if (xc < 0.0 || xc > w_max) continue;
      PathPolyline path(v);
      path.append(h);
      while (path.end_time() <= horizon) {
        path.append(ancestor(path.vertices().back(), store));
      }
      crossings.push_back(CrossingPath{xc, path.eval(horizon)});
    }
    for (size_t ei = 0; ei < eps.size(); ++ei) {
      const double w = eps[ei] * n * out.sigma_used;
      std::vector<double> ends;
      for (const CrossingPath& c : crossings) {
        if (c.x0 >= 0.0 && c.x0 <= w) ends.push_back(c.end);
      }
      std::sort(ends.begin(), ends.end());
      long distinct = 0;
      for (size_t i = 0; i < ends.size(); ++i) {
        if (i == 0 || ends[i] - ends[i - 1] > 1e-9) ++distinct;
      }
      split[ei][rep] = distinct >= 2 ? 1 : 0;
    }
  });

  for (size_t ei = 0; ei < eps.size(); ++ei) {
    long hits = 0;
    for (char c : split[ei]) hits += c;
    EtaResult::Row row;
    row.eps = eps[ei];
    row.t = cfg.t_eta;
    row.n_trials = cfg.replications;
    row.p_ge2 = static_cast<double>(hits) / static_cast<double>(cfg.replications);
    row.se = std::sqrt(row.p_ge2 * (1.0 - row.p_ge2) / static_cast<double>(cfg.replications));
    out.rows.push_back(row);
  }
  return out;
}

DualCheckResult run_dual_check(const ExperimentConfig& cfg) {
  DualCheckResult out;
  out.windows = cfg.replications;
  out.per_window_violations.resize(cfg.replications, 0);
  std::vector<long> vertex_counts(cfg.replications, 0);
  std::vector<char> edge_ok(cfg.replications, 1);
  std::vector<double> starts_density(cfg.replications, 0.0);
  std::atomic<long> sensitivity{-1};

  parallel_for(cfg.replications, cfg.threads, [&](long rep) {
    SlabStore store(cfg.lambda, rep_seed(cfg, 601, rep));
    const Rect core{0.0, 0.0, cfg.window, cfg.window};
    DualWindow dw(store, core);
    out.per_window_violations[rep] = check_noncrossing(dw.primal_paths(), dw.dual_paths());
    vertex_counts[rep] = static_cast<long>(dw.dual_vertices().size());
    starts_density[rep] = static_cast<double>(dw.dual_vertices().size()) / core.area();
    // Every dual vertex away from the window floor must have its one
    // downward edge resolvable.
    for (const DualPath& p : dw.dual_paths()) {
      if (p.boundary_flagged) continue;
      if (p.vertices.back().y > core.y0 + 2.0) edge_ok[rep] = 0;
    }
    if (rep == 0) {
      // Detector sensitivity: a shifted dual family must produce violations.
      std::vector<DualPath> shifted = dw.dual_paths();
      for (DualPath& p : shifted) {
        for (Point& v : p.vertices) v.x += 0.3;
      }
      sensitivity.store(check_noncrossing(dw.primal_paths(), shifted));
    }
  });

  double density = 0.0;
  for (long rep = 0; rep < cfg.replications; ++rep) {
    out.total_violations += out.per_window_violations[rep];
    out.dual_vertex_count += vertex_counts[rep];
    out.every_vertex_has_one_edge = out.every_vertex_has_one_edge && edge_ok[rep];
    density += starts_density[rep];
  }
  out.mean_dual_starts_per_unit_cell = density / static_cast<double>(cfg.replications);
  out.sensitivity_violations = sensitivity.load();
  return out;
}

RstChiResult run_rst_chi(const ExperimentConfig& cfg) {
  RstChiResult out;
  const long jobs = static_cast<long>(cfg.r_list.size()) * cfg.replications;
  out.rows.resize(jobs);
  parallel_for(jobs, cfg.threads, [&](long job) {
    const size_t ri = static_cast<size_t>(job) / cfg.replications;
    const long rep = job % cfg.replications;
    const double r = cfg.r_list[ri];
    const uint64_t store_seed = rep_seed(cfg, 701 + ri, rep);
    StoreOptions opts;
    opts.max_cells = 4'000'000;
    SlabStore store(cfg.lambda, store_seed, opts);
    RstChiResult::Row row;
    row.r = r;
    row.r_out = cfg.rout_factor * r;
    row.seed = store_seed;
    row.chi = annulus_crossing_count(r, row.r_out, store);
    out.rows[job] = row;
  });

  std::vector<std::pair<double, double>> pts;
  for (size_t ri = 0; ri < cfg.r_list.size(); ++ri) {
    Moments m;
    for (long rep = 0; rep < cfg.replications; ++rep) {
      m.add(static_cast<double>(out.rows[ri * cfg.replications + rep].chi));
    }
    if (m.mean() > 0.0) pts.emplace_back(cfg.r_list[ri], m.mean());
  }
  out.slope_fit = loglog_fit(pts);
  // One-sided 95% upper bound with the small-sample t quantile (df = n - 2).
  const double tq = out.slope_fit.n <= 3 ? 6.314 : (out.slope_fit.n == 4 ? 2.920 : 2.353);
  out.slope_upper95 = out.slope_fit.slope + tq * out.slope_fit.slope_se;
  return out;
}

GammaSigmaResult run_gamma_sigma(const ExperimentConfig& cfg) {
  GammaSigmaResult out;
  try {
    out.estimate = estimate_gamma_sigma(std::max<long>(100, cfg.replications), cfg.lambda,
                                        cfg.kappa, hash_combine(cfg.seed, 801), 8,
                                        {cfg.step_cap});
    out.valid = true;
  } catch (const RenewalTimeoutError&) {
    out.timeouts = 1;
  }
  return out;
}

ResampledCheckResult run_resampled_check(const ExperimentConfig& cfg) {
  ResampledCheckResult out;
  std::vector<double> original(cfg.replications), resampled(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](long rep) {
    {
      SlabStore store(cfg.lambda, rep_seed(cfg, 901, rep));
      ExplorationState state({Point{0.0, 0.0}}, cfg.kappa);
      original[rep] = state.step(store).displacement;
    }
    {
      SlabStore fresh(cfg.lambda, rep_seed(cfg, 902, rep));
      ExplorationState state({Point{0.0, 0.0}}, cfg.kappa);
      resampled[rep] = state.step_resampled(fresh).displacement;
    }
  });
  out.two_sample = ks_test(original, resampled);
  const double lambda = cfg.lambda;
  out.analytic = ks_test(original, [lambda](double r) {
    return r <= 0.0 ? 0.0 : 1.0 - std::exp(-lambda * M_PI * r * r / 2.0);
  });
  return out;
}

namespace {

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir, double wall_ms,
                    const json& extra) {
  json m;
  m["experiment"] = cfg.experiment;
  m["version"] = "dsfsim 0.1.0";
  m["config"] = {{"lambda", cfg.lambda},
                 {"kappa", cfg.kappa},
                 {"seed", cfg.seed},
                 {"replications", cfg.replications},
                 {"threads", cfg.threads},
                 {"out", cfg.out},
                 {"z0_list", cfg.z0_list},
                 {"t_grid", cfg.t_grid},
                 {"n_scale", cfg.n_scale},
                 {"window", cfg.window},
                 {"r_list", cfg.r_list},
                 {"rout_factor", cfg.rout_factor},
                 {"m0", cfg.m0},
                 {"gamma", cfg.gamma},
                 {"sigma", cfg.sigma},
                 {"renewals", cfg.renewals},
                 {"eps_list", cfg.eps_list},
                 {"t_eta", cfg.t_eta},
                 {"trace_y_max", cfg.trace_y_max},
                 {"step_cap", cfg.step_cap}};
  m["wall_time_ms"] = wall_ms;  // excluded from the byte-identity contract
  if (!extra.is_null()) m["summary"] = extra;
  std::ofstream f(dir / "manifest.json");
  f << m.dump(2) << "\n";
}

json fit_to_json(const FitResult& f) {
  return {{"slope", f.slope},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"slope_se", f.slope_se},
          {"n", f.n}};
}

}  // namespace

int run_experiment_to_files(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  json summary;

  try {
    if (cfg.experiment == "trace") {
      SlabStore store(cfg.lambda, cfg.seed);
      const PathPolyline path = trace_path(Point{0.0, 0.0}, store, cfg.trace_y_max);
      std::ofstream f(dir / "path.csv");
      f << "x,y\n";
      for (const Point& v : path.vertices()) f << fmt17(v.x) << "," << fmt17(v.y) << "\n";
      summary["vertices"] = path.vertices().size();
    } else if (cfg.experiment == "renewal-stats") {
      const RenewalStatsResult res = run_renewal_stats(cfg);
      std::ofstream f(dir / "renewals.csv");
      f << "ell,beta,varrho,u1x,u1y,block_size\n";
      for (const RenewalRecord& r : res.records) {
        f << r.ell << "," << r.beta << "," << r.varrho << "," << fmt17(r.u_new[0].x) << ","
          << fmt17(r.u_new[0].y) << "," << fmt17(r.block_size) << "\n";
      }
      summary["renewals"] = res.records.size();
      summary["timeouts"] = res.timeouts;
      summary["good_steps_probed"] = res.good_steps_probed;
      summary["mean_big_ball_count"] = res.mean_big_ball_count;
      if (res.fits_valid) {
        summary["beta_tail_fit"] = fit_to_json(res.beta_fit);
        summary["width_tail_fit"] = fit_to_json(res.width_fit);
      }
    } else if (cfg.experiment == "coalescence-tail") {
      const CoalescenceTailResult res = run_coalescence_tail(cfg);
      for (size_t gi = 0; gi < res.groups.size(); ++gi) {
        const auto& g = res.groups[gi];
        std::ofstream f(dir / ("survival_z" + std::to_string(gi) + ".csv"));
        f << "t,survival,se,n\n";
        for (const SurvivalRow& row : g.rows) {
          f << fmt17(row.t) << "," << fmt17(row.survival) << "," << fmt17(row.se) << ","
            << row.n << "\n";
        }
        json gj;
        gj["z0"] = g.z0;
        std::vector<std::pair<double, double>> pts;
        for (const SurvivalRow& row : g.rows) {
          if (row.survival > 0.0) pts.emplace_back(row.t, row.survival);
        }
        if (pts.size() >= 3) gj["loglog_fit"] = fit_to_json(loglog_fit(pts));
        summary["groups"].push_back(gj);
      }
    } else if (cfg.experiment == "laplace-check") {
      const LaplaceResult res = run_laplace_check(cfg);
      json bins = json::array();
      for (const LaplaceBin& b : res.report.bins) {
        bins.push_back({{"z_lo", b.z_lo},
                        {"z_hi", b.z_hi},
                        {"n", b.n},
                        {"drift", b.drift},
                        {"drift_se", b.drift_se},
                        {"second", b.second},
                        {"second_se", b.second_se},
                        {"third", b.third},
                        {"third_se", b.third_se},
                        {"excluded_small", b.excluded_small}});
      }
      json rep;
      rep["m0"] = res.report.m0;
      rep["transitions_used"] = res.report.transitions_used;
      rep["bins"] = bins;
      rep["timeouts"] = res.timeouts;
      std::ofstream f(dir / "laplace.json");
      f << rep.dump(2) << "\n";
      summary = rep;
    } else if (cfg.experiment == "donsker") {
      const DonskerResult res = run_donsker(cfg);
      summary["timeouts"] = res.timeouts;
      summary["gs_valid"] = res.gs_valid;
      if (res.gs_valid) {
        std::ofstream f(dir / "endpoints.csv");
        f << "standardized\n";
        for (double v : res.standardized) f << fmt17(v) << "\n";
        summary["gamma"] = res.gs.gamma;
        summary["gamma_se"] = res.gs.gamma_se;
        summary["sigma"] = res.gs.sigma;
        summary["sigma_se"] = res.gs.sigma_se;
        summary["ks_normal"] = {{"statistic", res.ks_normal.statistic}, {"p", res.ks_normal.p}};
        summary["ks_symmetry"] = {{"statistic", res.ks_symmetry.statistic},
                                  {"p", res.ks_symmetry.p}};
      }
    } else if (cfg.experiment == "eta") {
      const EtaResult res = run_eta(cfg);
      std::ofstream f(dir / "eta.csv");
      f << "epsilon,t,p_ge2,se,n_trials\n";
      for (const auto& row : res.rows) {
        f << fmt17(row.eps) << "," << fmt17(row.t) << "," << fmt17(row.p_ge2) << ","
          << fmt17(row.se) << "," << row.n_trials << "\n";
      }
      summary["gamma_used"] = res.gamma_used;
      summary["sigma_used"] = res.sigma_used;
      summary["used_diffusivity_fallback"] = res.used_diffusivity_fallback;
    } else if (cfg.experiment == "dual-check") {
      const DualCheckResult res = run_dual_check(cfg);
      std::ofstream f(dir / "windows.csv");
      f << "window,violations\n";
      for (long w = 0; w < res.windows; ++w) {
        f << w << "," << res.per_window_violations[w] << "\n";
      }
      {
        // Dual edges of the first window, for plotting.
        SlabStore store(cfg.lambda, rep_seed(cfg, 601, 0));
        DualWindow dw(store, Rect{0.0, 0.0, cfg.window, cfg.window});
        std::ofstream ef(dir / "dual_edges.csv");
        ef << "from_x,from_y,to_x,to_y,side\n";
        for (const DualPath& p : dw.dual_paths()) {
          for (size_t i = 0; i + 1 < p.vertices.size(); ++i) {
            ef << fmt17(p.vertices[i].x) << "," << fmt17(p.vertices[i].y) << ","
               << fmt17(p.vertices[i + 1].x) << "," << fmt17(p.vertices[i + 1].y) << ",0\n";
          }
        }
      }
      summary["total_violations"] = res.total_violations;
      summary["dual_vertices"] = res.dual_vertex_count;
      summary["every_vertex_has_one_edge"] = res.every_vertex_has_one_edge;
      summary["sensitivity_violations"] = res.sensitivity_violations;
      summary["mean_dual_starts_per_unit_cell"] = res.mean_dual_starts_per_unit_cell;
    } else if (cfg.experiment == "rst-chi") {
      const RstChiResult res = run_rst_chi(cfg);
      std::ofstream f(dir / "chi.csv");
      f << "r,R_out,seed,chi\n";
      for (const auto& row : res.rows) {
        f << fmt17(row.r) << "," << fmt17(row.r_out) << "," << row.seed << "," << row.chi
          << "\n";
      }
      summary["slope_fit"] = fit_to_json(res.slope_fit);
      summary["slope_upper95"] = res.slope_upper95;
    } else if (cfg.experiment == "gamma-sigma") {
      const GammaSigmaResult res = run_gamma_sigma(cfg);
      summary["valid"] = res.valid;
      summary["timeouts"] = res.timeouts;
      if (res.valid) {
        summary["gamma"] = res.estimate.gamma;
        summary["gamma_se"] = res.estimate.gamma_se;
        summary["sigma"] = res.estimate.sigma;
        summary["sigma_se"] = res.estimate.sigma_se;
        summary["gamma_first"] = res.estimate.gamma_first;
        summary["sigma_first"] = res.estimate.sigma_first;
        summary["increments"] = res.estimate.increments;
      }
      std::ofstream f(dir / "gamma_sigma.json");
      f << summary.dump(2) << "\n";
    } else if (cfg.experiment == "resampled-check") {
      const ResampledCheckResult res = run_resampled_check(cfg);
      summary["two_sample"] = {{"statistic", res.two_sample.statistic}, {"p", res.two_sample.p}};
      summary["analytic"] = {{"statistic", res.analytic.statistic}, {"p", res.analytic.p}};
      std::ofstream f(dir / "resampled.json");
      f << summary.dump(2) << "\n";
    } else {
      std::fprintf(stderr, "unknown experiment: %s\n", cfg.experiment.c_str());
      return 1;
    }
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }

  const double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  write_manifest(cfg, dir, wall_ms, summary);
  return 0;
}

}  // namespace dsf
