#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dsf/coalesce.hpp"
#include "dsf/dual.hpp"
#include "dsf/rst.hpp"
#include "dsf/scaling.hpp"
#include "dsf/stats.hpp"

namespace dsf {

struct ExperimentConfig {
  std::string experiment;
  double lambda = 1.0;
  int kappa = 6;
  uint64_t seed = 1;
  long replications = 100;
  int threads = 0;  // 0 = hardware concurrency
  std::string out = "out";

  std::vector<double> z0_list = {1.0};
  std::vector<double> t_grid;
  int n_scale = 20;
  double window = 20.0;
  std::vector<double> r_list = {25.0, 50.0, 100.0, 200.0};
  double rout_factor = 4.0;
  double m0 = 14.0;
  double gamma = 0.0;  // 0 = estimate or fall back to measured diffusivity
  double sigma = 0.0;
  long renewals = 20000;  // pooled renewal target
  std::vector<double> eps_list = {0.05, 0.1, 0.2};
  double t_eta = 1.0;
  double trace_y_max = 100.0;
  long step_cap = 1'000'000;
};

// Runs fn(0..n-1), spread over the requested number of threads. Results must
// be written into per-index slots so the outcome is schedule-independent.
void parallel_for(long n, int threads, const std::function<void(long)>& fn);

struct CoalescenceTailResult {
  struct Group {
    double z0 = 0.0;
    std::vector<CoalescenceSample> samples;
    std::vector<SurvivalRow> rows;
  };
  std::vector<Group> groups;
  double t_cap = 0.0;
};
CoalescenceTailResult run_coalescence_tail(const ExperimentConfig& cfg);

struct RenewalStatsResult {
  std::vector<RenewalRecord> records;  // pooled over chains
  long chains = 0;
  long timeouts = 0;
  // diagnostics from good steps: how far the event counts are from 1
  double mean_big_ball_count = 0.0;
  long good_steps_probed = 0;
  FitResult beta_fit;   // log P(beta >= n) against n
  FitResult width_fit;  // log P(W >= n) against sqrt(n)
  bool fits_valid = false;
};
RenewalStatsResult run_renewal_stats(const ExperimentConfig& cfg);

struct LaplaceResult {
  LaplaceReport report;
  long chains = 0;
  long timeouts = 0;
};
LaplaceResult run_laplace_check(const ExperimentConfig& cfg);

struct DonskerResult {
  GammaSigmaEstimate gs;
  bool gs_valid = false;
  long timeouts = 0;
  std::vector<double> standardized;  // path endpoint over n*sigma at time n^2*gamma
  std::vector<double> increments;    // stationary abscissa renewal increments
  KsResult ks_normal;
  KsResult ks_symmetry;
};
DonskerResult run_donsker(const ExperimentConfig& cfg);

struct EtaResult {
  double gamma_used = 0.0;
  double sigma_used = 0.0;
  bool used_diffusivity_fallback = false;
  struct Row {
    double eps = 0.0;
    double t = 0.0;
    double p_ge2 = 0.0;
    double se = 0.0;
    long n_trials = 0;
  };
  std::vector<Row> rows;
};
EtaResult run_eta(const ExperimentConfig& cfg);

struct DualCheckResult {
  long windows = 0;
  std::vector<long> per_window_violations;
  long total_violations = 0;
  long dual_vertex_count = 0;
  bool every_vertex_has_one_edge = true;
  long sensitivity_violations = 0;  // perturbed counterexample must be > 0
  double mean_dual_starts_per_unit_cell = 0.0;
};
DualCheckResult run_dual_check(const ExperimentConfig& cfg);

struct RstChiResult {
  struct Row {
    double r = 0.0;
    double r_out = 0.0;
    uint64_t seed = 0;
    long chi = 0;
  };
  std::vector<Row> rows;
  FitResult slope_fit;  // log mean chi against log r
  double slope_upper95 = 0.0;
};
RstChiResult run_rst_chi(const ExperimentConfig& cfg);

struct GammaSigmaResult {
  GammaSigmaEstimate estimate;
  long timeouts = 0;
  bool valid = false;
};
GammaSigmaResult run_gamma_sigma(const ExperimentConfig& cfg);

struct ResampledCheckResult {
  KsResult two_sample;          // original vs resampled first-move lengths
  KsResult analytic;            // k=1 lengths vs the half-disc law
};
ResampledCheckResult run_resampled_check(const ExperimentConfig& cfg);

// Effective diffusivity of a single path measured from endpoint variance;
// the fallback space normalizer when renewal estimates are unavailable.
double measure_diffusivity(double lambda, uint64_t seed, long paths = 400, double horizon = 100.0);

// Writes the experiment's CSV outputs plus a run manifest under cfg.out.
// Returns the process exit code (0 ok, 1 config error, 2 resource/runtime).
int run_experiment_to_files(const ExperimentConfig& cfg);

}  // namespace dsf
