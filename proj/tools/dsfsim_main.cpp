#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dsf/experiments.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// Flat key = value config file; '#' starts a comment. Unknown keys are
// rejected with the offending line number. Command line flags win.
bool apply_config_file(const std::string& path, dsf::ExperimentConfig& cfg, std::string& error) {
  std::ifstream f(path);
  if (!f) {
    error = "cannot open config file: " + path;
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) {
      error = path + ":" + std::to_string(lineno) + ": expected 'key = value'";
      return false;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") cfg.experiment = value;
      else if (key == "lambda") cfg.lambda = std::stod(value);
      else if (key == "kappa") cfg.kappa = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "replications") cfg.replications = std::stol(value);
      else if (key == "threads") cfg.threads = std::stoi(value);
      else if (key == "out") cfg.out = value;
      else if (key == "z0") cfg.z0_list = parse_doubles(value);
      else if (key == "t_grid") cfg.t_grid = parse_doubles(value);
      else if (key == "n") cfg.n_scale = std::stoi(value);
      else if (key == "window") cfg.window = std::stod(value);
      else if (key == "r_list") cfg.r_list = parse_doubles(value);
      else if (key == "rout_factor") cfg.rout_factor = std::stod(value);
      else if (key == "m0") cfg.m0 = std::stod(value);
      else if (key == "gamma") cfg.gamma = std::stod(value);
      else if (key == "sigma") cfg.sigma = std::stod(value);
      else if (key == "renewals") cfg.renewals = std::stol(value);
      else if (key == "eps_list") cfg.eps_list = parse_doubles(value);
      else if (key == "t_eta") cfg.t_eta = std::stod(value);
      else if (key == "trace_y_max") cfg.trace_y_max = std::stod(value);
      else if (key == "step_cap") cfg.step_cap = std::stol(value);
      else {
        error = path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'";
        return false;
      }
    } catch (const std::exception&) {
      error = path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed spanning forest simulation experiments"};

  dsf::ExperimentConfig cfg;
  std::string config_path;
  std::string z0_str, t_grid_str, r_list_str, eps_str;

  app.add_option("--experiment", cfg.experiment,
                 "one of: trace, renewal-stats, coalescence-tail, laplace-check, donsker, "
                 "eta, dual-check, rst-chi, gamma-sigma, resampled-check");
  app.add_option("--config", config_path, "flat key = value config file (flags win)");
  auto* o_lambda = app.add_option("--lambda", cfg.lambda, "point process intensity");
  auto* o_kappa = app.add_option("--kappa", cfg.kappa, "height constant, integer >= 6");
  auto* o_seed = app.add_option("--seed", cfg.seed, "64-bit master seed");
  auto* o_reps = app.add_option("--replications", cfg.replications, "replication count");
  auto* o_threads = app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  auto* o_out = app.add_option("--out", cfg.out, "output directory");
  auto* o_z0 = app.add_option("--z0", z0_str, "initial gaps, comma separated");
  auto* o_tg = app.add_option("--t-grid", t_grid_str, "survival time grid, comma separated");
  auto* o_n = app.add_option("--n", cfg.n_scale, "diffusive scale index");
  auto* o_win = app.add_option("--window", cfg.window, "window edge length");
  auto* o_rl = app.add_option("--r-list", r_list_str, "circle radii, comma separated");
  auto* o_rf = app.add_option("--rout-factor", cfg.rout_factor, "annulus radius over r");
  auto* o_m0 = app.add_option("--m0", cfg.m0, "gap threshold for the drift report");
  auto* o_gamma = app.add_option("--gamma", cfg.gamma, "time normalizer (0 = estimate)");
  auto* o_sigma = app.add_option("--sigma", cfg.sigma, "space normalizer (0 = estimate)");
  auto* o_renew = app.add_option("--renewals", cfg.renewals, "pooled renewal target");
  auto* o_eps = app.add_option("--eps-list", eps_str, "interval widths, comma separated");
  auto* o_teta = app.add_option("--t-eta", cfg.t_eta, "scaled elapsed time for eta");
  auto* o_trymax = app.add_option("--trace-y-max", cfg.trace_y_max, "trace height");
  auto* o_cap = app.add_option("--step-cap", cfg.step_cap, "per-segment step cap");

  CLI11_PARSE(app, argc, argv);

  if (!config_path.empty()) {
    // Flags win over the file: reload file values first, then re-apply any
    // flag that was actually given.
    dsf::ExperimentConfig file_cfg;
    file_cfg.experiment = cfg.experiment;
    std::string error;
    if (!apply_config_file(config_path, file_cfg, error)) {
      std::fprintf(stderr, "config error: %s\n", error.c_str());
      return 1;
    }
    if (app.count("--experiment") == 0 && !file_cfg.experiment.empty()) {
      cfg.experiment = file_cfg.experiment;
    }
    if (o_lambda->count() == 0) cfg.lambda = file_cfg.lambda;
    if (o_kappa->count() == 0) cfg.kappa = file_cfg.kappa;
    if (o_seed->count() == 0) cfg.seed = file_cfg.seed;
    if (o_reps->count() == 0) cfg.replications = file_cfg.replications;
    if (o_threads->count() == 0) cfg.threads = file_cfg.threads;
    if (o_out->count() == 0) cfg.out = file_cfg.out;
    if (o_z0->count() == 0) cfg.z0_list = file_cfg.z0_list;
    if (o_tg->count() == 0) cfg.t_grid = file_cfg.t_grid;
    if (o_n->count() == 0) cfg.n_scale = file_cfg.n_scale;
    if (o_win->count() == 0) cfg.window = file_cfg.window;
    if (o_rl->count() == 0) cfg.r_list = file_cfg.r_list;
    if (o_rf->count() == 0) cfg.rout_factor = file_cfg.rout_factor;
    if (o_m0->count() == 0) cfg.m0 = file_cfg.m0;
    if (o_gamma->count() == 0) cfg.gamma = file_cfg.gamma;
    if (o_sigma->count() == 0) cfg.sigma = file_cfg.sigma;
    if (o_renew->count() == 0) cfg.renewals = file_cfg.renewals;
    if (o_eps->count() == 0) cfg.eps_list = file_cfg.eps_list;
    if (o_teta->count() == 0) cfg.t_eta = file_cfg.t_eta;
    if (o_trymax->count() == 0) cfg.trace_y_max = file_cfg.trace_y_max;
    if (o_cap->count() == 0) cfg.step_cap = file_cfg.step_cap;
  }

  if (o_z0->count() > 0) cfg.z0_list = parse_doubles(z0_str);
  if (o_tg->count() > 0) cfg.t_grid = parse_doubles(t_grid_str);
  if (o_rl->count() > 0) cfg.r_list = parse_doubles(r_list_str);
  if (o_eps->count() > 0) cfg.eps_list = parse_doubles(eps_str);

  if (cfg.experiment.empty()) {
    std::fprintf(stderr, "config error: --experiment is required\n");
    return 1;
  }
  if (!(cfg.lambda > 0.0)) {
    std::fprintf(stderr, "config error: lambda must be positive\n");
    return 1;
  }
  if (cfg.kappa < 6) {
    std::fprintf(stderr, "config error: kappa must be an integer >= 6\n");
    return 1;
  }
  if (cfg.replications < 1) {
    std::fprintf(stderr, "config error: replications must be positive\n");
    return 1;
  }

  return dsf::run_experiment_to_files(cfg);
}
