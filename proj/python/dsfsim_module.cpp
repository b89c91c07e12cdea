#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dsf/experiments.hpp"

namespace py = pybind11;
using namespace dsf;

namespace {

std::vector<std::pair<double, double>> path_tuples(const PathPolyline& p) {
  std::vector<std::pair<double, double>> out;
  out.reserve(p.vertices().size());
  for (const Point& v : p.vertices()) out.emplace_back(v.x, v.y);
  return out;
}

}  // namespace

PYBIND11_MODULE(dsfsim, m) {
  m.doc() = "Directed spanning forest simulation on a planar Poisson process";

  py::class_<Point>(m, "Point")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Point{x, y}; }), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point::x)
      .def_readwrite("y", &Point::y)
      .def("__eq__", [](const Point& a, const Point& b) { return a == b; })
      .def("__repr__", [](const Point& p) {
        std::ostringstream os;
        os << "Point(" << p.x << ", " << p.y << ")";
        return os.str();
      });

  py::class_<Rect>(m, "Rect")
      .def(py::init([](double x0, double y0, double x1, double y1) {
             return Rect{x0, y0, x1, y1};
           }),
           py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"))
      .def_readwrite("x0", &Rect::x0)
      .def_readwrite("y0", &Rect::y0)
      .def_readwrite("x1", &Rect::x1)
      .def_readwrite("y1", &Rect::y1);

  py::class_<SemiBall>(m, "SemiBall")
      .def(py::init([](const Point& c, double r) { return SemiBall{c, r}; }), py::arg("center"),
           py::arg("radius"))
      .def_readwrite("center", &SemiBall::center)
      .def_readwrite("radius", &SemiBall::radius)
      .def("top", &SemiBall::top);

  py::class_<HistorySet>(m, "HistorySet")
      .def(py::init<double>(), py::arg("clip_level") = 0.0)
      .def("add", &HistorySet::add)
      .def("prune", &HistorySet::prune)
      .def("height", &HistorySet::height)
      .def("contains", &HistorySet::contains)
      .def_property_readonly("clip_level", &HistorySet::clip_level)
      .def_property_readonly("balls", &HistorySet::balls);

  m.def("in_semiball", &in_semiball, py::arg("p"), py::arg("ball"));
  m.def("cone_contains", &cone_contains, py::arg("apex"), py::arg("p"));

  py::class_<SlabStore>(m, "SlabStore")
      .def(py::init([](double intensity, uint64_t seed) { return SlabStore(intensity, seed); }),
           py::arg("intensity"), py::arg("seed"))
      .def_static("from_points",
                  [](const std::vector<std::pair<double, double>>& pts) {
                    std::vector<Point> v;
                    for (auto& [x, y] : pts) v.push_back(Point{x, y});
                    return SlabStore::from_points(std::move(v));
                  })
      .def("extend", &SlabStore::extend, py::arg("need_top"), py::arg("need_halfwidth"))
      .def("sample_region",
           [](SlabStore& s, const Rect& r) {
             std::vector<std::pair<double, double>> out;
             for (const Point& p : s.sample_region(r)) out.emplace_back(p.x, p.y);
             return out;
           })
      .def_property_readonly("intensity", &SlabStore::intensity)
      .def_property_readonly("seed", &SlabStore::seed);

  py::class_<PathPolyline>(m, "PathPolyline")
      .def("eval", &PathPolyline::eval)
      .def_property_readonly("start_time", &PathPolyline::start_time)
      .def_property_readonly("end_time", &PathPolyline::end_time)
      .def_property_readonly("vertices", [](const PathPolyline& p) { return path_tuples(p); });

  m.def(
      "ancestor",
      [](const Point& x, SlabStore& store, const HistorySet* exclude,
         const std::vector<Point>& extra) { return ancestor(x, store, exclude, extra); },
      py::arg("x"), py::arg("store"), py::arg("exclude") = nullptr,
      py::arg("extra") = std::vector<Point>{});
  m.def("trace_path",
        [](const Point& x, SlabStore& store, double y_max) { return trace_path(x, store, y_max); },
        py::arg("x"), py::arg("store"), py::arg("y_max"));

  py::class_<StepInfo>(m, "StepInfo")
      .def_readonly("mover", &StepInfo::mover)
      .def_readonly("from_point", &StepInfo::from)
      .def_readonly("to_point", &StepInfo::to)
      .def_readonly("displacement", &StepInfo::displacement)
      .def_readonly("coalesced", &StepInfo::coalesced);

  py::class_<ExplorationState>(m, "ExplorationState")
      .def(py::init<std::vector<Point>, int>(), py::arg("starts"), py::arg("kappa") = 6)
      .def("select_mover", &ExplorationState::select_mover)
      .def("step", &ExplorationState::step)
      .def("step_resampled", &ExplorationState::step_resampled)
      .def("is_good_step", &ExplorationState::is_good_step)
      .def("note_good_step", &ExplorationState::note_good_step)
      .def("unexplored_cone_distance", &ExplorationState::unexplored_cone_distance)
      .def_property_readonly("positions", &ExplorationState::positions)
      .def_property_readonly("history", &ExplorationState::history)
      .def_property_readonly("step_count", &ExplorationState::step_count)
      .def_property_readonly("clip", &ExplorationState::clip)
      .def_property_readonly("height", &ExplorationState::height)
      .def_property_readonly("walker_paths", &ExplorationState::walker_paths)
      .def_property_readonly("fully_coalesced", &ExplorationState::fully_coalesced);

  py::class_<RenewalRecord>(m, "RenewalRecord")
      .def_readonly("ell", &RenewalRecord::ell)
      .def_readonly("beta", &RenewalRecord::beta)
      .def_readonly("varrho", &RenewalRecord::varrho)
      .def_readonly("u_new", &RenewalRecord::u_new)
      .def_readonly("extra_new", &RenewalRecord::extra_new)
      .def_readonly("block_size", &RenewalRecord::block_size);

  m.def("renewal_sequence",
        [](const std::vector<Point>& starts, SlabStore& store, int count, int kappa,
           long step_cap) {
          return renewal_sequence(starts, store, count, kappa, RenewalOptions{step_cap});
        },
        py::arg("starts"), py::arg("store"), py::arg("count"), py::arg("kappa") = 6,
        py::arg("step_cap") = 1'000'000);

  py::class_<CoalescenceSample>(m, "CoalescenceSample")
      .def_readonly("z0", &CoalescenceSample::z0)
      .def_readonly("T", &CoalescenceSample::T)
      .def_readonly("censored", &CoalescenceSample::censored)
      .def_readonly("nu", &CoalescenceSample::nu)
      .def_readonly("nu_censored", &CoalescenceSample::nu_censored)
      .def_readonly("z_path", &CoalescenceSample::z_path);

  m.def("coalescence_time",
        [](const Point& u1, const Point& u2, SlabStore& store, double t_cap, int kappa) {
          return coalescence_time(u1, u2, store, t_cap, kappa);
        },
        py::arg("u1"), py::arg("u2"), py::arg("store"), py::arg("t_cap"), py::arg("kappa") = 6);
  m.def("f_transform", &f_transform, py::arg("x"));
  m.def("bw_pair_survival", &bw_pair_survival, py::arg("d"), py::arg("t"));

  py::class_<ScaleParams>(m, "ScaleParams")
      .def(py::init([](int n, double gamma, double sigma) {
             return ScaleParams{n, gamma, sigma};
           }),
           py::arg("n"), py::arg("gamma"), py::arg("sigma"))
      .def_readwrite("n", &ScaleParams::n)
      .def_readwrite("gamma", &ScaleParams::gamma)
      .def_readwrite("sigma", &ScaleParams::sigma);
  m.def("scale_path", &scale_path, py::arg("path"), py::arg("params"));
  m.def("eta_count", &eta_count, py::arg("paths"), py::arg("t0"), py::arg("t"), py::arg("a"),
        py::arg("b"));

  m.def("rst_ancestor", &rst_ancestor, py::arg("x"), py::arg("store"));
  m.def("annulus_crossing_count", &annulus_crossing_count, py::arg("r"), py::arg("r_out"),
        py::arg("store"));

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("slope", &FitResult::slope)
      .def_readonly("intercept", &FitResult::intercept)
      .def_readonly("r_squared", &FitResult::r_squared)
      .def_readonly("slope_se", &FitResult::slope_se);
  m.def("loglog_fit", &loglog_fit, py::arg("points"));
  m.def("ks_test_cdf",
        [](std::vector<double> sample, const std::function<double(double)>& cdf) {
          const KsResult r = ks_test(std::move(sample), cdf);
          return std::make_pair(r.statistic, r.p);
        },
        py::arg("sample"), py::arg("cdf"));
  m.def("ks_test_two",
        [](std::vector<double> a, std::vector<double> b) {
          const KsResult r = ks_test(std::move(a), std::move(b));
          return std::make_pair(r.statistic, r.p);
        },
        py::arg("a"), py::arg("b"));

  m.def("run_experiment",
        [](const py::dict& d) {
          ExperimentConfig cfg;
          for (auto item : d) {
            const std::string key = py::str(item.first);
            if (key == "experiment") cfg.experiment = py::cast<std::string>(item.second);
            else if (key == "lambda") cfg.lambda = py::cast<double>(item.second);
            else if (key == "kappa") cfg.kappa = py::cast<int>(item.second);
            else if (key == "seed") cfg.seed = py::cast<uint64_t>(item.second);
            else if (key == "replications") cfg.replications = py::cast<long>(item.second);
            else if (key == "threads") cfg.threads = py::cast<int>(item.second);
            else if (key == "out") cfg.out = py::cast<std::string>(item.second);
            else if (key == "z0") cfg.z0_list = py::cast<std::vector<double>>(item.second);
            else if (key == "t_grid") cfg.t_grid = py::cast<std::vector<double>>(item.second);
            else if (key == "n") cfg.n_scale = py::cast<int>(item.second);
            else if (key == "window") cfg.window = py::cast<double>(item.second);
            else if (key == "r_list") cfg.r_list = py::cast<std::vector<double>>(item.second);
            else if (key == "rout_factor") cfg.rout_factor = py::cast<double>(item.second);
            else if (key == "m0") cfg.m0 = py::cast<double>(item.second);
            else if (key == "gamma") cfg.gamma = py::cast<double>(item.second);
            else if (key == "sigma") cfg.sigma = py::cast<double>(item.second);
            else if (key == "renewals") cfg.renewals = py::cast<long>(item.second);
            else if (key == "eps_list") cfg.eps_list = py::cast<std::vector<double>>(item.second);
            else if (key == "t_eta") cfg.t_eta = py::cast<double>(item.second);
            else if (key == "trace_y_max") cfg.trace_y_max = py::cast<double>(item.second);
            else if (key == "step_cap") cfg.step_cap = py::cast<long>(item.second);
            else throw std::invalid_argument("run_experiment: unknown key '" + key + "'");
          }
          return run_experiment_to_files(cfg);
        },
        py::arg("config"));
}
