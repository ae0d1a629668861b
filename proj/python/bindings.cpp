#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <vector>

#include "rattlesim/config.hpp"
#include "rattlesim/engine.hpp"
#include "rattlesim/ews.hpp"
#include "rattlesim/experiments.hpp"
#include "rattlesim/models.hpp"
#include "rattlesim/rng.hpp"
#include "rattlesim/timechange.hpp"

namespace py = pybind11;
using namespace rattlesim;

namespace {

SimConfig make_sim_config(double t0, double horizon, double dt, double dt_record,
                          std::optional<double> x0, double lower, double upper,
                          bool stop_on_exit) {
  SimConfig c;
  c.t0 = t0;
  c.horizon = horizon;
  c.dt = dt;
  c.dt_record = dt_record;
  if (x0) {
    c.x0 = *x0;
  } else {
    c.x0 = UpperStableEquilibrium{};
  }
  c.basin = BasinSpec::interval(lower, upper);
  c.stop_on_exit = stop_on_exit;
  return c;
}

config::ExperimentConfig load_config(const std::string& experiment,
                                     const std::optional<std::filesystem::path>& file,
                                     const std::optional<std::string>& text) {
  const auto e = config::experiment_from_string(experiment);
  if (!e) throw InvalidArgument("unknown experiment: " + experiment);
  auto cfg = config::defaults_for(*e);
  if (file) config::apply_config_file(cfg, *file);
  if (text) config::apply_config_text(cfg, *text);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_rattlesim, m) {
  m.doc() = "Stochastic rate-induced tipping simulator";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<config::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<timechange::InconclusiveError>(m, "InconclusiveError",
                                                         PyExc_RuntimeError);

  py::class_<ParamSchedule>(m, "ParamSchedule")
      .def_static("constant", &ParamSchedule::constant, py::arg("v"), py::arg("clamp_min") = 0.0)
      .def_static("inverse_linear", &ParamSchedule::inverse_linear, py::arg("c0"), py::arg("c1"),
                  py::arg("clamp_min") = 0.0)
      .def_static("power_law", &ParamSchedule::power_law, py::arg("c"), py::arg("p"),
                  py::arg("clamp_min") = 0.0)
      .def_static("linear", &ParamSchedule::linear, py::arg("v0"), py::arg("slope"),
                  py::arg("clamp_min") = 0.0)
      .def("__call__", [](const ParamSchedule& s, double t) { return s(t); });

  py::class_<PotentialModel>(m, "PotentialModel")
      .def_static("cubic", &PotentialModel::cubic, py::arg("alpha"), py::arg("beta"),
                  py::arg("noise"))
      .def_static("allee",
                  py::overload_cast<double, double, double, ParamSchedule, double>(
                      &PotentialModel::allee),
                  py::arg("r"), py::arg("A"), py::arg("C"), py::arg("beta"), py::arg("noise"))
      .def_static("ou", &PotentialModel::ou, py::arg("b"), py::arg("noise"))
      .def_static("table", &PotentialModel::table, py::arg("xs"), py::arg("drift"),
                  py::arg("noise"))
      .def_static("figure1", &models::figure1_model)
      .def("drift", &PotentialModel::drift, py::arg("x"), py::arg("t"))
      .def("narrowed", &PotentialModel::narrowed, py::arg("k"))
      .def("upper_stable_equilibrium", &PotentialModel::upper_stable_equilibrium, py::arg("t"))
      .def("lower_unstable_equilibrium", &PotentialModel::lower_unstable_equilibrium,
           py::arg("t"))
      .def_property_readonly("noise", &PotentialModel::noise_amplitude)
      .def("describe", &PotentialModel::describe)
      .def("__repr__", &PotentialModel::describe);

  m.def("validate_model", &validate_model, py::arg("model"), py::arg("horizon"),
        py::arg("t0") = 0.0);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init(&make_sim_config), py::arg("t0") = 0.0, py::arg("horizon") = 100.0,
           py::arg("dt") = 0.01, py::arg("dt_record") = 0.1, py::arg("x0") = 0.0,
           py::arg("lower") = -kInf, py::arg("upper") = kInf, py::arg("stop_on_exit") = false)
      .def_readwrite("t0", &SimConfig::t0)
      .def_readwrite("horizon", &SimConfig::horizon)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("dt_record", &SimConfig::dt_record)
      .def_readwrite("stop_on_exit", &SimConfig::stop_on_exit)
      .def("record_count", &SimConfig::record_count);

  py::enum_<BoundarySide>(m, "BoundarySide")
      .value("LOWER", BoundarySide::Lower)
      .value("UPPER", BoundarySide::Upper);

  py::class_<ExitRecord>(m, "ExitRecord")
      .def_readonly("time", &ExitRecord::time)
      .def_readonly("boundary", &ExitRecord::boundary)
      .def_readonly("state_at_exit", &ExitRecord::state_at_exit)
      .def_readonly("index", &ExitRecord::index);

  py::class_<SamplePath>(m, "SamplePath")
      .def_readonly("t0", &SamplePath::t0)
      .def_readonly("dt_record", &SamplePath::dt_record)
      .def_readonly("states", &SamplePath::states)
      .def_readonly("exit", &SamplePath::exit)
      .def_readonly("seed", &SamplePath::seed)
      .def("times", [](const SamplePath& p) {
        std::vector<double> t(p.states.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = p.time_at(i);
        return t;
      });

  py::class_<EnsembleResult>(m, "EnsembleResult")
      .def_readonly("paths", &EnsembleResult::paths)
      .def_readonly("master_seed", &EnsembleResult::master_seed)
      .def_readonly("horizon", &EnsembleResult::horizon);

  py::class_<ExitTimeDistribution>(m, "ExitTimeDistribution")
      .def("cdf", &ExitTimeDistribution::cdf, py::arg("tau"))
      .def("quantile", &ExitTimeDistribution::quantile, py::arg("q"))
      .def_property_readonly("exit_times", &ExitTimeDistribution::sorted_exit_times)
      .def_property_readonly("n_total", &ExitTimeDistribution::n_total)
      .def_property_readonly("n_exited", &ExitTimeDistribution::n_exited)
      .def_property_readonly("horizon", &ExitTimeDistribution::horizon);

  m.def("split_seed", &split_seed, py::arg("master"), py::arg("index"));
  m.def("simulate_path", &simulate_path, py::arg("model"), py::arg("config"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_ensemble",
      [](const PotentialModel& model, const SimConfig& cfg, std::size_t n, std::uint64_t seed,
         unsigned workers) { return run_ensemble(model, cfg, n, seed, {workers}); },
      py::arg("model"), py::arg("config"), py::arg("n"), py::arg("seed"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "exit_times",
      [](const PotentialModel& model, const SimConfig& cfg, std::size_t n, std::uint64_t seed,
         unsigned workers) {
        const auto exits = run_exit_ensemble(model, cfg, n, seed, {workers});
        return exit_time_distribution(exits, cfg.horizon);
      },
      py::arg("model"), py::arg("config"), py::arg("n"), py::arg("seed"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());
  m.def("exit_time_distribution",
        py::overload_cast<const EnsembleResult&>(&exit_time_distribution), py::arg("ensemble"));

  py::class_<RollingStatSeries>(m, "RollingStatSeries")
      .def_readonly("times", &RollingStatSeries::times)
      .def_readonly("values", &RollingStatSeries::values)
      .def_readonly("window", &RollingStatSeries::window)
      .def_readonly("lag", &RollingStatSeries::lag)
      .def_readonly("n_contributing", &RollingStatSeries::n_contributing);

  m.def(
      "rolling_variance",
      [](const std::vector<double>& states, double t0, double dt_record, double window) {
        return ews::rolling_variance(states, t0, dt_record, window);
      },
      py::arg("states"), py::arg("t0"), py::arg("dt_record"), py::arg("window"));
  m.def(
      "rolling_autocorrelation",
      [](const std::vector<double>& states, double t0, double dt_record, double window,
         double lag) { return ews::rolling_autocorrelation(states, t0, dt_record, window, lag); },
      py::arg("states"), py::arg("t0"), py::arg("dt_record"), py::arg("window"),
      py::arg("lag") = 1.0);
  m.def(
      "survivor_mean_series",
      [](const EnsembleResult& ens, const std::string& stat, double window, double lag) {
        ews::Statistic s;
        if (stat == "variance") {
          s = ews::Statistic::Variance;
        } else if (stat == "autocorrelation") {
          s = ews::Statistic::Autocorrelation;
        } else {
          throw InvalidArgument("statistic must be 'variance' or 'autocorrelation'");
        }
        return ews::survivor_mean_series(ens, s, window, lag);
      },
      py::arg("ensemble"), py::arg("statistic"), py::arg("window"), py::arg("lag") = 1.0);
  m.def(
      "kendall_tau_b",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return ews::kendall_tau_b(x, y);
      },
      py::arg("x"), py::arg("y"));

  py::class_<timechange::RescaleReport>(m, "RescaleReport")
      .def_readonly("k", &timechange::RescaleReport::k)
      .def_readonly("ks_distance", &timechange::RescaleReport::ks_distance)
      .def_readonly("threshold", &timechange::RescaleReport::threshold)
      .def_readonly("n_per_ensemble", &timechange::RescaleReport::n_per_ensemble)
      .def_readonly("passed", &timechange::RescaleReport::pass)
      .def_readonly("median_narrowed", &timechange::RescaleReport::median_narrowed)
      .def_readonly("median_original", &timechange::RescaleReport::median_original);

  m.def("ks_threshold", &timechange::ks_threshold, py::arg("n"));
  m.def(
      "verify_time_change",
      [](const PotentialModel& model, double lower, double upper, double x0, double k,
         std::size_t n, double horizon, std::uint64_t seed, double dt, double dt_record,
         unsigned workers) {
        timechange::TimeChangeOptions opts;
        opts.dt = dt;
        opts.dt_record = dt_record;
        opts.ensemble.workers = workers;
        return timechange::verify_time_change(model, BasinSpec::interval(lower, upper), x0, k, n,
                                              horizon, seed, opts);
      },
      py::arg("model"), py::arg("lower"), py::arg("upper"), py::arg("x0"), py::arg("k"),
      py::arg("n"), py::arg("horizon"), py::arg("seed"), py::arg("dt") = 0.01,
      py::arg("dt_record") = 0.01, py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());

  py::module_ mm = m.def_submodule("models", "Closed-form model quantities");
  mm.def("cubic_drift", py::overload_cast<double, double, double>(&models::cubic_drift),
         py::arg("x"), py::arg("alpha"), py::arg("beta"));
  mm.def("allee_drift",
         py::overload_cast<double, double, double, double, double>(&models::allee_drift),
         py::arg("x"), py::arg("r"), py::arg("A"), py::arg("C"), py::arg("beta"));
  mm.def("cubic_equilibria",
         [](double alpha, double beta) { return models::cubic_equilibria(alpha, beta).points; },
         py::arg("alpha"), py::arg("beta"));
  mm.def("allee_equilibria",
         [](double beta, double A, double C) { return models::allee_equilibria(beta, A, C).points; },
         py::arg("beta"), py::arg("A"), py::arg("C"));
  mm.def("fig1_beta", &models::fig1_beta_schedule, py::arg("t"));
  mm.def("ou_variance", &models::ou_variance, py::arg("a"), py::arg("b"), py::arg("t"));
  mm.def("ou_covariance", &models::ou_covariance, py::arg("a"), py::arg("b"), py::arg("t"),
         py::arg("s"));
  mm.def("csd_variance_slope", &models::csd_variance_slope, py::arg("a"), py::arg("beta"));
  mm.def("csu_variance", &models::csu_variance, py::arg("a"), py::arg("alpha"), py::arg("t"));

  py::class_<config::ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("horizon", &config::ExperimentConfig::horizon)
      .def_readwrite("n_paths", &config::ExperimentConfig::n_paths)
      .def_readwrite("master_seed", &config::ExperimentConfig::master_seed)
      .def_readwrite("workers", &config::ExperimentConfig::workers)
      .def_readwrite("output_dir", &config::ExperimentConfig::output_dir)
      .def_readwrite("emit_svg", &config::ExperimentConfig::emit_svg)
      .def_readwrite("beta_count", &config::ExperimentConfig::beta_count)
      .def_readwrite("ks", &config::ExperimentConfig::ks)
      .def("validate", &config::validate);

  m.def("load_config", &load_config, py::arg("experiment"), py::arg("file") = py::none(),
        py::arg("text") = py::none(),
        "Defaults for the experiment, overridden by a config file and then by config text.");

  m.def(
      "run_figure1",
      [](const config::ExperimentConfig& cfg) {
        const auto r = [&] {
          py::gil_scoped_release nogil;
          return experiments::run_figure1(cfg);
        }();
        py::dict d;
        d["times"] = r.mean_variance.times;
        d["mean_variance"] = r.mean_variance.values;
        d["mean_autocorrelation"] = r.mean_autocorrelation.values;
        d["n_surviving"] = r.n_surviving;
        d["exit_times"] = r.exit_times.sorted_exit_times();
        return d;
      },
      py::arg("config"));
  m.def(
      "run_figure2",
      [](const config::ExperimentConfig& cfg) {
        const auto rows = [&] {
          py::gil_scoped_release nogil;
          return experiments::run_figure2(cfg);
        }();
        py::list out;
        auto mean = [](const std::optional<experiments::Summary>& s) -> py::object {
          if (!s) return py::none();
          return py::float_(s->mean);
        };
        for (const auto& r : rows) {
          py::dict d;
          d["beta"] = r.beta;
          d["exit_mean"] = mean(r.exit_time);
          d["var_mean"] = mean(r.pre_exit_variance);
          d["ac_mean"] = mean(r.pre_exit_autocorr);
          d["n_paths"] = r.n_paths;
          d["n_exited"] = r.n_exited;
          out.append(d);
        }
        return out;
      },
      py::arg("config"));
  m.def(
      "run_verify_timechange",
      [](const config::ExperimentConfig& cfg) {
        return experiments::run_verify_timechange(cfg).reports;
      },
      py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_simulate", &experiments::run_simulate, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
