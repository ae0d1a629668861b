#include "rattlesim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "rattlesim/csv.hpp"
#include "rattlesim/rng.hpp"
#include "rattlesim/svg.hpp"

namespace rattlesim::experiments {

namespace fs = std::filesystem;

namespace {

void require_valid(const config::ExperimentConfig& cfg) {
  const auto problems = config::validate(cfg);
  if (problems.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw InvalidArgument(msg);
}

fs::path prepare_dir(const config::ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
  return cfg.output_dir;
}

void write_paths_csv(const fs::path& file, const std::vector<SamplePath>& paths,
                     std::size_t limit) {
  csv::Writer w(file, {"path_id", "t", "x", "exited"});
  for (std::size_t id = 0; id < std::min(limit, paths.size()); ++id) {
    const auto& p = paths[id];
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      const bool exited = p.exit && i >= p.exit->index;
      w.row({id, p.time_at(i), p.states[i], exited ? 1 : 0});
    }
  }
}

double interpolated_percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::optional<Summary> summarize(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  Summary s;
  s.count = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.p5 = interpolated_percentile(values, 0.05);
  s.p95 = interpolated_percentile(values, 0.95);
  return s;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, double bin_width,
                                    double horizon) {
  if (!(bin_width > 0.0)) throw InvalidArgument("histogram: bin width must be > 0");
  const auto nbins = static_cast<std::size_t>(std::floor(horizon / bin_width)) + 1;
  std::vector<HistogramBin> bins(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    bins[k].start = static_cast<double>(k) * bin_width;
    bins[k].end = static_cast<double>(k + 1) * bin_width;
  }
  for (double v : values) {
    if (v < 0.0) continue;
    const auto k = static_cast<std::size_t>(std::floor(v / bin_width));
    if (k < nbins) ++bins[k].count;
  }
  return bins;
}

//---------------------------------------------------------------------------//

Figure1Result run_figure1(const config::ExperimentConfig& cfg) {
  require_valid(cfg);
  const fs::path dir = prepare_dir(cfg);
  const auto model = cfg.build_model();
  const auto sim = cfg.sim_config(model);

  Figure1Result res;
  res.ensemble = run_ensemble(model, sim, cfg.n_paths, cfg.master_seed, {cfg.workers});
  res.exit_times = exit_time_distribution(res.ensemble);
  res.collapse_histogram = histogram(res.exit_times.sorted_exit_times(), cfg.hist_bin, cfg.horizon);

  const std::size_t records = sim.record_count();
  if (cfg.n_paths > 0) {
    res.mean_variance =
        ews::survivor_mean_series(res.ensemble, ews::Statistic::Variance, cfg.window);
    res.mean_autocorrelation = ews::survivor_mean_series(
        res.ensemble, ews::Statistic::Autocorrelation, cfg.window, cfg.lag);
    res.n_surviving = ews::survivor_counts(res.ensemble);
  }

  write_paths_csv(dir / "paths.csv", res.ensemble.paths, cfg.paths_to_write);
  {
    csv::Writer w(dir / "survivor_stats.csv",
                  {"t", "n_surviving", "mean_rolling_variance", "mean_lag1_autocorr"});
    if (cfg.n_paths > 0) {
      for (std::size_t i = 0; i < records; ++i) {
        w.row({res.mean_variance.times[i], res.n_surviving[i], res.mean_variance.values[i],
               res.mean_autocorrelation.values[i]});
      }
    }
  }
  {
    csv::Writer w(dir / "collapse_hist.csv", {"bin_start", "bin_end", "count"});
    for (const auto& b : res.collapse_histogram) w.row({b.start, b.end, b.count});
  }
  std::vector<double> times(records);
  std::vector<std::optional<double>> threshold(records);
  {
    csv::Writer w(dir / "threshold.csv", {"t", "threshold"});
    for (std::size_t i = 0; i < records; ++i) {
      times[i] = cfg.t0 + static_cast<double>(i) * cfg.dt_record;
      threshold[i] = sim.basin.lower(times[i]);
      w.row({times[i], threshold[i]});
    }
  }

  if (cfg.emit_svg) {
    static const char* kColors[] = {"#1f77b4", "#2c7fb8", "#41b6c4", "#253494", "#7fcdbb"};
    std::vector<svg::Line> lines;
    for (std::size_t id = 0; id < std::min(cfg.paths_to_write, res.ensemble.paths.size()); ++id) {
      const auto& p = res.ensemble.paths[id];
      svg::Line l{"path " + std::to_string(id), {}, {}, kColors[id % 5]};
      for (std::size_t i = 0; i < p.states.size(); ++i) {
        l.x.push_back(p.time_at(i));
        l.y.emplace_back(p.states[i]);
      }
      lines.push_back(std::move(l));
    }
    lines.push_back({"threshold", times, threshold, "black", true});
    svg::write(dir / "paths.svg", svg::line_chart("sample paths", lines));
    if (cfg.n_paths > 0) {
      svg::write(dir / "survivor_stats.svg",
                 svg::line_chart("survivor-mean rolling statistics",
                                 {{"variance", res.mean_variance.times, res.mean_variance.values,
                                   "#d62728"},
                                  {"lag autocorrelation", res.mean_autocorrelation.times,
                                   res.mean_autocorrelation.values, "#2ca02c"}}));
    }
    std::vector<svg::Bar> bars;
    for (const auto& b : res.collapse_histogram) {
      bars.push_back({b.start, b.end, static_cast<double>(b.count)});
    }
    svg::write(dir / "collapse_hist.svg", svg::bar_chart("collapse times", bars));
  }
  return res;
}

//---------------------------------------------------------------------------//

PreExitStats pre_exit_stats(const SamplePath& path, double window, double lag) {
  PreExitStats out;
  if (!path.exit) return out;
  const auto n_win = static_cast<std::size_t>(std::llround(window / path.dt_record));
  const auto lag_n = static_cast<std::size_t>(std::llround(lag / path.dt_record));
  const std::size_t end = std::min(path.exit->index + 1, path.states.size());
  const std::size_t begin = end > n_win ? end - n_win : 0;
  const std::span<const double> w(path.states.data() + begin, end - begin);
  out.variance = ews::window_variance(w);
  out.autocorr = ews::window_autocorrelation(w, lag_n);
  return out;
}

std::vector<Figure2Row> run_figure2(const config::ExperimentConfig& cfg) {
  require_valid(cfg);
  const fs::path dir = prepare_dir(cfg);
  std::vector<Figure2Row> rows;

  for (std::size_t bi = 0; bi < cfg.beta_count; ++bi) {
    const double beta = cfg.beta_min + (cfg.beta_max - cfg.beta_min) * static_cast<double>(bi) /
                                           static_cast<double>(cfg.beta_count - 1);
    auto c = cfg;
    c.model.beta = ParamSchedule::constant(beta);
    c.x0.reset();
    c.basin_lower = config::BoundarySpec::unstable();
    c.stop_on_exit = true;
    const auto model = c.build_model();
    const auto sim = c.sim_config(model);
    const std::uint64_t seed = split_seed(cfg.master_seed, bi);

    std::vector<std::optional<double>> exit_t(cfg.n_paths);
    std::vector<PreExitStats> stats(cfg.n_paths);
    parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
      const auto path = simulate_path(model, sim, split_seed(seed, i));
      if (path.exit) exit_t[i] = path.exit->time;
      stats[i] = pre_exit_stats(path, cfg.pre_exit_window, cfg.lag);
    });

    Figure2Row row;
    row.beta = beta;
    row.n_paths = cfg.n_paths;
    std::vector<double> et, var, ac;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
      if (exit_t[i]) et.push_back(*exit_t[i]);
      if (stats[i].variance) var.push_back(*stats[i].variance);
      if (stats[i].autocorr) ac.push_back(*stats[i].autocorr);
    }
    row.n_exited = et.size();
    row.exit_time = summarize(et);
    row.pre_exit_variance = summarize(var);
    row.pre_exit_autocorr = summarize(ac);
    rows.push_back(row);
  }

  csv::Writer w(dir / "figure2.csv", {"beta", "exit_mean", "exit_p5", "exit_p95", "var_mean",
                                      "var_p5", "var_p95", "ac_mean", "ac_p5", "ac_p95"});
  auto cells = [](const std::optional<Summary>& s) -> std::vector<csv::Cell> {
    if (!s) return {std::optional<double>{}, std::optional<double>{}, std::optional<double>{}};
    return {s->mean, s->p5, s->p95};
  };
  for (const auto& r : rows) {
    std::vector<csv::Cell> line{r.beta};
    for (const auto* s : {&r.exit_time, &r.pre_exit_variance, &r.pre_exit_autocorr}) {
      auto c = cells(*s);
      line.insert(line.end(), c.begin(), c.end());
    }
    w.row(line);
  }

  if (cfg.emit_svg) {
    auto chart = [&](const char* name, auto member) {
      std::vector<double> x;
      svg::Line mean{"mean", {}, {}, "#d62728"};
      svg::Line p5{"p5", {}, {}, "#888", true};
      svg::Line p95{"p95", {}, {}, "#888", true};
      for (const auto& r : rows) {
        const auto& s = r.*member;
        mean.x.push_back(r.beta);
        p5.x.push_back(r.beta);
        p95.x.push_back(r.beta);
        mean.y.push_back(s ? std::optional(s->mean) : std::nullopt);
        p5.y.push_back(s ? std::optional(s->p5) : std::nullopt);
        p95.y.push_back(s ? std::optional(s->p95) : std::nullopt);
      }
      svg::write(dir / (std::string("figure2_") + name + ".svg"),
                 svg::line_chart(name, {mean, p5, p95}, true));
    };
    chart("exit_time", &Figure2Row::exit_time);
    chart("variance", &Figure2Row::pre_exit_variance);
    chart("autocorrelation", &Figure2Row::pre_exit_autocorr);
  }
  return rows;
}

//---------------------------------------------------------------------------//

TimechangeOutcome run_verify_timechange(const config::ExperimentConfig& cfg) {
  require_valid(cfg);
  const fs::path dir = prepare_dir(cfg);
  const auto model = cfg.build_model();
  const auto basin = BasinSpec::interval(cfg.tc_lower, cfg.tc_upper);
  timechange::TimeChangeOptions opts;
  opts.dt = cfg.tc_dt;
  opts.dt_record = cfg.tc_dt_record;
  opts.ensemble.workers = cfg.workers;

  TimechangeOutcome out;
  out.all_pass = true;
  std::optional<std::string> inconclusive;
  csv::Writer w(dir / "timechange.csv", {"k", "ks_distance", "threshold", "pass"});
  for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
    const double k = cfg.ks[i];
    try {
      auto rep = timechange::verify_time_change(model, basin, cfg.tc_x0, k, cfg.n_paths,
                                                cfg.tc_horizon / (k * k),
                                                split_seed(cfg.master_seed, i), opts);
      w.row({k, rep.ks_distance, rep.threshold, rep.pass ? 1 : 0});
      out.all_pass = out.all_pass && rep.pass;
      out.reports.push_back(std::move(rep));
    } catch (const timechange::InconclusiveError& e) {
      w.row({k, std::optional<double>{}, timechange::ks_threshold(cfg.n_paths), 0});
      out.all_pass = false;
      if (!inconclusive) inconclusive = e.what();
    }
  }
  if (inconclusive) throw timechange::InconclusiveError(*inconclusive);
  return out;
}

//---------------------------------------------------------------------------//

EnsembleResult run_simulate(const config::ExperimentConfig& cfg) {
  require_valid(cfg);
  const fs::path dir = prepare_dir(cfg);
  const auto model = cfg.build_model();
  const auto sim = cfg.sim_config(model);
  auto ens = run_ensemble(model, sim, cfg.n_paths, cfg.master_seed, {cfg.workers});

  write_paths_csv(dir / "paths.csv", ens.paths, ens.paths.size());
  csv::Writer w(dir / "stats.csv", {"path_id", "t", "rolling_variance", "lag_autocorr"});
  for (std::size_t id = 0; id < ens.paths.size(); ++id) {
    const auto& p = ens.paths[id];
    const auto var = ews::rolling_variance(p, cfg.window);
    const auto ac = ews::rolling_autocorrelation(p, cfg.window, cfg.lag);
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      w.row({id, p.time_at(i), var.values[i], ac.values[i]});
    }
  }
  if (cfg.emit_svg) {
    std::vector<svg::Line> lines;
    for (std::size_t id = 0; id < std::min<std::size_t>(ens.paths.size(), 5); ++id) {
      const auto& p = ens.paths[id];
      svg::Line l{"path " + std::to_string(id), {}, {}};
      for (std::size_t i = 0; i < p.states.size(); ++i) {
        l.x.push_back(p.time_at(i));
        l.y.emplace_back(p.states[i]);
      }
      lines.push_back(std::move(l));
    }
    svg::write(dir / "paths.svg", svg::line_chart("sample paths", lines));
  }
  return ens;
}

}  // namespace rattlesim::experiments
