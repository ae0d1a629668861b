// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance            run every criterion
//   acceptance 3 7        run only criteria 3 and 7

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rattlesim/config.hpp"
#include "rattlesim/csv.hpp"
#include "rattlesim/engine.hpp"
#include "rattlesim/ews.hpp"
#include "rattlesim/experiments.hpp"
#include "rattlesim/format.hpp"
#include "rattlesim/models.hpp"
#include "rattlesim/rng.hpp"
#include "rattlesim/timechange.hpp"

namespace fs = std::filesystem;
using namespace rattlesim;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rattlesim_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::optional<double> value_at(const RollingStatSeries& s, double t) {
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (std::abs(s.times[i] - t) < 1e-9) return s.values[i];
  }
  return std::nullopt;
}

// Plain two-pass sample statistics, independent of the library.
double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

//---------------------------------------------------------------------------//
// 1. Figure 1 at desk scale.

Outcome figure1() {
  Outcome o;
  auto cfg = config::defaults_for(config::Experiment::Figure1);
  cfg.output_dir = scratch("figure1");
  const auto res = experiments::run_figure1(cfg);

  const auto& et = res.exit_times;
  o.check(et.n_exited() == et.n_total() && !et.sorted_exit_times().empty() &&
              et.sorted_exit_times().back() < 1500.0,
          "(a) exited " + std::to_string(et.n_exited()) + "/" + std::to_string(et.n_total()));
  const double max_exit = et.sorted_exit_times().empty() ? 0.0 : et.sorted_exit_times().back();
  o.check(max_exit >= 400.0 && max_exit <= 1300.0, "(b) max collapse " + num(max_exit));

  const auto v100 = value_at(res.mean_variance, 100.0);
  const auto v600 = value_at(res.mean_variance, 600.0);
  const auto a100 = value_at(res.mean_autocorrelation, 100.0);
  const auto a600 = value_at(res.mean_autocorrelation, 600.0);
  const bool have = v100 && v600 && a100 && a600;
  o.check(have && *v600 < 0.5 * *v100,
          "(c) variance ratio " + (have ? num(*v600 / *v100) : std::string("missing")));
  o.check(have && *a600 < 0.5 * *a100,
          "(c) lag-1 autocorrelation ratio " + (have ? num(*a600 / *a100) : std::string("missing")));
  return o;
}

//---------------------------------------------------------------------------//
// 2. Figure 2 at desk scale.

Outcome figure2() {
  Outcome o;
  auto cfg = config::defaults_for(config::Experiment::Figure2);
  cfg.n_paths = 500;
  cfg.output_dir = scratch("figure2");
  const auto rows = experiments::run_figure2(cfg);

  bool complete = rows.size() == 10;
  for (const auto& r : rows) {
    complete = complete && r.exit_time && r.pre_exit_variance && r.pre_exit_autocorr;
  }
  o.check(complete, "10 beta rows with statistics");
  if (!complete) return o;

  std::size_t exit_up = 0, var_up = 0, ac_up = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    exit_up += rows[i].exit_time->mean > rows[i - 1].exit_time->mean;
    var_up += rows[i].pre_exit_variance->mean >= rows[i - 1].pre_exit_variance->mean;
    ac_up += rows[i].pre_exit_autocorr->mean >= rows[i - 1].pre_exit_autocorr->mean;
  }
  o.check(exit_up == 9, "exit mean increasing steps " + std::to_string(exit_up) + "/9");
  o.check(var_up >= 8, "variance nondecreasing steps " + std::to_string(var_up) + "/9");
  o.check(ac_up >= 8, "autocorrelation nondecreasing steps " + std::to_string(ac_up) + "/9");
  std::size_t exited = 0;
  for (const auto& r : rows) exited += r.n_exited;
  o.detail << "exited " << exited << "/" << 10 * cfg.n_paths << "; ";
  return o;
}

//---------------------------------------------------------------------------//
// 3. OU variance and lag-1 covariance against the closed forms, plus a
// dt-halving check with common random numbers: the coarse step uses
// (z1 + z2)/sqrt(2) from the same two normals the fine path consumes.

struct OuSample {
  std::vector<double> xt, xs;  // X_t and X_{t+1}
};

OuSample ou_sample(double b, double t, double dt, std::size_t n, std::uint64_t master,
                   bool coarse) {
  const auto model = PotentialModel::ou(b, 1.0);
  const double fine_dt = dt / 2.0;
  const auto steps_t = static_cast<std::size_t>(std::llround(t / dt));
  const auto steps_s = static_cast<std::size_t>(std::llround((t + 1.0) / dt));
  OuSample out{std::vector<double>(n), std::vector<double>(n)};
  parallel_for(n, 0, [&](std::size_t i) {
    NormalStream z(split_seed(master, i));
    double x = 0.0;
    double time = 0.0;
    for (std::size_t k = 1; k <= steps_s; ++k) {
      if (coarse) {
        const double z1 = z(), z2 = z();
        x = em_step(x, time, model, dt, (z1 + z2) / std::sqrt(2.0));
      } else {
        x = em_step(x, time, model, fine_dt, z());
        x = em_step(x, time + fine_dt, model, fine_dt, z());
      }
      time += dt;
      if (k == steps_t) out.xt[i] = x;
    }
    out.xs[i] = x;
  });
  return out;
}

struct Moments {
  double var, var_se, cov, cov_se;
};

Moments moments(const OuSample& s) {
  const std::size_t n = s.xt.size();
  const double mt = mean_of(s.xt), ms = mean_of(s.xs);
  std::vector<double> sq(n), cr(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq[i] = (s.xt[i] - mt) * (s.xt[i] - mt);
    cr[i] = (s.xt[i] - mt) * (s.xs[i] - ms);
  }
  const double dn = static_cast<double>(n);
  return {var_of(s.xt), std::sqrt(var_of(sq) / dn), mean_of(cr) * dn / (dn - 1.0),
          std::sqrt(var_of(cr) / dn)};
}

Outcome ou_analytics() {
  Outcome o;
  const std::size_t n = 10000;
  double worst_z = 0.0, worst_halving = 0.0;
  std::uint64_t seed = 1;
  for (double b : {0.5, 1.0, 2.0}) {
    for (double t : {0.5, 1.0, 5.0}) {
      // The coarse run at dt = 0.01 is the reference estimate.
      const auto coarse = moments(ou_sample(b, t, 0.01, n, seed, true));
      const auto fine = moments(ou_sample(b, t, 0.01, n, seed, false));
      ++seed;
      const double zv = std::abs(coarse.var - models::ou_variance(1.0, b, t)) / coarse.var_se;
      const double zc =
          std::abs(coarse.cov - models::ou_covariance(1.0, b, t, 1.0)) / coarse.cov_se;
      const double hv = std::abs(fine.var - coarse.var) / coarse.var_se;
      const double hc = std::abs(fine.cov - coarse.cov) / coarse.cov_se;
      worst_z = std::max({worst_z, zv, zc});
      worst_halving = std::max({worst_halving, hv, hc});
      if (zv >= 3.0 || zc >= 3.0 || hv >= 1.0 || hc >= 1.0) {
        o.detail << "b=" << b << " t=" << t << " zvar=" << num(zv) << " zcov=" << num(zc)
                 << " halving=" << num(std::max(hv, hc)) << "; ";
      }
    }
  }
  o.check(worst_z < 3.0, "max |MC - analytic| = " + num(worst_z) + " SE");
  o.check(worst_halving < 1.0, "max dt-halving change = " + num(worst_halving) + " SE");
  return o;
}

//---------------------------------------------------------------------------//
// 4. Critical slowing down under alpha(t) = t^-2.

constexpr double kCsdWindow = 1.0;

Outcome csd() {
  Outcome o;
  const double a = 0.1;
  const auto model = PotentialModel::cubic(ParamSchedule::power_law(1.0, -2.0),
                                           ParamSchedule::constant(1.0), a);
  SimConfig sim;
  sim.t0 = 1.0;
  sim.horizon = 9.0;
  sim.dt = 0.001;
  sim.dt_record = 0.01;
  sim.x0 = UpperStableEquilibrium{};
  sim.stop_on_exit = true;
  sim.basin = basin_above_unstable(model);
  const std::size_t n = 2000;
  const auto ens = run_ensemble(model, sim, n, 4242);
  const auto series = ews::survivor_mean_series(ens, ews::Statistic::Variance, kCsdWindow);
  const auto alive = ews::survivor_counts(ens);

  // Pre-bifurcation span: first full window until fewer than half the paths
  // survive.
  const double t_start = sim.t0 + kCsdWindow;
  double t_end = t_start;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    if (2 * alive[i] < n) break;
    t_end = series.times[i];
  }
  std::vector<double> ts, vs;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] >= t_start && series.times[i] <= t_end && series.values[i]) {
      ts.push_back(series.times[i]);
      vs.push_back(*series.values[i]);
    }
  }
  o.detail << "span [" << num(t_start) << ", " << num(t_end) << "]; ";
  if (ts.size() < 10) {
    o.check(false, "too few points in span");
    return o;
  }
  const auto trend = ews::classify_trend(series, t_start, t_end);
  const double slope = ews::ols_slope(ts, vs);
  const double m = models::csd_variance_slope(a, 1.0);
  o.check(trend.kendall_tau >= 0.3, "Kendall tau " + num(trend.kendall_tau));
  o.check(slope > 0.0 && slope >= m / 3.0 && slope <= 3.0 * m,
          "slope " + num(slope) + " vs m " + num(m));
  return o;
}

//---------------------------------------------------------------------------//
// 5. Critical speeding up under beta(t) = t.

Outcome csu() {
  Outcome o;
  const double a = 0.1, window = 0.5;
  const auto model = PotentialModel::cubic(ParamSchedule::constant(1.0 / 3.0),
                                           ParamSchedule::linear(0.0, 1.0), a);
  SimConfig sim;
  sim.t0 = 1.0;
  sim.horizon = 9.0;
  sim.dt = 0.0005;
  sim.dt_record = 0.01;
  sim.x0 = UpperStableEquilibrium{};
  sim.stop_on_exit = true;
  sim.basin = basin_above_unstable(model);
  const auto ens = run_ensemble(model, sim, 500, 5150);
  const auto series = ews::survivor_mean_series(ens, ews::Statistic::Variance, window);

  std::vector<double> lt, lv;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.values[i] && *series.values[i] > 0.0) {
      lt.push_back(std::log(series.times[i]));
      lv.push_back(std::log(*series.values[i]));
    }
  }
  const double slope = ews::ols_slope(lt, lv);
  o.check(std::abs(slope + 2.0) <= 0.3, "log-log slope " + num(slope));
  o.check(exit_time_distribution(ens).n_exited() == 0, "no exits");
  return o;
}

//---------------------------------------------------------------------------//
// 6. Time-change rescaling on the cubic model.

Outcome time_change() {
  Outcome o;
  const auto model = PotentialModel::cubic(ParamSchedule::constant(3.0),
                                           ParamSchedule::constant(1.0), 1.5);
  const auto basin = BasinSpec::interval(-1.0, kInf);
  for (double k : {0.5, 1.0, 2.0, 4.0}) {
    const auto r = timechange::verify_time_change(model, basin, 1.0, k, 2000, 200.0 / (k * k),
                                                  static_cast<std::uint64_t>(k * 1000));
    std::string what = "k=" + num(k) + " D=" + num(r.ks_distance) + "<" + num(r.threshold);
    o.check(r.pass, what);
    if (r.median_narrowed && r.median_original) {
      const double ratio = *r.median_narrowed / (*r.median_original / (k * k));
      o.check(std::abs(ratio - 1.0) <= 0.25, "k=" + num(k) + " median ratio " + num(ratio));
    } else {
      o.check(false, "k=" + num(k) + " median censored");
    }
  }
  return o;
}

//---------------------------------------------------------------------------//
// 7. Mean exit time of driftless Brownian motion from (-1, 1).

Outcome first_passage() {
  Outcome o;
  const auto model = PotentialModel::table({-1.0, 1.0}, {0.0, 0.0}, 1.0);
  SimConfig sim;
  sim.horizon = 20.0;
  sim.dt = 1e-4;
  sim.dt_record = 1e-4;
  sim.x0 = 0.0;
  sim.stop_on_exit = true;
  sim.basin = BasinSpec::interval(-1.0, 1.0);
  const auto exits = run_exit_ensemble(model, sim, 10000, 777);
  std::vector<double> t;
  for (const auto& e : exits) {
    if (e) t.push_back(e->time);
  }
  const double m = t.empty() ? 0.0 : mean_of(t);
  o.check(t.size() == exits.size(), "exited " + std::to_string(t.size()));
  o.check(std::abs(m - 1.0) <= 0.05, "mean exit " + num(m));
  return o;
}

//---------------------------------------------------------------------------//
// 8. Property suites.

std::map<std::string, std::string> slurp_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    out[entry.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

std::vector<double> wiggly_series(std::size_t n, std::uint64_t seed) {
  NormalStream z(seed);
  std::vector<double> x(n);
  double v = 0.3;
  for (auto& e : x) {
    v = 0.8 * v + 0.5 * z();
    e = v + 0.01 * static_cast<double>(&e - x.data());
  }
  return x;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

Outcome properties() {
  Outcome o;

  // Determinism: the same experiment with 1 and 3 workers writes identical
  // bytes.
  {
    auto cfg = config::defaults_for(config::Experiment::Figure1);
    cfg.n_paths = 24;
    cfg.horizon = 300.0;
    cfg.emit_svg = true;
    cfg.workers = 1;
    cfg.output_dir = scratch("w1");
    experiments::run_figure1(cfg);
    const auto one = slurp_dir(cfg.output_dir);
    cfg.workers = 3;
    cfg.output_dir = scratch("w3");
    experiments::run_figure1(cfg);
    const auto three = slurp_dir(cfg.output_dir);
    o.check(!one.empty() && one == three,
            "determinism across workers (" + std::to_string(one.size()) + " files)");
  }

  // Rolling statistics: shift/scale invariance and streaming vs naive.
  {
    const auto x = wiggly_series(3000, 99);
    const double window = 25.0, dtr = 0.5;
    const auto nwin = static_cast<std::size_t>(window / dtr);
    const auto rv = ews::rolling_variance(x, 0.0, dtr, window);
    const auto ra = ews::rolling_autocorrelation(x, 0.0, dtr, window, 1.0);

    std::vector<double> shifted(x), scaled(x);
    for (auto& v : shifted) v += 1e3;
    for (auto& v : scaled) v *= -7.5;
    const auto rv_s = ews::rolling_variance(shifted, 0.0, dtr, window);
    const auto rv_k = ews::rolling_variance(scaled, 0.0, dtr, window);
    const auto ra_s = ews::rolling_autocorrelation(shifted, 0.0, dtr, window, 1.0);
    const auto ra_k = ews::rolling_autocorrelation(scaled, 0.0, dtr, window, 1.0);
    bool inv = true;
    double worst_stream = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool full = i + 1 >= nwin;
      if (rv.values[i].has_value() != full || ra.values[i].has_value() != full) inv = false;
      if (!full) continue;
      inv = inv && close(*rv_s.values[i], *rv.values[i], 1e-9) &&
            close(*rv_k.values[i], 56.25 * *rv.values[i], 1e-10) &&
            close(*ra_s.values[i], *ra.values[i], 1e-9) &&
            close(*ra_k.values[i], *ra.values[i], 1e-10);

      // Naive oracle: two-pass sample variance and Pearson correlation of
      // the lag-2 pairs inside the window.
      std::vector<double> w(x.begin() + static_cast<long>(i + 1 - nwin),
                            x.begin() + static_cast<long>(i + 1));
      const double nv = var_of(w);
      std::vector<double> p(w.begin(), w.end() - 2), q(w.begin() + 2, w.end());
      const double mp = mean_of(p), mq = mean_of(q);
      double sxy = 0, sxx = 0, syy = 0;
      for (std::size_t j = 0; j < p.size(); ++j) {
        sxy += (p[j] - mp) * (q[j] - mq);
        sxx += (p[j] - mp) * (p[j] - mp);
        syy += (q[j] - mq) * (q[j] - mq);
      }
      const double na = sxy / std::sqrt(sxx * syy);
      worst_stream = std::max({worst_stream, std::abs(*rv.values[i] - nv) / std::max(1.0, nv),
                               std::abs(*ra.values[i] - na)});
    }
    o.check(inv, "shift/scale invariance");
    o.check(worst_stream <= 1e-10, "streaming vs naive max diff " + num(worst_stream));
  }

  // CSV round trip: every number written re-parses to the same double.
  {
    auto cfg = config::defaults_for(config::Experiment::Figure1);
    cfg.n_paths = 8;
    cfg.horizon = 200.0;
    cfg.output_dir = scratch("csv");
    const auto res = experiments::run_figure1(cfg);
    const auto stats = csv::read(cfg.output_dir / "survivor_stats.csv");
    const auto paths = csv::read(cfg.output_dir / "paths.csv");
    bool exact = stats.rows.size() == res.mean_variance.times.size();
    const auto cv = stats.column("mean_rolling_variance");
    const auto ca = stats.column("mean_lag1_autocorr");
    const auto ct = stats.column("t");
    for (std::size_t i = 0; exact && i < stats.rows.size(); ++i) {
      exact = stats.number(i, ct) == res.mean_variance.times[i] &&
              stats.number(i, cv) == res.mean_variance.values[i] &&
              stats.number(i, ca) == res.mean_autocorrelation.values[i];
    }
    const auto cx = paths.column("x");
    const auto cid = paths.column("path_id");
    std::size_t row = 0;
    for (std::size_t p = 0; exact && p < 5; ++p) {
      for (double v : res.ensemble.paths[p].states) {
        exact = exact && paths.number(row, cid) == static_cast<double>(p) &&
                paths.number(row, cx) == v;
        ++row;
      }
    }
    NormalStream z(31337);
    for (int i = 0; exact && i < 100000; ++i) {
      const double v = std::ldexp(z(), static_cast<int>(z() * 200.0));
      exact = parse_number(format_number(v)) == v;
    }
    o.check(exact, "CSV round trip exact");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "figure 1 reproduction", figure1},
      {2, "figure 2 reproduction", figure2},
      {3, "OU variance and covariance", ou_analytics},
      {4, "critical slowing down trend", csd},
      {5, "critical speeding up decay", csu},
      {6, "time-change rescaling", time_change},
      {7, "Brownian first passage", first_passage},
      {8, "property suites", properties},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << o.detail.str()
              << "(" << num(secs) << " s)" << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
