#include "rattlesim/timechange.hpp"

#include <algorithm>
#include <cmath>

#include "rattlesim/format.hpp"
#include "rattlesim/rng.hpp"

namespace rattlesim::timechange {

double ks_threshold(std::size_t n) {
  constexpr double kC01 = 1.628;
  return kC01 * std::sqrt(2.0 / static_cast<double>(n));
}

namespace {

// KS distance between two step CDFs given by sorted jump locations and their
// totals, evaluated on every jump <= limit.
double ks_sup(const std::vector<double>& a, std::size_t na, const std::vector<double>& b,
              std::size_t nb, double limit, std::vector<double>* grid_out) {
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  for (double v : a) {
    if (v <= limit) grid.push_back(v);
  }
  for (double v : b) {
    if (v <= limit) grid.push_back(v);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double d = 0.0;
  for (double tau : grid) {
    const auto ca = std::upper_bound(a.begin(), a.end(), tau) - a.begin();
    const auto cb = std::upper_bound(b.begin(), b.end(), tau) - b.begin();
    const double fa = na ? static_cast<double>(ca) / static_cast<double>(na) : 0.0;
    const double fb = nb ? static_cast<double>(cb) / static_cast<double>(nb) : 0.0;
    d = std::max(d, std::abs(fa - fb));
  }
  if (grid_out) *grid_out = std::move(grid);
  return d;
}

}  // namespace

double ks_distance(const ExitTimeDistribution& a, const ExitTimeDistribution& b,
                   double b_time_scale, std::vector<double>* grid_out) {
  std::vector<double> bt = b.sorted_exit_times();
  for (double& v : bt) v /= b_time_scale;
  const double limit = std::min(a.horizon(), b.horizon() / b_time_scale);
  return ks_sup(a.sorted_exit_times(), a.n_total(), bt, b.n_total(), limit, grid_out);
}

PotentialModel narrow_model(const PotentialModel& model, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("narrow_model: k must be > 0");
  if (model.has_time_varying_params()) {
    throw InvalidArgument("narrow_model: time-varying parameters are not supported");
  }
  return model.narrowed(k);
}

RescaleReport verify_time_change(const PotentialModel& model, const BasinSpec& basin, double x0,
                                 double k, std::size_t n, double horizon,
                                 std::uint64_t master_seed, const TimeChangeOptions& opts) {
  if (!basin.is_static()) throw InvalidArgument("verify_time_change: basin must be static");
  if (!(x0 > basin.lower(0.0) && x0 < basin.upper(0.0))) {
    throw InvalidArgument("verify_time_change: x0 must lie inside the basin");
  }
  if (n == 0) throw InvalidArgument("verify_time_change: n must be > 0");
  const PotentialModel narrow = narrow_model(model, k);
  const double k2 = k * k;

  SimConfig cfg_a;
  cfg_a.horizon = horizon;
  cfg_a.dt = opts.dt / k2;
  cfg_a.dt_record = opts.dt_record / k2;
  cfg_a.x0 = x0 / k;
  cfg_a.stop_on_exit = true;
  cfg_a.basin = {basin.lower.contracted(k), basin.upper.contracted(k)};

  SimConfig cfg_b;
  cfg_b.horizon = horizon * k2;
  cfg_b.dt = opts.dt;
  cfg_b.dt_record = opts.dt_record;
  cfg_b.x0 = x0;
  cfg_b.stop_on_exit = true;
  cfg_b.basin = basin;

  const auto exits_a =
      run_exit_ensemble(narrow, cfg_a, n, split_seed(master_seed, 0), opts.ensemble);
  const auto exits_b =
      run_exit_ensemble(model, cfg_b, n, split_seed(master_seed, 1), opts.ensemble);

  // Both recorded grids coincide in A's time: sample i sits at i * dt_record / k^2.
  const std::size_t last_index = std::min(cfg_a.record_count(), cfg_b.record_count()) - 1;
  auto to_common_time = [&](const std::vector<std::optional<ExitRecord>>& exits) {
    std::vector<double> t;
    for (const auto& e : exits) {
      if (e) t.push_back(static_cast<double>(e->index) * cfg_a.dt_record);
    }
    std::sort(t.begin(), t.end());
    return t;
  };
  const auto ta = to_common_time(exits_a);
  const auto tb = to_common_time(exits_b);
  if (ta.empty() && tb.empty()) {
    throw InconclusiveError("no exits in either ensemble within horizon " +
                            format_number(horizon) + " (k=" + format_number(k) + ")");
  }

  RescaleReport rep;
  rep.k = k;
  rep.n_per_ensemble = n;
  rep.threshold = ks_threshold(n);
  rep.ks_distance = ks_sup(ta, n, tb, n, static_cast<double>(last_index) * cfg_a.dt_record,
                           &rep.tau_grid);
  rep.pass = rep.ks_distance < rep.threshold;
  rep.exited_narrowed = ta.size();
  rep.exited_original = tb.size();
  rep.median_narrowed = exit_time_distribution(exits_a, cfg_a.horizon).quantile(0.5);
  rep.median_original = exit_time_distribution(exits_b, cfg_b.horizon).quantile(0.5);
  return rep;
}

RescaleReport widen_is_slowdown(const PotentialModel& model, const BasinSpec& basin, double x0,
                                double k, std::size_t n, double horizon,
                                std::uint64_t master_seed, const TimeChangeOptions& opts) {
  if (!(k > 0.0 && k <= 1.0)) throw InvalidArgument("widen_is_slowdown: need 0 < k <= 1");
  return verify_time_change(model, basin, x0, k, n, horizon, master_seed, opts);
}

}  // namespace rattlesim::timechange
