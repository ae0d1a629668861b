#include "rattlesim/ews.hpp"

#include <algorithm>
#include <cmath>

#include "rattlesim/engine.hpp"
#include "rattlesim/format.hpp"

namespace rattlesim::ews {

namespace {

std::size_t samples_in(double span, double dt_record, const char* what) {
  const double ratio = span / dt_record;
  const double rounded = std::round(ratio);
  if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-6 * ratio) {
    throw InvalidArgument(std::string(what) + " (" + format_number(span) +
                          ") must be a positive multiple of dt_record (" +
                          format_number(dt_record) + ")");
  }
  return static_cast<std::size_t>(rounded);
}

RollingStatSeries empty_series(std::size_t n, double t0, double dt_record, double window,
                               double lag) {
  RollingStatSeries s;
  s.window = window;
  s.lag = lag;
  s.times.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.times[i] = t0 + static_cast<double>(i) * dt_record;
  s.values.assign(n, std::nullopt);
  s.n_contributing.assign(n, 0);
  return s;
}

// run[i] = length of the run of identical values ending at i.
std::vector<std::size_t> run_lengths(std::span<const double> x) {
  std::vector<std::size_t> run(x.size(), 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] == x[i - 1]) run[i] = run[i - 1] + 1;
  }
  return run;
}

}  // namespace

std::optional<double> window_variance(std::span<const double> w) {
  if (w.size() < 2) return std::nullopt;
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(w.size());
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(w.size() - 1);
}

std::optional<double> window_autocorrelation(std::span<const double> w, std::size_t lag) {
  if (lag == 0 || w.size() < lag + 2) return std::nullopt;
  const std::size_t m = w.size() - lag;
  const auto lead = w.first(m);
  const auto lagged = w.subspan(lag, m);
  if (std::all_of(lead.begin(), lead.end(), [&](double v) { return v == lead[0]; }) ||
      std::all_of(lagged.begin(), lagged.end(), [&](double v) { return v == lagged[0]; })) {
    return std::nullopt;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lead[i];
    my += lagged[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = lead[i] - mx;
    const double dy = lagged[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

//---------------------------------------------------------------------------//
// Streaming rolling statistics
//
// Sums are kept relative to a reference value taken from the window itself
// and rebuilt from scratch once per window turnover, which bounds the
// accumulated rounding to one window's worth of updates.
//---------------------------------------------------------------------------//

RollingStatSeries rolling_variance(std::span<const double> x, double t0, double dt_record,
                                   double window) {
  if (!(window >= 2.0 * dt_record * (1.0 - 1e-9))) {
    throw InvalidArgument("rolling window must span at least two recorded samples");
  }
  const std::size_t n_win = samples_in(window, dt_record, "window");
  auto out = empty_series(x.size(), t0, dt_record, window, 0.0);
  if (x.size() < n_win) return out;

  const auto run = run_lengths(x);
  const double inv_n = 1.0 / static_cast<double>(n_win);
  double ref = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t e = n_win - 1; e < x.size(); ++e) {
    const std::size_t first = e + 1 - n_win;
    if ((e - (n_win - 1)) % n_win == 0) {
      ref = x[first];
      s1 = s2 = 0.0;
      for (std::size_t i = first; i <= e; ++i) {
        const double d = x[i] - ref;
        s1 += d;
        s2 += d * d;
      }
    } else {
      const double add = x[e] - ref;
      const double drop = x[first - 1] - ref;
      s1 += add - drop;
      s2 += add * add - drop * drop;
    }
    double var = 0.0;
    if (run[e] < n_win) {
      var = std::max(0.0, (s2 - s1 * s1 * inv_n) / static_cast<double>(n_win - 1));
    }
    out.values[e] = var;
    out.n_contributing[e] = 1;
  }
  return out;
}

RollingStatSeries rolling_variance(const SamplePath& path, double window) {
  return rolling_variance(path.states, path.t0, path.dt_record, window);
}

RollingStatSeries rolling_autocorrelation(std::span<const double> x, double t0, double dt_record,
                                          double window, double lag) {
  const std::size_t lag_n = samples_in(lag, dt_record, "lag");
  const std::size_t n_win = samples_in(window, dt_record, "window");
  if (n_win < 2 * lag_n) throw InvalidArgument("window must be at least twice the lag");
  auto out = empty_series(x.size(), t0, dt_record, window, lag);
  const std::size_t m = n_win - lag_n;  // pairs per window
  if (x.size() < n_win || m < 2) return out;

  const auto run = run_lengths(x);
  const double inv_m = 1.0 / static_cast<double>(m);
  double ref = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t e = n_win - 1; e < x.size(); ++e) {
    const std::size_t first = e + 1 - n_win;
    // Pairs (x[i], x[i + lag]) for i in [first, first + m).
    if ((e - (n_win - 1)) % n_win == 0) {
      ref = x[first];
      sx = sy = sxx = syy = sxy = 0.0;
      for (std::size_t i = first; i < first + m; ++i) {
        const double a = x[i] - ref;
        const double b = x[i + lag_n] - ref;
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
      }
    } else {
      const double a_in = x[e - lag_n] - ref;
      const double b_in = x[e] - ref;
      const double a_out = x[first - 1] - ref;
      const double b_out = x[first - 1 + lag_n] - ref;
      sx += a_in - a_out;
      sy += b_in - b_out;
      sxx += a_in * a_in - a_out * a_out;
      syy += b_in * b_in - b_out * b_out;
      sxy += a_in * b_in - a_out * b_out;
    }
    const bool lead_constant = run[e - lag_n] >= m;
    const bool lagged_constant = run[e] >= m;
    if (lead_constant || lagged_constant) continue;
    const double cxx = sxx - sx * sx * inv_m;
    const double cyy = syy - sy * sy * inv_m;
    const double cxy = sxy - sx * sy * inv_m;
    if (!(cxx > 0.0) || !(cyy > 0.0)) continue;
    out.values[e] = std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0);
    out.n_contributing[e] = 1;
  }
  return out;
}

RollingStatSeries rolling_autocorrelation(const SamplePath& path, double window, double lag) {
  return rolling_autocorrelation(path.states, path.t0, path.dt_record, window, lag);
}

//---------------------------------------------------------------------------//

std::vector<std::size_t> survivor_counts(const EnsembleResult& ens) {
  const std::size_t n = ens.record_count();
  std::vector<std::size_t> exits_at(n + 1, 0);
  for (const auto& p : ens.paths) {
    if (p.exit) ++exits_at[std::min(p.exit->index, n)];
  }
  std::vector<std::size_t> alive(n, 0);
  std::size_t remaining = ens.paths.size();
  for (std::size_t i = 0; i < n; ++i) {
    remaining -= exits_at[i];
    alive[i] = remaining;
  }
  return alive;
}

RollingStatSeries survivor_mean_series(const EnsembleResult& ens, Statistic stat, double window,
                                       double lag) {
  if (ens.paths.empty()) throw InvalidArgument("survivor_mean_series: empty ensemble");
  const std::size_t n = ens.record_count();
  auto out = empty_series(n, ens.t0, ens.dt_record,
                          window, stat == Statistic::Autocorrelation ? lag : 0.0);
  std::vector<double> sums(n, 0.0);

  constexpr std::size_t kBatch = 64;
  std::vector<RollingStatSeries> batch;
  for (std::size_t start = 0; start < ens.paths.size(); start += kBatch) {
    const std::size_t count = std::min(kBatch, ens.paths.size() - start);
    batch.assign(count, {});
    parallel_for(count, 0, [&](std::size_t j) {
      const auto& p = ens.paths[start + j];
      batch[j] = stat == Statistic::Variance ? rolling_variance(p, window)
                                             : rolling_autocorrelation(p, window, lag);
    });
    // Fixed path order keeps the reduction bit-reproducible.
    for (std::size_t j = 0; j < count; ++j) {
      const auto& p = ens.paths[start + j];
      const std::size_t alive_until = p.exit ? p.exit->index : n;  // exclusive
      const std::size_t upto = std::min({alive_until, batch[j].size(), n});
      for (std::size_t i = 0; i < upto; ++i) {
        if (const auto& v = batch[j].values[i]) {
          sums[i] += *v;
          ++out.n_contributing[i];
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.n_contributing[i] > 0) {
      out.values[i] = sums[i] / static_cast<double>(out.n_contributing[i]);
    }
  }
  return out;
}

//---------------------------------------------------------------------------//

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("kendall_tau_b: size mismatch");
  const std::size_t n = x.size();
  long long concordant_minus_discordant = 0;
  long long pairs_x = 0, pairs_y = 0;  // pairs not tied in x / in y
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[j] - x[i];
      const double dy = y[j] - y[i];
      const int sx = (dx > 0) - (dx < 0);
      const int sy = (dy > 0) - (dy < 0);
      concordant_minus_discordant += sx * sy;
      pairs_x += sx != 0;
      pairs_y += sy != 0;
    }
  }
  if (pairs_x == 0 || pairs_y == 0) return 0.0;
  return static_cast<double>(concordant_minus_discordant) /
         std::sqrt(static_cast<double>(pairs_x) * static_cast<double>(pairs_y));
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("ols_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("ols_slope: x has zero spread");
  return sxy / sxx;
}

TrendLabel classify_trend(const RollingStatSeries& series, double t_start, double t_end,
                          double threshold) {
  std::vector<double> ts, vs;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times[i];
    if (t >= t_start && t <= t_end && series.values[i]) {
      ts.push_back(t);
      vs.push_back(*series.values[i]);
    }
  }
  if (ts.size() < 10) {
    throw InsufficientData("classify_trend: " + std::to_string(ts.size()) +
                           " non-missing values in range, need 10");
  }
  TrendLabel out;
  out.kendall_tau = kendall_tau_b(ts, vs);
  const double n = static_cast<double>(ts.size());
  const double sd = std::sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)));
  out.p_value_proxy = std::erfc(std::abs(out.kendall_tau) / sd / std::sqrt(2.0));
  if (out.kendall_tau >= threshold) {
    out.label = Trend::Rising;
  } else if (out.kendall_tau <= -threshold) {
    out.label = Trend::Falling;
  }
  return out;
}

}  // namespace rattlesim::ews
