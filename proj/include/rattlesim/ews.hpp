#pragma once

// Early-warning statistics over recorded sample paths.
//
// A window of length W covers the N = round(W / dt_record) most recent
// samples, i.e. times in (t - W, t]. Values are reported at every recorded
// time where a full window is available and are missing (nullopt) elsewhere
// or where the window has zero variance. No detrending is applied beyond
// subtracting window means.

#include <optional>
#include <span>

#include "rattlesim/core.hpp"

namespace rattlesim::ews {

enum class Statistic { Variance, Autocorrelation };

/// Unbiased (n - 1) variance; nullopt for fewer than two samples.
std::optional<double> window_variance(std::span<const double> w);

/// Pearson correlation of (w[i], w[i + lag]) over the window; nullopt when
/// either marginal has zero variance or fewer than two pairs exist.
std::optional<double> window_autocorrelation(std::span<const double> w, std::size_t lag);

/// Throws InvalidArgument unless window >= 2 dt_record.
RollingStatSeries rolling_variance(std::span<const double> states, double t0, double dt_record,
                                   double window);
RollingStatSeries rolling_variance(const SamplePath& path, double window);

/// Throws InvalidArgument unless lag is a positive multiple of dt_record and
/// window >= 2 lag.
RollingStatSeries rolling_autocorrelation(std::span<const double> states, double t0,
                                          double dt_record, double window, double lag);
RollingStatSeries rolling_autocorrelation(const SamplePath& path, double window, double lag);

/// At each recorded time, the mean of the per-path statistic over paths that
/// have not exited by then. Missing per-path values are skipped.
RollingStatSeries survivor_mean_series(const EnsembleResult& ens, Statistic stat, double window,
                                       double lag = 1.0);

/// Paths with no exit at or before each recorded time.
std::vector<std::size_t> survivor_counts(const EnsembleResult& ens);

enum class Trend { Rising, Falling, None };

struct TrendLabel {
  Trend label = Trend::None;
  double kendall_tau = 0.0;
  /// Two-sided normal-approximation p-value of tau under independence.
  double p_value_proxy = 1.0;
};

inline constexpr double kDefaultTrendThreshold = 0.3;

/// Kendall tau-b between time and value over non-missing points with
/// t_start <= t <= t_end. Throws InsufficientData below 10 points.
TrendLabel classify_trend(const RollingStatSeries& series, double t_start, double t_end,
                          double threshold = kDefaultTrendThreshold);

double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rattlesim::ews
