#pragma once

// The command-line experiments. Each writes its CSV artifacts into
// cfg.output_dir (created if needed) and returns the in-memory results.

#include <optional>
#include <vector>

#include "rattlesim/config.hpp"
#include "rattlesim/ews.hpp"
#include "rattlesim/timechange.hpp"

namespace rattlesim::experiments {

struct Summary {
  double mean = 0.0;
  double p5 = 0.0;
  double p95 = 0.0;
  std::size_t count = 0;
};

/// Mean and linearly interpolated 5th/95th percentiles; nullopt when empty.
std::optional<Summary> summarize(std::vector<double> values);

struct HistogramBin {
  double start = 0.0;
  double end = 0.0;
  std::size_t count = 0;
};

/// Bins [k w, (k+1) w) covering [0, horizon].
std::vector<HistogramBin> histogram(const std::vector<double>& values, double bin_width,
                                    double horizon);

struct Figure1Result {
  EnsembleResult ensemble;
  RollingStatSeries mean_variance;
  RollingStatSeries mean_autocorrelation;
  std::vector<std::size_t> n_surviving;
  ExitTimeDistribution exit_times;
  std::vector<HistogramBin> collapse_histogram;
};

Figure1Result run_figure1(const config::ExperimentConfig& cfg);

struct Figure2Row {
  double beta = 0.0;
  std::optional<Summary> exit_time;
  std::optional<Summary> pre_exit_variance;
  std::optional<Summary> pre_exit_autocorr;
  std::size_t n_paths = 0;
  std::size_t n_exited = 0;
};

/// Variance and lag autocorrelation over the samples in (T - window, T],
/// T being the exit time.
struct PreExitStats {
  std::optional<double> variance;
  std::optional<double> autocorr;
};
PreExitStats pre_exit_stats(const SamplePath& path, double window, double lag);

std::vector<Figure2Row> run_figure2(const config::ExperimentConfig& cfg);

struct TimechangeOutcome {
  std::vector<timechange::RescaleReport> reports;
  bool all_pass = false;
};

/// Throws timechange::InconclusiveError if any k is inconclusive.
TimechangeOutcome run_verify_timechange(const config::ExperimentConfig& cfg);

EnsembleResult run_simulate(const config::ExperimentConfig& cfg);

}  // namespace rattlesim::experiments
