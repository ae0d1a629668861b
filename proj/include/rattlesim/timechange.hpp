#pragma once

// Narrowing a frozen potential by k (V(x) -> V(kx), noise unchanged) gives
// exit-time statistics equal to the original process run k^2 times faster:
// P(T_hat(x/k) <= tau) = P(T(x) <= k^2 tau). The functions here build the
// narrowed model and check that identity by simulation.

#include <cstdint>
#include <vector>

#include "rattlesim/core.hpp"
#include "rattlesim/engine.hpp"

namespace rattlesim::timechange {

/// Two-sample Kolmogorov-Smirnov critical value at the 1% level,
/// c(0.01) sqrt(2 / n) with c(0.01) = 1.628.
double ks_threshold(std::size_t n);

/// sup |F(tau) - G(tau)| over tau in grid.
double ks_distance(const ExitTimeDistribution& a, const ExitTimeDistribution& b,
                   double b_time_scale, std::vector<double>* grid_out = nullptr);

/// Throws InvalidArgument for k <= 0 or time-varying parameters.
PotentialModel narrow_model(const PotentialModel& model, double k);

struct RescaleReport {
  double k = 1.0;
  double ks_distance = 0.0;
  double threshold = 0.0;
  std::size_t n_per_ensemble = 0;
  std::vector<double> tau_grid;
  bool pass = false;
  // Medians in each ensemble's own time (nullopt when censored).
  std::optional<double> median_narrowed;
  std::optional<double> median_original;
  std::size_t exited_narrowed = 0;
  std::size_t exited_original = 0;
};

class InconclusiveError : public Error {
 public:
  using Error::Error;
};

struct TimeChangeOptions {
  /// Step and recording interval of the original (unnarrowed) ensemble. The
  /// narrowed ensemble uses dt / k^2 and dt_record / k^2, so both ensembles
  /// take the same number of steps and their recorded grids coincide after
  /// rescaling time.
  double dt = 0.01;
  double dt_record = 0.01;
  EnsembleOptions ensemble;
};

/// Ensemble A: narrow_model(model, k) from x0/k in basin/k over `horizon`.
/// Ensemble B: model from x0 over horizon k^2. Compares A's CDF at tau with
/// B's at k^2 tau. Throws InconclusiveError when neither ensemble has exits.
RescaleReport verify_time_change(const PotentialModel& model, const BasinSpec& basin, double x0,
                                 double k, std::size_t n, double horizon,
                                 std::uint64_t master_seed, const TimeChangeOptions& opts = {});

/// verify_time_change restricted to 0 < k <= 1 (widening).
RescaleReport widen_is_slowdown(const PotentialModel& model, const BasinSpec& basin, double x0,
                                double k, std::size_t n, double horizon,
                                std::uint64_t master_seed, const TimeChangeOptions& opts = {});

}  // namespace rattlesim::timechange
