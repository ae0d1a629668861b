#pragma once

// Euler-Maruyama integration of dX = b(X, t) dt + a dB with exit detection on
// the recorded grid, and reproducible ensembles.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rattlesim/core.hpp"

namespace rattlesim {

/// Start at the model's upper stable equilibrium evaluated at t0.
struct UpperStableEquilibrium {};

using InitialState = std::variant<double, UpperStableEquilibrium>;

struct SimConfig {
  double t0 = 0.0;
  double horizon = 100.0;
  double dt = 0.01;
  double dt_record = 0.1;
  InitialState x0 = 0.0;
  bool stop_on_exit = false;
  BasinSpec basin;

  /// Integration steps per recorded sample; throws InvalidArgument if
  /// dt_record is not a positive integer multiple of dt or dt > horizon.
  std::size_t steps_per_record() const;
  std::size_t record_count() const;
  double initial_state(const PotentialModel& model) const;
  std::string describe() const;
};

/// x + b(x, t) dt + a sqrt(dt) z. Throws NumericalBlowup on a non-finite
/// result.
double em_step(double x, double t, const PotentialModel& model, double dt, double z);

/// First recorded index whose state lies on or outside the basin.
std::optional<ExitRecord> detect_exit(std::span<const double> states, double t0, double dt_record,
                                      const BasinSpec& basin);

SamplePath simulate_path(const PotentialModel& model, const SimConfig& cfg, std::uint64_t seed);

/// Integrates to the first exit (or horizon) without keeping the states.
/// Agrees exactly with simulate_path(...).exit for the same inputs.
std::optional<ExitRecord> simulate_exit(const PotentialModel& model, const SimConfig& cfg,
                                        std::uint64_t seed);

struct EnsembleOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// n paths, path i seeded with split_seed(master_seed, i). The result does not
/// depend on the number of workers.
EnsembleResult run_ensemble(const PotentialModel& model, const SimConfig& cfg, std::size_t n,
                            std::uint64_t master_seed, EnsembleOptions opts = {});

/// Exit records only, same seeding as run_ensemble; cheap in memory for long
/// horizons and large n.
std::vector<std::optional<ExitRecord>> run_exit_ensemble(const PotentialModel& model,
                                                         const SimConfig& cfg, std::size_t n,
                                                         std::uint64_t master_seed,
                                                         EnsembleOptions opts = {});

ExitTimeDistribution exit_time_distribution(const EnsembleResult& ens);
ExitTimeDistribution exit_time_distribution(std::span<const std::optional<ExitRecord>> exits,
                                            double horizon);

/// Runs body(i) for i in [0, n) on up to `workers` threads. The first
/// exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace rattlesim
