#include "rattlesim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "rattlesim/format.hpp"
#include "rattlesim/rng.hpp"

namespace rattlesim {

std::size_t SimConfig::steps_per_record() const {
  if (!(dt > 0.0) || !(dt_record > 0.0) || !(horizon > 0.0)) {
    throw InvalidArgument("dt, dt_record and horizon must be > 0");
  }
  if (dt > dt_record || dt_record > horizon * (1.0 + 1e-12)) {
    throw InvalidArgument("need dt <= dt_record <= horizon");
  }
  const double ratio = dt_record / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw InvalidArgument("dt_record (" + format_number(dt_record) +
                          ") must be an integer multiple of dt (" + format_number(dt) + ")");
  }
  return static_cast<std::size_t>(rounded);
}

std::size_t SimConfig::record_count() const {
  return static_cast<std::size_t>(std::floor(horizon / dt_record + 1e-9)) + 1;
}

double SimConfig::initial_state(const PotentialModel& model) const {
  if (const auto* v = std::get_if<double>(&x0)) return *v;
  return model.upper_stable_equilibrium(t0);
}

std::string SimConfig::describe() const {
  std::string s = "t0=" + format_number(t0) + ";horizon=" + format_number(horizon) +
                  ";dt=" + format_number(dt) + ";dt_record=" + format_number(dt_record) + ";x0=";
  if (const auto* v = std::get_if<double>(&x0)) {
    s += format_number(*v);
  } else {
    s += "upper-stable-equilibrium";
  }
  s += ";stop_on_exit=";
  s += stop_on_exit ? "1" : "0";
  return s;
}

double em_step(double x, double t, const PotentialModel& model, double dt, double z) {
  const double next = x + model.drift(x, t) * dt + model.noise_amplitude() * std::sqrt(dt) * z;
  if (!std::isfinite(next)) throw NumericalBlowup(t + dt, next);
  return next;
}

namespace {

std::optional<ExitRecord> check_exit(double x, double t, std::size_t index,
                                     const BasinSpec& basin) {
  if (x <= basin.lower(t)) return ExitRecord{t, BoundarySide::Lower, x, index};
  if (x >= basin.upper(t)) return ExitRecord{t, BoundarySide::Upper, x, index};
  return std::nullopt;
}

// Shared integration loop. `on_record(i, x)` is called for every recorded
// sample and returns false to stop.
template <typename OnRecord>
void integrate(const PotentialModel& model, const SimConfig& cfg, std::uint64_t seed,
               OnRecord&& on_record) {
  const std::size_t per_record = cfg.steps_per_record();
  const std::size_t records = cfg.record_count();
  const double dt = cfg.dt;
  NormalStream normal(seed);

  double x = cfg.initial_state(model);
  if (!on_record(std::size_t{0}, x)) return;
  std::size_t step = 0;
  for (std::size_t i = 1; i < records; ++i) {
    for (std::size_t j = 0; j < per_record; ++j, ++step) {
      const double t = cfg.t0 + static_cast<double>(step) * dt;
      x = em_step(x, t, model, dt, normal());
    }
    if (!on_record(i, x)) return;
  }
}

}  // namespace

std::optional<ExitRecord> detect_exit(std::span<const double> states, double t0,
                                      double dt_record, const BasinSpec& basin) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double t = t0 + static_cast<double>(i) * dt_record;
    if (auto rec = check_exit(states[i], t, i, basin)) return rec;
  }
  return std::nullopt;
}

SamplePath simulate_path(const PotentialModel& model, const SimConfig& cfg, std::uint64_t seed) {
  SamplePath path;
  path.t0 = cfg.t0;
  path.dt_record = cfg.dt_record;
  path.seed = seed;
  path.states.reserve(cfg.record_count());
  integrate(model, cfg, seed, [&](std::size_t i, double x) {
    path.states.push_back(x);
    if (!path.exit) {
      path.exit = check_exit(x, cfg.t0 + static_cast<double>(i) * cfg.dt_record, i, cfg.basin);
      if (path.exit && cfg.stop_on_exit) return false;
    }
    return true;
  });
  return path;
}

std::optional<ExitRecord> simulate_exit(const PotentialModel& model, const SimConfig& cfg,
                                        std::uint64_t seed) {
  std::optional<ExitRecord> exit;
  integrate(model, cfg, seed, [&](std::size_t i, double x) {
    exit = check_exit(x, cfg.t0 + static_cast<double>(i) * cfg.dt_record, i, cfg.basin);
    return !exit.has_value();
  });
  return exit;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

template <typename Fn>
auto annotate_path_errors(std::size_t index, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalBlowup& e) {
    throw NumericalBlowup(e.time(), e.state(), index);
  }
}

}  // namespace

EnsembleResult run_ensemble(const PotentialModel& model, const SimConfig& cfg, std::size_t n,
                            std::uint64_t master_seed, EnsembleOptions opts) {
  (void)cfg.steps_per_record();
  EnsembleResult ens;
  ens.master_seed = master_seed;
  ens.t0 = cfg.t0;
  ens.dt_record = cfg.dt_record;
  ens.horizon = cfg.horizon;
  ens.config_digest = model.describe() + "|" + cfg.describe() + "|n=" + std::to_string(n);
  ens.paths.resize(n);
  parallel_for(n, opts.workers, [&](std::size_t i) {
    ens.paths[i] = annotate_path_errors(
        i, [&] { return simulate_path(model, cfg, split_seed(master_seed, i)); });
  });
  return ens;
}

std::vector<std::optional<ExitRecord>> run_exit_ensemble(const PotentialModel& model,
                                                         const SimConfig& cfg, std::size_t n,
                                                         std::uint64_t master_seed,
                                                         EnsembleOptions opts) {
  (void)cfg.steps_per_record();
  std::vector<std::optional<ExitRecord>> exits(n);
  parallel_for(n, opts.workers, [&](std::size_t i) {
    exits[i] = annotate_path_errors(
        i, [&] { return simulate_exit(model, cfg, split_seed(master_seed, i)); });
  });
  return exits;
}

ExitTimeDistribution exit_time_distribution(const EnsembleResult& ens) {
  std::vector<double> times;
  for (const auto& p : ens.paths) {
    if (p.exit) times.push_back(p.exit->time);
  }
  return {std::move(times), ens.paths.size(), ens.horizon};
}

ExitTimeDistribution exit_time_distribution(std::span<const std::optional<ExitRecord>> exits,
                                            double horizon) {
  std::vector<double> times;
  for (const auto& e : exits) {
    if (e) times.push_back(e->time);
  }
  return {std::move(times), exits.size(), horizon};
}

}  // namespace rattlesim
