#pragma once

// Experiment configuration: built-in defaults per experiment, overridden by a
// sectioned key=value file.
//
//   # comment
//   [model]
//   kind  = allee
//   beta  = inverse_linear(4, 0.01)
//   noise = 0.22
//
// Schedules are written as a number, constant(v), inverse_linear(c0, c1),
// power_law(c, p) or linear(v0, slope). Unknown sections or keys, lines
// without '=' and unparsable values are errors that name the line.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rattlesim/core.hpp"
#include "rattlesim/engine.hpp"

namespace rattlesim::config {

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& msg);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class Experiment { Simulate, Figure1, Figure2, VerifyTimechange };

std::string_view to_string(Experiment e);
std::optional<Experiment> experiment_from_string(std::string_view s);

struct ModelSpec {
  std::string kind = "allee";  // allee | cubic | ou | zero
  ParamSchedule r = ParamSchedule::constant(1.0);
  ParamSchedule A = ParamSchedule::constant(1.5);
  ParamSchedule C = ParamSchedule::constant(2.5);
  ParamSchedule alpha = ParamSchedule::constant(3.0);
  ParamSchedule beta = ParamSchedule::inverse_linear(4.0, 0.01);
  double b = 1.0;
  double noise = 0.22;

  PotentialModel build() const;
};

/// Basin side: a number (+-inf allowed) or "unstable" for the model's
/// unstable equilibrium.
struct BoundarySpec {
  std::optional<double> value;  // nullopt = unstable equilibrium

  static BoundarySpec constant(double v) { return {v}; }
  static BoundarySpec unstable() { return {std::nullopt}; }
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Figure1;
  ModelSpec model;

  double t0 = 0.0;
  double horizon = 1500.0;
  double dt = 0.01;
  double dt_record = 0.1;
  std::optional<double> x0;  // nullopt = upper stable equilibrium
  bool stop_on_exit = false;
  BoundarySpec basin_lower = BoundarySpec::unstable();
  BoundarySpec basin_upper = BoundarySpec::constant(kInf);

  std::size_t n_paths = 500;
  std::uint64_t master_seed = 20190611;
  unsigned workers = 0;

  double window = 10.0;
  double lag = 1.0;

  std::filesystem::path output_dir = "out";
  bool emit_svg = false;

  // figure1
  std::size_t paths_to_write = 5;
  double hist_bin = 10.0;

  // figure2
  double beta_min = 0.2;
  double beta_max = 1.2;
  std::size_t beta_count = 10;
  double pre_exit_window = 10.0;

  // verify-timechange; horizon is in the original (unnarrowed) time
  std::vector<double> ks = {0.5, 1.0, 2.0, 4.0};
  double tc_x0 = 1.0;
  double tc_lower = -1.0;
  double tc_upper = kInf;
  double tc_horizon = 200.0;
  double tc_dt = 0.01;
  double tc_dt_record = 0.01;

  PotentialModel build_model() const { return model.build(); }
  SimConfig sim_config(const PotentialModel& model) const;
};

/// Built-in defaults for each experiment.
ExperimentConfig defaults_for(Experiment e);

/// Applies `text` on top of `cfg`. Throws ConfigError.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& file);

/// Parses a schedule expression; nullopt on malformed input.
std::optional<ParamSchedule> parse_schedule(std::string_view s);

/// Runs validate_model and the simulation preconditions; returns all problems.
std::vector<std::string> validate(const ExperimentConfig& cfg);

}  // namespace rattlesim::config
