// rattlesim <simulate|figure1|figure2|verify-timechange> --config FILE
//           [--seed U64] [--out DIR] [--n N] [--svg] [--workers W]
//
// Exit status: 0 success (verify-timechange: every k passed), 1 a k failed,
// 2 usage or configuration error, 3 verify-timechange inconclusive,
// 4 numerical or runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "rattlesim/config.hpp"
#include "rattlesim/experiments.hpp"
#include "rattlesim/format.hpp"

namespace {

using namespace rattlesim;

int run(config::ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case config::Experiment::Simulate: {
      const auto ens = experiments::run_simulate(cfg);
      std::cout << "simulated " << ens.paths.size() << " paths into "
                << cfg.output_dir.string() << "\n";
      return 0;
    }
    case config::Experiment::Figure1: {
      const auto res = experiments::run_figure1(cfg);
      std::cout << "figure1: " << res.exit_times.n_exited() << "/" << res.exit_times.n_total()
                << " paths collapsed; output in " << cfg.output_dir.string() << "\n";
      return 0;
    }
    case config::Experiment::Figure2: {
      const auto rows = experiments::run_figure2(cfg);
      for (const auto& r : rows) {
        std::cout << "beta=" << format_number(r.beta) << " exited " << r.n_exited << "/"
                  << r.n_paths << "\n";
      }
      return 0;
    }
    case config::Experiment::VerifyTimechange: {
      const auto out = experiments::run_verify_timechange(cfg);
      for (const auto& r : out.reports) {
        std::cout << "k=" << format_number(r.k) << " D=" << format_number(r.ks_distance)
                  << " threshold=" << format_number(r.threshold)
                  << (r.pass ? " pass" : " FAIL") << "\n";
      }
      return out.all_pass ? 0 : 1;
    }
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic tipping-point simulator"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> n_paths;
  std::optional<unsigned> workers;
  bool svg = false;

  const std::pair<config::Experiment, const char*> commands[] = {
      {config::Experiment::Simulate, "simulate an ensemble and its rolling statistics"},
      {config::Experiment::Figure1, "Allee collapse under a shrinking beta schedule"},
      {config::Experiment::Figure2, "exit times and pre-exit statistics over a beta grid"},
      {config::Experiment::VerifyTimechange, "check that narrowing by k equals speeding time by k^2"},
  };
  for (const auto& [e, help] : commands) {
    auto* sub = app.add_subcommand(std::string(config::to_string(e)), help);
    sub->add_option("--config", config_file, "INI-style configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--n", n_paths, "number of paths");
    sub->add_option("--workers", workers, "worker threads (0 = all cores)");
    sub->add_flag("--svg", svg, "also write SVG plots");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto experiment =
      *config::experiment_from_string(app.get_subcommands().front()->get_name());
  try {
    auto cfg = config::defaults_for(experiment);
    config::apply_config_file(cfg, config_file);
    if (seed) cfg.master_seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    if (n_paths) cfg.n_paths = *n_paths;
    if (workers) cfg.workers = *workers;
    if (svg) cfg.emit_svg = true;
    return run(cfg);
  } catch (const config::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const timechange::InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
