#include "rattlesim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rattlesim/format.hpp"
#include "rattlesim/models.hpp"

namespace rattlesim::config {

ConfigError::ConfigError(std::size_t line, const std::string& msg)
    : Error(line ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg),
      line_(line) {}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Simulate: return "simulate";
    case Experiment::Figure1: return "figure1";
    case Experiment::Figure2: return "figure2";
    case Experiment::VerifyTimechange: return "verify-timechange";
  }
  return "?";
}

std::optional<Experiment> experiment_from_string(std::string_view s) {
  for (auto e : {Experiment::Simulate, Experiment::Figure1, Experiment::Figure2,
                 Experiment::VerifyTimechange}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

PotentialModel ModelSpec::build() const {
  if (kind == "allee") return PotentialModel::allee(r, A, C, beta, noise);
  if (kind == "cubic") return PotentialModel::cubic(alpha, beta, noise);
  if (kind == "ou") return PotentialModel::ou(b, noise);
  if (kind == "zero") return models::zero_drift_model(noise);
  throw InvalidArgument("unknown model kind '" + kind + "'");
}

SimConfig ExperimentConfig::sim_config(const PotentialModel& m) const {
  SimConfig s;
  s.t0 = t0;
  s.horizon = horizon;
  s.dt = dt;
  s.dt_record = dt_record;
  if (x0) {
    s.x0 = *x0;
  } else {
    s.x0 = UpperStableEquilibrium{};
  }
  s.stop_on_exit = stop_on_exit;
  auto side = [&m](const BoundarySpec& b, bool lower) {
    if (b.value) return Boundary::constant(*b.value);
    if (!lower) throw InvalidArgument("basin_upper cannot be 'unstable'");
    return basin_above_unstable(m).lower;
  };
  s.basin = {side(basin_lower, true), side(basin_upper, false)};
  return s;
}

ExperimentConfig defaults_for(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::Figure1:
      break;
    case Experiment::Figure2:
      c.model.beta = ParamSchedule::constant(1.0);
      c.horizon = 20000.0;
      c.stop_on_exit = true;
      break;
    case Experiment::VerifyTimechange:
      c.model.kind = "cubic";
      c.model.alpha = ParamSchedule::constant(3.0);
      c.model.beta = ParamSchedule::constant(1.0);
      c.model.noise = 1.5;
      c.n_paths = 2000;
      break;
    case Experiment::Simulate:
      c.model.kind = "ou";
      c.model.b = 1.0;
      c.model.noise = 1.0;
      c.x0 = 0.0;
      c.horizon = 100.0;
      c.n_paths = 1;
      c.basin_lower = BoundarySpec::constant(-kInf);
      break;
  }
  return c;
}

//---------------------------------------------------------------------------//

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

struct Entry {
  std::string_view section;
  std::string_view key;
  std::string_view value;
  std::size_t line;

  double number() const {
    auto v = parse_number(value);
    if (!v) throw ConfigError(line, "'" + std::string(key) + "' expects a number, got '" +
                                        std::string(value) + "'");
    return *v;
  }
  std::size_t count() const {
    std::size_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw ConfigError(line, "'" + std::string(key) + "' expects a non-negative integer");
    }
    return v;
  }
  std::uint64_t u64() const {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw ConfigError(line, "'" + std::string(key) + "' expects an unsigned 64-bit integer");
    }
    return v;
  }
  bool flag() const {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(line, "'" + std::string(key) + "' expects true or false");
  }
  ParamSchedule schedule() const {
    auto s = parse_schedule(value);
    if (!s) throw ConfigError(line, "malformed schedule '" + std::string(value) + "'");
    return *s;
  }
  BoundarySpec boundary() const {
    if (value == "unstable") return BoundarySpec::unstable();
    return BoundarySpec::constant(number());
  }
};

void apply_entry(ExperimentConfig& c, const Entry& e) {
  const std::string key = std::string(e.section) + "." + std::string(e.key);
  auto& m = c.model;
  if (key == "model.kind") {
    const std::string kind(e.value);
    if (kind != "allee" && kind != "cubic" && kind != "ou" && kind != "zero") {
      throw ConfigError(e.line, "unknown model kind '" + kind + "'");
    }
    m.kind = kind;
  } else if (key == "model.r") {
    m.r = e.schedule();
  } else if (key == "model.A") {
    m.A = e.schedule();
  } else if (key == "model.C") {
    m.C = e.schedule();
  } else if (key == "model.alpha") {
    m.alpha = e.schedule();
  } else if (key == "model.beta") {
    m.beta = e.schedule();
  } else if (key == "model.b") {
    m.b = e.number();
  } else if (key == "model.noise") {
    m.noise = e.number();
  } else if (key == "sim.t0") {
    c.t0 = e.number();
  } else if (key == "sim.horizon") {
    c.horizon = e.number();
  } else if (key == "sim.dt") {
    c.dt = e.number();
  } else if (key == "sim.dt_record") {
    c.dt_record = e.number();
  } else if (key == "sim.x0") {
    if (e.value == "upper-stable-equilibrium") {
      c.x0.reset();
    } else {
      c.x0 = e.number();
    }
  } else if (key == "sim.stop_on_exit") {
    c.stop_on_exit = e.flag();
  } else if (key == "sim.basin_lower") {
    c.basin_lower = e.boundary();
  } else if (key == "sim.basin_upper") {
    c.basin_upper = e.boundary();
  } else if (key == "sim.n_paths") {
    c.n_paths = e.count();
  } else if (key == "sim.seed") {
    c.master_seed = e.u64();
  } else if (key == "sim.workers") {
    c.workers = static_cast<unsigned>(e.count());
  } else if (key == "ews.window") {
    c.window = e.number();
  } else if (key == "ews.lag") {
    c.lag = e.number();
  } else if (key == "output.dir") {
    c.output_dir = std::string(e.value);
  } else if (key == "output.svg") {
    c.emit_svg = e.flag();
  } else if (key == "figure1.paths_to_write") {
    c.paths_to_write = e.count();
  } else if (key == "figure1.hist_bin") {
    c.hist_bin = e.number();
  } else if (key == "figure2.beta_min") {
    c.beta_min = e.number();
  } else if (key == "figure2.beta_max") {
    c.beta_max = e.number();
  } else if (key == "figure2.beta_count") {
    c.beta_count = e.count();
  } else if (key == "figure2.pre_exit_window") {
    c.pre_exit_window = e.number();
  } else if (key == "timechange.k") {
    c.ks.clear();
    for (auto part : split_commas(e.value)) {
      auto v = parse_number(part);
      if (!v) throw ConfigError(e.line, "malformed k list '" + std::string(e.value) + "'");
      c.ks.push_back(*v);
    }
  } else if (key == "timechange.x0") {
    c.tc_x0 = e.number();
  } else if (key == "timechange.basin_lower") {
    c.tc_lower = e.number();
  } else if (key == "timechange.basin_upper") {
    c.tc_upper = e.number();
  } else if (key == "timechange.horizon") {
    c.tc_horizon = e.number();
  } else if (key == "timechange.dt") {
    c.tc_dt = e.number();
  } else if (key == "timechange.dt_record") {
    c.tc_dt_record = e.number();
  } else {
    throw ConfigError(e.line, "unknown key '" + std::string(e.key) + "' in section [" +
                                  std::string(e.section) + "]");
  }
}

}  // namespace

std::optional<ParamSchedule> parse_schedule(std::string_view s) {
  s = trim(s);
  if (auto v = parse_number(s)) return ParamSchedule::constant(*v);
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') return std::nullopt;
  const auto name = trim(s.substr(0, open));
  const auto args = split_commas(s.substr(open + 1, s.size() - open - 2));
  std::vector<double> v;
  for (auto a : args) {
    auto x = parse_number(a);
    if (!x) return std::nullopt;
    v.push_back(*x);
  }
  if (name == "constant" && v.size() == 1) return ParamSchedule::constant(v[0]);
  if (v.size() != 2) return std::nullopt;
  if (name == "inverse_linear") return ParamSchedule::inverse_linear(v[0], v[1]);
  if (name == "power_law") return ParamSchedule::power_law(v[0], v[1]);
  if (name == "linear") return ParamSchedule::linear(v[0], v[1]);
  return std::nullopt;
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  static const std::vector<std::string_view> kSections = {
      "model", "sim", "ews", "output", "figure1", "figure2", "timechange"};
  std::string_view section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw ConfigError(line_no, "unknown section [" + std::string(section) + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "expected key = value, got '" + std::string(line) + "'");
    }
    if (section.empty()) throw ConfigError(line_no, "key outside of any [section]");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    apply_entry(cfg, Entry{section, key, value, line_no});
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  try {
    const auto model = cfg.build_model();
    problems = validate_model(model, cfg.horizon, cfg.t0);
    if (problems.empty() && cfg.experiment != Experiment::VerifyTimechange) {
      (void)cfg.sim_config(model).steps_per_record();
    }
  } catch (const Error& e) {
    problems.emplace_back(e.what());
  }
  if (!(cfg.window >= 2.0 * cfg.dt_record)) problems.emplace_back("window < 2 dt_record");
  if (!(cfg.lag > 0.0) || cfg.window < 2.0 * cfg.lag) problems.emplace_back("need window >= 2 lag > 0");
  if (cfg.experiment == Experiment::Figure2 &&
      (cfg.beta_count < 2 || !(cfg.beta_min > 0.0) || !(cfg.beta_max > cfg.beta_min))) {
    problems.emplace_back("figure2 beta grid needs 0 < beta_min < beta_max and >= 2 points");
  }
  if (cfg.experiment == Experiment::Figure1 && !(cfg.hist_bin > 0.0)) {
    problems.emplace_back("hist_bin must be > 0");
  }
  return problems;
}

}  // namespace rattlesim::config
