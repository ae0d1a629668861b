#pragma once

// Domain types shared by the simulator, the statistics and the CLI.
//
// Everything here is immutable after construction; instances may be shared
// freely between worker threads.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rattlesim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator produced a non-finite state.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(double t, double x, std::optional<std::size_t> path_index = {});

  double time() const { return t_; }
  double state() const { return x_; }
  std::optional<std::size_t> path_index() const { return path_index_; }

 private:
  double t_;
  double x_;
  std::optional<std::size_t> path_index_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

//---------------------------------------------------------------------------//
// ParamSchedule
//---------------------------------------------------------------------------//

/// A scalar parameter as a function of time, clamped from below.
///
///   Constant(v)            v
///   InverseLinear(c0, c1)  c0 / (1 + c1 t)
///   PowerLaw(c, p)         c t^p
///   Linear(v0, slope)      v0 + slope t
class ParamSchedule {
 public:
  enum class Kind { Constant, InverseLinear, PowerLaw, Linear };

  constexpr ParamSchedule() = default;

  static constexpr ParamSchedule constant(double v, double clamp_min = 0.0) {
    return {Kind::Constant, v, 0.0, clamp_min};
  }
  static constexpr ParamSchedule inverse_linear(double c0, double c1, double clamp_min = 0.0) {
    return {Kind::InverseLinear, c0, c1, clamp_min};
  }
  static constexpr ParamSchedule power_law(double c, double p, double clamp_min = 0.0) {
    return {Kind::PowerLaw, c, p, clamp_min};
  }
  static constexpr ParamSchedule linear(double v0, double slope, double clamp_min = 0.0) {
    return {Kind::Linear, v0, slope, clamp_min};
  }

  double operator()(double t) const;

  Kind kind() const { return kind_; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double clamp_min() const { return clamp_min_; }
  bool is_constant() const { return kind_ == Kind::Constant; }

  ParamSchedule with_clamp_min(double clamp_min) const {
    return {kind_, c0_, c1_, clamp_min};
  }

  /// Textual form accepted by the config parser, e.g. "inverse_linear(4, 0.01)".
  std::string to_string() const;

  friend bool operator==(const ParamSchedule&, const ParamSchedule&) = default;

 private:
  constexpr ParamSchedule(Kind kind, double c0, double c1, double clamp_min)
      : kind_(kind), c0_(c0), c1_(c1), clamp_min_(clamp_min) {}

  Kind kind_ = Kind::Constant;
  double c0_ = 0.0;
  double c1_ = 0.0;
  double clamp_min_ = 0.0;
};

//---------------------------------------------------------------------------//
// PotentialModel
//---------------------------------------------------------------------------//

enum class DriftKind { Cubic, Allee, OULinear, Table };

std::string_view to_string(DriftKind kind);

struct NamedParam {
  std::string name;
  ParamSchedule schedule;
};

/// Drift b(x, t) of dX = b dt + a dB together with the noise amplitude a.
///
/// Parameters per kind (in storage order):
///   Cubic     alpha, beta        b = alpha beta - 3 beta^3 x^2
///   Allee     r, A, C, beta      b = (r/beta) x (x/(beta A) - 1)(1 - x/(beta C))
///   OULinear  b                  b = -b x
///   Table     (none)             piecewise-linear interpolation of (x, b) knots,
///                                held constant outside the knot range
///
/// A model may carry a spatial scale k (see `narrowed`), in which case the
/// drift evaluated at x is k * b(k x, t).
class PotentialModel {
 public:
  static PotentialModel cubic(ParamSchedule alpha, ParamSchedule beta, double noise);
  /// The beta schedule is clamped at >= 1e-6 unless a larger clamp is given.
  static PotentialModel allee(double r, double A, double C, ParamSchedule beta, double noise);
  static PotentialModel allee(ParamSchedule r, ParamSchedule A, ParamSchedule C,
                              ParamSchedule beta, double noise);
  static PotentialModel ou(double b, double noise);
  static PotentialModel table(std::vector<double> xs, std::vector<double> drift, double noise);

  DriftKind kind() const { return kind_; }
  double noise_amplitude() const { return noise_; }
  double space_scale() const { return scale_; }
  const std::vector<NamedParam>& params() const { return params_; }
  const std::vector<double>& table_x() const { return table_x_; }
  const std::vector<double>& table_drift() const { return table_drift_; }

  /// Throws InvalidArgument for an unknown name.
  const ParamSchedule& param(std::string_view name) const;
  bool has_time_varying_params() const;

  double drift(double x, double t) const;

  /// Drift of the model narrowed by k: x -> k * drift(k x). Scales compose
  /// multiplicatively.
  PotentialModel narrowed(double k) const;

  /// Upper stable equilibrium at time t in the model's own coordinates
  /// (beta C for Allee, +sqrt(alpha/3)/beta for cubic, 0 for OU).
  double upper_stable_equilibrium(double t) const;
  /// Unstable equilibrium bounding the upper basin from below
  /// (beta A for Allee, -sqrt(alpha/3)/beta for cubic). OU/Table throw.
  double lower_unstable_equilibrium(double t) const;

  /// Stable text digest of kind, parameters, noise and scale.
  std::string describe() const;

 private:
  PotentialModel() = default;

  double base_drift(double x, double t) const;

  DriftKind kind_ = DriftKind::OULinear;
  std::vector<NamedParam> params_;
  std::vector<double> table_x_;
  std::vector<double> table_drift_;
  double noise_ = 0.0;
  double scale_ = 1.0;
};

/// Every invariant violation found on a 1000-point grid over
/// [t0, t0 + horizon]. Empty means valid.
std::vector<std::string> validate_model(const PotentialModel& model, double horizon,
                                        double t0 = 0.0);

//---------------------------------------------------------------------------//
// BasinSpec
//---------------------------------------------------------------------------//

/// One side of a basin: a constant (possibly infinite), factor * schedule(t),
/// or an arbitrary function of time.
class Boundary {
 public:
  enum class Kind { Constant, ScaledSchedule, Function };

  static Boundary constant(double v) { return Boundary(Kind::Constant, v, {}, {}); }
  static Boundary scaled_schedule(ParamSchedule s, double factor) {
    return Boundary(Kind::ScaledSchedule, factor, s, {});
  }
  static Boundary function(std::function<double(double)> f) {
    return Boundary(Kind::Function, 0.0, {}, std::move(f));
  }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::Constant: return value_;
      case Kind::ScaledSchedule: return value_ * schedule_(t);
      case Kind::Function: return fn_(t);
    }
    return value_;
  }

  Kind kind() const { return kind_; }
  bool is_static() const { return kind_ == Kind::Constant; }
  /// Constant boundaries only; divides the value by k.
  Boundary contracted(double k) const;

 private:
  Boundary(Kind kind, double value, ParamSchedule s, std::function<double(double)> fn)
      : kind_(kind), value_(value), schedule_(s), fn_(std::move(fn)) {}

  Kind kind_;
  double value_;
  ParamSchedule schedule_;
  std::function<double(double)> fn_;
};

struct BasinSpec {
  Boundary lower = Boundary::constant(-kInf);
  Boundary upper = Boundary::constant(kInf);

  static BasinSpec interval(double lo, double hi) {
    return {Boundary::constant(lo), Boundary::constant(hi)};
  }
  bool is_static() const { return lower.is_static() && upper.is_static(); }
};

/// Basin bounded below by the model's unstable equilibrium, unbounded above.
BasinSpec basin_above_unstable(const PotentialModel& model);

//---------------------------------------------------------------------------//
// Paths and ensembles
//---------------------------------------------------------------------------//

enum class BoundarySide { Lower, Upper };

struct ExitRecord {
  double time = 0.0;
  BoundarySide boundary = BoundarySide::Lower;
  double state_at_exit = 0.0;
  std::size_t index = 0;  // recorded sample index

  friend bool operator==(const ExitRecord&, const ExitRecord&) = default;
};

struct SamplePath {
  double t0 = 0.0;
  double dt_record = 0.1;
  std::vector<double> states;  // X at t0 + i * dt_record
  std::optional<ExitRecord> exit;
  std::uint64_t seed = 0;

  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt_record; }

  friend bool operator==(const SamplePath&, const SamplePath&) = default;
};

struct EnsembleResult {
  std::vector<SamplePath> paths;
  std::uint64_t master_seed = 0;
  std::string config_digest;
  double t0 = 0.0;
  double dt_record = 0.1;
  double horizon = 0.0;

  /// Number of recorded samples of a path run to the horizon.
  std::size_t record_count() const;

  friend bool operator==(const EnsembleResult&, const EnsembleResult&) = default;
};

/// Empirical exit-time distribution; non-exited paths count in n_total only.
class ExitTimeDistribution {
 public:
  ExitTimeDistribution() = default;
  ExitTimeDistribution(std::vector<double> exit_times, std::size_t n_total, double horizon);

  /// Fraction of all paths with exit time <= tau.
  double cdf(double tau) const;
  /// Empirical quantile of the exit times over *all* paths; nullopt when the
  /// quantile falls among censored paths.
  std::optional<double> quantile(double q) const;

  const std::vector<double>& sorted_exit_times() const { return times_; }
  std::size_t n_total() const { return n_total_; }
  std::size_t n_exited() const { return times_.size(); }
  double horizon() const { return horizon_; }

 private:
  std::vector<double> times_;
  std::size_t n_total_ = 0;
  double horizon_ = 0.0;
};

//---------------------------------------------------------------------------//
// Statistic series
//---------------------------------------------------------------------------//

struct RollingStatSeries {
  std::vector<double> times;
  std::vector<std::optional<double>> values;  // nullopt = missing
  double window = 0.0;
  double lag = 0.0;
  std::vector<std::size_t> n_contributing;

  std::size_t size() const { return times.size(); }
};

}  // namespace rattlesim
