#include "rattlesim/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rattlesim/format.hpp"
#include "rattlesim/models.hpp"

namespace rattlesim {

namespace {

std::string describe_point(double v) { return format_number(v); }

}  // namespace

NumericalBlowup::NumericalBlowup(double t, double x, std::optional<std::size_t> path_index)
    : Error([&] {
        std::string msg = "numerical blowup at t=" + describe_point(t) + " (x=" +
                          describe_point(x) + ")";
        if (path_index) msg += " in path " + std::to_string(*path_index);
        return msg;
      }()),
      t_(t),
      x_(x),
      path_index_(path_index) {}

//---------------------------------------------------------------------------//

double ParamSchedule::operator()(double t) const {
  double v = c0_;
  switch (kind_) {
    case Kind::Constant: v = c0_; break;
    case Kind::InverseLinear: v = c0_ / (1.0 + c1_ * t); break;
    case Kind::PowerLaw: v = c0_ * std::pow(t, c1_); break;
    case Kind::Linear: v = c0_ + c1_ * t; break;
  }
  // NaN falls through untouched so validation can report it.
  return v < clamp_min_ ? clamp_min_ : v;
}

std::string ParamSchedule::to_string() const {
  std::string s;
  switch (kind_) {
    case Kind::Constant: s = format_number(c0_); break;
    case Kind::InverseLinear:
      s = "inverse_linear(" + format_number(c0_) + ", " + format_number(c1_) + ")";
      break;
    case Kind::PowerLaw:
      s = "power_law(" + format_number(c0_) + ", " + format_number(c1_) + ")";
      break;
    case Kind::Linear:
      s = "linear(" + format_number(c0_) + ", " + format_number(c1_) + ")";
      break;
  }
  if (clamp_min_ != 0.0) s += " min " + format_number(clamp_min_);
  return s;
}

//---------------------------------------------------------------------------//

std::string_view to_string(DriftKind kind) {
  switch (kind) {
    case DriftKind::Cubic: return "cubic";
    case DriftKind::Allee: return "allee";
    case DriftKind::OULinear: return "ou";
    case DriftKind::Table: return "table";
  }
  return "?";
}

PotentialModel PotentialModel::cubic(ParamSchedule alpha, ParamSchedule beta, double noise) {
  PotentialModel m;
  m.kind_ = DriftKind::Cubic;
  m.params_ = {{"alpha", alpha}, {"beta", beta}};
  m.noise_ = noise;
  return m;
}

PotentialModel PotentialModel::allee(double r, double A, double C, ParamSchedule beta,
                                     double noise) {
  return allee(ParamSchedule::constant(r), ParamSchedule::constant(A),
               ParamSchedule::constant(C), beta, noise);
}

PotentialModel PotentialModel::allee(ParamSchedule r, ParamSchedule A, ParamSchedule C,
                                     ParamSchedule beta, double noise) {
  PotentialModel m;
  m.kind_ = DriftKind::Allee;
  if (beta.clamp_min() < 1e-6) beta = beta.with_clamp_min(1e-6);
  m.params_ = {{"r", r}, {"A", A}, {"C", C}, {"beta", beta}};
  m.noise_ = noise;
  return m;
}

PotentialModel PotentialModel::ou(double b, double noise) {
  PotentialModel m;
  m.kind_ = DriftKind::OULinear;
  m.params_ = {{"b", ParamSchedule::constant(b)}};
  m.noise_ = noise;
  return m;
}

PotentialModel PotentialModel::table(std::vector<double> xs, std::vector<double> drift,
                                     double noise) {
  if (xs.empty() || xs.size() != drift.size()) {
    throw InvalidArgument("table drift needs equally many knots and values");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw InvalidArgument("table knots must be strictly increasing");
  }
  PotentialModel m;
  m.kind_ = DriftKind::Table;
  m.table_x_ = std::move(xs);
  m.table_drift_ = std::move(drift);
  m.noise_ = noise;
  return m;
}

const ParamSchedule& PotentialModel::param(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return p.schedule;
  }
  throw InvalidArgument("model '" + std::string(to_string(kind_)) + "' has no parameter '" +
                        std::string(name) + "'");
}

bool PotentialModel::has_time_varying_params() const {
  return std::any_of(params_.begin(), params_.end(),
                     [](const NamedParam& p) { return !p.schedule.is_constant(); });
}

double PotentialModel::base_drift(double x, double t) const {
  switch (kind_) {
    case DriftKind::Cubic:
      return models::cubic_drift(x, params_[0].schedule(t), params_[1].schedule(t));
    case DriftKind::Allee:
      return models::allee_drift(x, params_[0].schedule(t), params_[1].schedule(t),
                                 params_[2].schedule(t), params_[3].schedule(t));
    case DriftKind::OULinear:
      return -params_[0].schedule(t) * x;
    case DriftKind::Table: {
      const auto& xs = table_x_;
      const auto& ys = table_drift_;
      if (x <= xs.front()) return ys.front();
      if (x >= xs.back()) return ys.back();
      const auto hi = std::upper_bound(xs.begin(), xs.end(), x);
      const auto i = static_cast<std::size_t>(hi - xs.begin());
      const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    }
  }
  return 0.0;
}

double PotentialModel::drift(double x, double t) const {
  if (scale_ == 1.0) return base_drift(x, t);
  return scale_ * base_drift(scale_ * x, t);
}

PotentialModel PotentialModel::narrowed(double k) const {
  PotentialModel m = *this;
  m.scale_ = scale_ * k;
  return m;
}

double PotentialModel::upper_stable_equilibrium(double t) const {
  double x = 0.0;
  switch (kind_) {
    case DriftKind::Cubic: {
      const auto eq = models::cubic_equilibria(params_[0].schedule(t), params_[1].schedule(t));
      x = eq.points.back();
      break;
    }
    case DriftKind::Allee:
      x = params_[3].schedule(t) * params_[2].schedule(t);
      break;
    case DriftKind::OULinear:
      x = 0.0;
      break;
    case DriftKind::Table:
      throw InvalidArgument("table drift has no known stable equilibrium");
  }
  return x / scale_;
}

double PotentialModel::lower_unstable_equilibrium(double t) const {
  double x = 0.0;
  switch (kind_) {
    case DriftKind::Cubic: {
      const auto eq = models::cubic_equilibria(params_[0].schedule(t), params_[1].schedule(t));
      x = eq.points.front();
      break;
    }
    case DriftKind::Allee:
      x = params_[3].schedule(t) * params_[1].schedule(t);
      break;
    case DriftKind::OULinear:
    case DriftKind::Table:
      throw InvalidArgument(std::string(to_string(kind_)) + " drift has no unstable equilibrium");
  }
  return x / scale_;
}

std::string PotentialModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  for (const auto& p : params_) os << ';' << p.name << '=' << p.schedule.to_string();
  if (kind_ == DriftKind::Table) {
    os << ";table=";
    for (std::size_t i = 0; i < table_x_.size(); ++i) {
      os << (i ? "," : "") << format_number(table_x_[i]) << ':' << format_number(table_drift_[i]);
    }
  }
  os << ";noise=" << format_number(noise_) << ";scale=" << format_number(scale_);
  return os.str();
}

//---------------------------------------------------------------------------//

std::vector<std::string> validate_model(const PotentialModel& model, double horizon, double t0) {
  std::vector<std::string> errors;
  auto fail = [&errors](std::string msg) {
    if (std::find(errors.begin(), errors.end(), msg) == errors.end()) {
      errors.push_back(std::move(msg));
    }
  };

  if (!std::isfinite(model.noise_amplitude()) || model.noise_amplitude() < 0.0) {
    fail("noise_amplitude >= 0 violated");
  }
  if (!(model.space_scale() > 0.0) || !std::isfinite(model.space_scale())) {
    fail("space scale > 0 violated");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    fail("horizon must be finite and >= 0");
    return errors;
  }

  if (model.kind() == DriftKind::Table) {
    const auto& xs = model.table_x();
    const auto& ys = model.table_drift();
    if (xs.size() < 2 || xs.size() != ys.size()) {
      fail("table needs >= 2 knots with matching drift values");
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) fail("table entries must be finite");
        if (i > 0 && !(xs[i] > xs[i - 1])) fail("table knots must be strictly increasing");
      }
    }
    return errors;
  }

  constexpr int kGrid = 1000;
  for (int i = 0; i < kGrid; ++i) {
    const double t = t0 + horizon * static_cast<double>(i) / (kGrid - 1);
    const std::string at = " at t=" + format_number(t);
    for (const auto& p : model.params()) {
      const double v = p.schedule(t);
      if (!std::isfinite(v)) fail(p.name + " not finite" + at);
    }
    switch (model.kind()) {
      case DriftKind::Cubic: {
        const double alpha = model.param("alpha")(t);
        const double beta = model.param("beta")(t);
        if (alpha < 0.0) fail("alpha >= 0 violated" + at);
        if (!(beta > 0.0)) fail("beta > 0 violated" + at);
        break;
      }
      case DriftKind::Allee: {
        const double r = model.param("r")(t);
        const double A = model.param("A")(t);
        const double C = model.param("C")(t);
        const double beta = model.param("beta")(t);
        if (!(r > 0.0)) fail("r > 0 violated");
        if (!(A > 0.0)) fail("A > 0 violated");
        if (!(C > A)) fail("C > A violated");
        if (!(beta > 0.0) || beta > 1e3) fail("beta in (0, 1e3] violated" + at);
        break;
      }
      case DriftKind::OULinear:
        if (!(model.param("b")(t) > 0.0)) fail("b > 0 violated");
        break;
      case DriftKind::Table:
        break;
    }
  }
  return errors;
}

//---------------------------------------------------------------------------//

Boundary Boundary::contracted(double k) const {
  if (kind_ != Kind::Constant) {
    throw InvalidArgument("only constant basin boundaries can be rescaled");
  }
  return constant(value_ / k);
}

BasinSpec basin_above_unstable(const PotentialModel& model) {
  if (model.kind() != DriftKind::Allee && model.kind() != DriftKind::Cubic) {
    throw InvalidArgument("basin_above_unstable: model has no unstable equilibrium");
  }
  if (model.kind() == DriftKind::Allee && model.space_scale() == 1.0 &&
      model.param("A").is_constant()) {
    return {Boundary::scaled_schedule(model.param("beta"), model.param("A")(0.0)),
            Boundary::constant(kInf)};
  }
  return {Boundary::function([model](double t) { return model.lower_unstable_equilibrium(t); }),
          Boundary::constant(kInf)};
}

//---------------------------------------------------------------------------//

std::size_t EnsembleResult::record_count() const {
  return static_cast<std::size_t>(std::floor(horizon / dt_record + 1e-9)) + 1;
}

ExitTimeDistribution::ExitTimeDistribution(std::vector<double> exit_times, std::size_t n_total,
                                           double horizon)
    : times_(std::move(exit_times)), n_total_(n_total), horizon_(horizon) {
  if (times_.size() > n_total_) {
    throw InvalidArgument("more exit times than paths");
  }
  std::sort(times_.begin(), times_.end());
}

double ExitTimeDistribution::cdf(double tau) const {
  if (n_total_ == 0) return 0.0;
  const auto k = std::upper_bound(times_.begin(), times_.end(), tau) - times_.begin();
  return static_cast<double>(k) / static_cast<double>(n_total_);
}

std::optional<double> ExitTimeDistribution::quantile(double q) const {
  if (n_total_ == 0 || q < 0.0 || q > 1.0) return std::nullopt;
  // Smallest exit time whose CDF reaches q.
  const double need = std::ceil(q * static_cast<double>(n_total_) - 1e-12);
  const auto k = static_cast<std::size_t>(std::max(need, 1.0));
  if (k > times_.size()) return std::nullopt;
  return times_[k - 1];
}

}  // namespace rattlesim
