#include "rattlesim/models.hpp"

#include <cmath>
#include <string>

namespace rattlesim::models {

double cubic_potential(double x, double alpha, double beta) {
  return beta * beta * beta * x * x * x - alpha * beta * x;
}

double cubic_drift(double x, double alpha, double beta) {
  return alpha * beta - 3.0 * beta * beta * beta * x * x;
}

double cubic_drift(double x, double t, const ParamSchedule& alpha, const ParamSchedule& beta) {
  return cubic_drift(x, alpha(t), beta(t));
}

double cubic_drift_derivative(double x, double /*alpha*/, double beta) {
  return -6.0 * beta * beta * beta * x;
}

EquilibriumSet cubic_equilibria(double alpha, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("cubic_equilibria: beta must be > 0");
  if (alpha < 0.0) throw InvalidArgument("cubic_equilibria: alpha must be >= 0");
  if (alpha == 0.0) return {{0.0}, {Stability::Degenerate}};
  const double x = std::sqrt(alpha / (3.0 * beta * beta));
  return {{-x, x}, {Stability::Unstable, Stability::Stable}};
}

double allee_drift(double x, double r, double A, double C, double beta) {
  return (r / beta) * x * (x / (beta * A) - 1.0) * (1.0 - x / (beta * C));
}

double allee_drift(double x, double t, double r, double A, double C, const ParamSchedule& beta) {
  return allee_drift(x, r, A, C, beta(t));
}

EquilibriumSet allee_equilibria(double beta, double A, double C) {
  if (!(A > 0.0)) throw InvalidArgument("allee_equilibria: A > 0 violated");
  if (!(C > A)) throw InvalidArgument("allee_equilibria: C > A violated");
  if (!(beta > 0.0)) throw InvalidArgument("allee_equilibria: beta > 0 violated");
  return {{0.0, beta * A, beta * C},
          {Stability::Stable, Stability::Unstable, Stability::Stable}};
}

ParamSchedule fig1_beta() { return ParamSchedule::inverse_linear(4.0, 0.01, 1e-6); }

double fig1_beta_schedule(double t) { return fig1_beta()(t); }

double ou_covariance(double a, double b, double t, double s) {
  return a * a / (2.0 * b) * (std::exp(-s * b) - std::exp(-(2.0 * t + s) * b));
}

double ou_variance(double a, double b, double t) {
  return a * a / (2.0 * b) * (1.0 - std::exp(-2.0 * b * t));
}

double csd_variance_slope(double a, double beta) {
  const double rate = 4.0 * beta * beta * std::sqrt(3.0);
  return a * a * (1.0 - std::exp(-rate)) / rate;
}

double csu_variance(double a, double alpha, double t) {
  const double c = 4.0 * std::sqrt(3.0 * alpha);
  return a * a / (c * t * t) * (1.0 - std::exp(-c * t * t * t));
}

PotentialModel figure1_model() {
  return PotentialModel::allee(1.0, 1.5, 2.5, fig1_beta(), 0.22);
}

PotentialModel zero_drift_model(double noise) {
  return PotentialModel::table({-1.0, 1.0}, {0.0, 0.0}, noise);
}

}  // namespace rattlesim::models
