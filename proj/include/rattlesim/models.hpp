#pragma once

// Concrete drift functions, their equilibria, the parameter schedules used by
// the population experiments, and closed-form Ornstein-Uhlenbeck moments.

#include <vector>

#include "rattlesim/core.hpp"

namespace rattlesim::models {

enum class Stability { Stable, Unstable, Degenerate };

struct EquilibriumSet {
  std::vector<double> points;  // ascending
  std::vector<Stability> stability;
};

// Cubic potential V(x) = beta^3 x^3 - alpha beta x.
double cubic_potential(double x, double alpha, double beta);
double cubic_drift(double x, double alpha, double beta);
double cubic_drift(double x, double t, const ParamSchedule& alpha, const ParamSchedule& beta);
double cubic_drift_derivative(double x, double alpha, double beta);
EquilibriumSet cubic_equilibria(double alpha, double beta);

// Allee growth with territory fraction beta.
double allee_drift(double x, double r, double A, double C, double beta);
double allee_drift(double x, double t, double r, double A, double C, const ParamSchedule& beta);
EquilibriumSet allee_equilibria(double beta, double A, double C);

/// beta(t) = 4 / (1 + 0.01 t), clamped at 1e-6.
ParamSchedule fig1_beta();
double fig1_beta_schedule(double t);

/// Cov(X_t, X_{t+s}) of dX = -b X dt + a dB, X_0 deterministic.
double ou_covariance(double a, double b, double t, double s);
double ou_variance(double a, double b, double t);

/// Slope m of the linearly growing variance when alpha(t) = t^-2.
double csd_variance_slope(double a, double beta);
/// Variance under beta(t) = t with alpha fixed, t >= 1.
double csu_variance(double a, double alpha, double t);

// Ready-made models for the scenarios the CLI knows about.
PotentialModel figure1_model();
PotentialModel zero_drift_model(double noise);

}  // namespace rattlesim::models
