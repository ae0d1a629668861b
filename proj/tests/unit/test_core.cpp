#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rattlesim/core.hpp"
#include "rattlesim/models.hpp"
#include "rattlesim/rng.hpp"

using namespace rattlesim;

bool contains(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

TEST(ParamSchedule, Kinds) {
  EXPECT_EQ(ParamSchedule::constant(2.5)(123.0), 2.5);
  EXPECT_EQ(ParamSchedule::inverse_linear(4.0, 0.01)(100.0), 2.0);
  EXPECT_DOUBLE_EQ(ParamSchedule::power_law(1.0, -2.0)(4.0), 1.0 / 16.0);
  EXPECT_EQ(ParamSchedule::linear(1.0, 2.0)(3.0), 7.0);
}

TEST(ParamSchedule, ClampFromBelow) {
  EXPECT_EQ(ParamSchedule::linear(1.0, -1.0)(5.0), 0.0);
  EXPECT_EQ(ParamSchedule::linear(1.0, -1.0, 0.25)(5.0), 0.25);
  EXPECT_EQ(ParamSchedule::linear(1.0, -1.0).with_clamp_min(0.5)(0.25), 0.75);
}

TEST(ParamSchedule, PureFunctionOfTime) {
  const auto s = ParamSchedule::inverse_linear(4.0, 0.01);
  for (double t = 0.0; t < 1000.0; t += 17.3) EXPECT_EQ(s(t), s(t));
}

TEST(PotentialModel, AlleeBetaClampedAwayFromZero) {
  const auto m = PotentialModel::allee(1.0, 1.5, 2.5, ParamSchedule::linear(1.0, -1.0), 0.1);
  EXPECT_GE(m.param("beta")(10.0), 1e-6);
  EXPECT_TRUE(std::isfinite(m.drift(1e-7, 10.0)));
}

TEST(PotentialModel, DriftMatchesModelFunctions) {
  const auto allee = PotentialModel::allee(1.0, 1.5, 2.5, models::fig1_beta(), 0.22);
  EXPECT_DOUBLE_EQ(allee.drift(8.0, 0.0), models::allee_drift(8.0, 1.0, 1.5, 2.5, 4.0));
  const auto cubic =
      PotentialModel::cubic(ParamSchedule::constant(1.0), ParamSchedule::constant(2.0), 0.1);
  EXPECT_DOUBLE_EQ(cubic.drift(0.1, 0.0), 1.76);
  EXPECT_DOUBLE_EQ(PotentialModel::ou(2.0, 1.0).drift(3.0, 0.0), -6.0);
  EXPECT_THROW(allee.param("nope"), InvalidArgument);
}

TEST(PotentialModel, TableInterpolatesAndHolds) {
  const auto m = PotentialModel::table({-1.0, 0.0, 2.0}, {1.0, 0.0, -4.0}, 0.5);
  EXPECT_DOUBLE_EQ(m.drift(-0.5, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(m.drift(1.0, 0.0), -2.0);
  EXPECT_DOUBLE_EQ(m.drift(-9.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(m.drift(9.0, 0.0), -4.0);
  EXPECT_THROW(PotentialModel::table({0.0, 0.0}, {1.0, 2.0}, 1.0), InvalidArgument);
  EXPECT_THROW(PotentialModel::table({0.0}, {1.0, 2.0}, 1.0), InvalidArgument);
}

TEST(PotentialModel, Equilibria) {
  const auto allee = PotentialModel::allee(1.0, 1.5, 2.5, models::fig1_beta(), 0.22);
  EXPECT_DOUBLE_EQ(allee.upper_stable_equilibrium(0.0), 10.0);
  EXPECT_DOUBLE_EQ(allee.lower_unstable_equilibrium(100.0), 3.0);
  const auto cubic =
      PotentialModel::cubic(ParamSchedule::constant(3.0), ParamSchedule::constant(1.0), 0.3);
  EXPECT_DOUBLE_EQ(cubic.upper_stable_equilibrium(0.0), 1.0);
  EXPECT_DOUBLE_EQ(cubic.lower_unstable_equilibrium(0.0), -1.0);
  EXPECT_DOUBLE_EQ(cubic.narrowed(2.0).upper_stable_equilibrium(0.0), 0.5);
  EXPECT_THROW(PotentialModel::ou(1.0, 1.0).lower_unstable_equilibrium(0.0), InvalidArgument);
}

TEST(ValidateModel, Examples) {
  EXPECT_TRUE(validate_model(
                  PotentialModel::allee(1.0, 1.5, 2.5, ParamSchedule::constant(4.0), 0.22), 100.0)
                  .empty());
  EXPECT_TRUE(contains(
      validate_model(PotentialModel::allee(1.0, 2.5, 1.5, ParamSchedule::constant(4.0), 0.22),
                     100.0),
      "C > A violated"));
  EXPECT_TRUE(validate_model(PotentialModel::cubic(ParamSchedule::constant(1.0),
                                                   ParamSchedule::inverse_linear(4.0, 0.01), 0.1),
                             1000.0)
                  .empty());
}

TEST(ValidateModel, ReportsEveryViolation) {
  const auto problems = validate_model(
      PotentialModel::cubic(ParamSchedule::linear(1.0, -1.0, -10.0),
                            ParamSchedule::constant(0.0), 0.1),
      10.0);
  EXPECT_TRUE(contains(problems, "alpha >= 0 violated"));
  EXPECT_TRUE(contains(problems, "beta"));
  EXPECT_TRUE(contains(validate_model(PotentialModel::ou(-1.0, 1.0), 1.0), "b > 0 violated"));
  EXPECT_TRUE(contains(validate_model(PotentialModel::ou(1.0, -1.0), 1.0), "noise"));
}

TEST(ValidateModel, GridStartsAtT0) {
  // beta(t) = t is zero at t = 0 but fine from t = 1 onwards.
  const auto m = PotentialModel::cubic(ParamSchedule::constant(1.0 / 3.0),
                                       ParamSchedule::linear(0.0, 1.0), 0.1);
  EXPECT_FALSE(validate_model(m, 9.0).empty());
  EXPECT_TRUE(validate_model(m, 9.0, 1.0).empty());
}

TEST(Basin, BoundaryKinds) {
  EXPECT_EQ(Boundary::constant(2.0)(5.0), 2.0);
  EXPECT_EQ(Boundary::scaled_schedule(models::fig1_beta(), 1.5)(100.0), 3.0);
  EXPECT_EQ(Boundary::function([](double t) { return -t; })(4.0), -4.0);
  EXPECT_EQ(Boundary::constant(-1.0).contracted(2.0)(0.0), -0.5);
  EXPECT_EQ(Boundary::constant(kInf).contracted(2.0)(0.0), kInf);
  EXPECT_THROW(Boundary::scaled_schedule(models::fig1_beta(), 1.5).contracted(2.0),
               InvalidArgument);
  EXPECT_TRUE(BasinSpec::interval(-1.0, 1.0).is_static());
}

TEST(Basin, AboveUnstable) {
  const auto fig1 = basin_above_unstable(models::figure1_model());
  EXPECT_DOUBLE_EQ(fig1.lower(0.0), 6.0);
  EXPECT_DOUBLE_EQ(fig1.lower(700.0), 0.75);
  EXPECT_EQ(fig1.upper(0.0), kInf);
  const auto csu = basin_above_unstable(PotentialModel::cubic(
      ParamSchedule::constant(1.0 / 3.0), ParamSchedule::linear(0.0, 1.0), 0.1));
  EXPECT_DOUBLE_EQ(csu.lower(2.0), -1.0 / 6.0);
  EXPECT_THROW(basin_above_unstable(PotentialModel::ou(1.0, 1.0)), InvalidArgument);
}

TEST(ExitTimeDistribution, Examples) {
  const ExitTimeDistribution d({3.0, 1.0, 2.0}, 3, 10.0);
  EXPECT_DOUBLE_EQ(d.cdf(2.5), 2.0 / 3.0);
  EXPECT_EQ(d.cdf(0.5), 0.0);
  EXPECT_EQ(d.cdf(3.0), 1.0);
  EXPECT_EQ(d.sorted_exit_times(), (std::vector<double>{1.0, 2.0, 3.0}));

  const ExitTimeDistribution none({}, 5, 10.0);
  for (double t : {0.0, 5.0, 1e9}) EXPECT_EQ(none.cdf(t), 0.0);
  EXPECT_FALSE(none.quantile(0.5).has_value());
  EXPECT_THROW(ExitTimeDistribution({1.0, 2.0}, 1, 10.0), InvalidArgument);
}

TEST(ExitTimeDistribution, QuantileCensoring) {
  const ExitTimeDistribution d({1.0, 2.0, 3.0, 4.0}, 8, 10.0);
  EXPECT_TRUE(d.quantile(0.25).has_value());
  EXPECT_LE(*d.quantile(0.25), 2.0);
  EXPECT_FALSE(d.quantile(0.75).has_value());
}

TEST(ExitTimeDistribution, CdfMonotoneAndBoundedProperty) {
  NormalStream z(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(std::abs(z()) * 40.0);
    std::vector<double> times;
    for (std::size_t i = 0; i < n; ++i) {
      if (z() > -0.5) times.push_back(std::abs(z()) * 10.0);
    }
    const ExitTimeDistribution d(times, n, 50.0);
    double prev = 0.0;
    for (double tau = -1.0; tau <= 60.0; tau += 0.25) {
      const double c = d.cdf(tau);
      EXPECT_GE(c, prev);
      EXPECT_LE(c, 1.0);
      prev = c;
    }
  }
}
