#include <gtest/gtest.h>

#include <cmath>

#include "rattlesim/engine.hpp"
#include "rattlesim/models.hpp"
#include "rattlesim/rng.hpp"

using namespace rattlesim;

namespace {

PotentialModel zero_drift(double a) { return PotentialModel::table({-1.0, 1.0}, {0.0, 0.0}, a); }

SimConfig small_config() {
  SimConfig c;
  c.horizon = 5.0;
  c.dt = 0.01;
  c.dt_record = 0.1;
  c.x0 = 0.0;
  c.basin = BasinSpec::interval(-kInf, kInf);
  return c;
}

}  // namespace

TEST(EmStep, Examples) {
  EXPECT_EQ(em_step(0.0, 0.0, zero_drift(1.0), 0.01, 0.0), 0.0);
  const auto cubic =
      PotentialModel::cubic(ParamSchedule::constant(1.0), ParamSchedule::constant(1.0), 0.0);
  EXPECT_DOUBLE_EQ(em_step(0.0, 0.0, cubic, 0.01, 123.0), 0.01);
  EXPECT_DOUBLE_EQ(em_step(1.0, 0.0, zero_drift(2.0), 0.25, 1.0), 2.0);
}

TEST(EmStep, BlowupCarriesContext) {
  const auto cubic =
      PotentialModel::cubic(ParamSchedule::constant(1.0), ParamSchedule::constant(1.0), 0.0);
  try {
    em_step(-1e200, 3.0, cubic, 0.5, 0.0);
    FAIL();
  } catch (const NumericalBlowup& e) {
    EXPECT_EQ(e.time(), 3.5);
    EXPECT_FALSE(std::isfinite(e.state()));
  }
}

TEST(SimConfig, Preconditions) {
  auto c = small_config();
  EXPECT_EQ(c.steps_per_record(), 10u);
  EXPECT_EQ(c.record_count(), 51u);
  c.dt_record = 0.015;
  EXPECT_THROW(c.steps_per_record(), InvalidArgument);
  c.dt_record = 0.005;
  EXPECT_THROW(c.steps_per_record(), InvalidArgument);
}

TEST(DetectExit, Examples) {
  const std::vector<double> flat{5, 5, 5};
  EXPECT_FALSE(detect_exit(flat, 0.0, 1.0, BasinSpec::interval(0.0, kInf)).has_value());
  const std::vector<double> down{6.1, 6.0, 5.9};
  const auto e = detect_exit(down, 0.0, 1.0, BasinSpec::interval(6.0, kInf));
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->index, 1u);
  EXPECT_EQ(e->time, 1.0);
  EXPECT_EQ(e->boundary, BoundarySide::Lower);
  EXPECT_EQ(e->state_at_exit, 6.0);
  const std::vector<double> up{0.0, 0.5, 1.0};
  const auto u = detect_exit(up, 2.0, 0.5, BasinSpec::interval(-1.0, 1.0));
  ASSERT_TRUE(u.has_value());
  EXPECT_EQ(u->boundary, BoundarySide::Upper);
  EXPECT_EQ(u->time, 3.0);
}

TEST(DetectExit, TimeVaryingBoundary) {
  const std::vector<double> x{1.0, 1.0, 1.0, 1.0};
  BasinSpec b{Boundary::function([](double t) { return 0.4 * t; }), Boundary::constant(kInf)};
  const auto e = detect_exit(x, 0.0, 1.0, b);
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->index, 3u);
}

TEST(SimulatePath, ConstantWithoutNoise) {
  auto c = small_config();
  c.x0 = 5.0;
  c.basin = BasinSpec::interval(0.0, kInf);
  const auto p = simulate_path(zero_drift(0.0), c, 123);
  EXPECT_EQ(p.states.size(), c.record_count());
  for (double v : p.states) EXPECT_EQ(v, 5.0);
  EXPECT_FALSE(p.exit.has_value());
  EXPECT_EQ(p.seed, 123u);
}

TEST(SimulatePath, Deterministic) {
  const auto m = PotentialModel::ou(1.0, 1.0);
  const auto c = small_config();
  EXPECT_EQ(simulate_path(m, c, 9), simulate_path(m, c, 9));
  EXPECT_NE(simulate_path(m, c, 9).states, simulate_path(m, c, 10).states);
}

TEST(SimulatePath, UpperStableStart) {
  auto c = small_config();
  c.x0 = UpperStableEquilibrium{};
  const auto p = simulate_path(models::figure1_model(), c, 1);
  EXPECT_EQ(p.states.front(), 10.0);
}

TEST(SimulatePath, NoiselessOuTracksExponential) {
  auto c = small_config();
  c.x0 = 1.0;
  c.dt = 0.001;
  const auto p = simulate_path(PotentialModel::ou(1.0, 0.0), c, 1);
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    EXPECT_NEAR(p.states[i], std::exp(-p.time_at(i)), 1e-3);
  }
}

TEST(SimulatePath, StopOnExitTruncates) {
  auto c = small_config();
  c.x0 = 0.0;
  c.horizon = 100.0;
  c.basin = BasinSpec::interval(-0.5, 0.5);
  const auto m = zero_drift(1.0);
  const auto full = simulate_path(m, c, 5);
  c.stop_on_exit = true;
  const auto cut = simulate_path(m, c, 5);
  ASSERT_TRUE(full.exit.has_value());
  EXPECT_EQ(full.exit, cut.exit);
  EXPECT_EQ(cut.states.size(), cut.exit->index + 1);
  EXPECT_GT(full.states.size(), cut.states.size());
  EXPECT_TRUE(std::equal(cut.states.begin(), cut.states.end(), full.states.begin()));
}

TEST(SimulateExit, AgreesWithSimulatePath) {
  auto c = small_config();
  c.horizon = 30.0;
  c.basin = BasinSpec::interval(-1.0, 1.0);
  const auto m = zero_drift(0.7);
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_EQ(simulate_exit(m, c, s), simulate_path(m, c, s).exit);
}

TEST(SimulatePath, ShrinkingBasinNeverDelaysExit) {
  auto c = small_config();
  c.horizon = 50.0;
  const auto m = PotentialModel::ou(0.5, 1.0);
  for (std::uint64_t s = 0; s < 30; ++s) {
    c.basin = BasinSpec::interval(-1.5, 1.5);
    const auto wide = simulate_path(m, c, s);
    const auto narrow = detect_exit(wide.states, wide.t0, wide.dt_record,
                                    BasinSpec::interval(-1.2, 1.0));
    if (wide.exit) {
      ASSERT_TRUE(narrow.has_value());
      EXPECT_LE(narrow->time, wide.exit->time);
    }
  }
}

TEST(RunEnsemble, EmptyEnsemble) {
  const auto e = run_ensemble(PotentialModel::ou(1.0, 1.0), small_config(), 0, 1);
  EXPECT_TRUE(e.paths.empty());
  EXPECT_EQ(exit_time_distribution(e).n_total(), 0u);
}

TEST(RunEnsemble, IndependentOfWorkerCount) {
  const auto m = PotentialModel::ou(1.0, 1.0);
  const auto c = small_config();
  const auto one = run_ensemble(m, c, 8, 77, {1});
  const auto eight = run_ensemble(m, c, 8, 77, {8});
  EXPECT_EQ(one, eight);
  for (std::size_t i = 0; i < one.paths.size(); ++i) {
    EXPECT_EQ(one.paths[i].seed, split_seed(77, i));
  }
}

TEST(RunEnsemble, DistinctPaths) {
  const auto e = run_ensemble(PotentialModel::ou(1.0, 1.0), small_config(), 16, 3);
  for (std::size_t i = 1; i < e.paths.size(); ++i) {
    EXPECT_NE(e.paths[i].states, e.paths[0].states);
  }
}

TEST(RunEnsemble, ErrorsNamePathIndex) {
  auto c = small_config();
  c.x0 = -50.0;
  c.dt = 0.1;
  const auto cubic =
      PotentialModel::cubic(ParamSchedule::constant(1.0), ParamSchedule::constant(1.0), 0.0);
  try {
    run_ensemble(cubic, c, 3, 1, {2});
    FAIL();
  } catch (const NumericalBlowup& e) {
    ASSERT_TRUE(e.path_index().has_value());
    EXPECT_EQ(*e.path_index(), 0u);
  }
}

TEST(RunExitEnsemble, MatchesFullEnsemble) {
  auto c = small_config();
  c.horizon = 20.0;
  c.basin = BasinSpec::interval(-1.0, 1.0);
  const auto m = zero_drift(1.0);
  const auto full = run_ensemble(m, c, 50, 8);
  const auto light = run_exit_ensemble(m, c, 50, 8);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(full.paths[i].exit, light[i]);
  EXPECT_EQ(exit_time_distribution(full).sorted_exit_times(),
            exit_time_distribution(light, c.horizon).sorted_exit_times());
}

TEST(RunEnsemble, OuVarianceAtHorizon) {
  SimConfig c;
  c.horizon = 10.0;
  c.dt = 0.01;
  c.dt_record = 10.0;
  c.x0 = 0.0;
  const std::size_t n = 10000;
  const auto e = run_ensemble(PotentialModel::ou(1.0, 1.0), c, n, 2);
  double s = 0, s2 = 0, s4 = 0;
  for (const auto& p : e.paths) s += p.states.back();
  const double m = s / n;
  for (const auto& p : e.paths) {
    const double d = (p.states.back() - m) * (p.states.back() - m);
    s2 += d;
    s4 += d * d;
  }
  const double var = s2 / (n - 1);
  const double se = std::sqrt((s4 / n - (s2 / n) * (s2 / n)) / n);
  EXPECT_NEAR(var, models::ou_variance(1.0, 1.0, 10.0), 3 * se);
}

TEST(ExitTimeDistribution, FromEnsemble) {
  auto c = small_config();
  c.horizon = 2.0;
  c.basin = BasinSpec::interval(-0.3, 0.3);
  const auto e = run_ensemble(zero_drift(1.0), c, 40, 4);
  const auto d = exit_time_distribution(e);
  std::size_t exited = 0;
  for (const auto& p : e.paths) exited += p.exit.has_value();
  EXPECT_EQ(d.n_exited(), exited);
  EXPECT_EQ(d.n_total(), 40u);
}
