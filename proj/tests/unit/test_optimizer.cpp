#include <gtest/gtest.h>

#include "sfqgate/checkpoint.hpp"
#include "sfqgate/error.hpp"
#include "sfqgate/optimizer.hpp"
#include "test_support.hpp"

namespace sfq {
namespace {

ScheduleTemplate small_template() {
  ScheduleTemplate t;
  t.duration = 2.0;
  t.n_ramp = 8;
  t.excursion_count = 1;
  return t;
}

PenaltyConfig short_penalty() {
  PenaltyConfig p;
  p.stages = 3;
  p.updates_per_stage = 4;
  return p;
}

TEST(Optimizer, InitialParams) {
  ScheduleTemplate t = small_template();
  t.excursion_count = 2;
  t.n_ramp = 4;
  const RelaxedParams p = initial_params(t, 42);
  for (std::size_t i = 0; i < p.amplitude_count(); ++i) {
    EXPECT_GE(p.theta(i), 0.4);
    EXPECT_LE(p.theta(i), 0.6);
  }
  EXPECT_NEAR(p.theta(p.start_index(0)), 0.1, 1e-12);
  EXPECT_NEAR(p.theta(p.end_index(0)), 0.9, 1e-12);
  EXPECT_NEAR(p.theta(p.start_index(1)), 1.1, 1e-12);
  EXPECT_EQ(initial_params(t, 42).theta, p.theta);
  EXPECT_NE(initial_params(t, 43).theta, p.theta);
}

TEST(Optimizer, RoundAndSnapExamples) {
  const ScheduleTemplate t = small_template();
  RelaxedParams p(t.ticks(), 1);
  p.theta.head(p.amplitude_count()).setConstant(0.2);
  p.theta(0) = 0.5;
  p.theta(1) = 0.4999;
  p.theta(40) = 0.97;
  p.theta(p.start_index(0)) = 0.324;
  p.theta(p.end_index(0)) = 1.776;
  const ControlSchedule s = round_and_snap(p, t);
  EXPECT_EQ(s.mode, ScheduleMode::Discrete);
  EXPECT_EQ(s.amplitudes_q1[0], 1.0);
  EXPECT_EQ(s.amplitudes_q1[1], 0.0);
  EXPECT_EQ(s.amplitudes_q2[0], 1.0);
  EXPECT_NEAR(s.excursions[0].start, 0.30, 1e-12);
  EXPECT_NEAR(s.excursions[0].end, 1.80, 1e-12);
  EXPECT_NO_THROW(s.validate());
  // Snapping an already discrete schedule changes nothing.
  EXPECT_EQ(round_and_snap(from_schedule(s), t), s);
}

TEST(Optimizer, SnapFailsWhenExcursionsCross) {
  ScheduleTemplate t = small_template();
  t.excursion_count = 2;
  t.n_ramp = 2;
  RelaxedParams p(t.ticks(), 2);
  p.theta.head(p.amplitude_count()).setConstant(0.1);
  p.theta(p.start_index(0)) = 0.2;
  p.theta(p.end_index(0)) = 1.04;
  p.theta(p.start_index(1)) = 0.96;
  p.theta(p.end_index(1)) = 1.9;
  try {
    round_and_snap(p, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::SnapFailed);
  }
}

TEST(Optimizer, ShortRunIsDeterministicAndMonotone) {
  const Simulator& sim = test::reference_simulator();
  const OptimizationRun start = make_run("x90_q1", small_template(), short_penalty(), 7);
  const OptimizationRun a = optimize(start, sim);
  const OptimizationRun b = optimize(start, sim);
  EXPECT_TRUE(a.finished);
  EXPECT_FALSE(a.aborted);
  EXPECT_EQ(a.completed_stages, 3);
  EXPECT_EQ(a.params.theta, b.params.theta);
  EXPECT_EQ(a.cost_trajectory, b.cost_trajectory);
  EXPECT_EQ(a.rounded, b.rounded);
  EXPECT_NO_THROW(a.rounded.validate());
  EXPECT_GE(a.report.fidelity, 0.0);
  EXPECT_LE(a.report.fidelity, 1.0 + 1e-12);
  EXPECT_FALSE(a.cost_trajectory.empty());
}

TEST(Optimizer, StageCostsDecreaseWithinAStage) {
  const Simulator& sim = test::reference_simulator();
  PenaltyConfig pen = short_penalty();
  pen.stages = 1;
  pen.updates_per_stage = 6;
  const OptimizationRun r = optimize(make_run("x90_q1", small_template(), pen, 3), sim);
  for (std::size_t i = 1; i < r.cost_trajectory.size(); ++i)
    EXPECT_LE(r.cost_trajectory[i], r.cost_trajectory[i - 1] + 1e-15);
}

TEST(Optimizer, CornersStayInsideTheirWindows) {
  const Simulator& sim = test::reference_simulator();
  ScheduleTemplate t = small_template();
  t.excursion_count = 2;
  t.n_ramp = 4;
  OptimizationRun run = make_run("cz", t, short_penalty(), 5);
  run.params.theta(run.params.start_index(0)) = 0.0;
  run.params.theta(run.params.end_index(0)) = 1.6;
  run.params.theta(run.params.start_index(1)) = 0.4;
  run.params.theta(run.params.end_index(1)) = 2.0;
  const OptimizationRun r = optimize(run, sim);
  ASSERT_TRUE(r.finished);
  const auto& th = r.params.theta;
  EXPECT_LE(th(r.params.end_index(0)), 1.0);
  EXPECT_GE(th(r.params.start_index(1)), 1.0);
  EXPECT_LE(th(r.params.start_index(0)), 0.5 - 0.2);
  EXPECT_GE(th(r.params.end_index(1)), 1.5 + 0.2);
  EXPECT_NO_THROW(r.rounded.validate());
}

TEST(Optimizer, ExcursionWindowShorterThanTwoRampsIsRejected) {
  ScheduleTemplate t = small_template();
  t.excursion_count = 2;
  t.n_ramp = 16;
  EXPECT_THROW(optimize(make_run("cz", t, short_penalty(), 1), test::reference_simulator()), Error);
}

TEST(Optimizer, ResumeFromCheckpointMatchesUninterruptedRun) {
  const Simulator& sim = test::reference_simulator();
  const OptimizationRun start = make_run("x90_q1", small_template(), short_penalty(), 11);
  std::string after_first;
  const OptimizationRun full = optimize(start, sim, {}, [&](const OptimizationRun& r) {
    if (r.completed_stages == 1) after_first = run_to_json(r);
  });
  ASSERT_FALSE(after_first.empty());
  OptimizationRun resumed = run_from_json(after_first);
  EXPECT_EQ(resumed.completed_stages, 1);
  resumed = optimize(resumed, sim);
  EXPECT_EQ(resumed.completed_stages, 3);
  EXPECT_LT((resumed.params.theta - full.params.theta).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(resumed.rounded, full.rounded);
}

TEST(Optimizer, SearchWithBudgetOneRunsOneTemplate) {
  const Simulator& sim = test::reference_simulator();
  SearchSpace space;
  space.clocks = {{20.0, kPi / 100.0}};
  space.durations = {2.0};
  space.n_ramps = {8};
  space.excursion_counts = {1};
  PenaltyConfig pen = short_penalty();
  pen.stages = 1;
  const auto entries = hyperparameter_search(space, 1, 5, "x90_q1", pen, sim, {}, 1);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_TRUE(entries[0].error.empty()) << entries[0].error;
  EXPECT_TRUE(entries[0].run.finished);
  EXPECT_NEAR(entries[0].infidelity(), 1.0 - entries[0].run.report.fidelity, 1e-15);
}

TEST(Optimizer, MakeRunRejectsNonUnitaryTarget) {
  EXPECT_THROW(make_run(Matrix4c(2.0 * Matrix4c::Identity()), small_template(), {}, 1), Error);
}

}  // namespace
}  // namespace sfq
