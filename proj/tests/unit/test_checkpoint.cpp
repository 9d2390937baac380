#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfqgate/checkpoint.hpp"
#include "sfqgate/error.hpp"

namespace sfq {
namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "sfqgate_checkpoint_test";
  std::filesystem::create_directories(dir);
  return dir;
}

OptimizationRun sample_run() {
  ScheduleTemplate t;
  t.duration = 1.0;
  t.n_ramp = 4;
  t.excursion_count = 1;
  OptimizationRun r = make_run("cnot", t, PenaltyConfig{}, 99);
  r.completed_stages = 4;
  r.cost_trajectory = {0.9, 0.5, 0.123456789012345678};
  r.log = {"stage 1", "stage 2: line search failed"};
  r.params.theta(3) = 0.1 + 1e-17;
  return r;
}

TEST(Checkpoint, RunJsonRoundTripIsExact) {
  const OptimizationRun r = sample_run();
  const OptimizationRun back = run_from_json(run_to_json(r));
  EXPECT_EQ(back.target_id, "cnot");
  EXPECT_EQ(back.target, r.target);
  EXPECT_EQ(back.schedule_template, r.schedule_template);
  EXPECT_EQ(back.penalty, r.penalty);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.completed_stages, 4);
  EXPECT_EQ(back.cost_trajectory, r.cost_trajectory);
  EXPECT_EQ(back.params.theta, r.params.theta);
  EXPECT_EQ(back.params.ticks, r.params.ticks);
  EXPECT_EQ(back.log, r.log);
  EXPECT_FALSE(back.finished);
}

TEST(Checkpoint, CustomTargetSurvives) {
  OptimizationRun r = sample_run();
  r.target_id = "custom";
  r.target = Matrix4c::Identity() * std::polar(1.0, 0.3);
  EXPECT_EQ(run_from_json(run_to_json(r)).target, r.target);
}

TEST(Checkpoint, RejectsMalformedJson) {
  EXPECT_THROW(run_from_json("{not json"), Error);
  EXPECT_THROW(run_from_json(R"({"version": 99})"), Error);
}

TEST(Checkpoint, SaveAndLoad) {
  const auto path = (scratch_dir() / "run.json").string();
  save_checkpoint(path, sample_run());
  EXPECT_EQ(load_checkpoint(path).params.theta, sample_run().params.theta);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST(Checkpoint, AtomicWriteReplacesContents) {
  const auto path = (scratch_dir() / "blob.bin").string();
  write_file_atomic(path, std::string("first"));
  write_file_atomic(path, Bytes{1, 2, 3});
  EXPECT_EQ(read_file_bytes(path), (Bytes{1, 2, 3}));
  EXPECT_THROW(read_file_bytes((scratch_dir() / "missing").string()), Error);
  EXPECT_THROW(write_file_atomic(path + "/child", std::string("x")), Error);
}

TEST(Checkpoint, SweepCsv) {
  const std::string csv = sweep_csv({{17.0, 18.0, 2.5e-4, -0.939, -0.57, 1e-5}});
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "hold_ns,infidelity,theta,phi");
  EXPECT_EQ(row, "17,0.00025,-0.939,-0.57");
}

TEST(Checkpoint, ReportJsonHasFields) {
  GateReport g;
  g.fidelity = 0.99;
  g.leakage = 1e-4;
  const std::string j = report_to_json(g);
  EXPECT_NE(j.find("\"fidelity\""), std::string::npos);
  EXPECT_NE(j.find("\"leakage\""), std::string::npos);
}

}  // namespace
}  // namespace sfq
