#pragma once

// Run configuration. Text format: `[section]` headers and `key = value` lines,
// `#` comments. Values are numbers, products/quotients with `pi`
// (`pi/200`, `2*pi`), booleans, quoted strings, or `[a, b, ...]` lists.
// Unknown sections and keys are rejected. See README for the schema.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sfqgate/calibration.hpp"
#include "sfqgate/device.hpp"
#include "sfqgate/optimizer.hpp"

namespace sfq {

struct FsimConfig {
  double hold = 17.0;  // ns
  int ramp_steps = 64;
  double step_duration = 0.05;  // ns
  double sweep_min = 5.0;
  double sweep_max = 30.0;
  double sweep_step = 0.1;
};

struct DecomposeConfig {
  std::string target = "cz";
  std::array<double, 3> layer_durations{25.0, 25.0, 25.0};
  int layer_stages = 150;
};

struct RunConfig {
  CircuitParams circuit;
  BasisSettings basis;
  CalibrationSettings calibration;
  double qubit_freq_ghz = 5.0;
  ScheduleTemplate schedule;
  PenaltyConfig penalty;
  OptimizerSettings optimizer;
  std::uint64_t seed = 0;
  std::string target = "cz";
  FsimConfig fsim;
  DecomposeConfig decompose;
  SearchSpace search;
  int budget = 1;
  unsigned workers = 0;
  std::string output_dir = ".";

  void validate() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Evaluates `pi`, numbers, and `*` / `/` chains, with an optional leading sign.
double parse_number_expression(std::string_view text);

}  // namespace sfq
