#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sfqgate/lbfgsb.hpp"
#include "sfqgate/relaxation.hpp"

namespace sfq {

struct OptimizerSettings {
  int memory = 10;
  double amplitude_epsilon = 1e-6;
  RelaxationSettings relaxation;
};

struct OptimizationRun {
  std::string target_id = "cz";  // "custom" when built from a matrix
  Matrix4c target = Matrix4c::Identity();
  ScheduleTemplate schedule_template;
  PenaltyConfig penalty;
  std::uint64_t seed = 0;

  int completed_stages = 0;
  std::vector<double> cost_trajectory;  // cost after every accepted update
  RelaxedParams params;
  std::vector<std::string> log;

  bool finished = false;
  bool aborted = false;
  ControlSchedule rounded;
  GateReport report;  // discrete mode, exact-segment backend
  double relaxed_fidelity = 0.0;
};

/// Amplitudes i.i.d. uniform in [0.4, 0.6]; excursions centred in equal
/// windows of the duration, each spanning 80% of its window.
RelaxedParams initial_params(const ScheduleTemplate& tmpl, std::uint64_t seed);

/// A fresh run with initial parameters drawn from `seed`.
OptimizationRun make_run(const std::string& target_id, const ScheduleTemplate& tmpl,
                         const PenaltyConfig& penalty, std::uint64_t seed);

/// Same, for an explicit target matrix (target_id "custom").
OptimizationRun make_run(const Matrix4c& target, const ScheduleTemplate& tmpl,
                         const PenaltyConfig& penalty, std::uint64_t seed);

/// Called after every completed stage (checkpointing).
using StageCallback = std::function<void(const OptimizationRun&)>;

/// Continues `run` from its completed stage count through all stages, then
/// rounds and reports. Line-search failures end the current stage and are
/// logged; a non-finite cost aborts the run.
OptimizationRun optimize(OptimizationRun run, const Simulator& sim,
                         const OptimizerSettings& settings = {},
                         const StageCallback& on_stage = {});

/// Amplitudes thresholded at 0.5 and corner times moved to the nearest tick;
/// the result is validated as a discrete schedule.
ControlSchedule round_and_snap(const RelaxedParams& params, const ScheduleTemplate& tmpl);

struct SearchSpace {
  /// (clock GHz, kick angle) pairs.
  std::vector<std::pair<double, double>> clocks{{20.0, kPi / 100.0}, {40.0, kPi / 200.0}};
  std::vector<double> durations{70.0};
  std::vector<int> n_ramps{64};
  std::vector<int> excursion_counts{2};
  double flux_off = 0.352;
  double flux_on = 0.376;
};

struct SearchEntry {
  OptimizationRun run;
  std::string error;  // non-empty when the run failed
  double infidelity() const;
};

/// Samples `budget` templates uniformly from `space`, optimizes each (in
/// parallel over `workers` threads) and ranks by discrete infidelity.
std::vector<SearchEntry> hyperparameter_search(const SearchSpace& space, int budget,
                                               std::uint64_t seed, const std::string& target_id,
                                               const PenaltyConfig& penalty, const Simulator& sim,
                                               const OptimizerSettings& settings = {},
                                               unsigned workers = 0);

}  // namespace sfq
