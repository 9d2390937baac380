#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "sfqgate/calibration.hpp"
#include "sfqgate/checkpoint.hpp"
#include "sfqgate/config.hpp"
#include "sfqgate/decomposition.hpp"
#include "sfqgate/device.hpp"
#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"
#include "sfqgate/optimizer.hpp"
#include "sfqgate/propagator.hpp"
#include "sfqgate/sequence_io.hpp"

namespace {

using namespace sfq;
using nlohmann::json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string backend = "exact";
  std::optional<int> budget;
  bool resume = false;
  std::string target;
  std::string input;
  std::string output;
  std::string format = "compressed";
};

RunConfig load(const Options& o) {
  RunConfig c = o.config_path.empty() ? parse_config("") : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.budget) {
    require(*o.budget >= 1, ErrorClass::InvalidArgument, "--budget must be >= 1");
    c.budget = *o.budget;
  }
  std::filesystem::create_directories(c.output_dir);
  return c;
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

unsigned worker_count(const RunConfig& c) {
  return c.workers > 0 ? c.workers : std::max(1u, std::thread::hardware_concurrency());
}

Backend parse_backend(const std::string& name) {
  if (name == "exact") return Backend::ExactSegment;
  if (name == "trotter") return Backend::Trotter4;
  fail(ErrorClass::InvalidArgument, "unknown backend '" + name + "' (exact or trotter)");
}

Simulator make_simulator(const RunConfig& c) {
  return Simulator(build_device(c.circuit, c.basis));
}

// Final reports always use the schedule as it reads back from disk.
GateReport evaluate_schedule(const ControlSchedule& s, const Matrix4c& target, const Simulator& sim,
                             Backend backend) {
  const ControlSchedule canon = canonical_schedule(s);
  const CMatrix psi = propagate_states(canon, sim, sim.frame().states, backend);
  return gate_report_from_states(psi, target, sim.frame(), canon.duration, true);
}

void print_report(const GateReport& r) {
  std::printf("fidelity %.9f (raw %.9f), leakage %.3e, z phases (%.6f, %.6f)\n", r.fidelity,
              r.fidelity_raw, r.leakage, r.phi_z1, r.phi_z2);
}

int cmd_calibrate(const Options& o) {
  const RunConfig c = load(o);
  const CalibrationResult r =
      calibrate_idle(c.circuit, angular_ghz(c.qubit_freq_ghz), c.circuit.phi_off, c.calibration);
  const std::string path = path_in(c, "calibration.json");
  write_file_atomic(path, calibration_to_json(r));
  std::printf("phi_off = [%.6f, %.6f, %.6f], f1 = %.6f GHz, f2 = %.6f GHz -> %s\n", r.phi_off[0],
              r.phi_off[1], r.phi_off[2], r.omega1 / kTwoPi, r.omega2 / kTwoPi, path.c_str());
  return 0;
}

OptimizationRun run_with_checkpoints(OptimizationRun run, const Simulator& sim,
                                     const OptimizerSettings& settings, const std::string& path,
                                     bool resume) {
  if (resume && std::filesystem::exists(path)) {
    OptimizationRun saved = load_checkpoint(path);
    require(saved.schedule_template == run.schedule_template && saved.penalty == run.penalty &&
                saved.seed == run.seed && saved.target.isApprox(run.target),
            ErrorClass::InvalidArgument, "checkpoint " + path + " belongs to a different run");
    run = saved;
    std::fprintf(stderr, "resuming from stage %d\n", run.completed_stages);
  }
  run = optimize(run, sim, settings, [&](const OptimizationRun& r) {
    save_checkpoint(path, r);
    std::fprintf(stderr, "stage %d/%d cost %.6e\n", r.completed_stages, r.penalty.stages,
                 r.cost_trajectory.empty() ? 0.0 : r.cost_trajectory.back());
  });
  save_checkpoint(path, run);
  return run;
}

int cmd_optimize(const Options& o) {
  const RunConfig c = load(o);
  const Simulator sim = make_simulator(c);
  const std::string target_id = o.target.empty() ? c.target : o.target;
  const Matrix4c target = target_gate(target_id);

  if (c.budget > 1) {
    const auto entries = hyperparameter_search(c.search, c.budget, c.seed, target_id, c.penalty, sim,
                                               c.optimizer, worker_count(c));
    json ranking = json::array();
    for (const auto& e : entries) {
      const auto& t = e.run.schedule_template;
      ranking.push_back({{"clock_freq", t.clock_freq}, {"kick_angle", t.kick_angle},
                         {"duration", t.duration}, {"n_ramp", t.n_ramp},
                         {"excursions", t.excursion_count}, {"seed", e.run.seed},
                         {"infidelity", e.infidelity()}, {"error", e.error}});
    }
    write_file_atomic(path_in(c, "search.json"), ranking.dump(1));
    const SearchEntry& best = entries.front();
    require(best.error.empty(), ErrorClass::NonFiniteCost, "every search run failed: " + best.error);
    write_file_atomic(path_in(c, "best.checkpoint.json"), run_to_json(best.run));
    write_file_atomic(path_in(c, "optimized.sfq"), write_sequence(canonical_schedule(best.run.rounded)));
    const GateReport r = evaluate_schedule(best.run.rounded, target, sim, Backend::ExactSegment);
    write_file_atomic(path_in(c, "report.json"), report_to_json(r));
    print_report(r);
    return 0;
  }

  OptimizationRun run = make_run(target_id, c.schedule, c.penalty, c.seed);
  run = run_with_checkpoints(run, sim, c.optimizer, path_in(c, "checkpoint.json"), o.resume);
  require(!run.aborted, ErrorClass::NonFiniteCost,
          run.log.empty() ? "optimization aborted" : run.log.back());
  const ControlSchedule canon = canonical_schedule(run.rounded);
  write_file_atomic(path_in(c, "optimized.sfq"), write_sequence(canon));
  const GateReport r = evaluate_schedule(canon, target, sim, Backend::ExactSegment);
  write_file_atomic(path_in(c, "report.json"), report_to_json(r));
  print_report(r);
  return 0;
}

std::vector<double> sweep_holds(const FsimConfig& f) {
  std::vector<double> holds;
  const int n = static_cast<int>(std::floor((f.sweep_max - f.sweep_min) / f.sweep_step + 1e-9));
  for (int i = 0; i <= n; ++i) holds.push_back(f.sweep_min + i * f.sweep_step);
  return holds;
}

int cmd_sweep(const Options& o) {
  const RunConfig c = load(o);
  const Simulator sim = make_simulator(c);
  const auto rows = hold_time_sweep(sim, sweep_holds(c.fsim), c.fsim.ramp_steps, c.fsim.step_duration,
                                    c.schedule.flux_off, c.schedule.flux_on, worker_count(c));
  const std::string path = path_in(c, "fsim_sweep.csv");
  write_file_atomic(path, sweep_csv(rows));
  const auto best = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.infidelity < b.infidelity;
  });
  std::printf("%zu holds -> %s; lowest infidelity %.3e at hold %.2f ns\n", rows.size(), path.c_str(),
              best->infidelity, best->hold);
  return 0;
}

int cmd_decompose(const Options& o) {
  const RunConfig c = load(o);
  const Simulator sim = make_simulator(c);
  const std::string which = o.target.empty() ? c.decompose.target : o.target;
  require(which == "cz" || which == "cnot", ErrorClass::InvalidArgument,
          "decompose target must be cz or cnot");
  const CompositeTarget target = which == "cz" ? CompositeTarget::CZ : CompositeTarget::CNOT;

  FsimCalibration fsim = calibrate_fsim(sim, c.fsim.hold, c.fsim.ramp_steps, c.fsim.step_duration,
                                        c.schedule.flux_off, c.schedule.flux_on);
  fsim.schedule = canonical_schedule(fsim.schedule);
  std::printf("fSim at hold %.2f ns: theta %.6f, phi %.6f, residual %.2e\n", fsim.hold,
              fsim.params.theta, fsim.params.phi, fsim.params.residual);
  const auto targets = composite_layer_targets(target, fsim.params, fsim.schedule.duration,
                                               c.decompose.layer_durations, sim.frame().energies);

  PenaltyConfig penalty = c.penalty;
  penalty.stages = c.decompose.layer_stages;
  std::vector<ControlSchedule> layers;
  for (int i = 0; i < 3; ++i) {
    ScheduleTemplate t = c.schedule;
    t.duration = c.decompose.layer_durations[i];
    t.excursion_count = 0;
    OptimizationRun run = make_run(targets[i], t, penalty, c.seed + static_cast<std::uint64_t>(i));
    // Only the last layer's output Z rotations are absorbed by the composite report.
    OptimizerSettings settings = c.optimizer;
    settings.relaxation.z_compensate = c.optimizer.relaxation.z_compensate && i == 2;
    run = run_with_checkpoints(run, sim, settings,
                               path_in(c, "layer" + std::to_string(i + 1) + ".checkpoint.json"),
                               o.resume);
    require(!run.aborted, ErrorClass::NonFiniteCost, "layer optimization aborted");
    layers.push_back(canonical_schedule(run.rounded));
    std::printf("layer %d: fidelity %.6f\n", i + 1, run.report.fidelity);
  }
  const CompositeGate gate = build_composite_gate(target, fsim, layers, sim);
  write_file_atomic(path_in(c, "composite_" + which + ".sfq"), write_sequence(gate.schedule));
  const Bytes z = compress_sequence(gate.schedule, c.qubit_freq_ghz);
  write_file_atomic(path_in(c, "composite_" + which + ".sfqz"), z);
  write_file_atomic(path_in(c, "composite_" + which + ".json"), report_to_json(gate.report));
  const auto bits = compressed_payload_bits(z);
  print_report(gate.report);
  std::printf("duration %.2f ns, compressed payload %u / %u bits\n", gate.schedule.duration, bits[0],
              bits[1]);
  return 0;
}

int cmd_evaluate(const Options& o) {
  const RunConfig c = load(o);
  const Simulator sim = make_simulator(c);
  const ControlSchedule s = read_any_sequence(read_file_bytes(o.input));
  const std::string target_id = o.target.empty() ? c.target : o.target;
  const GateReport r = evaluate_schedule(s, target_gate(target_id), sim, parse_backend(o.backend));
  write_file_atomic(path_in(c, "evaluate.json"), report_to_json(r));
  print_report(r);
  return 0;
}

int cmd_export(const Options& o) {
  const RunConfig c = load(o);
  const ControlSchedule s = read_any_sequence(read_file_bytes(o.input));
  Bytes out;
  if (o.format == "raw") {
    out = write_sequence(s);
  } else if (o.format == "compressed") {
    out = compress_sequence(s, c.qubit_freq_ghz);
  } else {
    fail(ErrorClass::InvalidArgument, "unknown format '" + o.format + "' (raw or compressed)");
  }
  write_file_atomic(o.output, out);
  std::printf("%zu ticks, %zu bytes -> %s\n", s.ticks(), out.size(), o.output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sfqctl: SFQ gate calibration, optimization and sequence tools"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Run configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the configured seed");
    sub->add_option("--out", o.out, "Output directory");
  };

  auto* calibrate = app.add_subcommand("calibrate", "Find idle fluxes for the target qubit frequency");
  common(calibrate);

  auto* optimize_cmd = app.add_subcommand("optimize", "Optimize an SFQ schedule for a target gate");
  common(optimize_cmd);
  optimize_cmd->add_option("--budget", o.budget, "Number of sampled templates (search when > 1)");
  optimize_cmd->add_option("--target", o.target, "Target gate id (overrides the config)");
  optimize_cmd->add_flag("--resume", o.resume, "Continue from the checkpoint in the output directory");

  auto* sweep = app.add_subcommand("sweep-fsim", "Hold-time sweep of the coupler excursion (CSV)");
  common(sweep);

  auto* decompose = app.add_subcommand("decompose", "Build and evaluate the composite CZ or CNOT");
  common(decompose);
  decompose->add_option("--target", o.target, "cz or cnot (overrides the config)");
  decompose->add_flag("--resume", o.resume, "Continue layer optimizations from checkpoints");

  auto* evaluate = app.add_subcommand("evaluate", "Score a sequence file against a target gate");
  common(evaluate);
  evaluate->add_option("sequence", o.input, "Raw or compressed sequence file")->required();
  evaluate->add_option("--target", o.target, "Target gate id (overrides the config)");
  evaluate->add_option("--backend", o.backend, "exact or trotter");

  auto* export_cmd = app.add_subcommand("export", "Convert between raw and compressed sequence files");
  common(export_cmd);
  export_cmd->add_option("input", o.input, "Input sequence file")->required();
  export_cmd->add_option("output", o.output, "Output sequence file")->required();
  export_cmd->add_option("--format", o.format, "raw or compressed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(error_class_id(ErrorClass::InvalidArgument)).c_str(),
                 e.what());
    return 2;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(o);
    if (optimize_cmd->parsed()) return cmd_optimize(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (decompose->parsed()) return cmd_decompose(o);
    if (evaluate->parsed()) return cmd_evaluate(o);
    if (export_cmd->parsed()) return cmd_export(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(e.class_id()).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 1;
}
