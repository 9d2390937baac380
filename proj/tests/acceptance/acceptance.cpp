#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sfqgate/calibration.hpp"
#include "sfqgate/checkpoint.hpp"
#include "sfqgate/decomposition.hpp"
#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"
#include "sfqgate/optimizer.hpp"
#include "sfqgate/relaxation.hpp"
#include "sfqgate/sequence_io.hpp"
#include "test_support.hpp"

namespace {

using namespace sfq;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string out_dir;
  std::uint64_t seed = 0;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Closed form: a CZ-class matrix is e^{ig} diag(e^{-iz}, 1, 1, -e^{iz}).
double cz_class_residual(const Matrix4c& u) {
  const Complex g = u(1, 1) / std::abs(u(1, 1));
  const Complex e = u(0, 0) / u(1, 1);
  const Complex ez = std::conj(e / std::abs(e));
  Matrix4c fit = Matrix4c::Zero();
  fit(0, 0) = g * std::conj(ez);
  fit(1, 1) = g;
  fit(2, 2) = g;
  fit(3, 3) = -g * ez;
  return (u - fit).norm();
}

Outcome decomposition_identity(const Context&) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ut(-kPi / 2, kPi / 2), up(-kPi, kPi);
  double worst = 0.0, worst_lib = 0.0;
  int count = 0;
  while (count < 100) {
    const double theta = ut(rng), phi = up(rng);
    if (!decomposition_valid(theta, phi)) continue;
    const Matrix4c u = assemble_cz(theta, phi, decomposition_angles(theta, phi));
    worst = std::max(worst, cz_class_residual(u));
    worst_lib = std::max(worst_lib, distance_to_cz_class(u).distance);
    ++count;
  }
  return {worst < 1e-10 && worst_lib < 1e-10,
          fmt("100 valid points, max residual %.2e (closed form), %.2e (library)", worst, worst_lib)};
}

Outcome gradient_exactness(const Context&) {
  const Simulator& sim = test::reference_simulator();
  ScheduleTemplate t;
  t.duration = 5.0;
  t.n_ramp = 8;
  t.excursion_count = 2;
  RelaxedParams p(t.ticks(), 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(0.05, 0.95);
  for (std::size_t i = 0; i < p.amplitude_count(); ++i) p.theta(i) = amp(rng);
  p.theta(p.start_index(0)) = 0.4137;
  p.theta(p.end_index(0)) = 2.1234;
  p.theta(p.start_index(1)) = 2.6571;
  p.theta(p.end_index(1)) = 4.6022;

  std::vector<Eigen::Index> coords;
  std::uniform_int_distribution<Eigen::Index> pick(0, static_cast<Eigen::Index>(p.amplitude_count()) - 1);
  while (coords.size() < 20) {
    const Eigen::Index c = pick(rng);
    if (std::find(coords.begin(), coords.end(), c) == coords.end()) coords.push_back(c);
  }
  for (int e = 0; e < 2; ++e) {
    coords.push_back(p.start_index(e));
    coords.push_back(p.end_index(e));
  }

  RelaxedEvaluator ev(sim, cz(), t);
  const double h = 1e-6;
  bool pass = true;
  std::ostringstream detail;
  for (auto [gamma, mu] : {std::pair{0.0, 0.0}, std::pair{1e-3, 1e-2}}) {
    const RVector g = ev.gradient(p, gamma, mu);
    double worst = 0.0, smallest = 1e300;
    Eigen::Index worst_at = -1;
    for (Eigen::Index i : coords) {
      auto up = p, dn = p;
      up.theta(i) += h;
      dn.theta(i) -= h;
      const double fd = (ev.cost(up, gamma, mu) - ev.cost(dn, gamma, mu)) / (2 * h);
      const double rel = std::abs(g(i) - fd) / std::abs(fd);
      smallest = std::min(smallest, std::abs(fd));
      if (rel > worst) {
        worst = rel;
        worst_at = i;
      }
    }
    pass = pass && worst < 1e-5;
    // Same coordinates with a wider step, as a diagnostic of the step-1e-6 round-off floor.
    double worst_wide = 0.0;
    for (Eigen::Index i : coords) {
      const double hw = 1e-4;
      auto up = p, dn = p;
      up.theta(i) += hw;
      dn.theta(i) -= hw;
      const double fd = (ev.cost(up, gamma, mu) - ev.cost(dn, gamma, mu)) / (2 * hw);
      worst_wide = std::max(worst_wide, std::abs(g(i) - fd) / std::abs(fd));
    }
    detail << fmt("(gamma, mu) = (%g, %g): max rel err %.2e at coord %ld (|grad| %.1e), "
                  "min |grad| %.1e, step 1e-4 max rel err %.2e; ",
                  gamma, mu, worst, static_cast<long>(worst_at), std::abs(g(worst_at)), smallest,
                  worst_wide);
  }
  return {pass, detail.str()};
}

Outcome trotter_order(const Context&) {
  const Simulator& sim = test::reference_simulator();
  ControlSchedule s = ControlSchedule::idle(5.0, 20.0, kPi / 100.0);
  s.n_ramp = 16;
  s.excursions = {{0.5, 4.5}};
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.3);
  for (auto& a : s.amplitudes_q1) a = coin(rng) ? 1.0 : 0.0;
  for (auto& a : s.amplitudes_q2) a = coin(rng) ? 1.0 : 0.0;
  const CMatrix& psi0 = sim.frame().states;
  const CMatrix exact = propagate_states(s, sim, psi0, Backend::ExactSegment);
  std::vector<double> errors;
  for (double dt : {0.01, 0.005, 0.0025, 0.00125}) {
    const CMatrix u = propagate_states(s, sim, psi0, Backend::Trotter4, nullptr, {dt});
    errors.push_back((u - exact).cwiseAbs().maxCoeff());
  }
  bool pass = true;
  std::ostringstream detail;
  detail << "errors";
  for (double e : errors) detail << fmt(" %.3e", e);
  detail << "; ratios";
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double r = errors[i] / errors[i + 1];
    pass = pass && r >= 12.0 && r <= 20.0;
    detail << fmt(" %.2f", r);
  }
  return {pass, detail.str()};
}

Outcome basis_cross_validation(const Context&) {
  const Simulator& sim = test::reference_simulator();
  const CircuitParams& params = sim.device().params();
  double worst = 0.0, worst_low = 0.0, worst_flux = 0.0;
  for (double f : ramp_flux_levels(0.352, 0.376, 64)) {
    FluxVector flux = sim.basis().reference_flux;
    flux[1] = f;
    Eigen::SelfAdjointEigenSolver<CMatrix> fixed(joint_hamiltonian(sim.basis(), flux),
                                                 Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<CMatrix> fresh(
        rediagonalized_joint_hamiltonian(params, flux, sim.levels(), sim.basis().n_max),
        Eigen::EigenvaluesOnly);
    const RVector a = fixed.eigenvalues(), b = fresh.eigenvalues();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double rel = std::abs(a(i) - b(i)) / std::abs(b(i));
      if (rel > worst) {
        worst = rel;
        worst_flux = f;
      }
      if (i < 8) worst_low = std::max(worst_low, rel);
    }
  }
  return {worst < 1e-6,
          fmt("65 flux levels, max relative deviation %.2e (at coupler flux %.5f); lowest 8 levels %.2e",
              worst, worst_flux, worst_low)};
}

Outcome calibration_reproduction(const Context&) {
  const CircuitParams p;
  const double target = angular_ghz(5.0);
  const CalibrationResult r = calibrate_idle(p, target, {0.125, 0.350, 0.135});
  const FluxVector expected{0.130, 0.352, 0.130};
  double flux_err = 0.0;
  for (int i = 0; i < 3; ++i) flux_err = std::max(flux_err, std::abs(r.phi_off[i] - expected[i]));
  const double f_err = std::max(std::abs(r.omega1 - target), std::abs(r.omega2 - target));
  return {flux_err <= 0.005 && f_err <= angular_ghz(1e-5),
          fmt("phi_off = [%.5f, %.5f, %.5f], max flux deviation %.4f, frequency error %.3f kHz",
              r.phi_off[0], r.phi_off[1], r.phi_off[2], flux_err, f_err / kTwoPi * 1e6)};
}

Outcome fsim_sweep(const Context& ctx) {
  const Simulator& sim = test::reference_simulator();
  std::vector<double> holds;
  for (int i = 0; i <= 250; ++i) holds.push_back(5.0 + 0.1 * i);
  const auto rows = hold_time_sweep(sim, holds, 64, 0.05, 0.352, 0.376, workers());
  if (!ctx.out_dir.empty()) write_file_atomic(ctx.out_dir + "/fsim_sweep.csv", sweep_csv(rows));
  const FsimSweepRow* best = nullptr;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.hold < 15.0 - 1e-9 || r.hold > 19.0 + 1e-9) continue;
    if (r.infidelity > rows[i - 1].infidelity || r.infidelity > rows[i + 1].infidelity) continue;
    if (!best || r.infidelity < best->infidelity) best = &r;
  }
  if (!best) return {false, "no local minimum of the infidelity in hold 17 +- 2 ns"};
  const double dtheta = std::abs(std::abs(best->theta) - kPi / 4);
  return {best->infidelity <= 5e-4 && dtheta <= 0.15,
          fmt("local minimum at hold %.1f ns: infidelity %.2e, theta %.4f (|theta| - pi/4 = %.3f), "
              "phi %.4f",
              best->hold, best->infidelity, best->theta, std::abs(best->theta) - kPi / 4, best->phi)};
}

// Runs (or resumes) an optimization, checkpointing each stage when an output
// directory is given.
OptimizationRun run_optimization(OptimizationRun run, const Context& ctx, const std::string& name,
                                 const OptimizerSettings& settings = {}) {
  const Simulator& sim = test::reference_simulator();
  std::string path;
  if (!ctx.out_dir.empty()) {
    path = ctx.out_dir + "/" + name + ".checkpoint.json";
    if (std::filesystem::exists(path)) {
      OptimizationRun saved = load_checkpoint(path);
      if (saved.schedule_template == run.schedule_template && saved.penalty == run.penalty &&
          saved.seed == run.seed && saved.target.isApprox(run.target))
        run = saved;
    }
  }
  const auto start = std::chrono::steady_clock::now();
  run = optimize(run, sim, settings, [&](const OptimizationRun& r) {
    if (!path.empty()) save_checkpoint(path, r);
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "  %s: stage %d/%d cost %.6e (%.0f s)\n", name.c_str(), r.completed_stages,
                 r.penalty.stages, r.cost_trajectory.empty() ? 0.0 : r.cost_trajectory.back(), s);
  });
  if (!path.empty()) save_checkpoint(path, run);
  return run;
}

// Schedule for the optimization criteria: 150 stages x 20 updates with factor
// 1.1 as in PenaltyConfig, started from gamma = 1e-6 and mu = 1e-4.
PenaltyConfig optimization_penalty() {
  PenaltyConfig p;
  p.gamma = 1e-6;
  p.mu = 1e-4;
  return p;
}

GateReport canonical_report(const ControlSchedule& s, const Matrix4c& target) {
  const Simulator& sim = test::reference_simulator();
  const ControlSchedule c = canonical_schedule(s);
  const CMatrix psi = propagate_states(c, sim, sim.frame().states, Backend::ExactSegment);
  return gate_report_from_states(psi, target, sim.frame(), c.duration, true);
}

Outcome single_qubit_optimization(const Context& ctx) {
  ScheduleTemplate t;
  t.clock_freq = 20.0;
  t.kick_angle = kPi / 100.0;
  t.duration = 15.0;
  t.excursion_count = 0;
  const PenaltyConfig pen = optimization_penalty();
  OptimizationRun run = run_optimization(make_run("x90_q1", t, pen, ctx.seed), ctx, "x90_q1");
  if (run.aborted) return {false, "optimization aborted: " + run.log.back()};
  const GateReport r = canonical_report(run.rounded, run.target);
  return {r.fidelity > 0.999,
          fmt("X90 on qubit 1, 15 ns @ 20 GHz, %d updates: relaxed F %.6f, discrete Z-compensated F "
              "%.6f, leakage %.1e",
              static_cast<int>(run.cost_trajectory.size()), run.relaxed_fidelity, r.fidelity,
              r.leakage)};
}

Outcome two_qubit_optimization(const Context& ctx) {
  ScheduleTemplate t;
  t.clock_freq = 20.0;
  t.kick_angle = kPi / 100.0;
  t.duration = 70.0;
  t.n_ramp = 64;
  t.excursion_count = 2;
  const PenaltyConfig pen = optimization_penalty();
  OptimizationRun run = run_optimization(make_run("cz", t, pen, ctx.seed), ctx, "cz_70ns");
  if (run.aborted) return {false, "optimization aborted: " + run.log.back()};
  const GateReport r = canonical_report(run.rounded, run.target);
  return {r.fidelity > 0.999,
          fmt("CZ, 70 ns @ 20 GHz, 2 excursions: relaxed F %.6f, discrete Z-compensated F %.6f, "
              "leakage %.1e",
              run.relaxed_fidelity, r.fidelity, r.leakage)};
}

Outcome composite_gate(const Context& ctx) {
  const Simulator& sim = test::reference_simulator();
  std::vector<double> holds;
  for (int i = 0; i <= 40; ++i) holds.push_back(15.0 + 0.1 * i);
  const auto rows = hold_time_sweep(sim, holds, 64, 0.05, 0.352, 0.376, workers());
  const FsimSweepRow* best = nullptr;
  for (const auto& r : rows)
    if (decomposition_valid(r.theta, r.phi) && (!best || r.infidelity < best->infidelity)) best = &r;
  if (!best) return {false, "no fSim point with a valid decomposition in hold 15..19 ns"};

  FsimCalibration fsim = calibrate_fsim(sim, best->hold, 64, 0.05, 0.352, 0.376);
  fsim.schedule = canonical_schedule(fsim.schedule);
  const std::array<double, 3> durations{25.0, 25.0, 25.0};
  const auto targets = composite_layer_targets(CompositeTarget::CZ, fsim.params,
                                               fsim.schedule.duration, durations,
                                               sim.frame().energies);
  std::vector<ControlSchedule> layers;
  std::ostringstream detail;
  for (int i = 0; i < 3; ++i) {
    ScheduleTemplate t;
    t.duration = durations[i];
    t.excursion_count = 0;
    // Only the last layer's output Z rotations are absorbed by the composite report.
    OptimizerSettings settings;
    settings.relaxation.z_compensate = i == 2;
    OptimizationRun run =
        run_optimization(make_run(targets[i], t, optimization_penalty(), ctx.seed + i), ctx,
                         "composite_layer" + std::to_string(i + 1), settings);
    if (run.aborted) return {false, "layer optimization aborted: " + run.log.back()};
    layers.push_back(canonical_schedule(run.rounded));
    detail << fmt("layer %d F %.5f; ", i + 1, run.report.fidelity);
  }
  const CompositeGate gate = build_composite_gate(CompositeTarget::CZ, fsim, layers, sim);
  const Bytes z = compress_sequence(gate.schedule, 5.0);
  const auto bits = compressed_payload_bits(z);
  if (!ctx.out_dir.empty()) {
    write_file_atomic(ctx.out_dir + "/composite_cz.sfqz", z);
    write_file_atomic(ctx.out_dir + "/composite_cz.sfq", write_sequence(gate.schedule));
  }
  const bool pass = gate.report.fidelity >= 0.99 && bits[0] < 200 && bits[1] < 200;
  detail << fmt("fSim hold %.1f ns (theta %.4f, phi %.4f, infidelity %.1e); composite %.1f ns: "
                "F %.5f, leakage %.1e; compressed payload %u / %u bits",
                fsim.hold, fsim.params.theta, fsim.params.phi, best->infidelity,
                gate.schedule.duration, gate.report.fidelity, gate.report.leakage, bits[0], bits[1]);
  return {pass, detail.str()};
}

ControlSchedule random_schedule(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ticks(1, 800), ramp(1, 16), coin(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ControlSchedule s;
  const bool fast = coin(rng) == 1;
  s.clock_freq = fast ? 40.0 : 20.0;
  s.kick_angle = fast ? kPi / 200.0 : kPi / 100.0;
  const int n = ticks(rng);
  s.duration = n / s.clock_freq;
  s.n_ramp = ramp(rng);
  std::bernoulli_distribution bit(u(rng));
  for (int j = 0; j < n; ++j) {
    s.amplitudes_q1.push_back(bit(rng) ? 1.0 : 0.0);
    s.amplitudes_q2.push_back(bit(rng) ? 1.0 : 0.0);
  }
  int cursor = 0;
  while (cursor + 2 * s.n_ramp <= n && u(rng) < 0.6) {
    std::uniform_int_distribution<int> start(cursor, n - 2 * s.n_ramp);
    const int a = start(rng);
    std::uniform_int_distribution<int> end(a + 2 * s.n_ramp, n);
    const int b = end(rng);
    s.excursions.push_back({a / s.clock_freq, b / s.clock_freq});
    cursor = b;
  }
  return s;
}

Outcome serialization(const Context&) {
  std::mt19937_64 rng(10);
  int raw_fail = 0, z_fail = 0;
  for (int i = 0; i < 1000; ++i) {
    const ControlSchedule s = canonical_schedule(random_schedule(rng));
    if (!(read_sequence(write_sequence(s)) == s)) ++raw_fail;
    if (!(decompress_sequence(compress_sequence(s, 5.0)) == s)) ++z_fail;
  }
  const ControlSchedule s = ControlSchedule::idle(80.0, 40.0, kPi / 200.0);
  const std::size_t header = 4 + 2 + 8 + 8 + 4 + 4 + 4 + 2 + 2;
  const std::size_t per_qubit = (write_sequence(s).size() - header) / 2;
  return {raw_fail == 0 && z_fail == 0 && per_qubit == 400,
          fmt("1000 cases: %d raw and %d compressed mismatches; 80 ns @ 40 GHz payload %zu bytes per "
              "qubit",
              raw_fail, z_fail, per_qubit)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for sfqgate"};
  std::vector<int> selected;
  Context ctx;
  app.add_option("--criteria", selected, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--out", ctx.out_dir, "Directory for artifacts and optimizer checkpoints");
  app.add_option("--seed", ctx.seed, "Seed for optimizer runs");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Outcome(const Context&)>> criteria{
      {1, decomposition_identity},   {2, gradient_exactness},        {3, trotter_order},
      {4, basis_cross_validation},   {5, calibration_reproduction}, {6, fsim_sweep},
      {7, single_qubit_optimization}, {8, two_qubit_optimization},   {9, composite_gate},
      {10, serialization}};
  if (selected.empty())
    for (const auto& [n, f] : criteria) selected.push_back(n);
  if (!ctx.out_dir.empty()) std::filesystem::create_directories(ctx.out_dir);

  int failures = 0;
  for (int n : selected) {
    const auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::printf("criterion %d: FAIL unknown criterion\n", n);
      ++failures;
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second(ctx);
    } catch (const Error& e) {
      o = {false, std::string("error: ") + std::string(e.class_id()) + ": " + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s %s (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
