#pragma once

// CZ / CNOT from two fSim-type gates and three layers of single-qubit gates.
//
// Circuit, in time order:
//   Rx(xi) x Rx(eta), Gamma(theta, phi), Rx(-2 alpha) x I, Gamma(-theta, phi),
//   Rx(xi) x Rx(-eta)
// with Rx(a) = exp(-i a X / 2). The result equals CZ up to a global phase and
// identical Z rotations on both qubits.

#include <array>
#include <optional>
#include <vector>

#include "sfqgate/fidelity.hpp"
#include "sfqgate/propagator.hpp"
#include "sfqgate/schedule.hpp"

namespace sfq {

/// exp(-i theta (XX + YY) / 2) exp(-i phi ZZ / 4)
Matrix4c gamma_gate(double theta, double phi);

struct DecompositionAngles {
  double xi = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
};

/// |sin theta| <= sin(pi/4) <= |sin(phi/2)|  or  |sin(phi/2)| <= sin(pi/4) <= |sin theta|
bool decomposition_valid(double theta, double phi);

/// (1/2 - sin^2(phi/2)) / (sin^2 theta - sin^2(phi/2)); NaN when the denominator vanishes.
double alpha_argument(double theta, double phi);

DecompositionAngles decomposition_angles(double theta, double phi);

Matrix4c assemble_cz(double theta, double phi, const DecompositionAngles& angles);

/// (Rz(zeta) x Rz(zeta)) CZ
Matrix4c z_dressed_cz(double zeta);

struct CzClassDistance {
  double distance = 0.0;  // min over zeta and global phase of the Frobenius distance
  double zeta = 0.0;
  double global_phase = 0.0;
};
CzClassDistance distance_to_cz_class(const Matrix4c& u);

struct FsimParams {
  double theta = 0.0;
  double phi = 0.0;
  double single_z = 0.0;
  double global_phase = 0.0;
  double residual = 0.0;  // ||U_fit - M||_F
};

/// e^{i g} (Rz(zeta) x Rz(zeta)) Gamma(theta, phi)
Matrix4c fsim_matrix(const FsimParams& p);

/// Fits M ~ e^{i g} (Rz(zeta) x Rz(zeta)) Gamma(theta, phi). theta is returned
/// in [-pi/2, pi/2] (the model is invariant under theta -> theta + pi with a
/// compensating phase), phi in (-pi, pi].
FsimParams extract_fsim(const Matrix4c& m, double max_leakage = 1e-2);

/// Highest average gate fidelity of M against the fSim class, refined from
/// the direct extraction.
double best_fsim_fidelity(const Matrix4c& m, FsimParams* fit = nullptr);

struct FsimSweepRow {
  double hold = 0.0;      // ns
  double duration = 0.0;  // ns, hold + 2 ramp_steps step_duration
  double infidelity = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double leakage = 0.0;
};

/// Excursion-only discrete schedule: one excursion covering the whole gate.
ControlSchedule fsim_schedule(double hold, int ramp_steps, double step_duration, double flux_off,
                              double flux_on, double kick_angle = kPi / 100.0);

/// Simulates each hold time and fits the fSim class. Holds are rounded to
/// the step grid.
std::vector<FsimSweepRow> hold_time_sweep(const Simulator& sim, const std::vector<double>& holds,
                                          int ramp_steps, double step_duration, double flux_off,
                                          double flux_on, unsigned workers = 1);

struct FsimCalibration {
  double hold = 0.0;
  ControlSchedule schedule;  // excursion-only
  Matrix4c logical;          // frame-corrected logical matrix of `schedule`
  FsimParams params;
};

FsimCalibration calibrate_fsim(const Simulator& sim, double hold, int ramp_steps,
                               double step_duration, double flux_off, double flux_on);

enum class CompositeTarget { CZ, CNOT };

/// Targets for the three single-qubit layers, expressed in each layer's own
/// frame (layer starting at t = 0), so that
/// layer3 . fsim . layer2 . fsim . layer1 reproduces the target in the frame
/// of the whole sequence. Measured Z phases of the fSim, the virtual Z that
/// turns Gamma(theta) into Gamma(-theta), and for CNOT the target-qubit
/// Hadamards are folded into the layers.
std::array<Matrix4c, 3> composite_layer_targets(CompositeTarget target, const FsimParams& fsim,
                                                double fsim_duration,
                                                const std::array<double, 3>& layer_durations,
                                                const Eigen::Vector4d& frame_energies);

/// Product of analytic sub-gates in time order (layer1, fsim, layer2, fsim, layer3),
/// with the same frame bookkeeping as the simulated composite.
Matrix4c compose_ideal(const std::array<Matrix4c, 3>& layers, const Matrix4c& fsim,
                       double fsim_duration, const std::array<double, 3>& layer_durations,
                       const Eigen::Vector4d& frame_energies);

/// Layer schedules followed by excursions, concatenated in time order.
ControlSchedule concatenate(const std::vector<ControlSchedule>& parts);

struct CompositeGate {
  ControlSchedule schedule;
  GateReport report;
};

/// Concatenates layer1, fSim, layer2, fSim, layer3 and evaluates the result in
/// discrete mode with the exact-segment backend.
CompositeGate build_composite_gate(CompositeTarget target, const std::optional<FsimCalibration>& fsim,
                                   const std::vector<ControlSchedule>& layers,
                                   const Simulator& sim);

Matrix4c composite_target_matrix(CompositeTarget target);

}  // namespace sfq
