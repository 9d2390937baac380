#pragma once

#include <vector>

#include "sfqgate/basis.hpp"
#include "sfqgate/circuit.hpp"

namespace sfq {

struct CalibrationSettings {
  int levels = kDefaultLevels;
  int n_max = kDefaultNMax;
  /// Objective threshold in (rad/ns)^2; default (2 pi x 10 kHz)^2.
  double tolerance = angular_ghz(1e-5) * angular_ghz(1e-5);
  int max_iterations = 4000;
  double initial_step = 0.005;
  int restarts = 4;
};

struct CalibrationResult {
  FluxVector phi_off{};
  FluxVector phi_on{};
  double omega1 = 0.0;  // first excited energy above ground, rad/ns
  double omega2 = 0.0;  // second excited energy above ground, rad/ns
  double splitting = 0.0;
  double zz_idle = 0.0;
  double objective = 0.0;
  int evaluations = 0;
};

/// (E1 - E2)^2 + (E1 - target)^2 + (E2 - target)^2 with E measured from the
/// ground state of the drive-free joint Hamiltonian at `fluxes`.
double calibration_objective(const CircuitParams& params, const FluxVector& fluxes, double target,
                             int levels = kDefaultLevels, int n_max = kDefaultNMax);

/// Simplex search over the three idle fluxes. Throws CalibrationError when the
/// objective stays above tolerance.
CalibrationResult calibrate_idle(const CircuitParams& params, double target,
                                 const FluxVector& initial_guess,
                                 const CalibrationSettings& settings = {});

/// E11 - E10 - E01 + E00 from the frame's idle energies.
double zz_rate(const LogicalFrame& frame);

/// Same, with the idle energies re-evaluated against `h_idle`.
double zz_rate(const CMatrix& h_idle, const LogicalFrame& frame);

struct SplittingPoint {
  double coupler_flux = 0.0;
  double splitting = 0.0;  // E2 - E1, rad/ns
};

/// 01/10 splitting of the joint spectrum versus coupler flux, qubits held at
/// `idle`. Used to locate an on point.
std::vector<SplittingPoint> coupler_splitting_scan(const CircuitParams& params,
                                                   const FluxVector& idle,
                                                   const std::vector<double>& coupler_flux,
                                                   int levels = kDefaultLevels,
                                                   int n_max = kDefaultNMax);

}  // namespace sfq
