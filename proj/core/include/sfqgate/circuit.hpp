#pragma once

// Lumped-element model of two transmons coupled through a tunable transmon.
//
// Units throughout: hbar = 1, energies in rad/ns, capacitances in fF, critical
// currents in nA, external fluxes in units of the flux quantum.

#include <array>

#include "sfqgate/types.hpp"

namespace sfq {

namespace constants {
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kHbar = 1.054571817e-34;              // J s
inline constexpr double kPlanck = 6.62607015e-34;             // J s
}  // namespace constants

/// Critical currents (nA) of the two junctions of a SQUID loop.
struct JunctionPair {
  double left_nA = 0.0;
  double right_nA = 0.0;
};

struct CircuitParams {
  // fF
  double c1 = 70.0;
  double c2 = 70.0;
  double cc = 60.0;
  double c12 = 0.25;
  double c1c = 2.0;
  double c2c = 2.0;
  double c1e = 0.0;
  double c2e = 0.0;

  std::array<JunctionPair, 3> junctions{{{7.0, 21.0}, {18.0, 36.0}, {7.0, 21.0}}};

  FluxVector phi_off{0.130, 0.352, 0.130};
  FluxVector phi_on{0.130, 0.376, 0.130};

  const JunctionPair& junction(Mode m) const { return junctions[index(m)]; }

  /// Throws InvalidCircuit when a type invariant is violated.
  void validate() const;
};

/// Charge-basis operators truncated to |n| <= n_max.
struct ChargeBasisOperators {
  int n_max = 0;
  RMatrix n_op;    // diagonal, entries -n_max..n_max
  RMatrix cos_op;  // (|n><n+1| + |n+1><n|) / 2
  CMatrix sin_op;  // (i/2)(|n><n+1| - |n+1><n|), Hermitian with imaginary antisymmetric entries

  static ChargeBasisOperators build(int n_max);
  int dimension() const { return 2 * n_max + 1; }
};

struct ChargingMatrix {
  Eigen::Matrix3d ec;  // rad/ns

  double operator()(Mode a, Mode b) const { return ec(index(a), index(b)); }
};

/// Cosine and sine coefficients of a two-junction loop:
/// H_J = -cos_coeff * cos(phi) - sin_coeff * sin(phi).
struct JosephsonCoefficients {
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// Josephson energy hbar*I_c/(2e) of one junction, in rad/ns.
double josephson_energy(double critical_current_nA);

/// Capacitance matrix in fF. Throws InvalidCircuit for a singular matrix.
Eigen::Matrix3d build_capacitance_matrix(const CircuitParams& params);

/// EC = (e^2/2) * M_C^{-1}, in rad/ns.
ChargingMatrix charging_energy(const CircuitParams& params);

/// External flux sits on the right junction:
/// -E_L cos(phi) - E_R cos(phi - 2 pi flux).
JosephsonCoefficients josephson_terms(const CircuitParams& params, Mode mode, double flux);

/// Derivative of `josephson_terms` with respect to the flux.
JosephsonCoefficients josephson_terms_flux_derivative(const CircuitParams& params, Mode mode,
                                                      double flux);

/// 4 EC_kk n^2 - a_cos cos(phi) - a_sin sin(phi) in the charge basis.
CMatrix single_mode_hamiltonian(const CircuitParams& params, Mode mode, double flux,
                                const ChargeBasisOperators& ops);

CMatrix single_mode_hamiltonian(const ChargingMatrix& ec, const CircuitParams& params, Mode mode,
                                double flux, const ChargeBasisOperators& ops);

}  // namespace sfq
