#pragma once

// Truncated per-mode eigenbases, the joint simulation basis, and the logical
// frame used to read out two-qubit gates.
//
// Joint basis ordering: index = i1 * L^2 + ic * L + i2 for L levels per mode.

#include <span>
#include <vector>

#include "sfqgate/circuit.hpp"
#include "sfqgate/types.hpp"

namespace sfq {

/// Lowest eigenpairs of one mode with the phase convention
/// <psi_i| n |psi_{i+1}> = -i |...|, plus operators projected into that basis.
struct ModeBasis {
  RVector energies;  // ascending
  CMatrix vectors;   // charge basis x levels
  CMatrix n;
  CMatrix n2;  // projection of n^2, not n * n
  CMatrix cos;
  CMatrix sin;

  int levels() const { return static_cast<int>(energies.size()); }
};

ModeBasis diagonalize_mode(const CMatrix& h, int levels, const ChargeBasisOperators& ops);

struct SpectralBasis {
  CircuitParams params;
  ChargingMatrix ec;
  int levels = 5;
  int n_max = 50;
  FluxVector reference_flux{};
  std::array<ModeBasis, 3> modes;

  int dimension() const { return levels * levels * levels; }
  const ModeBasis& mode(Mode m) const { return modes[index(m)]; }

  /// Single-mode Hamiltonian at `flux`, expressed in the fixed reference basis.
  CMatrix mode_hamiltonian(Mode m, double flux) const;
  /// d/dflux of `mode_hamiltonian`.
  CMatrix mode_hamiltonian_flux_derivative(Mode m, double flux) const;
};

inline constexpr int kDefaultLevels = 5;
inline constexpr int kDefaultNMax = 50;

SpectralBasis build_spectral_basis(const CircuitParams& params, const FluxVector& reference_flux,
                                   int levels = kDefaultLevels, int n_max = kDefaultNMax);

/// Joint-basis index of the bare product state |q1, c, q2>.
constexpr int bare_index(int q1, int c, int q2, int levels) {
  return (q1 * levels + c) * levels + q2;
}

/// Embed a single-mode operator into the joint space.
CMatrix embed(const CMatrix& op, Mode m, int levels);

/// 8 * sum_{k<l} EC_kl n_k n_l (flux independent).
CMatrix coupling_hamiltonian(const SpectralBasis& basis);

/// Drive-free joint Hamiltonian at `fluxes`, built in the fixed reference basis.
CMatrix joint_hamiltonian(const SpectralBasis& basis, const FluxVector& fluxes);

/// Joint Hamiltonian in a basis freshly diagonalized at `fluxes`.
CMatrix rediagonalized_joint_hamiltonian(const CircuitParams& params, const FluxVector& fluxes,
                                         int levels = kDefaultLevels, int n_max = kDefaultNMax);

/// `n_ramp + 1` equally spaced coupler fluxes from `off` to `on` inclusive.
std::vector<double> ramp_flux_levels(double off, double on, int n_ramp);

/// Joint Hamiltonians and exact clock-period propagators for a set of coupler
/// fluxes, with the qubit fluxes held at the basis reference point.
struct FluxOperatorTable {
  std::vector<double> coupler_flux;
  std::vector<CMatrix> hamiltonians;
  std::vector<CMatrix> propagators;
  double clock_period = 0.0;

  std::size_t size() const { return coupler_flux.size(); }
};

FluxOperatorTable flux_operator_table(const SpectralBasis& basis,
                                      std::span<const double> coupler_flux, double clock_period);

/// exp(-i H t) for Hermitian H.
CMatrix hermitian_propagator(const CMatrix& h, double t);

/// Symmetric orthogonalization W S^{-1/2} of the columns of W.
CMatrix lowdin_orthogonalize(const CMatrix& vectors);

struct LogicalFrame {
  CMatrix states;            // dimension x 4; columns |00>, |01>, |10>, |11>
  Eigen::Vector4d energies;  // idle energies <L|H|L>, rad/ns
  double pair_splitting = 0.0;
  bool lowdin_applied = false;
  int eleven_level = -1;

  /// P: dimension 4 x joint dimension.
  CMatrix projector() const { return states.adjoint(); }
};

struct FrameSettings {
  double degeneracy_threshold = angular_ghz(1e-3);
};

LogicalFrame build_logical_frame(const CMatrix& h_idle, int levels, const FrameSettings& settings = {});

}  // namespace sfq
