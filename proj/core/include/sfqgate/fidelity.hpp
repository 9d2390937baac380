#pragma once

#include "sfqgate/basis.hpp"
#include "sfqgate/types.hpp"

namespace sfq {

struct GateReport {
  Matrix4c logical;  // frame-corrected projected propagator M
  double fidelity_raw = 0.0;
  double fidelity = 0.0;  // Z-compensated when requested, raw otherwise
  double phi_z1 = 0.0;
  double phi_z2 = 0.0;
  double leakage = 0.0;
  bool z_compensated = false;
  double wall_seconds = 0.0;
};

/// M = R(duration) P psi, where psi holds the propagated logical states
/// (joint dimension x 4) and R = diag(exp(+i E_j duration)).
Matrix4c logical_matrix(const CMatrix& psi, const LogicalFrame& frame, double duration);

/// (Tr(M M^dag) + |Tr(T^dag M)|^2) / 20.
double average_gate_fidelity(const Matrix4c& m, const Matrix4c& target);

/// (Rz(phi1) x Rz(phi2)) target
Matrix4c z_rotated_target(const Matrix4c& target, double phi1, double phi2);

struct ZCompensation {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double fidelity = 0.0;
};

/// Maximizes the fidelity over target -> (Rz(phi1) x Rz(phi2)) target with a
/// 64 x 64 grid followed by Newton refinement.
ZCompensation z_compensate(const Matrix4c& m, const Matrix4c& target);

/// G with dF = 2 Re Tr(G^dag dM) for F = average_gate_fidelity(M, target).
Matrix4c fidelity_gradient(const Matrix4c& m, const Matrix4c& target);

/// Gate report for a full joint-space propagator.
GateReport gate_report(const CMatrix& u, const Matrix4c& target, const LogicalFrame& frame,
                       double duration, bool z_compensate = true);

/// Gate report from propagated logical states (joint dimension x 4).
GateReport gate_report_from_states(const CMatrix& psi, const Matrix4c& target,
                                   const LogicalFrame& frame, double duration,
                                   bool z_compensate = true);

}  // namespace sfq
