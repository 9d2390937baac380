#pragma once

// Standard one- and two-qubit gates. Two-qubit matrices use the logical
// ordering |00>, |01>, |10>, |11> with qubit 1 as the left (most significant) bit.

#include <string>
#include <string_view>

#include "sfqgate/types.hpp"

namespace sfq {

/// exp(-i a X / 2)
Matrix2c rx(double angle);
/// exp(-i a Y / 2)
Matrix2c ry(double angle);
/// exp(-i a Z / 2)
Matrix2c rz(double angle);
Matrix2c hadamard();

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);
Matrix4c cz();
/// Control qubit 1, target qubit 2.
Matrix4c cnot();
Matrix4c iswap();

/// Target gate ids accepted by configs and the CLI:
/// identity, cz, cnot, iswap, sqrt_iswap, x90_q1, x90_q2, x180_q1, x180_q2,
/// rx_q1:<angle>, rx_q2:<angle>.
Matrix4c target_gate(std::string_view id);
bool is_two_qubit_target(std::string_view id);

/// True when ||U^dag U - I||_F <= tol.
bool is_unitary(const CMatrix& u, double tol = 1e-8);

}  // namespace sfq
