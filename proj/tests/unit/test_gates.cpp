#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"

namespace sfq {
namespace {

Matrix2c pauli_x() { return (Matrix2c() << 0, 1, 1, 0).finished(); }
Matrix2c pauli_y() { return (Matrix2c() << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
Matrix2c pauli_z() { return (Matrix2c() << 1, 0, 0, -1).finished(); }

TEST(Gates, RotationsMatchExponentials) {
  for (double a : {0.0, 0.3, kPi / 2, -1.7}) {
    EXPECT_TRUE(rx(a).isApprox((Complex(0, -a / 2) * pauli_x()).exp(), 1e-14));
    EXPECT_TRUE(ry(a).isApprox((Complex(0, -a / 2) * pauli_y()).exp(), 1e-14));
    Matrix2c oracle = (Complex(0, -a / 2) * pauli_z()).exp();
    EXPECT_LT((rz(a) - oracle).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Gates, KronOrdering) {
  const Matrix4c xi = kron(pauli_x(), Matrix2c::Identity());
  // X on qubit 1 maps |00> to |10>.
  EXPECT_EQ(xi(2, 0), Complex(1, 0));
  const Matrix4c ix = kron(Matrix2c::Identity(), pauli_x());
  EXPECT_EQ(ix(1, 0), Complex(1, 0));
}

TEST(Gates, TwoQubitGates) {
  EXPECT_EQ(cz()(3, 3), Complex(-1, 0));
  EXPECT_TRUE(cz().isApprox(cz().adjoint()));
  EXPECT_EQ(cnot()(3, 2), Complex(1, 0));
  EXPECT_EQ(cnot()(2, 3), Complex(1, 0));
  const Matrix4c h2 = kron(Matrix2c::Identity(), hadamard());
  EXPECT_TRUE(cnot().isApprox(h2 * cz() * h2, 1e-14));
  EXPECT_EQ(iswap()(1, 2), Complex(0, 1));
  EXPECT_TRUE(is_unitary(iswap()));
}

TEST(Gates, TargetIds) {
  EXPECT_TRUE(target_gate("identity").isIdentity());
  EXPECT_TRUE(target_gate("cz").isApprox(cz()));
  EXPECT_TRUE(target_gate("x90_q1").isApprox(kron(rx(kPi / 2), Matrix2c::Identity())));
  EXPECT_TRUE(target_gate("x180_q2").isApprox(kron(Matrix2c::Identity(), rx(kPi))));
  EXPECT_TRUE(target_gate("rx_q1:pi/4").isApprox(kron(rx(kPi / 4), Matrix2c::Identity())));
  EXPECT_TRUE(target_gate("rx_q2:0.5").isApprox(kron(Matrix2c::Identity(), rx(0.5))));
  const Matrix4c s = target_gate("sqrt_iswap");
  EXPECT_TRUE((s * s).isApprox(iswap(), 1e-14));
  EXPECT_TRUE(is_two_qubit_target("cz"));
  EXPECT_TRUE(is_two_qubit_target("cnot"));
  EXPECT_FALSE(is_two_qubit_target("x90_q1"));
  EXPECT_THROW(target_gate("toffoli"), Error);
  EXPECT_THROW(target_gate("rx_q1:"), Error);
}

TEST(Gates, IsUnitary) {
  EXPECT_TRUE(is_unitary(CMatrix::Identity(3, 3)));
  EXPECT_FALSE(is_unitary(CMatrix::Identity(3, 3) * 1.1));
  EXPECT_FALSE(is_unitary(CMatrix::Identity(3, 4)));
}

}  // namespace
}  // namespace sfq
