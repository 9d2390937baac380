#include "sfqgate/tensor_ops.hpp"

namespace sfq {

void apply_mode_operator(CMatrix& states, const CMatrix& op, Mode m, int levels) {
  const Eigen::Index l = levels;
  const Eigen::Index l2 = l * l;
  const CMatrix op_t = op.transpose();
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    Complex* col = states.col(c).data();
    switch (m) {
      case Mode::Qubit2: {
        // rows: i2, cols: (i1, ic)
        Eigen::Map<CMatrix> x(col, l, l2);
        x = op * x;
        break;
      }
      case Mode::Qubit1: {
        // rows: (ic, i2), cols: i1
        Eigen::Map<CMatrix> x(col, l2, l);
        x = x * op_t;
        break;
      }
      case Mode::Coupler: {
        for (Eigen::Index i1 = 0; i1 < l; ++i1) {
          Eigen::Map<CMatrix> x(col + i1 * l2, l, l);
          x = x * op_t;
        }
        break;
      }
    }
  }
}

void apply_diagonal(CMatrix& states, const CVector& d) {
  states = d.asDiagonal() * states;
}

}  // namespace sfq
