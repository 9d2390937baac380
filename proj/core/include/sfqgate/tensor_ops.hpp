#pragma once

// In-place application of single-mode operators to blocks of joint-space
// column vectors (dimension L^3 x m).

#include "sfqgate/types.hpp"

namespace sfq {

/// states <- (op acting on mode m) * states
void apply_mode_operator(CMatrix& states, const CMatrix& op, Mode m, int levels);

/// states <- diag(d) * states
void apply_diagonal(CMatrix& states, const CVector& d);

}  // namespace sfq
