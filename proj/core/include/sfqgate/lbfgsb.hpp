#pragma once

// Limited-memory quasi-Newton minimization with box bounds (projected
// L-BFGS with an active-set two-loop recursion and Armijo backtracking along
// the projected path).

#include <functional>
#include <vector>

#include "sfqgate/types.hpp"

namespace sfq {

struct LbfgsbSettings {
  int memory = 10;
  int max_iterations = 20;
  double projected_gradient_tol = 1e-10;
  double armijo = 1e-4;
  int max_backtracks = 40;
};

enum class LbfgsbStatus { Converged, MaxIterations, LineSearchFailed };

struct LbfgsbResult {
  RVector x;
  double f = 0.0;
  RVector g;
  int iterations = 0;
  int evaluations = 0;
  LbfgsbStatus status = LbfgsbStatus::MaxIterations;
  std::vector<double> history;  // objective after each accepted step
};

/// Returns f(x) and writes the gradient into g.
using Objective = std::function<double(const RVector& x, RVector& g)>;

LbfgsbResult minimize_bounded(const Objective& objective, RVector x0, const RVector& lower,
                              const RVector& upper, const LbfgsbSettings& settings = {});

}  // namespace sfq
