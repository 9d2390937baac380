#include <gtest/gtest.h>

#include "sfqgate/lbfgsb.hpp"

namespace sfq {
namespace {

TEST(Lbfgsb, BoundedQuadraticHitsTheClampedMinimum) {
  // f = sum (x_i - c_i)^2 on [0, 1]^n: the minimizer is clamp(c, 0, 1).
  RVector c(5);
  c << -0.5, 0.2, 0.7, 1.5, 0.0;
  const Objective f = [&](const RVector& x, RVector& g) {
    g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  LbfgsbSettings s;
  s.max_iterations = 100;
  const auto r = minimize_bounded(f, RVector::Constant(5, 0.5), RVector::Zero(5),
                                  RVector::Ones(5), s);
  RVector expected = c.cwiseMax(0.0).cwiseMin(1.0);
  EXPECT_LT((r.x - expected).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(r.status, LbfgsbStatus::Converged);
}

TEST(Lbfgsb, CoupledQuadraticWithActiveBound) {
  // f = 1/2 x^T A x - b^T x with A = [[2, 1], [1, 2]], b = (3, 3) and x_1 <= 0.5.
  // KKT: x_1 = 0.5 and 2 x_2 + 0.5 = 3, so x_2 = 1.25.
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  const Eigen::Vector2d b(3, 3);
  const Objective f = [&](const RVector& x, RVector& g) {
    g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  LbfgsbSettings s;
  s.max_iterations = 100;
  const auto r = minimize_bounded(f, RVector::Zero(2), RVector::Constant(2, -10.0),
                                  Eigen::Vector2d(0.5, 10.0), s);
  EXPECT_NEAR(r.x(0), 0.5, 1e-8);
  EXPECT_NEAR(r.x(1), 1.25, 1e-8);
}

TEST(Lbfgsb, Rosenbrock) {
  const Objective f = [](const RVector& x, RVector& g) {
    const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
    g.resize(2);
    g(0) = -2.0 * a - 400.0 * x(0) * b;
    g(1) = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  LbfgsbSettings s;
  s.max_iterations = 500;
  const auto r = minimize_bounded(f, Eigen::Vector2d(-1.2, 1.0), RVector::Constant(2, -5.0),
                                  RVector::Constant(2, 5.0), s);
  EXPECT_NEAR(r.x(0), 1.0, 1e-5);
  EXPECT_NEAR(r.x(1), 1.0, 1e-5);
}

TEST(Lbfgsb, HistoryIsMonotoneAndIterationsCapped) {
  const Objective f = [](const RVector& x, RVector& g) {
    g = 4.0 * x.array().cube().matrix() + 2.0 * x;
    return x.array().pow(4).sum() + x.squaredNorm();
  };
  LbfgsbSettings s;
  s.max_iterations = 3;
  const auto r = minimize_bounded(f, RVector::Constant(4, 2.0), RVector::Constant(4, -3.0),
                                  RVector::Constant(4, 3.0), s);
  EXPECT_LE(r.iterations, 3);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
}

TEST(Lbfgsb, StartOutsideBoxIsProjected) {
  const Objective f = [](const RVector& x, RVector& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const auto r = minimize_bounded(f, RVector::Constant(2, 5.0), RVector::Constant(2, 1.0),
                                  RVector::Constant(2, 2.0));
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
}

}  // namespace
}  // namespace sfq
