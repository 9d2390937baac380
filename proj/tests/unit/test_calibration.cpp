#include <gtest/gtest.h>

#include "sfqgate/calibration.hpp"
#include "sfqgate/error.hpp"
#include "test_support.hpp"

namespace sfq {
namespace {

const double kTarget = angular_ghz(5.0);

TEST(Calibration, ObjectiveIsSmallNearTheReferenceIdlePoint) {
  CircuitParams p;
  const double near = calibration_objective(p, p.phi_off, kTarget);
  const double far = calibration_objective(p, {0.10, 0.352, 0.16}, kTarget);
  // Within a few MHz of 5 GHz on both qubits.
  EXPECT_LT(std::sqrt(near), angular_ghz(0.01));
  EXPECT_GT(far, 100.0 * near);
}

TEST(Calibration, ObjectiveMatchesHandComputedSpectrum) {
  CircuitParams p;
  const FluxVector f{0.12, 0.35, 0.14};
  const CMatrix h = rediagonalized_joint_hamiltonian(p, f);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const double e1 = es.eigenvalues()(1) - es.eigenvalues()(0);
  const double e2 = es.eigenvalues()(2) - es.eigenvalues()(0);
  const double oracle = (e1 - e2) * (e1 - e2) + (e1 - kTarget) * (e1 - kTarget) +
                        (e2 - kTarget) * (e2 - kTarget);
  EXPECT_NEAR(calibration_objective(p, f, kTarget), oracle, 1e-12 * std::max(1.0, oracle));
}

TEST(Calibration, ConvergesFromAPerturbedGuess) {
  CircuitParams p;
  CalibrationSettings s;
  const CalibrationResult r = calibrate_idle(p, kTarget, {0.125, 0.352, 0.135}, s);
  EXPECT_LE(r.objective, s.tolerance);
  EXPECT_NEAR(r.phi_off[0], 0.130, 2e-3);
  EXPECT_NEAR(r.phi_off[1], 0.352, 2e-3);
  EXPECT_NEAR(r.phi_off[2], 0.130, 2e-3);
  EXPECT_NEAR(r.omega1, kTarget, angular_ghz(1e-4));
  EXPECT_NEAR(r.omega2, kTarget, angular_ghz(1e-4));
  EXPECT_GT(r.evaluations, 0);
}

TEST(Calibration, RejectsTargetsOutOfRange) {
  CircuitParams p;
  EXPECT_THROW(calibrate_idle(p, angular_ghz(12.0), p.phi_off), Error);
}

TEST(Calibration, UnreachableTargetReportsBestResidual) {
  CircuitParams p;
  CalibrationSettings s;
  s.max_iterations = 50;
  s.restarts = 0;
  try {
    calibrate_idle(p, angular_ghz(9.9), p.phi_off, s);
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::CalibrationFailed);
    EXPECT_GT(e.best_residual(), s.tolerance);
  }
}

TEST(Calibration, ZzRateFromFrameEnergies) {
  const LogicalFrame& f = test::reference_device().frame;
  const double zz = f.energies(3) - f.energies(2) - f.energies(1) + f.energies(0);
  EXPECT_DOUBLE_EQ(zz_rate(f), zz);
  EXPECT_NEAR(zz_rate(test::reference_device().h_idle, f), zz, 1e-10);
  // Idle ZZ is tens of kHz at most.
  EXPECT_LT(std::abs(zz), angular_ghz(1e-3));
}

TEST(Calibration, CouplerScanOpensTheSplitting) {
  CircuitParams p;
  const auto scan = coupler_splitting_scan(p, p.phi_off, {0.352, 0.376});
  ASSERT_EQ(scan.size(), 2u);
  EXPECT_GT(scan[1].splitting, 10.0 * scan[0].splitting);
}

}  // namespace
}  // namespace sfq
