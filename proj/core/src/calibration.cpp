#include "sfqgate/calibration.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

double wrap_flux(double f) {
  const double w = f - std::floor(f);
  return w >= 1.0 ? 0.0 : w;
}

RVector excitation_energies(const CircuitParams& params, const FluxVector& fluxes, int levels,
                            int n_max) {
  const CMatrix h = rediagonalized_joint_hamiltonian(params, fluxes, levels, n_max);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().array() - solver.eigenvalues()(0);
}

struct ObjectiveData {
  const CircuitParams* params;
  double target;
  int levels;
  int n_max;
  int evaluations = 0;
};

double gsl_objective(const gsl_vector* x, void* raw) {
  auto* data = static_cast<ObjectiveData*>(raw);
  ++data->evaluations;
  const FluxVector f{wrap_flux(gsl_vector_get(x, 0)), wrap_flux(gsl_vector_get(x, 1)),
                     wrap_flux(gsl_vector_get(x, 2))};
  try {
    return calibration_objective(*data->params, f, data->target, data->levels, data->n_max);
  } catch (const Error&) {
    return std::numeric_limits<double>::max();
  }
}

using MinimizerPtr = std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)>;
using VectorPtr = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;

}  // namespace

double calibration_objective(const CircuitParams& params, const FluxVector& fluxes, double target,
                             int levels, int n_max) {
  const RVector e = excitation_energies(params, fluxes, levels, n_max);
  const double e1 = e(1);
  const double e2 = e(2);
  return (e1 - e2) * (e1 - e2) + (e1 - target) * (e1 - target) + (e2 - target) * (e2 - target);
}

CalibrationResult calibrate_idle(const CircuitParams& params, double target,
                                 const FluxVector& initial_guess,
                                 const CalibrationSettings& settings) {
  params.validate();
  require(target >= angular_ghz(1.0) && target <= angular_ghz(10.0), ErrorClass::InvalidArgument,
          "calibration target must lie in 2pi x [1, 10] GHz");

  gsl_set_error_handler_off();
  ObjectiveData data{&params, target, settings.levels, settings.n_max};
  gsl_multimin_function fn{&gsl_objective, 3, &data};

  VectorPtr x(gsl_vector_alloc(3), &gsl_vector_free);
  VectorPtr step(gsl_vector_alloc(3), &gsl_vector_free);
  for (int i = 0; i < 3; ++i) gsl_vector_set(x.get(), i, initial_guess[i]);

  double best = std::numeric_limits<double>::max();
  double step_size = settings.initial_step;
  for (int restart = 0; restart <= settings.restarts; ++restart) {
    MinimizerPtr minimizer(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3),
                           &gsl_multimin_fminimizer_free);
    gsl_vector_set_all(step.get(), step_size);
    gsl_multimin_fminimizer_set(minimizer.get(), &fn, x.get(), step.get());
    for (int it = 0; it < settings.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
      const double size = gsl_multimin_fminimizer_size(minimizer.get());
      if (gsl_multimin_test_size(size, 1e-11) == GSL_SUCCESS) break;
    }
    gsl_vector_memcpy(x.get(), minimizer->x);
    const double f = minimizer->fval;
    const bool improved = f < 0.5 * best;
    best = std::min(best, f);
    if (best < 1e-3 * settings.tolerance && !improved) break;
    step_size *= 0.1;
  }

  CalibrationResult result;
  for (int i = 0; i < 3; ++i) result.phi_off[i] = wrap_flux(gsl_vector_get(x.get(), i));
  result.phi_on = params.phi_on;
  result.objective = best;
  result.evaluations = data.evaluations;
  if (!(best <= settings.tolerance)) {
    std::ostringstream msg;
    msg << "idle calibration did not reach tolerance " << settings.tolerance << " (best objective "
        << best << ")";
    throw CalibrationError(msg.str(), best);
  }

  const RVector e = excitation_energies(params, result.phi_off, settings.levels, settings.n_max);
  result.omega1 = e(1);
  result.omega2 = e(2);
  result.splitting = e(2) - e(1);

  CircuitParams calibrated = params;
  calibrated.phi_off = result.phi_off;
  const SpectralBasis basis =
      build_spectral_basis(calibrated, result.phi_off, settings.levels, settings.n_max);
  const CMatrix h_idle = joint_hamiltonian(basis, result.phi_off);
  result.zz_idle = zz_rate(build_logical_frame(h_idle, settings.levels));
  return result;
}

double zz_rate(const LogicalFrame& frame) {
  const auto& e = frame.energies;
  return e(3) - e(2) - e(1) + e(0);
}

double zz_rate(const CMatrix& h_idle, const LogicalFrame& frame) {
  Eigen::Vector4d e;
  for (int j = 0; j < 4; ++j) e(j) = frame.states.col(j).dot(h_idle * frame.states.col(j)).real();
  return e(3) - e(2) - e(1) + e(0);
}

std::vector<SplittingPoint> coupler_splitting_scan(const CircuitParams& params,
                                                   const FluxVector& idle,
                                                   const std::vector<double>& coupler_flux,
                                                   int levels, int n_max) {
  const SpectralBasis basis = build_spectral_basis(params, idle, levels, n_max);
  std::vector<SplittingPoint> out;
  out.reserve(coupler_flux.size());
  for (double f : coupler_flux) {
    FluxVector fl = idle;
    fl[index(Mode::Coupler)] = f;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(joint_hamiltonian(basis, fl),
                                                  Eigen::EigenvaluesOnly);
    out.push_back({f, solver.eigenvalues()(2) - solver.eigenvalues()(1)});
  }
  return out;
}

}  // namespace sfq
