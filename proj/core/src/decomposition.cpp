#include "sfqgate/decomposition.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <gsl/gsl_multimin.h>

#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"

namespace sfq {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kBoundaryTol = 1e-12;

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

double wrap(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

Matrix4c diag4(Complex a, Complex b, Complex c, Complex d) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

// Local part of the frame rotation diag(exp(i E t)): Rz(w1 t) x Rz(w2 t).
Matrix4c local_frame(const Eigen::Vector4d& e, double t) {
  return kron(rz((e(2) - e(0)) * t), rz((e(1) - e(0)) * t));
}

Matrix4c frame_rotation(const Eigen::Vector4d& e, double t) {
  return diag4(std::polar(1.0, e(0) * t), std::polar(1.0, e(1) * t), std::polar(1.0, e(2) * t),
               std::polar(1.0, e(3) * t));
}

}  // namespace

Matrix4c gamma_gate(double theta, double phi) {
  const Complex d = std::polar(1.0, -phi / 4.0);
  const Complex o = std::polar(1.0, phi / 4.0);
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(3, 3) = d;
  m(1, 1) = m(2, 2) = o * c;
  m(1, 2) = m(2, 1) = -kI * s * o;
  return m;
}

bool decomposition_valid(double theta, double phi) {
  const double st = std::abs(std::sin(theta));
  const double sp = std::abs(std::sin(phi / 2.0));
  const double r = std::sin(kPi / 4.0);
  return (st <= r && r <= sp) || (sp <= r && r <= st);
}

double alpha_argument(double theta, double phi) {
  const double sp2 = std::pow(std::sin(phi / 2.0), 2);
  const double den = std::pow(std::sin(theta), 2) - sp2;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (0.5 - sp2) / den;
}

DecompositionAngles decomposition_angles(double theta, double phi) {
  require(std::isfinite(theta) && std::isfinite(phi), ErrorClass::InvalidAngles,
          "angles must be finite");
  const double r = std::sin(kPi / 4.0);
  const double st = std::abs(std::sin(theta));
  const double sp = std::abs(std::sin(phi / 2.0));
  if (std::abs(st - r) <= kBoundaryTol && std::abs(sp - r) <= kBoundaryTol)
    fail(ErrorClass::DegenerateInput, "theta and phi both on the validity boundary");
  if (!decomposition_valid(theta, phi)) {
    fail(ErrorClass::InvalidAngles, "decomposition invalid for theta=" + std::to_string(theta) +
                                        " phi=" + std::to_string(phi));
  }
  double arg = alpha_argument(theta, phi);
  if (!std::isfinite(arg)) fail(ErrorClass::DegenerateInput, "alpha denominator vanishes");
  if (arg < -kBoundaryTol || arg > 1.0 + kBoundaryTol)
    fail(ErrorClass::InvalidAngles, "alpha argument outside [0, 1]");
  arg = std::clamp(arg, 0.0, 1.0);

  DecompositionAngles a;
  a.alpha = std::asin(std::sqrt(arg));
  const double ta = std::tan(a.alpha);
  const double cp = std::cos(phi / 2.0);
  const double spn = std::sin(phi / 2.0);
  const bool alpha_right = std::abs(a.alpha - kPi / 2.0) < 1e-15;
  // tan(alpha) diverges at alpha = pi/2; use the limit of the arctangent.
  const auto arctan_ratio = [&](double num, double den) {
    if (alpha_right) return (kPi / 2.0) * sgn(num * den);
    if (den == 0.0) return (kPi / 2.0) * sgn(ta * num);
    return std::atan(ta * num / den);
  };
  require(cp != 0.0, ErrorClass::DegenerateInput, "cos(phi/2) vanishes");
  a.xi = arctan_ratio(std::cos(theta), cp) + (kPi / 2.0) * (1.0 - sgn(cp));
  const double eta_branch = spn == 0.0 ? 1.0 : sgn(spn);
  a.eta = arctan_ratio(std::sin(theta), spn) + (kPi / 2.0) * (1.0 - eta_branch);
  return a;
}

Matrix4c assemble_cz(double theta, double phi, const DecompositionAngles& a) {
  const Matrix2c id = Matrix2c::Identity();
  const Matrix4c first = kron(rx(a.xi), rx(a.eta));
  const Matrix4c middle = kron(rx(-2.0 * a.alpha), id);
  const Matrix4c last = kron(rx(a.xi), rx(-a.eta));
  return last * gamma_gate(-theta, phi) * middle * gamma_gate(theta, phi) * first;
}

Matrix4c z_dressed_cz(double zeta) { return kron(rz(zeta), rz(zeta)) * cz(); }

CzClassDistance distance_to_cz_class(const Matrix4c& u) {
  // U CZ against e^{ig} diag(e^{-i z}, 1, 1, e^{i z}); the optimal g leaves
  // |V00 e^{i z} + V11 + V22 + V33 e^{-i z}| to maximize over z.
  const Matrix4c v = u * cz();
  const auto overlap = [&](double z) {
    return v(0, 0) * std::polar(1.0, z) + v(1, 1) + v(2, 2) + v(3, 3) * std::polar(1.0, -z);
  };
  double best_z = 0.0, best = -1.0;
  constexpr int kScan = 720;
  for (int i = 0; i < kScan; ++i) {
    const double z = kTwoPi * i / kScan;
    const double val = std::abs(overlap(z));
    if (val > best) {
      best = val;
      best_z = z;
    }
  }
  double lo = best_z - kTwoPi / kScan, hi = best_z + kTwoPi / kScan;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (std::abs(overlap(a)) > std::abs(overlap(b))) {
      hi = b;
    } else {
      lo = a;
    }
  }
  double z = 0.5 * (lo + hi);
  // Newton on d|ov|^2/dz to reach full precision near an exact match.
  for (int it = 0; it < 8; ++it) {
    const Complex a = v(0, 0) * std::polar(1.0, z), c = v(3, 3) * std::polar(1.0, -z);
    const Complex f = a + v(1, 1) + v(2, 2) + c;
    const Complex df = kI * (a - c);
    const Complex d2f = -(a + c);
    const double g1 = 2.0 * std::real(std::conj(f) * df);
    const double g2 = 2.0 * (std::norm(df) + std::real(std::conj(f) * d2f));
    if (!(g2 < 0.0)) break;
    const double step = -g1 / g2;
    if (std::abs(step) > kTwoPi / kScan) break;
    z += step;
    if (std::abs(step) < 1e-16) break;
  }
  const Complex ov = overlap(z);
  CzClassDistance d;
  d.zeta = wrap(z);
  d.global_phase = std::arg(ov);
  const Matrix4c fit = std::polar(1.0, d.global_phase) * z_dressed_cz(d.zeta);
  d.distance = (u - fit).norm();
  return d;
}

Matrix4c fsim_matrix(const FsimParams& p) {
  return std::polar(1.0, p.global_phase) * kron(rz(p.single_z), rz(p.single_z)) *
         gamma_gate(p.theta, p.phi);
}

FsimParams extract_fsim(const Matrix4c& m, double max_leakage) {
  const double leakage = 1.0 - (m.adjoint() * m).trace().real() / 4.0;
  require(leakage <= max_leakage, ErrorClass::ExtractionFailed,
          "leakage " + std::to_string(leakage) + " too large for fSim extraction");
  const Eigen::Matrix2cd block = m.block<2, 2>(1, 1);
  const Complex det = block.determinant();
  require(std::abs(det) > 1e-8 && std::abs(m(0, 0)) > 1e-8 && std::abs(m(3, 3)) > 1e-8,
          ErrorClass::ExtractionFailed, "matrix is not of fSim form");
  FsimParams p;
  p.phi = wrap(-std::arg(m(0, 0) * m(3, 3) / det));
  double beta = 0.5 * std::arg(det);
  Eigen::Matrix2cd b = block * std::polar(1.0, -beta);
  double c = 0.5 * (b(0, 0) + b(1, 1)).real();
  if (c < 0.0) {
    beta += kPi;
    b = -b;
    c = -c;
  }
  const double s = -0.5 * (b(0, 1) + b(1, 0)).imag();
  p.theta = std::atan2(s, c);
  p.global_phase = wrap(beta - p.phi / 4.0);
  // M00 = e^{i(g - z - phi/4)}, M33 = e^{i(g + z - phi/4)}
  const Complex base = std::polar(1.0, p.global_phase - p.phi / 4.0);
  const Complex z_lo = base / m(0, 0);
  const Complex z_hi = m(3, 3) / base;
  p.single_z = wrap(std::arg(z_lo / std::abs(z_lo) + z_hi / std::abs(z_hi)));
  p.residual = (fsim_matrix(p) - m).norm();
  return p;
}

namespace {

struct FitData {
  const Matrix4c* m;
  FsimParams base;
};

double fsim_misfit(const gsl_vector* x, void* data) {
  const auto* d = static_cast<const FitData*>(data);
  FsimParams p = d->base;
  p.theta = gsl_vector_get(x, 0);
  p.phi = gsl_vector_get(x, 1);
  p.single_z = gsl_vector_get(x, 2);
  return 1.0 - average_gate_fidelity(*d->m, fsim_matrix(p));
}

}  // namespace

double best_fsim_fidelity(const Matrix4c& m, FsimParams* fit) {
  FsimParams p = extract_fsim(m, 1.0);
  FitData data{&m, p};
  gsl_multimin_function fn{&fsim_misfit, 3, &data};
  gsl_vector* x = gsl_vector_alloc(3);
  gsl_vector* step = gsl_vector_alloc(3);
  gsl_vector_set(x, 0, p.theta);
  gsl_vector_set(x, 1, p.phi);
  gsl_vector_set(x, 2, p.single_z);
  gsl_vector_set_all(step, 1e-3);
  gsl_multimin_fminimizer* solver =
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
  gsl_multimin_fminimizer_set(solver, &fn, x, step);
  for (int it = 0; it < 2000; ++it) {
    if (gsl_multimin_fminimizer_iterate(solver)) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-11) == GSL_SUCCESS) break;
  }
  double best = 1.0 - solver->fval;
  const double start = average_gate_fidelity(m, fsim_matrix(p));
  if (best > start) {
    p.theta = gsl_vector_get(solver->x, 0);
    p.phi = wrap(gsl_vector_get(solver->x, 1));
    p.single_z = wrap(gsl_vector_get(solver->x, 2));
    // Global phase minimizing the residual for the refined angles.
    const Complex ov = (fsim_matrix({p.theta, p.phi, p.single_z, 0.0, 0.0}).adjoint() * m).trace();
    p.global_phase = std::arg(ov);
    p.residual = (fsim_matrix(p) - m).norm();
  } else {
    best = start;
  }
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(step);
  gsl_vector_free(x);
  if (fit) *fit = p;
  return best;
}

ControlSchedule fsim_schedule(double hold, int ramp_steps, double step_duration, double flux_off,
                              double flux_on, double kick_angle) {
  require(hold > 0.0, ErrorClass::InvalidArgument, "hold time must be > 0");
  require(ramp_steps >= 1 && step_duration > 0.0, ErrorClass::InvalidArgument,
          "ramp steps and step duration must be positive");
  const long hold_ticks = std::lround(hold / step_duration);
  const long ticks = hold_ticks + 2L * ramp_steps;
  ControlSchedule s = ControlSchedule::idle(ticks * step_duration, 1.0 / step_duration, kick_angle);
  s.n_ramp = ramp_steps;
  s.flux_off = flux_off;
  s.flux_on = flux_on;
  s.excursions.push_back({0.0, s.duration});
  s.validate();
  return s;
}

std::vector<FsimSweepRow> hold_time_sweep(const Simulator& sim, const std::vector<double>& holds,
                                          int ramp_steps, double step_duration, double flux_off,
                                          double flux_on, unsigned workers) {
  for (double h : holds) require(h > 0.0, ErrorClass::InvalidArgument, "hold times must be > 0");
  const FluxOperatorTable table =
      staircase_table(sim, 1.0 / step_duration, ramp_steps, flux_off, flux_on);
  std::vector<FsimSweepRow> rows(holds.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < holds.size(); i = next++) {
      const ControlSchedule s = fsim_schedule(holds[i], ramp_steps, step_duration, flux_off, flux_on);
      const CMatrix psi =
          propagate_states(s, sim, sim.frame().states, Backend::ExactSegment, &table);
      const Matrix4c m = logical_matrix(psi, sim.frame(), s.duration);
      FsimParams fit;
      const double f = best_fsim_fidelity(m, &fit);
      auto& r = rows[i];
      r.hold = s.duration - 2.0 * ramp_steps * step_duration;
      r.duration = s.duration;
      r.infidelity = 1.0 - f;
      r.theta = fit.theta;
      r.phi = fit.phi;
      r.leakage = 1.0 - (m.adjoint() * m).trace().real() / 4.0;
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(holds.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

FsimCalibration calibrate_fsim(const Simulator& sim, double hold, int ramp_steps,
                               double step_duration, double flux_off, double flux_on) {
  FsimCalibration c;
  c.schedule = fsim_schedule(hold, ramp_steps, step_duration, flux_off, flux_on);
  c.hold = c.schedule.duration - 2.0 * ramp_steps * step_duration;
  const CMatrix psi = propagate_states(c.schedule, sim, sim.frame().states, Backend::ExactSegment);
  c.logical = logical_matrix(psi, sim.frame(), c.schedule.duration);
  best_fsim_fidelity(c.logical, &c.params);
  return c;
}

Matrix4c composite_target_matrix(CompositeTarget target) {
  return target == CompositeTarget::CZ ? cz() : cnot();
}

std::array<Matrix4c, 3> composite_layer_targets(CompositeTarget target, const FsimParams& fsim,
                                                double tf, const std::array<double, 3>& dur,
                                                const Eigen::Vector4d& e) {
  const DecompositionAngles a = decomposition_angles(fsim.theta, fsim.phi);
  const CzClassDistance ideal = distance_to_cz_class(assemble_cz(fsim.theta, fsim.phi, a));
  const Matrix2c id = Matrix2c::Identity();
  const Matrix2c z = rz(kPi);
  const Matrix4c zq1 = kron(z, id);
  const Matrix4c d_fsim = kron(rz(-fsim.single_z), rz(-fsim.single_z));
  const Matrix4c d_cz = kron(rz(-ideal.zeta), rz(-ideal.zeta));

  Matrix4c l1 = kron(rx(a.xi), rx(a.eta));
  const Matrix4c l2 = kron(rx(-2.0 * a.alpha), id);
  Matrix4c l3 = d_cz * kron(rx(a.xi), rx(-a.eta));
  if (target == CompositeTarget::CNOT) {
    const Matrix4c h2 = kron(id, hadamard());
    l1 = l1 * h2;
    l3 = h2 * l3;
  }
  const double t1 = dur[0];
  const double s2 = t1 + tf;
  const double t2 = s2 + dur[1];
  const double s3 = t2 + tf;
  const Matrix4c y1 = local_frame(e, t1) * l1;
  const Matrix4c y2 = local_frame(e, t2) * zq1 * l2 * d_fsim * local_frame(e, t1).adjoint();
  const Matrix4c y3 = l3 * zq1 * d_fsim * local_frame(e, t2).adjoint();
  return {y1, frame_rotation(e, s2).adjoint() * y2 * frame_rotation(e, s2),
          frame_rotation(e, s3).adjoint() * y3 * frame_rotation(e, s3)};
}

Matrix4c compose_ideal(const std::array<Matrix4c, 3>& layers, const Matrix4c& fsim, double tf,
                       const std::array<double, 3>& dur, const Eigen::Vector4d& e) {
  const auto shifted = [&](const Matrix4c& x, double t) {
    const Matrix4c r = frame_rotation(e, t);
    return Matrix4c(r * x * r.adjoint());
  };
  const double t1 = dur[0];
  const double s2 = t1 + tf;
  const double t2 = s2 + dur[1];
  const double s3 = t2 + tf;
  return shifted(layers[2], s3) * shifted(fsim, t2) * shifted(layers[1], s2) * shifted(fsim, t1) *
         layers[0];
}

ControlSchedule concatenate(const std::vector<ControlSchedule>& parts) {
  require(!parts.empty(), ErrorClass::InvalidArgument, "nothing to concatenate");
  ControlSchedule out = parts.front();
  out.amplitudes_q1.clear();
  out.amplitudes_q2.clear();
  out.excursions.clear();
  out.duration = 0.0;
  long offset_ticks = 0;
  const double period = out.clock_period();
  for (const auto& p : parts) {
    p.validate();
    require(p.clock_freq == out.clock_freq && p.kick_angle == out.kick_angle &&
                p.n_ramp == out.n_ramp && p.flux_off == out.flux_off && p.flux_on == out.flux_on &&
                p.mode == out.mode,
            ErrorClass::InvalidArgument, "concatenated schedules must share clock and flux settings");
    const long ticks = static_cast<long>(p.ticks());
    require(std::abs(p.duration - ticks * period) < 1e-9, ErrorClass::InvalidArgument,
            "concatenated durations must be whole clock periods");
    out.amplitudes_q1.insert(out.amplitudes_q1.end(), p.amplitudes_q1.begin(), p.amplitudes_q1.end());
    out.amplitudes_q2.insert(out.amplitudes_q2.end(), p.amplitudes_q2.begin(), p.amplitudes_q2.end());
    for (const auto& e : p.excursions) {
      out.excursions.push_back({(offset_ticks + nearest_tick(e.start, period)) * period,
                                (offset_ticks + nearest_tick(e.end, period)) * period});
    }
    offset_ticks += ticks;
  }
  out.duration = offset_ticks * period;
  out.validate();
  return out;
}

CompositeGate build_composite_gate(CompositeTarget target,
                                   const std::optional<FsimCalibration>& fsim,
                                   const std::vector<ControlSchedule>& layers,
                                   const Simulator& sim) {
  require(fsim.has_value(), ErrorClass::MissingCalibration, "fSim calibration missing");
  require(layers.size() == 3, ErrorClass::MissingCalibration,
          "three single-qubit layer schedules are required");
  CompositeGate g;
  g.schedule = concatenate({layers[0], fsim->schedule, layers[1], fsim->schedule, layers[2]});
  const CMatrix psi = propagate_states(g.schedule, sim, sim.frame().states, Backend::ExactSegment);
  g.report = gate_report_from_states(psi, composite_target_matrix(target), sim.frame(),
                                     g.schedule.duration, true);
  return g;
}

}  // namespace sfq
