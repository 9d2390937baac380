#include "sfqgate/relaxation.hpp"

#include <cmath>
#include <string>

#include "sfqgate/error.hpp"
#include "sfqgate/tensor_ops.hpp"

namespace sfq {

namespace {

// Tr(a^dag b)
Complex inner(const CMatrix& a, const CMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum(); }

Mode kicked_mode(int q) { return q == 1 ? Mode::Qubit1 : Mode::Qubit2; }

void apply_op(CMatrix& states, const SegmentOp& op, int levels, bool adjoint) {
  if (op.kind == SegmentOp::Kind::Diagonal) {
    apply_diagonal(states, adjoint ? CVector(op.diagonal.conjugate()) : op.diagonal);
  } else {
    apply_mode_operator(states, adjoint ? CMatrix(op.matrix.adjoint()) : op.matrix, op.mode,
                        levels);
  }
}

bool ramp_free(const ControlSchedule& s, double t0, double t1) {
  const double period = s.clock_period();
  const double ramp = s.n_ramp * period;
  for (const auto& e : s.excursions) {
    const double up0 = e.start - 0.5 * period;
    const double down1 = e.end + 0.5 * period;
    if (t1 > up0 && t0 < up0 + ramp) return false;
    if (t1 > down1 - ramp && t0 < down1) return false;
  }
  return true;
}

}  // namespace

void ScheduleTemplate::validate() const {
  require(clock_freq > 0.0 && std::isfinite(clock_freq), ErrorClass::InvalidArgument,
          "clock_freq must be > 0");
  require(duration > 0.0 && std::isfinite(duration), ErrorClass::InvalidArgument,
          "duration must be > 0");
  require(std::isfinite(kick_angle) && kick_angle > 0.0, ErrorClass::InvalidArgument,
          "kick_angle must be > 0");
  require(n_ramp >= 1, ErrorClass::InvalidArgument, "n_ramp must be >= 1");
  require(excursion_count >= 0, ErrorClass::InvalidArgument, "excursion_count must be >= 0");
  require(excursion_count == 0 ||
              duration >= excursion_count * 2.0 * n_ramp * clock_period() - 1e-9,
          ErrorClass::InvalidArgument, "duration too short for the requested excursions");
}

RelaxedParams::RelaxedParams(std::size_t n, int excursions)
    : ticks(n), excursion_count(excursions), theta(RVector::Zero(2 * n + 2 * excursions)) {}

Eigen::Index RelaxedParams::amplitude_index(int qubit, std::size_t tick) const {
  return static_cast<Eigen::Index>((qubit - 1) * ticks + tick);
}
Eigen::Index RelaxedParams::start_index(int e) const {
  return static_cast<Eigen::Index>(2 * ticks + 2 * e);
}
Eigen::Index RelaxedParams::end_index(int e) const { return start_index(e) + 1; }

ControlSchedule to_schedule(const RelaxedParams& p, const ScheduleTemplate& tmpl,
                            ScheduleMode mode) {
  require(p.ticks == tmpl.ticks() && p.excursion_count == tmpl.excursion_count &&
              p.theta.size() == static_cast<Eigen::Index>(2 * p.ticks + 2 * p.excursion_count),
          ErrorClass::InvalidArgument, "parameters do not match the schedule template");
  ControlSchedule s = ControlSchedule::idle(tmpl.duration, tmpl.clock_freq, tmpl.kick_angle, mode);
  s.n_ramp = tmpl.n_ramp;
  s.flux_off = tmpl.flux_off;
  s.flux_on = tmpl.flux_on;
  for (int q : {1, 2})
    for (std::size_t j = 0; j < p.ticks; ++j) s.amplitudes(q)[j] = p.theta(p.amplitude_index(q, j));
  for (int e = 0; e < p.excursion_count; ++e)
    s.excursions.push_back({p.theta(p.start_index(e)), p.theta(p.end_index(e))});
  return s;
}

RelaxedParams from_schedule(const ControlSchedule& s) {
  RelaxedParams p(s.ticks(), static_cast<int>(s.excursions.size()));
  for (int q : {1, 2})
    for (std::size_t j = 0; j < p.ticks; ++j) p.theta(p.amplitude_index(q, j)) = s.amplitudes(q)[j];
  for (int e = 0; e < p.excursion_count; ++e) {
    p.theta(p.start_index(e)) = s.excursions[e].start;
    p.theta(p.end_index(e)) = s.excursions[e].end;
  }
  return p;
}

double PenaltyConfig::gamma_at(int stage) const { return gamma * std::pow(factor, stage); }
double PenaltyConfig::mu_at(int stage) const { return mu / std::pow(factor, stage); }

void PenaltyConfig::validate() const {
  require(gamma >= 0.0 && mu >= 0.0 && std::isfinite(gamma) && std::isfinite(mu),
          ErrorClass::InvalidArgument, "gamma and mu must be finite and >= 0");
  require(factor > 0.0, ErrorClass::InvalidArgument, "penalty factor must be > 0");
  require(updates_per_stage >= 1 && stages >= 1, ErrorClass::InvalidArgument,
          "stages and updates_per_stage must be >= 1");
}

void penalty_terms(const RelaxedParams& p, double period, double gamma, double mu,
                   double& penalty, double& barrier, RVector* grad) {
  penalty = 0.0;
  barrier = 0.0;
  const Eigen::Index n_amp = static_cast<Eigen::Index>(p.amplitude_count());
  for (Eigen::Index i = 0; i < n_amp; ++i) {
    const double a = p.theta(i);
    penalty += gamma * a * (1.0 - a);
    if (grad) (*grad)(i) += gamma * (1.0 - 2.0 * a);
    if (mu > 0.0) {
      if (!(a > 0.0 && a < 1.0))
        fail(ErrorClass::BarrierDomain,
             "amplitude " + std::to_string(i) + " outside (0, 1) while the barrier is active");
      barrier -= mu * (std::log(a) + std::log(1.0 - a));
      if (grad) (*grad)(i) -= mu * (1.0 / a - 1.0 / (1.0 - a));
    }
  }
  const double w = kTwoPi / period;
  for (Eigen::Index i = n_amp; i < p.theta.size(); ++i) {
    penalty -= gamma * std::cos(w * p.theta(i));
    if (grad) (*grad)(i) += gamma * w * std::sin(w * p.theta(i));
  }
}

struct RelaxedEvaluator::Forward {
  ControlSchedule schedule;
  std::vector<CMatrix> kicked;  // logical states right after each tick's kicks
  std::vector<char> constant;
  std::vector<double> tick_flux;
  CMatrix final_states;
};

RelaxedEvaluator::RelaxedEvaluator(const Simulator& sim, const Matrix4c& target,
                                   const ScheduleTemplate& tmpl,
                                   const RelaxationSettings& settings)
    : sim_(&sim), target_(target), tmpl_(tmpl), settings_(settings) {
  tmpl_.validate();
  require(settings_.substeps_per_tick >= 1, ErrorClass::InvalidArgument,
          "substeps_per_tick must be >= 1");
  cache_ = std::make_unique<TrotterCache>(sim, tmpl_.clock_period(), settings_.substeps_per_tick);
}

RelaxedEvaluator::Forward RelaxedEvaluator::forward(const RelaxedParams& params, bool keep) {
  Forward f;
  f.schedule = to_schedule(params, tmpl_, ScheduleMode::Relaxed);
  const auto& s = f.schedule;
  for (int q : {1, 2})
    for (double a : s.amplitudes(q))
      require(a >= 0.0 && a <= 1.0, ErrorClass::InvalidArgument,
              "relaxed amplitudes must lie in [0, 1]");
  const std::size_t n = s.ticks();
  const double period = s.clock_period();
  const double swing = s.flux_on - s.flux_off;
  const int levels = sim_->levels();
  f.constant.assign(n, 0);
  f.tick_flux.assign(n, s.flux_off);
  if (keep) f.kicked.resize(n);

  CMatrix psi = sim_->frame().states;
  for (std::size_t j = 0; j < n; ++j) {
    for (int q : {1, 2}) {
      const double a = s.amplitudes(q)[j];
      if (a != 0.0)
        apply_mode_operator(psi, sim_->kick_factor(q, a, s.kick_angle), kicked_mode(q), levels);
    }
    if (keep) f.kicked[j] = psi;
    const double t0 = j * period;
    if (ramp_free(s, t0, t0 + period)) {
      f.constant[j] = 1;
      f.tick_flux[j] = s.flux_off + swing * relaxed_flux_level(s, t0 + 0.5 * period).level;
      psi = cache_->tick_propagator(f.tick_flux[j]) * psi;
    } else {
      apply_segment(psi,
                    trotter_segment(
                        *sim_, t0, period, settings_.substeps_per_tick,
                        [&](double t) {
                          const FluxSample fs = relaxed_flux_level(s, t);
                          return CouplerFluxSample{s.flux_off + swing * fs.level, 0.0, 0.0,
                                                   fs.excursion};
                        },
                        false),
                    levels);
    }
  }
  f.final_states = std::move(psi);
  return f;
}

GateReport RelaxedEvaluator::report(const RelaxedParams& params) {
  const Forward f = forward(params, false);
  return gate_report_from_states(f.final_states, target_, sim_->frame(), tmpl_.duration,
                                 settings_.z_compensate);
}

RVector RelaxedEvaluator::gradient(const RelaxedParams& params, double gamma, double mu) {
  RVector g;
  evaluate(params, gamma, mu, &g);
  return g;
}

CostValue RelaxedEvaluator::evaluate(const RelaxedParams& params, double gamma, double mu,
                                     RVector* grad) {
  CostValue v;
  if (grad) grad->setZero(params.size());
  penalty_terms(params, tmpl_.clock_period(), gamma, mu, v.penalty, v.barrier, grad);

  Forward f = forward(params, grad != nullptr);
  const LogicalFrame& frame = sim_->frame();
  const Matrix4c m = logical_matrix(f.final_states, frame, tmpl_.duration);
  Matrix4c target = target_;
  v.fidelity = average_gate_fidelity(m, target_);
  if (settings_.z_compensate) {
    const ZCompensation z = z_compensate(m, target_);
    if (z.fidelity > v.fidelity) {
      v.fidelity = z.fidelity;
      v.phi_z1 = z.phi1;
      v.phi_z2 = z.phi2;
      target = z_rotated_target(target_, z.phi1, z.phi2);
    }
  }
  v.total = 1.0 - v.fidelity + v.penalty + v.barrier;
  if (!std::isfinite(v.total)) fail(ErrorClass::NonFiniteCost, "cost is not finite");
  if (!grad) return v;

  // Fidelity enters the cost with a minus sign.
  Matrix4c g = -fidelity_gradient(m, target);
  for (int j = 0; j < 4; ++j) g.row(j) *= std::polar(1.0, -frame.energies(j) * tmpl_.duration);
  CMatrix lambda = frame.states * g;

  const auto& s = f.schedule;
  const std::size_t n = s.ticks();
  const double period = s.clock_period();
  const double swing = s.flux_on - s.flux_off;
  const int levels = sim_->levels();
  for (std::size_t j = n; j-- > 0;) {
    const CMatrix& kicked = f.kicked[j];
    if (f.constant[j]) {
      lambda = cache_->tick_propagator(f.tick_flux[j]).adjoint() * lambda;
    } else {
      const auto ops = trotter_segment(
          *sim_, j * period, period, settings_.substeps_per_tick,
          [&](double t) {
            const FluxSample fs = relaxed_flux_level(s, t);
            return CouplerFluxSample{s.flux_off + swing * fs.level, swing * fs.d_start,
                                     swing * fs.d_end, fs.excursion};
          },
          true);
      std::vector<CMatrix> states;
      states.reserve(ops.size() + 1);
      states.push_back(kicked);
      for (const auto& op : ops) {
        CMatrix next = states.back();
        apply_op(next, op, levels, false);
        states.push_back(std::move(next));
      }
      for (std::size_t i = ops.size(); i-- > 0;) {
        const SegmentOp& op = ops[i];
        if (op.flux_dependent) {
          CMatrix moved = states[i];
          apply_mode_operator(moved, op.d_matrix, op.mode, levels);
          const double w = 2.0 * inner(lambda, moved).real();
          (*grad)(params.start_index(op.excursion)) += w * op.dflux_dstart;
          (*grad)(params.end_index(op.excursion)) += w * op.dflux_dend;
        }
        apply_op(lambda, op, levels, true);
      }
    }
    for (int q : {1, 2}) {
      const double strength = s.kick_angle * sim_->kick_scale(q);
      CMatrix charged = kicked;
      apply_mode_operator(charged, sim_->charge_operator(q), kicked_mode(q), levels);
      // d/da exp(-i a lambda N) = -i lambda N exp(...)
      (*grad)(params.amplitude_index(q, j)) += 2.0 * strength * inner(lambda, charged).imag();
    }
    for (int q : {1, 2}) {
      const double a = s.amplitudes(q)[j];
      if (a != 0.0)
        apply_mode_operator(lambda, sim_->kick_factor(q, a, s.kick_angle).adjoint(),
                            kicked_mode(q), levels);
    }
  }
  return v;
}

}  // namespace sfq
