#include "sfqgate/propagator.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "sfqgate/error.hpp"
#include "sfqgate/tensor_ops.hpp"

namespace sfq {

namespace {

Mode qubit_mode(int qubit) {
  require(qubit == 1 || qubit == 2, ErrorClass::InvalidArgument, "qubit must be 1 or 2");
  return qubit == 1 ? Mode::Qubit1 : Mode::Qubit2;
}

void apply_kicks(CMatrix& states, const Simulator& sim, const ControlSchedule& s, std::size_t tick) {
  for (int q : {1, 2}) {
    const double a = s.amplitudes(q)[tick];
    if (a != 0.0) {
      apply_mode_operator(states, sim.kick_factor(q, a, s.kick_angle), qubit_mode(q), sim.levels());
    }
  }
}

// True when no flux ramp of any excursion overlaps [t0, t1].
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

Simulator::Simulator(Device device) : device_(std::move(device)) {
  const int l = device_.levels();
  for (Mode m : kModes) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(device_.basis.mode(m).n);
    charge_vectors_[index(m)] = solver.eigenvectors();
    charge_values_[index(m)] = solver.eigenvalues();
    idle_mode_h_[index(m)] =
        device_.basis.mode_hamiltonian(m, device_.basis.reference_flux[index(m)]);
  }
  const auto& ec = device_.basis.ec;
  const RVector& v1 = charge_values_[0];
  const RVector& vc = charge_values_[1];
  const RVector& v2 = charge_values_[2];
  coupling_diag_.resize(l * l * l);
  for (int i1 = 0; i1 < l; ++i1)
    for (int ic = 0; ic < l; ++ic)
      for (int i2 = 0; i2 < l; ++i2) {
        coupling_diag_(bare_index(i1, ic, i2, l)) =
            8.0 * (ec(Mode::Qubit1, Mode::Coupler) * v1(i1) * vc(ic) +
                   ec(Mode::Qubit1, Mode::Qubit2) * v1(i1) * v2(i2) +
                   ec(Mode::Coupler, Mode::Qubit2) * vc(ic) * v2(i2));
      }
  for (int q : {1, 2}) {
    const double element = std::abs(device_.basis.mode(qubit_mode(q)).n(1, 0));
    require(element > 0.0, ErrorClass::InvalidArgument, "vanishing qubit charge matrix element");
    kick_scale_[q - 1] = 1.0 / (2.0 * element);
  }
}

double Simulator::kick_scale(int qubit) const {
  qubit_mode(qubit);
  return kick_scale_[qubit - 1];
}

const CMatrix& Simulator::charge_operator(int qubit) const {
  return device_.basis.mode(qubit_mode(qubit)).n;
}

CMatrix Simulator::kick_factor(int qubit, double amplitude, double kick_angle) const {
  const Mode m = qubit_mode(qubit);
  const double strength = amplitude * kick_angle * kick_scale_[qubit - 1];
  const CVector phases = (charge_values_[index(m)] * (-strength)).unaryExpr([](double a) {
    return std::polar(1.0, a);
  });
  const CMatrix& v = charge_vectors_[index(m)];
  return v * phases.asDiagonal() * v.adjoint();
}

CMatrix kick_unitary(const Simulator& sim, int qubit, double amplitude, double kick_angle) {
  require(amplitude >= 0.0 && amplitude <= 1.0, ErrorClass::InvalidArgument,
          "kick amplitude must lie in [0, 1]");
  return embed(sim.kick_factor(qubit, amplitude, kick_angle), qubit_mode(qubit), sim.levels());
}

const std::array<double, 5>& suzuki4_weights() {
  static const std::array<double, 5> weights = [] {
    const double p = 1.0 / (4.0 - std::cbrt(4.0));
    return std::array<double, 5>{p, p, 1.0 - 4.0 * p, p, p};
  }();
  return weights;
}

int trotter_substeps(double period, double dt) {
  require(dt > 0.0, ErrorClass::InvalidArgument, "Trotter dt must be > 0");
  return std::max(1, static_cast<int>(std::lround(period / dt)));
}

void apply_segment(CMatrix& states, const std::vector<SegmentOp>& ops, int levels) {
  for (const auto& op : ops) {
    if (op.kind == SegmentOp::Kind::Diagonal) {
      apply_diagonal(states, op.diagonal);
    } else {
      apply_mode_operator(states, op.matrix, op.mode, levels);
    }
  }
}

void apply_segment_adjoint(CMatrix& states, const std::vector<SegmentOp>& ops, int levels) {
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    if (it->kind == SegmentOp::Kind::Diagonal) {
      apply_diagonal(states, it->diagonal.conjugate());
    } else {
      apply_mode_operator(states, it->matrix.adjoint(), it->mode, levels);
    }
  }
}

CMatrix exp_derivative(const CMatrix& h, const CMatrix& dh, double s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const RVector& lam = solver.eigenvalues();
  const CMatrix& v = solver.eigenvectors();
  const Eigen::Index n = lam.size();
  CMatrix kernel(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // (e^{-i a s} - e^{-i b s}) / (a - b) = -i s e^{-i (a+b) s / 2} sinc((a-b) s / 2)
      const double half = 0.5 * (lam(j) - lam(k)) * s;
      const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
      kernel(j, k) = Complex(0.0, -s) * std::polar(1.0, -0.5 * (lam(j) + lam(k)) * s) * sinc;
    }
  }
  const CMatrix inner = v.adjoint() * dh * v;
  return v * kernel.cwiseProduct(inner) * v.adjoint();
}

TrotterCache::TrotterCache(const Simulator& sim, double period, int substeps)
    : sim_(&sim), period_(period), substeps_(substeps) {}

const CMatrix& TrotterCache::tick_propagator(double coupler_flux) {
  auto it = cache_.find(coupler_flux);
  if (it != cache_.end()) return it->second;
  const auto ops = trotter_segment(
      *sim_, 0.0, period_, substeps_,
      [coupler_flux](double) { return CouplerFluxSample{coupler_flux, 0.0, 0.0, -1}; }, false);
  CMatrix u = CMatrix::Identity(sim_->dimension(), sim_->dimension());
  apply_segment(u, ops, sim_->levels());
  return cache_.emplace(coupler_flux, std::move(u)).first->second;
}

FluxOperatorTable staircase_table(const Simulator& sim, double clock_freq, int n_ramp,
                                  double flux_off, double flux_on) {
  const auto levels = ramp_flux_levels(flux_off, flux_on, n_ramp);
  return flux_operator_table(sim.basis(), levels, 1.0 / clock_freq);
}

CMatrix propagate_states(const ControlSchedule& schedule, const Simulator& sim,
                         const CMatrix& initial, Backend backend, const FluxOperatorTable* table,
                         const TrotterSettings& trotter) {
  schedule.validate();
  require(initial.rows() == sim.dimension(), ErrorClass::InvalidArgument,
          "initial states must have the joint dimension");
  const std::size_t n = schedule.ticks();
  const double period = schedule.clock_period();
  const double swing = schedule.flux_on - schedule.flux_off;
  CMatrix states = initial;
  if (n == 0) return states;

  if (backend == Backend::ExactSegment) {
    require(schedule.mode == ScheduleMode::Discrete, ErrorClass::ModeMismatch,
            "exact-segment backend requires a discrete schedule");
    std::unique_ptr<FluxOperatorTable> owned;
    if (table == nullptr) {
      owned = std::make_unique<FluxOperatorTable>(staircase_table(
          sim, schedule.clock_freq, schedule.n_ramp, schedule.flux_off, schedule.flux_on));
      table = owned.get();
    }
    require(table->size() == static_cast<std::size_t>(schedule.n_ramp) + 1 &&
                std::abs(table->clock_period - period) < 1e-12,
            ErrorClass::InvalidArgument, "flux table does not match the schedule staircase");
    for (std::size_t j = 0; j < n; ++j) {
      apply_kicks(states, sim, schedule, j);
      states = table->propagators[discrete_flux_level(schedule, j)] * states;
    }
    return states;
  }

  const int substeps = trotter_substeps(period, trotter.dt);
  TrotterCache cache(sim, period, substeps);
  const bool relaxed = schedule.mode == ScheduleMode::Relaxed;

  // Level usage decides whether building a dense tick propagator pays off.
  std::map<double, std::size_t> usage;
  std::vector<char> constant(n, 0);
  std::vector<double> tick_flux(n, schedule.flux_off);
  for (std::size_t j = 0; j < n; ++j) {
    if (relaxed) {
      const double t0 = j * period;
      if (ramp_free(schedule, t0, t0 + period)) {
        constant[j] = 1;
        tick_flux[j] =
            schedule.flux_off + swing * relaxed_flux_level(schedule, t0 + 0.5 * period).level;
      }
    } else {
      constant[j] = 1;
      tick_flux[j] = schedule.flux_off +
                     swing * discrete_flux_level(schedule, j) / static_cast<double>(schedule.n_ramp);
    }
    if (constant[j]) ++usage[tick_flux[j]];
  }
  const auto dense_pays = [&](double flux) {
    // Factor-wise: ~35 ops of cost L*dim per substep; dense: dim^2 per tick.
    const double dim = sim.dimension();
    const double factor_cost = 35.0 * substeps * sim.levels() * dim;
    const double uses = static_cast<double>(usage[flux]) * states.cols();
    return uses * (factor_cost - dim * dim) > factor_cost * dim;
  };

  for (std::size_t j = 0; j < n; ++j) {
    apply_kicks(states, sim, schedule, j);
    const double t0 = j * period;
    if (constant[j] && dense_pays(tick_flux[j])) {
      states = cache.tick_propagator(tick_flux[j]) * states;
      continue;
    }
    if (constant[j]) {
      const double f = tick_flux[j];
      apply_segment(states,
                    trotter_segment(
                        sim, t0, period, substeps,
                        [f](double) { return CouplerFluxSample{f, 0.0, 0.0, -1}; }, false),
                    sim.levels());
      continue;
    }
    apply_segment(states,
                  trotter_segment(
                      sim, t0, period, substeps,
                      [&](double t) {
                        const FluxSample fs = relaxed_flux_level(schedule, t);
                        return CouplerFluxSample{schedule.flux_off + swing * fs.level, 0.0, 0.0,
                                                 fs.excursion};
                      },
                      false),
                  sim.levels());
  }
  return states;
}

CMatrix propagate(const ControlSchedule& schedule, const Simulator& sim, Backend backend,
                  const FluxOperatorTable* table, const TrotterSettings& trotter) {
  const CMatrix id = CMatrix::Identity(sim.dimension(), sim.dimension());
  return propagate_states(schedule, sim, id, backend, table, trotter);
}

}  // namespace sfq
