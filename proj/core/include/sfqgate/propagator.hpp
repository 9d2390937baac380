#pragma once

// Pulse-level evolution: instantaneous SFQ charge kicks on the qubits and
// piecewise flux segments on the coupler.
//
// Within one clock tick the order is: qubit-1 kick, qubit-2 kick, then the
// segment evolution over the clock period at the tick's coupler flux.

#include <map>
#include <memory>
#include <vector>

#include "sfqgate/basis.hpp"
#include "sfqgate/device.hpp"
#include "sfqgate/schedule.hpp"

namespace sfq {

enum class Backend { ExactSegment, Trotter4 };

struct TrotterSettings {
  double dt = 0.001;  // ns; rounded so that an integer number of substeps fills a tick
};

/// Read-only precomputations shared by every propagation on one device.
class Simulator {
 public:
  explicit Simulator(Device device);

  const Device& device() const { return device_; }
  const SpectralBasis& basis() const { return device_.basis; }
  const LogicalFrame& frame() const { return device_.frame; }
  int levels() const { return device_.levels(); }
  int dimension() const { return device_.dimension(); }

  /// 1 / (2 |<psi_1|n|psi_0>|) for qubit 1 or 2; multiplies the kick angle.
  double kick_scale(int qubit) const;
  /// Single-mode kick exp(-i a lambda n_k), levels x levels.
  CMatrix kick_factor(int qubit, double amplitude, double kick_angle) const;
  /// Single-mode charge operator n_k of qubit 1 or 2.
  const CMatrix& charge_operator(int qubit) const;

  /// Diagonal of the coupling term in the product eigenbasis of the charge operators.
  const CVector& coupling_diagonal() const { return coupling_diag_; }
  /// Per-mode unitary diagonalizing the projected charge operator.
  const CMatrix& charge_eigenvectors(Mode m) const { return charge_vectors_[index(m)]; }
  /// Single-mode Hamiltonian at the idle flux (fixed basis).
  const CMatrix& idle_mode_hamiltonian(Mode m) const { return idle_mode_h_[index(m)]; }

 private:
  Device device_;
  std::array<CMatrix, 3> charge_vectors_;
  std::array<RVector, 3> charge_values_;
  std::array<CMatrix, 3> idle_mode_h_;
  CVector coupling_diag_;
  std::array<double, 2> kick_scale_{};
};

/// Full joint-space kick unitary for qubit 1 or 2.
CMatrix kick_unitary(const Simulator& sim, int qubit, double amplitude, double kick_angle);

/// One elementary factor of a Trotter segment.
struct SegmentOp {
  enum class Kind { Mode, Diagonal } kind = Kind::Mode;
  Mode mode = Mode::Qubit1;
  CMatrix matrix;     // levels x levels (Kind::Mode)
  CVector diagonal;   // joint dimension (Kind::Diagonal)
  // Coupler factors inside flux ramps depend on corner times.
  bool flux_dependent = false;
  CMatrix d_matrix;   // d matrix / d coupler flux
  double dflux_dstart = 0.0;
  double dflux_dend = 0.0;
  int excursion = -1;
};

/// Coupler flux (flux quanta) and its corner-time derivatives at one sample.
struct CouplerFluxSample {
  double flux = 0.0;
  double dflux_dstart = 0.0;
  double dflux_dend = 0.0;
  int excursion = -1;
};

/// Fourth-order Suzuki product for one clock tick starting at `t0` with
/// `substeps` equal substeps. A (single-mode terms) is evaluated at the
/// midpoint of each second-order stage; B (charge coupling) is exact.
template <class FluxAt>
std::vector<SegmentOp> trotter_segment(const Simulator& sim, double t0, double period, int substeps,
                                       FluxAt&& flux_at, bool with_derivatives);

/// Substep count for a tick of length `period` at target step `dt`.
int trotter_substeps(double period, double dt);

void apply_segment(CMatrix& states, const std::vector<SegmentOp>& ops, int levels);
void apply_segment_adjoint(CMatrix& states, const std::vector<SegmentOp>& ops, int levels);

/// Suzuki fourth-order stage weights p, p, 1-4p, p, p.
const std::array<double, 5>& suzuki4_weights();

/// Caches dense Trotter tick propagators for constant-flux ticks.
class TrotterCache {
 public:
  TrotterCache(const Simulator& sim, double period, int substeps);

  const CMatrix& tick_propagator(double coupler_flux);
  int substeps() const { return substeps_; }
  double period() const { return period_; }

 private:
  const Simulator* sim_;
  double period_;
  int substeps_;
  std::map<double, CMatrix> cache_;
};

/// Propagate the columns of `initial` (joint dimension x m) through `schedule`.
/// The exact-segment backend needs a discrete schedule and `table` built for
/// its flux staircase (see `staircase_table`).
CMatrix propagate_states(const ControlSchedule& schedule, const Simulator& sim,
                         const CMatrix& initial, Backend backend,
                         const FluxOperatorTable* table = nullptr,
                         const TrotterSettings& trotter = {});

/// Full joint-space propagator of `schedule`.
CMatrix propagate(const ControlSchedule& schedule, const Simulator& sim, Backend backend,
                  const FluxOperatorTable* table = nullptr, const TrotterSettings& trotter = {});

/// Flux table whose entry i is the staircase level i of the schedule template.
FluxOperatorTable staircase_table(const Simulator& sim, double clock_freq, int n_ramp,
                                  double flux_off, double flux_on);

/// Fréchet derivative of exp(-i H s) in direction dH for Hermitian H.
CMatrix exp_derivative(const CMatrix& h, const CMatrix& dh, double s);

// ---------------------------------------------------------------------------

template <class FluxAt>
std::vector<SegmentOp> trotter_segment(const Simulator& sim, double t0, double period, int substeps,
                                       FluxAt&& flux_at, bool with_derivatives) {
  const auto& weights = suzuki4_weights();
  const double dt = period / substeps;
  const auto& into_charge = [&](Mode m) -> const CMatrix& { return sim.charge_eigenvectors(m); };

  // Flux-independent factors per stage weight.
  struct Stage {
    std::array<CMatrix, 3> enter;  // V^dag exp(-i H s/2), qubit modes only
    std::array<CMatrix, 3> leave;  // exp(-i H s/2) V, qubit modes only
    CVector coupling;
  };
  std::array<Stage, 5> stages;
  for (std::size_t w = 0; w < weights.size(); ++w) {
    const double s = weights[w] * dt;
    for (Mode m : {Mode::Qubit1, Mode::Qubit2}) {
      const CMatrix half = hermitian_propagator(sim.idle_mode_hamiltonian(m), 0.5 * s);
      stages[w].enter[index(m)] = into_charge(m).adjoint() * half;
      stages[w].leave[index(m)] = half * into_charge(m);
    }
    stages[w].coupling = (sim.coupling_diagonal().real() * (-s)).unaryExpr([](double a) {
      return std::polar(1.0, a);
    });
  }

  std::vector<SegmentOp> ops;
  ops.reserve(static_cast<std::size_t>(substeps) * weights.size() * 7);
  double t = t0;
  for (int sub = 0; sub < substeps; ++sub) {
    for (std::size_t w = 0; w < weights.size(); ++w) {
      const double s = weights[w] * dt;
      const CouplerFluxSample sample = flux_at(t + 0.5 * s);
      const CMatrix hc = sim.basis().mode_hamiltonian(Mode::Coupler, sample.flux);
      const CMatrix half_c = hermitian_propagator(hc, 0.5 * s);
      const bool moving =
          with_derivatives && (sample.dflux_dstart != 0.0 || sample.dflux_dend != 0.0);
      CMatrix d_half_c;
      if (moving) {
        d_half_c = exp_derivative(
            hc, sim.basis().mode_hamiltonian_flux_derivative(Mode::Coupler, sample.flux), 0.5 * s);
      }
      auto coupler_op = [&](CMatrix matrix, CMatrix d_matrix) {
        SegmentOp op;
        op.mode = Mode::Coupler;
        op.matrix = std::move(matrix);
        if (moving) {
          op.flux_dependent = true;
          op.d_matrix = std::move(d_matrix);
          op.dflux_dstart = sample.dflux_dstart;
          op.dflux_dend = sample.dflux_dend;
          op.excursion = sample.excursion;
        }
        return op;
      };
      auto qubit_op = [](Mode m, const CMatrix& matrix) {
        SegmentOp op;
        op.mode = m;
        op.matrix = matrix;
        return op;
      };
      const CMatrix& vc = into_charge(Mode::Coupler);

      ops.push_back(qubit_op(Mode::Qubit1, stages[w].enter[0]));
      ops.push_back(coupler_op(vc.adjoint() * half_c,
                               moving ? CMatrix(vc.adjoint() * d_half_c) : CMatrix()));
      ops.push_back(qubit_op(Mode::Qubit2, stages[w].enter[2]));
      SegmentOp diag;
      diag.kind = SegmentOp::Kind::Diagonal;
      diag.diagonal = stages[w].coupling;
      ops.push_back(std::move(diag));
      ops.push_back(qubit_op(Mode::Qubit1, stages[w].leave[0]));
      ops.push_back(coupler_op(half_c * vc, moving ? CMatrix(d_half_c * vc) : CMatrix()));
      ops.push_back(qubit_op(Mode::Qubit2, stages[w].leave[2]));
      t += s;
    }
  }
  return ops;
}

}  // namespace sfq
