#pragma once

// Continuous relaxation of SFQ schedules: parameter layout, the penalized
// cost, and its exact gradient by reverse accumulation through the ticks.

#include <cstddef>
#include <memory>

#include "sfqgate/fidelity.hpp"
#include "sfqgate/propagator.hpp"
#include "sfqgate/schedule.hpp"

namespace sfq {

struct ScheduleTemplate {
  double clock_freq = 20.0;
  double duration = 10.0;
  double kick_angle = kPi / 100.0;
  int n_ramp = 64;
  double flux_off = 0.352;
  double flux_on = 0.376;
  int excursion_count = 0;

  double clock_period() const { return 1.0 / clock_freq; }
  std::size_t ticks() const { return tick_count(duration, clock_freq); }
  void validate() const;
  friend bool operator==(const ScheduleTemplate&, const ScheduleTemplate&) = default;
};

/// Flattened parameters: qubit-1 amplitudes, qubit-2 amplitudes, then
/// (start, end) per excursion in ns.
struct RelaxedParams {
  std::size_t ticks = 0;
  int excursion_count = 0;
  RVector theta;

  RelaxedParams() = default;
  RelaxedParams(std::size_t ticks, int excursion_count);

  Eigen::Index amplitude_index(int qubit, std::size_t tick) const;
  Eigen::Index start_index(int excursion) const;
  Eigen::Index end_index(int excursion) const;
  std::size_t amplitude_count() const { return 2 * ticks; }
  Eigen::Index size() const { return theta.size(); }
};

ControlSchedule to_schedule(const RelaxedParams& params, const ScheduleTemplate& tmpl,
                            ScheduleMode mode = ScheduleMode::Relaxed);
RelaxedParams from_schedule(const ControlSchedule& schedule);

struct PenaltyConfig {
  double gamma = 1e-5;
  double mu = 1.0;
  double factor = 1.1;
  int updates_per_stage = 20;
  int stages = 150;

  double gamma_at(int stage) const;
  double mu_at(int stage) const;
  void validate() const;
  friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

struct CostValue {
  double total = 0.0;
  double fidelity = 0.0;
  double penalty = 0.0;
  double barrier = 0.0;
  double phi_z1 = 0.0;
  double phi_z2 = 0.0;
};

struct RelaxationSettings {
  int substeps_per_tick = 4;
  bool z_compensate = true;
};

/// Evaluates the penalized cost of relaxed schedules on one device and target.
/// Holds cached constant-flux tick propagators, so one instance per thread.
class RelaxedEvaluator {
 public:
  RelaxedEvaluator(const Simulator& sim, const Matrix4c& target, const ScheduleTemplate& tmpl,
                   const RelaxationSettings& settings = {});

  /// 1 - F + P + barrier; writes the exact gradient when `gradient` is non-null.
  CostValue evaluate(const RelaxedParams& params, double gamma, double mu,
                     RVector* gradient = nullptr);
  double cost(const RelaxedParams& params, double gamma, double mu) {
    return evaluate(params, gamma, mu).total;
  }
  RVector gradient(const RelaxedParams& params, double gamma, double mu);

  /// Relaxed-mode gate report (same propagation as the cost).
  GateReport report(const RelaxedParams& params);

  const ScheduleTemplate& schedule_template() const { return tmpl_; }
  const Simulator& simulator() const { return *sim_; }

 private:
  struct Forward;
  Forward forward(const RelaxedParams& params, bool keep_states);

  const Simulator* sim_;
  Matrix4c target_;
  ScheduleTemplate tmpl_;
  RelaxationSettings settings_;
  std::unique_ptr<TrotterCache> cache_;
};

/// P = gamma [sum a(1 - a) - sum cos(2 pi t / T)], barrier = -mu sum [ln a + ln(1 - a)];
/// adds their gradients to `gradient` when non-null.
void penalty_terms(const RelaxedParams& params, double clock_period, double gamma, double mu,
                   double& penalty, double& barrier, RVector* gradient);

}  // namespace sfq
