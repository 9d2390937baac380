#pragma once

#include <cstddef>
#include <vector>

#include "sfqgate/types.hpp"

namespace sfq {

enum class ScheduleMode { Relaxed, Discrete };

/// Coupler excursion window in ns: ramp up from `start`, hold, ramp down to `end`.
struct Excursion {
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const Excursion&, const Excursion&) = default;
};

/// Number of whole clock periods in `duration` ns at `clock_freq` GHz.
std::size_t tick_count(double duration, double clock_freq);

struct ControlSchedule {
  double clock_freq = 20.0;  // GHz
  double duration = 0.0;     // ns
  double kick_angle = kPi / 100.0;
  std::vector<double> amplitudes_q1;
  std::vector<double> amplitudes_q2;
  std::vector<Excursion> excursions;
  int n_ramp = 64;
  double flux_off = 0.352;
  double flux_on = 0.376;
  ScheduleMode mode = ScheduleMode::Discrete;

  double clock_period() const { return 1.0 / clock_freq; }
  std::size_t ticks() const { return tick_count(duration, clock_freq); }

  /// qubit is 1 or 2.
  const std::vector<double>& amplitudes(int qubit) const;
  std::vector<double>& amplitudes(int qubit);

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;

  /// Schedule with `duration` and all-zero amplitudes on the clock grid.
  static ControlSchedule idle(double duration, double clock_freq, double kick_angle,
                              ScheduleMode mode = ScheduleMode::Discrete);

  friend bool operator==(const ControlSchedule&, const ControlSchedule&) = default;
};

/// Coupler flux as a fraction of the off -> on swing, with its derivative
/// with respect to the corner times of the excursion that sets it.
struct FluxSample {
  double level = 0.0;  // in [0, 1]
  double d_start = 0.0;
  double d_end = 0.0;
  int excursion = -1;
};

/// Continuous trapezoid. Ramps are linear and shifted by half a clock period
/// so that their value at each tick midpoint equals the discrete staircase.
FluxSample relaxed_flux_level(const ControlSchedule& schedule, double t);

/// Staircase level in 0..n_ramp for clock tick `tick` of a discrete schedule.
int discrete_flux_level(const ControlSchedule& schedule, std::size_t tick);

/// Coupler flux (flux quanta) at time t in [0, duration].
double flux_trajectory(const ControlSchedule& schedule, double t);

/// Corner time (ns) to the nearest clock tick index.
long nearest_tick(double t, double clock_period);

}  // namespace sfq
