#pragma once

#include <random>

#include "sfqgate/device.hpp"
#include "sfqgate/propagator.hpp"
#include "sfqgate/relaxation.hpp"

namespace sfq::bench {

inline const Simulator& simulator() {
  static const Simulator sim(build_device(CircuitParams{}));
  return sim;
}

// Random discrete schedule with one excursion in the middle.
inline ControlSchedule random_schedule(double duration, int n_ramp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution kick(0.3);
  ControlSchedule s = ControlSchedule::idle(duration, 20.0, kPi / 100.0);
  s.n_ramp = n_ramp;
  for (auto* amps : {&s.amplitudes_q1, &s.amplitudes_q2})
    for (double& a : *amps) a = kick(rng) ? 1.0 : 0.0;
  const double p = s.clock_period();
  const double half = std::floor(0.5 * duration / p) * p;
  s.excursions.push_back({half - 2 * n_ramp * p, half + 2 * n_ramp * p});
  return s;
}

}  // namespace sfq::bench
