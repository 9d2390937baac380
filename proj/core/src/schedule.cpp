#include "sfqgate/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfqgate/error.hpp"

namespace sfq {

namespace {

constexpr double kGridTol = 1e-9;

bool on_grid(double t, double period) {
  const double ticks = t / period;
  return std::abs(ticks - std::round(ticks)) <= kGridTol * std::max(1.0, std::abs(ticks));
}

}  // namespace

std::size_t tick_count(double duration, double clock_freq) {
  if (!(duration > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(duration * clock_freq + 1e-9));
}

long nearest_tick(double t, double clock_period) { return std::lround(t / clock_period); }

const std::vector<double>& ControlSchedule::amplitudes(int qubit) const {
  require(qubit == 1 || qubit == 2, ErrorClass::InvalidArgument, "qubit must be 1 or 2");
  return qubit == 1 ? amplitudes_q1 : amplitudes_q2;
}

std::vector<double>& ControlSchedule::amplitudes(int qubit) {
  require(qubit == 1 || qubit == 2, ErrorClass::InvalidArgument, "qubit must be 1 or 2");
  return qubit == 1 ? amplitudes_q1 : amplitudes_q2;
}

ControlSchedule ControlSchedule::idle(double duration, double clock_freq, double kick_angle,
                                      ScheduleMode mode) {
  ControlSchedule s;
  s.clock_freq = clock_freq;
  s.duration = duration;
  s.kick_angle = kick_angle;
  s.mode = mode;
  s.amplitudes_q1.assign(s.ticks(), 0.0);
  s.amplitudes_q2.assign(s.ticks(), 0.0);
  return s;
}

void ControlSchedule::validate() const {
  require(clock_freq > 0.0 && std::isfinite(clock_freq), ErrorClass::InvalidArgument,
          "clock_freq must be > 0");
  require(duration >= 0.0 && std::isfinite(duration), ErrorClass::InvalidArgument,
          "duration must be >= 0");
  require(std::isfinite(kick_angle), ErrorClass::InvalidArgument, "kick_angle must be finite");
  require(n_ramp >= 1, ErrorClass::InvalidArgument, "n_ramp must be >= 1");
  require(flux_off >= 0.0 && flux_off < 1.0 && flux_on >= 0.0 && flux_on < 1.0,
          ErrorClass::InvalidArgument, "flux_off/flux_on must lie in [0, 1)");
  const std::size_t n = ticks();
  require(amplitudes_q1.size() == n && amplitudes_q2.size() == n, ErrorClass::InvalidArgument,
          "amplitude vectors must have floor(duration * clock_freq) = " + std::to_string(n) +
              " entries");
  for (const auto* amps : {&amplitudes_q1, &amplitudes_q2}) {
    for (double a : *amps) {
      if (mode == ScheduleMode::Discrete) {
        require(a == 0.0 || a == 1.0, ErrorClass::InvalidArgument,
                "discrete amplitudes must be 0 or 1");
      } else {
        require(a >= 0.0 && a <= 1.0, ErrorClass::InvalidArgument,
                "relaxed amplitudes must lie in [0, 1]");
      }
    }
  }
  const double period = clock_period();
  double previous_end = 0.0;
  for (std::size_t i = 0; i < excursions.size(); ++i) {
    const auto& e = excursions[i];
    const std::string tag = "excursion " + std::to_string(i) + ": ";
    require(e.start >= previous_end - kGridTol && e.end <= duration + kGridTol,
            ErrorClass::InvalidArgument, tag + "must be ordered and inside [0, duration]");
    require(e.end - e.start >= 2.0 * n_ramp * period - kGridTol, ErrorClass::InvalidArgument,
            tag + "window shorter than two ramps");
    if (mode == ScheduleMode::Discrete) {
      require(on_grid(e.start, period) && on_grid(e.end, period), ErrorClass::InvalidArgument,
              tag + "corner times must lie on the clock grid");
    }
    previous_end = e.end;
  }
}

FluxSample relaxed_flux_level(const ControlSchedule& s, double t) {
  const double period = s.clock_period();
  const double n = static_cast<double>(s.n_ramp);
  FluxSample best;
  for (std::size_t i = 0; i < s.excursions.size(); ++i) {
    const auto& e = s.excursions[i];
    const double up = (t - e.start) / period + 0.5;
    const double down = (e.end - t) / period + 0.5;
    FluxSample sample;
    sample.excursion = static_cast<int>(i);
    double steps = 0.0;
    if (up <= down) {
      steps = up;
      if (up > 0.0 && up < n) sample.d_start = -1.0 / (period * n);
    } else {
      steps = down;
      if (down > 0.0 && down < n) sample.d_end = 1.0 / (period * n);
    }
    sample.level = std::clamp(steps, 0.0, n) / n;
    if (sample.level > best.level) best = sample;
  }
  if (best.level == 0.0) return FluxSample{};
  return best;
}

int discrete_flux_level(const ControlSchedule& s, std::size_t tick) {
  const double period = s.clock_period();
  const long j = static_cast<long>(tick);
  long level = 0;
  for (const auto& e : s.excursions) {
    const long start = nearest_tick(e.start, period);
    const long end = nearest_tick(e.end, period);
    const long steps = std::min({j - start + 1, end - j, static_cast<long>(s.n_ramp)});
    level = std::max(level, steps);
  }
  return static_cast<int>(std::clamp(level, 0L, static_cast<long>(s.n_ramp)));
}

double flux_trajectory(const ControlSchedule& s, double t) {
  require(t >= 0.0 && t <= s.duration, ErrorClass::InvalidArgument,
          "flux_trajectory: t outside [0, duration]");
  const double swing = s.flux_on - s.flux_off;
  if (s.mode == ScheduleMode::Relaxed) return s.flux_off + swing * relaxed_flux_level(s, t).level;
  const std::size_t n = s.ticks();
  if (n == 0) return s.flux_off;
  const auto tick = std::min(static_cast<std::size_t>(std::floor(t / s.clock_period())), n - 1);
  return s.flux_off + swing * discrete_flux_level(s, tick) / static_cast<double>(s.n_ramp);
}

}  // namespace sfq
