#include "sfqgate/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "sfqgate/error.hpp"
#include "sfqgate/gates.hpp"

namespace sfq {

RelaxedParams initial_params(const ScheduleTemplate& tmpl, std::uint64_t seed) {
  tmpl.validate();
  RelaxedParams p(tmpl.ticks(), tmpl.excursion_count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.4, 0.6);
  for (std::size_t i = 0; i < p.amplitude_count(); ++i) p.theta(static_cast<Eigen::Index>(i)) = amp(rng);
  const double window = tmpl.duration / std::max(1, tmpl.excursion_count);
  for (int e = 0; e < tmpl.excursion_count; ++e) {
    double start = e * window + 0.1 * window;
    double end = (e + 1) * window - 0.1 * window;
    const double min_len = 2.0 * tmpl.n_ramp * tmpl.clock_period();
    if (end - start < min_len) {
      const double mid = 0.5 * (start + end);
      start = std::max(e * window, mid - 0.5 * min_len);
      end = std::min((e + 1) * window, mid + 0.5 * min_len);
    }
    p.theta(p.start_index(e)) = start;
    p.theta(p.end_index(e)) = end;
  }
  return p;
}

OptimizationRun make_run(const std::string& target_id, const ScheduleTemplate& tmpl,
                         const PenaltyConfig& penalty, std::uint64_t seed) {
  OptimizationRun run = make_run(target_gate(target_id), tmpl, penalty, seed);
  run.target_id = target_id;
  return run;
}

OptimizationRun make_run(const Matrix4c& target, const ScheduleTemplate& tmpl,
                         const PenaltyConfig& penalty, std::uint64_t seed) {
  penalty.validate();
  require(is_unitary(target, 1e-8), ErrorClass::InvalidArgument, "target is not unitary");
  OptimizationRun run;
  run.target_id = "custom";
  run.target = target;
  run.schedule_template = tmpl;
  run.penalty = penalty;
  run.seed = seed;
  run.params = initial_params(tmpl, seed);
  return run;
}

ControlSchedule round_and_snap(const RelaxedParams& params, const ScheduleTemplate& tmpl) {
  ControlSchedule s = to_schedule(params, tmpl, ScheduleMode::Discrete);
  for (int q : {1, 2})
    for (double& a : s.amplitudes(q)) a = a >= 0.5 ? 1.0 : 0.0;
  const double period = tmpl.clock_period();
  for (auto& e : s.excursions) {
    e.start = nearest_tick(e.start, period) * period;
    e.end = nearest_tick(e.end, period) * period;
  }
  double previous_end = 0.0;
  for (std::size_t i = 0; i < s.excursions.size(); ++i) {
    const auto& e = s.excursions[i];
    if (e.start < previous_end || e.end < e.start || e.end > tmpl.duration + 1e-9) {
      fail(ErrorClass::SnapFailed, "excursion ordering violated after snapping at excursion " +
                                       std::to_string(i) +
                                       (i > 0 ? " (after excursion " + std::to_string(i - 1) + ")"
                                              : std::string()));
    }
    previous_end = e.end;
  }
  try {
    s.validate();
  } catch (const Error& err) {
    fail(ErrorClass::SnapFailed, std::string("snapped schedule invalid: ") + err.what());
  }
  return s;
}

OptimizationRun optimize(OptimizationRun run, const Simulator& sim,
                         const OptimizerSettings& settings, const StageCallback& on_stage) {
  run.penalty.validate();
  const ScheduleTemplate& tmpl = run.schedule_template;
  const Matrix4c& target = run.target;
  RelaxedEvaluator evaluator(sim, target, tmpl, settings.relaxation);

  const Eigen::Index n = run.params.size();
  RVector lower(n), upper(n);
  const auto n_amp = static_cast<Eigen::Index>(run.params.amplitude_count());
  lower.head(n_amp).setConstant(settings.amplitude_epsilon);
  upper.head(n_amp).setConstant(1.0 - settings.amplitude_epsilon);
  // Excursion e lives in window e of duration / count and straddles its
  // centre by at least one ramp, so corners stay ordered through snapping.
  if (tmpl.excursion_count > 0) {
    const double window = tmpl.duration / tmpl.excursion_count;
    const double ramp = tmpl.n_ramp * tmpl.clock_period();
    require(window >= 2.0 * ramp, ErrorClass::InvalidArgument,
            "duration / excursion count is shorter than two ramps");
    for (int e = 0; e < tmpl.excursion_count; ++e) {
      const double w0 = e * window;
      const double mid = w0 + 0.5 * window;
      lower(run.params.start_index(e)) = w0;
      upper(run.params.start_index(e)) = mid - ramp;
      lower(run.params.end_index(e)) = mid + ramp;
      upper(run.params.end_index(e)) = w0 + window;
    }
  }

  LbfgsbSettings lb;
  lb.memory = settings.memory;
  lb.max_iterations = run.penalty.updates_per_stage;

  for (int stage = run.completed_stages; stage < run.penalty.stages && !run.aborted; ++stage) {
    const double gamma = run.penalty.gamma_at(stage);
    const double mu = run.penalty.mu_at(stage);
    RelaxedParams work = run.params;
    const Objective objective = [&](const RVector& x, RVector& g) {
      work.theta = x;
      return evaluator.evaluate(work, gamma, mu, &g).total;
    };
    try {
      const LbfgsbResult r = minimize_bounded(objective, run.params.theta, lower, upper, lb);
      run.params.theta = r.x;
      run.cost_trajectory.insert(run.cost_trajectory.end(), r.history.begin(), r.history.end());
      if (r.status == LbfgsbStatus::LineSearchFailed) {
        run.log.push_back("stage " + std::to_string(stage) + ": line search failed after " +
                          std::to_string(r.iterations) + " updates");
      }
    } catch (const Error& err) {
      if (err.error_class() != ErrorClass::NonFiniteCost) throw;
      run.aborted = true;
      std::ostringstream msg;
      msg << "stage " << stage << ": " << err.what() << "; gamma=" << gamma << " mu=" << mu;
      run.log.push_back(msg.str());
      break;
    }
    run.completed_stages = stage + 1;
    if (on_stage) on_stage(run);
  }
  if (run.aborted) return run;

  run.relaxed_fidelity = evaluator.report(run.params).fidelity;
  run.rounded = round_and_snap(run.params, tmpl);
  const CMatrix u = propagate(run.rounded, sim, Backend::ExactSegment);
  run.report = gate_report(u, target, sim.frame(), tmpl.duration,
                           settings.relaxation.z_compensate);
  run.finished = true;
  return run;
}

double SearchEntry::infidelity() const {
  if (!error.empty() || !run.finished) return std::numeric_limits<double>::infinity();
  return 1.0 - run.report.fidelity;
}

std::vector<SearchEntry> hyperparameter_search(const SearchSpace& space, int budget,
                                               std::uint64_t seed, const std::string& target_id,
                                               const PenaltyConfig& penalty, const Simulator& sim,
                                               const OptimizerSettings& settings,
                                               unsigned workers) {
  require(budget >= 1, ErrorClass::InvalidArgument, "budget must be >= 1");
  require(!space.clocks.empty() && !space.durations.empty() && !space.n_ramps.empty() &&
              !space.excursion_counts.empty(),
          ErrorClass::InvalidArgument, "search space has an empty dimension");
  std::mt19937_64 rng(seed);
  const auto pick = [&rng](std::size_t size) {
    return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
  };
  std::vector<SearchEntry> entries(static_cast<std::size_t>(budget));
  std::vector<ScheduleTemplate> templates(entries.size());
  std::vector<std::uint64_t> seeds(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& t = templates[i];
    const auto& clock = space.clocks[pick(space.clocks.size())];
    t.clock_freq = clock.first;
    t.kick_angle = clock.second;
    t.duration = space.durations[pick(space.durations.size())];
    t.n_ramp = space.n_ramps[pick(space.n_ramps.size())];
    t.excursion_count = space.excursion_counts[pick(space.excursion_counts.size())];
    t.flux_off = space.flux_off;
    t.flux_on = space.flux_on;
    seeds[i] = rng();
  }

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(entries.size()));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        entries[i].run = optimize(make_run(target_id, templates[i], penalty, seeds[i]), sim, settings);
      } catch (const std::exception& err) {
        entries[i].run.schedule_template = templates[i];
        entries[i].run.seed = seeds[i];
        entries[i].error = err.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].infidelity() < entries[b].infidelity();
  });
  std::vector<SearchEntry> ranked;
  ranked.reserve(entries.size());
  for (std::size_t i : order) ranked.push_back(std::move(entries[i]));
  return ranked;
}

}  // namespace sfq
