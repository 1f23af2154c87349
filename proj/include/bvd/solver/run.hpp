#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>

#include "bvd/solver/dynamics.hpp"

namespace bvd::solver {

/// Callbacks invoked by run(). Both receive immutable snapshots.
struct RunHooks {
  /// Sample every `cadence` global steps; the initial and final states are
  /// always sampled.
  std::size_t cadence = 10;
  /// Called after every accepted step with the states on both sides of it.
  std::function<void(const State& before, const State& after, std::size_t step)> on_step;
  /// Called at sample points with the global step index of the state.
  std::function<void(const State& s, std::size_t step)> on_sample;
};

struct RunResult {
  State final;
  std::size_t first_step = 0;  // global index of the initial state
  std::size_t last_step = 0;   // global index of `final`
  std::size_t samples = 0;
  std::optional<StepError> failure;

  bool partial() const { return failure.has_value(); }
  std::size_t steps_taken() const { return last_step - first_step; }
};

/// Number of steps of size dt (plus a shorter final one if needed) that
/// cover [t0, t_end].
inline std::size_t steps_to_cover(double t0, double t_end, double dt) {
  const double span = (t_end - t0) / dt;
  const double whole = std::floor(span + 1e-9);
  return static_cast<std::size_t>(whole) + (span - whole > 1e-9 ? 1 : 0);
}

/// Integrate from `initial` to t_end. `start_step` is the global step index of
/// `initial`, so a restarted run keeps the sampling phase of the original one.
/// A StepError ends the run early; the last accepted state is sampled and the
/// error is returned in the result.
inline RunResult run(const State& initial, const StepperConfig& config, double t_end,
                     const RunHooks& hooks = {}, std::size_t start_step = 0) {
  initial.validate();
  config.validate();
  if (!std::isfinite(t_end) || t_end < initial.t) {
    throw InvalidArgument("run: t_end must be finite and not before the initial time");
  }
  if (hooks.cadence == 0) throw InvalidArgument("run: cadence must be positive");

  const Stepper stepper(initial.grid(), initial.params, config);
  const std::size_t n = steps_to_cover(initial.t, t_end, config.dt);

  RunResult result{initial, start_step, start_step, 0, std::nullopt};
  std::optional<std::size_t> sampled;
  auto sample = [&](const State& s, std::size_t k) {
    if (sampled == k) return;
    if (hooks.on_sample) hooks.on_sample(s, k);
    sampled = k;
    ++result.samples;
  };
  sample(initial, start_step);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = start_step + i + 1;
    // Only a genuinely short final step deviates from dt, so that runs split
    // at a step boundary take bit-identical steps.
    const double remaining = t_end - result.final.t;
    const double h = i + 1 == n && remaining < config.dt * (1.0 - 1e-6) ? remaining : config.dt;
    if (!(h > 0.0)) break;
    State next = result.final;
    try {
      next = stepper.advance(result.final, h);
    } catch (const StepError& e) {
      result.failure = e;
      break;
    }
    if (hooks.on_step) hooks.on_step(result.final, next, k);
    result.final = std::move(next);
    result.last_step = k;
    if (k % hooks.cadence == 0) sample(result.final, k);
  }
  sample(result.final, result.last_step);
  return result;
}

}  // namespace bvd::solver
