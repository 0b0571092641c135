#include "bkl/integrator.hpp"

#include <algorithm>
#include <string>

#include "bkl/error.hpp"

namespace bkl {

std::size_t fixed_step_count(double duration, double h) {
  if (!(duration > 0.0) || !(h > 0.0) || !std::isfinite(duration) || !std::isfinite(h)) {
    throw Error(ErrorCode::kInvalidArgument, "duration and step must be positive and finite");
  }
  if (h > duration) {
    throw Error(ErrorCode::kInvalidArgument, "step must not exceed the segment duration");
  }
  // A remainder below 1e-9 of a step is rounding noise, not a partial step.
  const double ratio = duration / h;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
}

void Trajectory::append(const Trajectory& next) {
  auto first = next.samples.begin();
  if (!samples.empty() && first != next.samples.end() &&
      first->state.time <= samples.back().state.time) {
    ++first;
  }
  samples.insert(samples.end(), first, next.samples.end());
  if (step_size == 0.0) step_size = next.step_size;
}

namespace {

struct Rhs {
  const BklSystem* system;
  BklSystem::Lags lags;
  void operator()(double, std::span<const double> y, std::span<double> dy) const {
    system->derivative(y, lags, dy);
  }
};

template <class OnStep>
double run(const BklSystem& system, Vector& y, double t0, double phi, double psi,
           double duration, double step, std::optional<DepletionFloors> stop_at,
           OnStep on_step) {
  const std::size_t pb = system.n_blue() + system.n_red();
  const std::size_t pr = pb + 1;
  // The 5th-order weights include a negative one, so a step can push a
  // population up when attrition varies sharply inside it.
  double prev[2] = {y[pb], y[pr]};
  return integrate_fixed(
      Rhs{&system, BklSystem::Lags(phi, psi)}, std::span<double>(y), t0, duration, step,
      [&](std::size_t k, double t, std::span<double> state) {
        for (double v : state) {
          if (!std::isfinite(v)) {
            throw Error(ErrorCode::kNonFiniteState,
                        "non-finite state after integrator step " + std::to_string(k) +
                            " (t = " + std::to_string(t) + ")");
          }
        }
        StepOutcome outcome = StepOutcome::kContinue;
        for (int side = 0; side < 2; ++side) {
          double& p = state[side == 0 ? pb : pr];
          if (p > prev[side]) {
            p = prev[side];
            outcome = StepOutcome::kModified;
          }
          if (p < 0.0) {
            p = 0.0;
            outcome = StepOutcome::kModified;
          }
          prev[side] = p;
        }
        on_step(t, state);
        if (stop_at && (state[pb] <= stop_at->blue || state[pr] <= stop_at->red)) {
          return StepOutcome::kStop;
        }
        return outcome;
      });
}

}  // namespace

SystemState advance(const BklSystem& system, const SystemState& state, double phi, double psi,
                    double duration, double step, std::optional<DepletionFloors> stop_at) {
  Vector y = system.pack(state);
  const double t = run(system, y, state.time, phi, psi, duration, step, stop_at,
                       [](double, std::span<const double>) {});
  return system.unpack(y, t);
}

Trajectory integrate_segment(const BklSystem& system, const SystemState& state, double phi,
                             double psi, double duration, double step,
                             std::optional<DepletionFloors> stop_at) {
  Trajectory out;
  out.step_size = step;
  out.samples.reserve(fixed_step_count(duration, step) + 1);
  out.samples.push_back({state, phi, psi});
  Vector y = system.pack(state);
  run(system, y, state.time, phi, psi, duration, step, stop_at,
      [&](double t, std::span<const double> current) {
        out.samples.push_back({system.unpack(current, t), phi, psi});
      });
  return out;
}

Trajectory integrate_segment(const SystemState& state, const NetworkTopology& topo,
                             const BklParameters& params, double phi, double psi,
                             double duration, double step) {
  return integrate_segment(BklSystem(topo, params), state, phi, psi, duration, step);
}

}  // namespace bkl
