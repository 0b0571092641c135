#pragma once

// Fixed-step Dormand-Prince 5(4). The embedded 4th-order estimate is never
// used: there is no step-size control, the 5th-order weights propagate.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bkl/dynamics.hpp"

namespace bkl {

namespace dopri {

inline constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                        kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                        kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
// 5th-order weights; identical to the seventh stage row (FSAL).
inline constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                        kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;

}  // namespace dopri

/// One-step propagator over a caller-supplied right-hand side
/// `rhs(t, y, dy)`. Reuses the last stage as the next first stage unless the
/// state was touched between steps (call `invalidate()` in that case).
template <class Rhs>
class DormandPrinceStepper {
 public:
  DormandPrinceStepper(Rhs rhs, std::size_t dim)
      : rhs_(std::move(rhs)), dim_(dim), tmp_(dim) {
    for (auto& k : k_) k.resize(dim);
  }

  void invalidate() noexcept { have_first_stage_ = false; }

  void step(double t, double h, std::span<double> y) {
    using namespace dopri;
    auto& [k1, k2, k3, k4, k5, k6, k7] = k_;
    if (!have_first_stage_) rhs_(t, std::span<const double>(y), std::span<double>(k1));

    for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = y[i] + h * kA21 * k1[i];
    rhs_(t + kC[1] * h, tmp_, k2);
    for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    rhs_(t + kC[2] * h, tmp_, k3);
    for (std::size_t i = 0; i < dim_; ++i)
      tmp_[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    rhs_(t + kC[3] * h, tmp_, k4);
    for (std::size_t i = 0; i < dim_; ++i)
      tmp_[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
    rhs_(t + kC[4] * h, tmp_, k5);
    for (std::size_t i = 0; i < dim_; ++i)
      tmp_[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] +
                            kA65 * k5[i]);
    rhs_(t + kC[5] * h, tmp_, k6);
    for (std::size_t i = 0; i < dim_; ++i)
      y[i] += h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] + kB6 * k6[i]);
    rhs_(t + h, std::span<const double>(y), std::span<double>(k7));
    std::swap(k1, k7);
    have_first_stage_ = true;
  }

 private:
  Rhs rhs_;
  std::size_t dim_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> tmp_;
  bool have_first_stage_ = false;
};

enum class StepOutcome { kContinue, kModified, kStop };

/// Number of fixed steps needed to cover `duration` with step `h`; the last
/// one may be shorter so the run lands exactly on t0 + duration.
std::size_t fixed_step_count(double duration, double h);

/// Integrates `y` in place from t0 for `duration`. `after(step_index, t, y)`
/// runs after every step and may clamp the state (kModified) or end the run
/// early (kStop). Returns the time reached.
template <class Rhs, class After>
double integrate_fixed(Rhs rhs, std::span<double> y, double t0, double duration, double h,
                       After after) {
  DormandPrinceStepper<Rhs> stepper(std::move(rhs), y.size());
  const std::size_t steps = fixed_step_count(duration, h);
  const double t_end = t0 + duration;
  double t = t0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = (k + 1 == steps) ? t_end : t0 + static_cast<double>(k + 1) * h;
    stepper.step(t, t_next - t, y);
    t = t_next;
    const StepOutcome outcome = after(k, t, y);
    if (outcome == StepOutcome::kStop) break;
    if (outcome == StepOutcome::kModified) stepper.invalidate();
  }
  return t;
}

struct TrajectorySample {
  SystemState state;
  double phi = 0.0;  // Blue lag in force while reaching this sample
  double psi = 0.0;  // Red lag in force while reaching this sample
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double step_size = 0.0;

  /// Appends `next`, dropping its first sample when it repeats our last time.
  void append(const Trajectory& next);
};

struct DepletionFloors {
  double blue = 0.0;
  double red = 0.0;
};

/// Advances `state` by `duration` holding (phi, psi) fixed. Populations are
/// clamped at zero after each full step. With `stop_at`, integration ends at
/// the first step after which a population is at or below its floor.
/// Throws kNonFiniteState naming the failing step.
SystemState advance(const BklSystem& system, const SystemState& state, double phi, double psi,
                    double duration, double step,
                    std::optional<DepletionFloors> stop_at = std::nullopt);

/// As `advance`, but records every step.
Trajectory integrate_segment(const BklSystem& system, const SystemState& state, double phi,
                             double psi, double duration, double step,
                             std::optional<DepletionFloors> stop_at = std::nullopt);

Trajectory integrate_segment(const SystemState& state, const NetworkTopology& topo,
                             const BklParameters& params, double phi, double psi,
                             double duration, double step);

}  // namespace bkl
