#include "bkl/game.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bkl/error.hpp"

namespace bkl {

ActionGrid make_action_grid(int n_actions) {
  if (n_actions < 2) {
    throw Error(ErrorCode::kInvalidArgument, "action grid needs at least 2 actions");
  }
  ActionGrid grid;
  grid.values.resize(static_cast<std::size_t>(n_actions));
  const double denom = static_cast<double>(n_actions - 1);
  for (int k = 0; k < n_actions; ++k) {
    grid.values[static_cast<std::size_t>(k)] = std::numbers::pi * k / denom;
  }
  grid.values.back() = std::numbers::pi;
  return grid;
}

void GameConfig::validate() const {
  if (n_actions < 2) throw Error(ErrorCode::kInvalidArgument, "n_actions must be >= 2");
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  for (std::size_t i = 0; i < decision_times.size(); ++i) {
    if (!std::isfinite(decision_times[i]) || decision_times[i] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "decision times must be finite and >= 0");
    }
    if (i > 0 && !(decision_times[i] > decision_times[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "decision times must be strictly increasing");
    }
  }
  if (!decision_times.empty() && !(decision_times.back() < horizon)) {
    throw Error(ErrorCode::kInvalidArgument, "last decision time must precede the horizon");
  }
  if (termination_floors.blue < 0.0 || termination_floors.red < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "termination floors must be non-negative");
  }
}

double GameConfig::window(int stage) const {
  const auto s = static_cast<std::size_t>(stage);
  const double start = decision_times.at(s);
  const double end = s + 1 < decision_times.size() ? decision_times[s + 1] : horizon;
  return end - start;
}

std::string_view to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::kNone: return "none";
    case TerminalReason::kHorizon: return "horizon";
    case TerminalReason::kBlueDepleted: return "blue_depleted";
    case TerminalReason::kRedDepleted: return "red_depleted";
  }
  return "unknown";
}

TerminalStatus is_terminal(const GameState& state, const GameConfig& config) {
  if (state.system.pop_blue <= config.termination_floors.blue) {
    return {true, TerminalReason::kBlueDepleted};
  }
  if (state.system.pop_red <= config.termination_floors.red) {
    return {true, TerminalReason::kRedDepleted};
  }
  if (state.stage >= config.num_stages()) return {true, TerminalReason::kHorizon};
  return {};
}

Utilities terminal_utility(const GameState& state) {
  const double diff = state.system.pop_blue - state.system.pop_red;
  return {diff, -diff};
}

EquilibriumCell security_solve(const UtilityMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty utility matrix");
  EquilibriumCell best;
  bool have_best = false;
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t arg_min = 0;
    for (std::size_t b = 0; b < n; ++b) {
      const double v = matrix(a, b);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite utility at (" + std::to_string(a) +
                                                     ", " + std::to_string(b) + ")");
      }
      if (v < matrix(a, arg_min)) arg_min = b;
    }
    const double row_min = matrix(a, arg_min);
    if (!have_best || row_min > best.value) {
      best = {static_cast<int>(a), static_cast<int>(arg_min), row_min};
      have_best = true;
    }
  }
  return best;
}

GameState advance_stage(const BklSystem& system, const GameConfig& config,
                        const ActionGrid& grid, const GameState& state, int blue_idx,
                        int red_idx) {
  const int b = config.n_actions;
  if (blue_idx < 0 || blue_idx >= b || red_idx < 0 || red_idx >= b) {
    throw Error(ErrorCode::kInvalidArgument, "action index outside the grid");
  }
  if (is_terminal(state, config).terminal) {
    throw Error(ErrorCode::kInvalidArgument, "cannot act in a terminal state");
  }
  GameState next;
  // Depletion may stop the segment early, so the window is measured from the
  // decision time rather than from the state's clock.
  const double end = state.stage + 1 < config.num_stages()
                         ? config.decision_times[static_cast<std::size_t>(state.stage + 1)]
                         : config.horizon;
  const double duration = end - state.system.time;
  next.system = advance(system, state.system, grid[static_cast<std::size_t>(blue_idx)],
                        grid[static_cast<std::size_t>(red_idx)], duration,
                        std::min(config.step, duration), config.termination_floors);
  next.stage = state.stage + 1;
  next.history = state.history;
  next.history.push_back({blue_idx, red_idx});
  return next;
}

GameState apply_actions(const GameState& state, int blue_idx, int red_idx,
                        const GameConfig& config, const NetworkTopology& topo,
                        const BklParameters& params) {
  config.validate();
  return advance_stage(BklSystem(topo, params), config, make_action_grid(config.n_actions),
                       state, blue_idx, red_idx);
}

BklGame::BklGame(NetworkTopology topo, BklParameters params, GameConfig config,
                 SystemState initial)
    : topo_(std::move(topo)),
      params_(std::move(params)),
      config_(std::move(config)),
      initial_(std::move(initial)),
      grid_(make_action_grid(config_.n_actions)),
      system_(topo_, params_) {
  config_.validate();
  if (initial_.beta.size() != topo_.n_blue() || initial_.rho.size() != topo_.n_red()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial phases do not match topology");
  }
  if (initial_.pop_blue < 0.0 || initial_.pop_red < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "initial populations must be non-negative");
  }
  if (!config_.decision_times.empty()) initial_.time = config_.decision_times.front();
}

GameState BklGame::root() const {
  GameState s;
  s.system = initial_;
  return s;
}

GameState BklGame::apply(const GameState& s, int blue_idx, int red_idx) const {
  return advance_stage(system_, config_, grid_, s, blue_idx, red_idx);
}

}  // namespace bkl
