#pragma once

// Finite simultaneous-move game over BKL dynamics. Blue picks a lag phi and
// Red a lag psi from a shared grid at each decision time; the system is then
// integrated to the next decision time.

#include <concepts>
#include <cstddef>
#include <string_view>
#include <vector>

#include "bkl/dynamics.hpp"
#include "bkl/integrator.hpp"

namespace bkl {

struct ActionGrid {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// B evenly spaced lags covering [0, π] including both ends.
ActionGrid make_action_grid(int n_actions);

struct GameConfig {
  int n_actions = 4;
  std::vector<double> decision_times = {0.0, 30.0, 60.0, 90.0};
  double horizon = 120.0;
  DepletionFloors termination_floors{1e-3, 1e-5};
  double step = 0.5;

  void validate() const;
  int num_stages() const noexcept { return static_cast<int>(decision_times.size()); }
  /// Length of the window that follows decision point `stage`.
  double window(int stage) const;

  bool operator==(const GameConfig&) const = default;
};

struct ActionPair {
  int blue = 0;
  int red = 0;
  bool operator==(const ActionPair&) const = default;
};

struct GameState {
  SystemState system;
  int stage = 0;
  std::vector<ActionPair> history;
};

enum class TerminalReason { kNone, kHorizon, kBlueDepleted, kRedDepleted };

std::string_view to_string(TerminalReason reason);

struct TerminalStatus {
  bool terminal = false;
  TerminalReason reason = TerminalReason::kNone;
};

TerminalStatus is_terminal(const GameState& state, const GameConfig& config);

struct Utilities {
  double blue = 0.0;
  double red = 0.0;
};

/// Final balance of resources, zero-sum. Valid at any state.
Utilities terminal_utility(const GameState& state);

/// Blue payoffs; rows are Blue actions, columns Red actions.
class UtilityMatrix {
 public:
  explicit UtilityMatrix(std::size_t n, double fill = 0.0) : n_(n), entries_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t blue, std::size_t red) { return entries_[blue * n_ + red]; }
  double operator()(std::size_t blue, std::size_t red) const { return entries_[blue * n_ + red]; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

struct EquilibriumCell {
  int blue_index = 0;
  int red_index = 0;
  double value = 0.0;
};

/// max over Blue rows of the min over Red columns. Ties go to the lowest
/// index for both players. Throws kInvalidArgument on non-finite entries.
EquilibriumCell security_solve(const UtilityMatrix& matrix);

/// Integrates from the current decision time to the next one (or the horizon)
/// with the chosen grid lags held fixed. Integration stops early once a
/// population falls to its termination floor.
GameState apply_actions(const GameState& state, int blue_idx, int red_idx,
                        const GameConfig& config, const NetworkTopology& topo,
                        const BklParameters& params);

/// Interface the solvers search over. Utilities are Blue's; Red's is the
/// negation.
template <class G>
concept SimultaneousGame = requires(const G& g, const typename G::State& s, int a) {
  { g.num_actions() } -> std::convertible_to<int>;
  { g.num_stages() } -> std::convertible_to<int>;
  { g.is_terminal(s) } -> std::convertible_to<bool>;
  { g.utility(s) } -> std::convertible_to<double>;
  { g.apply(s, a, a) } -> std::convertible_to<typename G::State>;
  { g.history(s) } -> std::convertible_to<const std::vector<ActionPair>&>;
};

/// A BKL game bound to one topology, parameter set and configuration.
class BklGame {
 public:
  using State = GameState;

  BklGame(NetworkTopology topo, BklParameters params, GameConfig config,
          SystemState initial);

  State root() const;
  int num_actions() const noexcept { return config_.n_actions; }
  int num_stages() const noexcept { return config_.num_stages(); }
  bool is_terminal(const State& s) const { return bkl::is_terminal(s, config_).terminal; }
  double utility(const State& s) const { return terminal_utility(s).blue; }
  State apply(const State& s, int blue_idx, int red_idx) const;
  const std::vector<ActionPair>& history(const State& s) const { return s.history; }

  const NetworkTopology& topology() const noexcept { return topo_; }
  const BklParameters& params() const noexcept { return params_; }
  const GameConfig& config() const noexcept { return config_; }
  const ActionGrid& grid() const noexcept { return grid_; }
  const BklSystem& system() const noexcept { return system_; }

 private:
  NetworkTopology topo_;
  BklParameters params_;
  GameConfig config_;
  SystemState initial_;
  ActionGrid grid_;
  BklSystem system_;
};

static_assert(SimultaneousGame<BklGame>);

/// Shared by `apply_actions` and `BklGame::apply`.
GameState advance_stage(const BklSystem& system, const GameConfig& config,
                        const ActionGrid& grid, const GameState& state, int blue_idx,
                        int red_idx);

}  // namespace bkl
