#pragma once

// Game-tree solvers over any SimultaneousGame. Two are exact (Full Tree and
// Nash Dominant pruning), two approximate (Myopic and decoupled UCT).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bkl/error.hpp"
#include "bkl/game.hpp"

namespace bkl {

struct SolveReport {
  std::string solver_name;
  double value = 0.0;  // Blue utility
  std::vector<ActionPair> path;
  std::uint64_t leaf_evaluations = 0;
  std::uint64_t nodes_expanded = 0;
  std::chrono::nanoseconds wall_time{0};
  std::string config_digest;

  double wall_ms() const { return std::chrono::duration<double, std::milli>(wall_time).count(); }
};

inline constexpr double kDefaultExploration = 1.4142135623730951;

struct MctsConfig {
  /// Explicit iteration budget; when zero, `budget_fraction` of the full
  /// leaf count B^(2K) is used instead.
  std::uint64_t iterations = 0;
  double budget_fraction = 0.2;
  double exploration_c = kDefaultExploration;
  std::uint64_t seed = 1;

  bool operator==(const MctsConfig&) const = default;
};

/// Root statistics kept for inspection after a MCTS run.
struct MctsRootStats {
  std::vector<std::uint64_t> blue_visits;
  std::vector<std::uint64_t> red_visits;
  std::vector<double> blue_mean;
  std::vector<double> red_mean;
  std::uint64_t visits = 0;
  double reward_min = 0.0;
  double reward_max = 0.0;
  std::uint64_t tree_nodes = 0;
};

/// B^(2K) saturated at UINT64_MAX.
std::uint64_t full_leaf_count(int n_actions, int n_stages);

/// Iterations a MCTS run will use for this game size.
std::uint64_t resolve_mcts_iterations(const MctsConfig& config, int n_actions, int n_stages);

namespace detail {

struct Subgame {
  double value = 0.0;
  std::vector<ActionPair> path;
};

template <SimultaneousGame G>
class ExactSearch {
 public:
  using State = typename G::State;

  explicit ExactSearch(const G& game) : game_(game), n_(game.num_actions()) {}

  Subgame full_tree(const State& s) {
    if (game_.is_terminal(s)) return leaf(s);
    const auto n = static_cast<std::size_t>(n_);
    UtilityMatrix values(n);
    std::vector<std::vector<ActionPair>> paths(n * n);
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        Subgame child = full_tree(expand(s, a, b));
        values(a, b) = child.value;
        paths[cell(a, b)] = std::move(child.path);
      }
    }
    return back_up(values, paths);
  }

  // Blue actions are the "columns" of the pruning rule: a Blue action's
  // security level is the minimum over Red replies. Once one Blue action has
  // been fully explored, any reply to a later Blue action that falls strictly
  // below the best completed minimum proves that action cannot be the max-min
  // choice, so its remaining replies are skipped and filled with that value.
  Subgame nash_dominant(const State& s) {
    if (game_.is_terminal(s)) return leaf(s);
    const auto n = static_cast<std::size_t>(n_);
    UtilityMatrix values(n);
    std::vector<std::vector<ActionPair>> paths(n * n);
    double best_min = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_; ++a) {
      double column_min = std::numeric_limits<double>::infinity();
      for (int b = 0; b < n_; ++b) {
        Subgame child = nash_dominant(expand(s, a, b));
        values(a, b) = child.value;
        paths[cell(a, b)] = std::move(child.path);
        column_min = std::min(column_min, child.value);
        if (child.value < best_min) {
          for (int rest = b + 1; rest < n_; ++rest) values(a, rest) = child.value;
          break;
        }
      }
      best_min = std::max(best_min, column_min);
    }
    return back_up(values, paths);
  }

  std::uint64_t leaf_evaluations = 0;
  std::uint64_t nodes_expanded = 0;

 private:
  std::size_t cell(int a, int b) const { return static_cast<std::size_t>(a * n_ + b); }

  Subgame leaf(const State& s) {
    ++leaf_evaluations;
    return {game_.utility(s), {}};
  }

  State expand(const State& s, int a, int b) {
    ++nodes_expanded;
    return game_.apply(s, a, b);
  }

  Subgame back_up(const UtilityMatrix& values, std::vector<std::vector<ActionPair>>& paths) {
    const EquilibriumCell eq = security_solve(values);
    Subgame out;
    out.value = eq.value;
    auto& tail = paths[cell(eq.blue_index, eq.red_index)];
    out.path.reserve(tail.size() + 1);
    out.path.push_back({eq.blue_index, eq.red_index});
    out.path.insert(out.path.end(), tail.begin(), tail.end());
    return out;
  }

  const G& game_;
  int n_;
};

template <class F>
SolveReport timed(std::string name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report = body();
  report.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  report.solver_name = std::move(name);
  return report;
}

}  // namespace detail

/// Depth-first enumeration of every action pair with a security solve at
/// each node.
template <SimultaneousGame G>
SolveReport solve_full_tree(const G& game, const typename G::State& root) {
  return detail::timed("full", [&] {
    detail::ExactSearch<G> search(game);
    detail::Subgame result = search.full_tree(root);
    SolveReport r;
    r.value = result.value;
    r.path = std::move(result.path);
    r.leaf_evaluations = search.leaf_evaluations;
    r.nodes_expanded = search.nodes_expanded;
    return r;
  });
}

/// Exact solve with column pruning; same value and path as the full tree.
template <SimultaneousGame G>
SolveReport solve_nash_dominant(const G& game, const typename G::State& root) {
  return detail::timed("nash-dominant", [&] {
    detail::ExactSearch<G> search(game);
    detail::Subgame result = search.nash_dominant(root);
    SolveReport r;
    r.value = result.value;
    r.path = std::move(result.path);
    r.leaf_evaluations = search.leaf_evaluations;
    r.nodes_expanded = search.nodes_expanded;
    return r;
  });
}

/// One-step lookahead per stage: score every action pair by the utility at
/// the end of the window, commit the security cell, descend.
template <SimultaneousGame G>
SolveReport solve_myopic(const G& game, const typename G::State& root) {
  return detail::timed("myopic", [&] {
    using State = typename G::State;
    const int n = game.num_actions();
    SolveReport r;
    State current = root;
    while (!game.is_terminal(current)) {
      UtilityMatrix values(static_cast<std::size_t>(n));
      std::vector<State> children;
      children.reserve(static_cast<std::size_t>(n * n));
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          children.push_back(game.apply(current, a, b));
          ++r.nodes_expanded;
          ++r.leaf_evaluations;
          values(a, b) = game.utility(children.back());
        }
      }
      const EquilibriumCell eq = security_solve(values);
      r.path.push_back({eq.blue_index, eq.red_index});
      current = std::move(children[static_cast<std::size_t>(eq.blue_index * n + eq.red_index)]);
    }
    r.value = game.utility(current);
    if (r.leaf_evaluations == 0) r.leaf_evaluations = 1;
    return r;
  });
}

namespace detail {

template <SimultaneousGame G>
class DecoupledUct {
 public:
  using State = typename G::State;

  DecoupledUct(const G& game, const MctsConfig& config)
      : game_(game), n_(game.num_actions()), config_(config), rng_(config.seed) {}

  SolveReport run(const State& root, std::uint64_t iterations, MctsRootStats* stats) {
    SolveReport r;
    nodes_.clear();
    nodes_.push_back(make_node(root));
    for (std::uint64_t it = 0; it < iterations; ++it) iterate();
    r.leaf_evaluations = iterations;
    recommend(root, r);
    r.nodes_expanded = expansions_;
    if (stats) fill_stats(*stats);
    return r;
  }

 private:
  struct Node {
    State state;
    bool terminal = false;
    std::uint64_t visits = 0;
    std::vector<double> blue_sum, red_sum;
    std::vector<std::uint64_t> blue_visits, red_visits;
    std::vector<std::int64_t> children;  // B*B, -1 while unexpanded
  };

  struct Step {
    std::size_t node;
    int blue;
    int red;
  };

  Node make_node(State s) {
    Node nd;
    nd.terminal = game_.is_terminal(s);
    nd.state = std::move(s);
    if (!nd.terminal) {
      const auto n = static_cast<std::size_t>(n_);
      nd.blue_sum.assign(n, 0.0);
      nd.red_sum.assign(n, 0.0);
      nd.blue_visits.assign(n, 0);
      nd.red_visits.assign(n, 0);
      nd.children.assign(n * n, -1);
    }
    return nd;
  }

  // Maps a mean Blue reward into [0, 1] using the running leaf-reward range.
  double normalize_blue(double mean) const {
    if (!(reward_max_ > reward_min_)) return 0.5;
    return (mean - reward_min_) / (reward_max_ - reward_min_);
  }
  // Red rewards are negated Blue rewards, so their range is [-max, -min].
  double normalize_red(double mean) const {
    if (!(reward_max_ > reward_min_)) return 0.5;
    return (mean + reward_max_) / (reward_max_ - reward_min_);
  }

  int select(const std::vector<double>& sums, const std::vector<std::uint64_t>& visits,
             std::uint64_t node_visits, bool red, double c) {
    std::vector<int> unvisited;
    for (int a = 0; a < n_; ++a) {
      if (visits[static_cast<std::size_t>(a)] == 0) unvisited.push_back(a);
    }
    if (!unvisited.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, unvisited.size() - 1);
      return unvisited[pick(rng_)];
    }
    const double log_n = std::log(static_cast<double>(node_visits));
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_; ++a) {
      const auto i = static_cast<std::size_t>(a);
      const double count = static_cast<double>(visits[i]);
      const double mean = sums[i] / count;
      const double exploit = red ? normalize_red(mean) : normalize_blue(mean);
      const double score = exploit + c * std::sqrt(log_n / count);
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    return best;
  }

  void iterate() {
    std::vector<Step> path;
    std::size_t idx = 0;
    double reward = 0.0;
    while (true) {
      if (nodes_[idx].terminal) {
        reward = game_.utility(nodes_[idx].state);
        break;
      }
      const int a = select(nodes_[idx].blue_sum, nodes_[idx].blue_visits, nodes_[idx].visits,
                           false, config_.exploration_c);
      const int b = select(nodes_[idx].red_sum, nodes_[idx].red_visits, nodes_[idx].visits,
                           true, config_.exploration_c);
      path.push_back({idx, a, b});
      const auto slot = static_cast<std::size_t>(a * n_ + b);
      const std::int64_t child = nodes_[idx].children[slot];
      if (child >= 0) {
        idx = static_cast<std::size_t>(child);
        continue;
      }
      // Expansion: one new tree node per iteration, then a uniform random
      // playout to a terminal state.
      ++expansions_;
      State next = game_.apply(nodes_[idx].state, a, b);
      nodes_.push_back(make_node(std::move(next)));
      const std::size_t created = nodes_.size() - 1;
      nodes_[idx].children[slot] = static_cast<std::int64_t>(created);
      reward = playout(created, path);
      break;
    }
    reward_min_ = seen_reward_ ? std::min(reward_min_, reward) : reward;
    reward_max_ = seen_reward_ ? std::max(reward_max_, reward) : reward;
    seen_reward_ = true;
    for (const Step& step : path) {
      Node& nd = nodes_[step.node];
      const auto a = static_cast<std::size_t>(step.blue);
      const auto b = static_cast<std::size_t>(step.red);
      ++nd.visits;
      nd.blue_sum[a] += reward;
      ++nd.blue_visits[a];
      nd.red_sum[b] -= reward;
      ++nd.red_visits[b];
    }
  }

  double playout(std::size_t created, std::vector<Step>& path) {
    const Node& fresh = nodes_[created];
    if (fresh.terminal) return game_.utility(fresh.state);
    // The first playout move is taken from the new node's own statistics so
    // that it is recorded there.
    const int a = select(fresh.blue_sum, fresh.blue_visits, fresh.visits, false,
                         config_.exploration_c);
    const int b = select(fresh.red_sum, fresh.red_visits, fresh.visits, true,
                         config_.exploration_c);
    path.push_back({created, a, b});
    ++expansions_;
    State s = game_.apply(fresh.state, a, b);
    std::uniform_int_distribution<int> pick(0, n_ - 1);
    while (!game_.is_terminal(s)) {
      const int ra = pick(rng_);
      const int rb = pick(rng_);
      ++expansions_;
      s = game_.apply(s, ra, rb);
    }
    return game_.utility(s);
  }

  static int greedy(const std::vector<double>& sums, const std::vector<std::uint64_t>& visits) {
    int best = -1;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < sums.size(); ++a) {
      if (visits[a] == 0) continue;
      const double mean = sums[a] / static_cast<double>(visits[a]);
      if (mean > best_mean) {
        best_mean = mean;
        best = static_cast<int>(a);
      }
    }
    return best;
  }

  // Top-down recommendation with the exploration term switched off. Below the
  // explored tree the remaining stages fall back to a one-step security choice.
  void recommend(const State& root, SolveReport& r) {
    std::int64_t idx = 0;
    State current = root;
    while (!game_.is_terminal(current)) {
      int a = -1, b = -1;
      if (idx >= 0 && nodes_[static_cast<std::size_t>(idx)].visits > 0) {
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        a = greedy(nd.blue_sum, nd.blue_visits);
        b = greedy(nd.red_sum, nd.red_visits);
      }
      if (a >= 0 && b >= 0) {
        const std::int64_t child =
            nodes_[static_cast<std::size_t>(idx)].children[static_cast<std::size_t>(a * n_ + b)];
        if (child >= 0) {
          current = nodes_[static_cast<std::size_t>(child)].state;
        } else {
          ++expansions_;
          current = game_.apply(current, a, b);
        }
        idx = child;
      } else {
        const auto n = static_cast<std::size_t>(n_);
        UtilityMatrix values(n);
        std::vector<State> children;
        for (int x = 0; x < n_; ++x) {
          for (int y = 0; y < n_; ++y) {
            ++expansions_;
            children.push_back(game_.apply(current, x, y));
            values(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) =
                game_.utility(children.back());
          }
        }
        const EquilibriumCell eq = security_solve(values);
        a = eq.blue_index;
        b = eq.red_index;
        current = std::move(children[static_cast<std::size_t>(a * n_ + b)]);
        idx = -1;
      }
      r.path.push_back({a, b});
    }
    r.value = game_.utility(current);
  }

  void fill_stats(MctsRootStats& stats) const {
    const Node& root = nodes_.front();
    stats = {};
    stats.visits = root.visits;
    stats.reward_min = reward_min_;
    stats.reward_max = reward_max_;
    stats.tree_nodes = nodes_.size();
    if (root.terminal) return;
    stats.blue_visits = root.blue_visits;
    stats.red_visits = root.red_visits;
    for (std::size_t a = 0; a < root.blue_sum.size(); ++a) {
      const double bv = static_cast<double>(root.blue_visits[a]);
      const double rv = static_cast<double>(root.red_visits[a]);
      stats.blue_mean.push_back(bv > 0 ? root.blue_sum[a] / bv : 0.0);
      stats.red_mean.push_back(rv > 0 ? root.red_sum[a] / rv : 0.0);
    }
  }

  const G& game_;
  int n_;
  MctsConfig config_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  std::uint64_t expansions_ = 0;
  double reward_min_ = 0.0;
  double reward_max_ = 0.0;
  bool seen_reward_ = false;
};

}  // namespace detail

/// Decoupled UCT: each player runs its own bandit at every node. The reported
/// value is the utility of replaying the recommended path through the game.
/// Throws kInvalidArgument when the budget is below B².
template <SimultaneousGame G>
SolveReport solve_mcts(const G& game, const typename G::State& root, const MctsConfig& config,
                       MctsRootStats* stats = nullptr) {
  const std::uint64_t iterations =
      resolve_mcts_iterations(config, game.num_actions(), game.num_stages());
  return detail::timed("mcts", [&] {
    detail::DecoupledUct<G> uct(game, config);
    return uct.run(root, iterations, stats);
  });
}

template <SimultaneousGame G>
struct Replay {
  typename G::State final_state;
  double utility = 0.0;
};

/// Re-simulates a committed action sequence. Throws kInvalidArgument on an
/// out-of-grid index or a move past a terminal state.
template <SimultaneousGame G>
Replay<G> replay_path(const G& game, const typename G::State& root,
                      const std::vector<ActionPair>& path) {
  typename G::State s = root;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const ActionPair& p = path[k];
    if (p.blue < 0 || p.blue >= game.num_actions() || p.red < 0 ||
        p.red >= game.num_actions()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "path entry " + std::to_string(k) + " is outside the action grid");
    }
    if (game.is_terminal(s)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "path continues past a terminal state at entry " + std::to_string(k));
    }
    s = game.apply(s, p.blue, p.red);
  }
  const double u = game.utility(s);
  return {std::move(s), u};
}

enum class SolverKind { kFullTree, kNashDominant, kMyopic, kMcts };

/// Accepts "full", "nash-dominant", "myopic", "mcts".
SolverKind parse_solver(std::string_view name);
std::string_view solver_name(SolverKind kind);
bool is_exact(SolverKind kind);

template <SimultaneousGame G>
SolveReport solve(SolverKind kind, const G& game, const typename G::State& root,
                  const MctsConfig& mcts = {}) {
  switch (kind) {
    case SolverKind::kFullTree: return solve_full_tree(game, root);
    case SolverKind::kNashDominant: return solve_nash_dominant(game, root);
    case SolverKind::kMyopic: return solve_myopic(game, root);
    case SolverKind::kMcts: return solve_mcts(game, root, mcts);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown solver");
}

}  // namespace bkl
