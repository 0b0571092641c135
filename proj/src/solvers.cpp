#include "bkl/solvers.hpp"

#include <string>

namespace bkl {

std::uint64_t full_leaf_count(int n_actions, int n_stages) {
  std::uint64_t count = 1;
  const auto pairs = static_cast<std::uint64_t>(n_actions) * static_cast<std::uint64_t>(n_actions);
  for (int k = 0; k < n_stages; ++k) {
    if (count > std::numeric_limits<std::uint64_t>::max() / pairs) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= pairs;
  }
  return count;
}

std::uint64_t resolve_mcts_iterations(const MctsConfig& config, int n_actions, int n_stages) {
  std::uint64_t iterations = config.iterations;
  if (iterations == 0) {
    if (!(config.budget_fraction > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "MCTS budget fraction must be positive");
    }
    const double leaves = static_cast<double>(full_leaf_count(n_actions, n_stages));
    iterations = static_cast<std::uint64_t>(std::ceil(config.budget_fraction * leaves));
  }
  const auto minimum = static_cast<std::uint64_t>(n_actions) * static_cast<std::uint64_t>(n_actions);
  if (iterations < minimum) {
    throw Error(ErrorCode::kInvalidArgument,
                "MCTS budget " + std::to_string(iterations) + " is below B^2 = " +
                    std::to_string(minimum));
  }
  if (!(config.exploration_c >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "exploration constant must be non-negative");
  }
  return iterations;
}

SolverKind parse_solver(std::string_view name) {
  if (name == "full") return SolverKind::kFullTree;
  if (name == "nash-dominant") return SolverKind::kNashDominant;
  if (name == "myopic") return SolverKind::kMyopic;
  if (name == "mcts") return SolverKind::kMcts;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown solver '" + std::string(name) +
                  "' (expected full, nash-dominant, myopic or mcts)");
}

std::string_view solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kFullTree: return "full";
    case SolverKind::kNashDominant: return "nash-dominant";
    case SolverKind::kMyopic: return "myopic";
    case SolverKind::kMcts: return "mcts";
  }
  return "unknown";
}

bool is_exact(SolverKind kind) {
  return kind == SolverKind::kFullTree || kind == SolverKind::kNashDominant;
}

}  // namespace bkl
