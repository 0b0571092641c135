#include "bkl/topology.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <string>

#include "bkl/error.hpp"

namespace bkl {

Matrix generate_hierarchy(std::size_t n, std::size_t branching) {
  if (n < 1 || branching < 1) {
    throw Error(ErrorCode::kInvalidArgument, "hierarchy needs n >= 1 and branching >= 1");
  }
  Matrix adj(n, n);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t parent = (i - 1) / branching;
    adj(i, parent) = 1.0;
    adj(parent, i) = 1.0;
  }
  return adj;
}

std::vector<std::size_t> bfs_depths(const Matrix& adj) {
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> depth(adj.rows(), kUnreached);
  if (adj.rows() == 0) return depth;
  std::queue<std::size_t> frontier;
  depth[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < adj.cols(); ++v) {
      if (adj(u, v) != 0.0 && depth[v] == kUnreached) {
        depth[v] = depth[u] + 1;
        frontier.push(v);
      }
    }
  }
  return depth;
}

bool is_connected(const Matrix& adj) {
  const auto depth = bfs_depths(adj);
  return std::none_of(depth.begin(), depth.end(), [](std::size_t d) {
    return d == std::numeric_limits<std::size_t>::max();
  });
}

Matrix generate_random_graph(std::size_t m, double edge_prob, std::uint64_t seed,
                             int max_attempts) {
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "random graph needs m >= 2");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "edge probability must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Matrix adj(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (coin(rng)) {
          adj(i, j) = 1.0;
          adj(j, i) = 1.0;
        }
      }
    }
    if (is_connected(adj)) return adj;
  }
  throw Error(ErrorCode::kConnectivity,
              "no connected G(" + std::to_string(m) + ", " + std::to_string(edge_prob) +
                  ") draw within " + std::to_string(max_attempts) + " attempts");
}

Matrix build_cross_links(const Matrix& blue_adj, std::size_t n_red, std::size_t n_contact_blue,
                         std::size_t n_contact_red, std::uint64_t seed) {
  const std::size_t n_blue = blue_adj.rows();
  if (n_contact_blue > n_blue || n_contact_red > n_red) {
    throw Error(ErrorCode::kInvalidArgument, "more contact nodes than population");
  }
  const auto depth = bfs_depths(blue_adj);
  std::vector<std::size_t> blue_order(n_blue);
  for (std::size_t i = 0; i < n_blue; ++i) blue_order[i] = i;
  std::stable_sort(blue_order.begin(), blue_order.end(), [&](std::size_t a, std::size_t b) {
    // Unreached nodes sort last.
    const auto da = depth[a] == std::numeric_limits<std::size_t>::max() ? 0 : depth[a] + 1;
    const auto db = depth[b] == std::numeric_limits<std::size_t>::max() ? 0 : depth[b] + 1;
    return da > db;
  });

  std::vector<std::size_t> red_order(n_red);
  for (std::size_t j = 0; j < n_red; ++j) red_order[j] = j;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n_contact_red; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, n_red - 1);
    std::swap(red_order[k], red_order[pick(rng)]);
  }

  Matrix cross(n_blue, n_red);
  for (std::size_t a = 0; a < n_contact_blue; ++a) {
    for (std::size_t b = 0; b < n_contact_red; ++b) cross(blue_order[a], red_order[b]) = 1.0;
  }
  return cross;
}

Vector draw_frequencies(std::size_t count, double mean, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative frequency spread");
  Vector out(count, mean);
  if (stddev == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mean, stddev);
  for (double& f : out) f = dist(rng);
  return out;
}

Vector draw_phases(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
  Vector out(count);
  for (double& p : out) p = dist(rng);
  return out;
}

}  // namespace bkl
