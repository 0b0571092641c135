#pragma once

// Seeded generators for the asymmetric force structures: a balanced
// hierarchy for Blue, a connected Erdős–Rényi graph for Red, and the sparse
// contact matrix between them.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bkl/dynamics.hpp"

namespace bkl {

/// Rooted balanced tree in breadth-first order: node i > 0 hangs off
/// (i - 1) / branching. Symmetric, unit weights.
Matrix generate_hierarchy(std::size_t n, std::size_t branching);

/// G(m, p) draws repeated until connected. Throws kConnectivity when
/// `max_attempts` draws all fail.
Matrix generate_random_graph(std::size_t m, double edge_prob, std::uint64_t seed,
                             int max_attempts = 1000);

/// Blue contacts are the deepest nodes of `blue_adj` measured from node 0
/// (ties by index); Red contacts are a seeded random subset. Contacts are
/// linked all-to-all with weight 1.
Matrix build_cross_links(const Matrix& blue_adj, std::size_t n_red, std::size_t n_contact_blue,
                         std::size_t n_contact_red, std::uint64_t seed);

/// Hop distance from node 0; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_depths(const Matrix& adj);
bool is_connected(const Matrix& adj);

/// Normal(mean, stddev) draws.
Vector draw_frequencies(std::size_t count, double mean, double stddev, std::uint64_t seed);
/// Uniform draws on [0, 2π).
Vector draw_phases(std::size_t count, std::uint64_t seed);

}  // namespace bkl
