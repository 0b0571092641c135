#pragma once

// The single JSON run configuration shared by every subcommand. Parsing is
// strict: unknown keys and out-of-range values are rejected at load time.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bkl/dynamics.hpp"
#include "bkl/game.hpp"
#include "bkl/solvers.hpp"

namespace bkl {

using Json = nlohmann::json;

struct GeneratorSpec {
  std::size_t blue_nodes = 13;
  std::size_t blue_branching = 3;
  std::size_t red_nodes = 13;
  double red_edge_prob = 0.4;
  std::size_t blue_contacts = 4;
  std::size_t red_contacts = 4;

  bool operator==(const GeneratorSpec&) const = default;
};

/// Either generator parameters or explicit dense matrices.
struct TopologySpec {
  std::optional<GeneratorSpec> generator = GeneratorSpec{};
  std::optional<NetworkTopology> explicit_topology;

  bool operator==(const TopologySpec&) const = default;
};

struct ParamsSpec {
  double omega_mean = 0.5032;
  double nu_mean = 0.5513;
  double freq_std = 0.05;
  std::optional<Vector> omega;  // overrides the seeded draw
  std::optional<Vector> nu;
  double zeta_b = 0.5;
  double zeta_r = 0.5;
  double zeta_br = 0.4;
  double zeta_rb = 0.4;
  double kappa_br = 0.005;
  double kappa_rb = 0.005;
  double epsilon1 = 1e-15;
  double epsilon2 = 1e-20;
  double gamma_b = 1e-3;
  double gamma_r = 1e-5;
  MeanPhaseMode mean_phase = MeanPhaseMode::kArithmetic;

  bool operator==(const ParamsSpec&) const = default;
};

struct InitialSpec {
  double pop_blue = 100.0;
  double pop_red = 47.0;
  std::optional<Vector> beta;  // default: seeded uniform on [0, 2π)
  std::optional<Vector> rho;

  bool operator==(const InitialSpec&) const = default;
};

struct GameSpec {
  int n_actions = 4;
  std::vector<double> decision_times = {0.0, 30.0, 60.0, 90.0};
  double horizon = 120.0;
  double step = 0.5;

  bool operator==(const GameSpec&) const = default;
};

struct SolverSpec {
  std::string name = "nash-dominant";
  MctsConfig mcts;

  bool operator==(const SolverSpec&) const = default;
};

struct SweepSection {
  std::vector<double> zeta_b_values;  // empty: 10 points on [0.05, 1.0]
  std::vector<double> zeta_r_values;
  std::vector<std::string> solvers = {"nash-dominant", "myopic", "mcts"};
  Json overrides = Json{{"params", {{"kappa_br", 0.002}, {"kappa_rb", 0.002}}}};

  bool operator==(const SweepSection&) const = default;
};

struct BenchSection {
  std::vector<int> depths = {2, 3, 4};
  std::vector<int> branchings = {3, 4, 5, 6};
  int repeats = 6;
  std::vector<std::string> solvers = {"full", "nash-dominant", "myopic", "mcts"};
  double window = 30.0;
  Json overrides = default_overrides();

  static Json default_overrides();
  bool operator==(const BenchSection&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 2024;
  TopologySpec topology;
  ParamsSpec params;
  InitialSpec initial;
  GameSpec game;
  SolverSpec solver;
  std::string output_dir = "out";
  SweepSection sweep;
  BenchSection bench;

  bool operator==(const RunConfig&) const = default;
};

/// Independent seeds for each random draw, derived from the master seed.
struct DerivedSeeds {
  std::uint64_t red_graph;
  std::uint64_t cross_links;
  std::uint64_t omega;
  std::uint64_t nu;
  std::uint64_t beta;
  std::uint64_t rho;
};

DerivedSeeds derive_seeds(std::uint64_t master);

/// Concrete model objects built from a config.
struct Scenario {
  NetworkTopology topology;
  BklParameters params;
  GameConfig game;
  SystemState initial;
};

/// Throws kConfig with the offending key path.
RunConfig config_from_json(const Json& doc);
Json config_to_json(const RunConfig& config);

RunConfig load_config_file(const std::string& path);
/// Accepts a plain config or a manifest that embeds one under "config".
Json extract_config_document(const Json& doc);

/// `key` is a dotted path such as "params.zeta_b"; `value` is parsed as JSON
/// and falls back to a plain string.
void apply_override(Json& doc, std::string_view assignment);

/// Builds topology, parameters, game rules and the initial state. Throws on
/// any module-level invariant violation.
Scenario build_scenario(const RunConfig& config);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_digest(const RunConfig& config);
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace bkl
