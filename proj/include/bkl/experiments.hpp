#pragma once

// Experiment drivers: coupling-strength sweeps with solver error statistics,
// the solver scaling benchmark, the fixed-deviation run, and dense
// trajectory replays for plotting.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bkl/config.hpp"
#include "bkl/game.hpp"
#include "bkl/solvers.hpp"

namespace bkl {

/// Published magnitudes, emitted next to our measurements for comparison.
struct ReferenceFigures {
  static constexpr double kMyopicMeanRelError = 0.0207;
  static constexpr double kMyopicStdRelError = 0.0050;
  static constexpr double kMctsMeanRelError = 0.0157;
  static constexpr double kMctsStdRelError = 0.0115;
  static constexpr double kMctsMeanAbsError = 0.465;
  static constexpr double kPruningLeafFraction = 1.0 / 3.0;
  static constexpr double kUtilityRangeLow = 42.5;
  static constexpr double kUtilityRangeHigh = 60.3;
};

/// Appends "#2", "#3", ... to repeated solver names.
std::vector<std::string> unique_solver_labels(const std::vector<std::string>& solvers);

/// Applies a JSON merge patch to a config (sweep and bench sections are left
/// untouched) and re-validates the result.
RunConfig apply_scenario_overrides(const RunConfig& base, const Json& patch);

/// Evenly spaced points on [lo, hi]; `count` of 1 yields {lo}.
std::vector<double> linspace(double lo, double hi, std::size_t count);

struct SweepSpec {
  std::vector<double> zeta_b_values;
  std::vector<double> zeta_r_values;
  std::vector<std::string> solvers;
  RunConfig base;  // overrides already applied
  int jobs = 1;

  void validate() const;
};

/// Resolves the config's sweep section (default grids, scenario overrides).
SweepSpec make_sweep_spec(const RunConfig& config);

struct HeatmapGrid {
  std::size_t rows = 0;  // zeta_b index
  std::size_t cols = 0;  // zeta_r index
  std::vector<double> values;  // row-major; NaN marks a failed cell

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct ErrorStats {
  std::size_t cells = 0;
  double mean_abs = 0.0;
  double std_abs = 0.0;  // population standard deviation
  double max_abs = 0.0;
  std::optional<double> normalized_mean;  // divided by the exact grid's range
  std::optional<double> normalized_std;
  std::optional<double> relative_mean;  // mean_abs / mean |exact|
};

/// Statistics of |approx - exact| over cells where both are finite.
/// Throws kDimensionMismatch when the grids differ in shape.
ErrorStats compute_error_stats(const HeatmapGrid& exact, const HeatmapGrid& approx);

struct SweepCell {
  std::size_t zeta_b_index = 0;
  std::size_t zeta_r_index = 0;
  double zeta_b = 0.0;
  double zeta_r = 0.0;
  std::string solver;  // unique label
  std::optional<SolveReport> report;
  std::string error;  // set when the cell failed
};

struct SweepResult {
  std::vector<double> zeta_b_values;
  std::vector<double> zeta_r_values;
  std::vector<std::string> solver_labels;
  std::vector<SweepCell> cells;  // ordered by (zeta_b, zeta_r, solver)
  std::optional<std::string> reference;  // first exact solver label
  std::vector<std::pair<std::string, ErrorStats>> error_stats;
  double initial_utility = 0.0;

  HeatmapGrid grid(const std::string& label) const;
  std::size_t failures() const;
};

/// Solves every grid cell with every listed solver. Cells run on `jobs`
/// worker threads and are merged by index, so output does not depend on
/// the worker count. A failing cell is recorded and the sweep continues.
SweepResult run_sweep(const SweepSpec& spec);

struct BenchSpec {
  std::vector<int> depths;
  std::vector<int> branchings;
  int repeats = 6;
  std::vector<std::string> solvers;
  double window = 30.0;
  RunConfig base;  // overrides already applied

  void validate() const;
};

BenchSpec make_bench_spec(const RunConfig& config);

struct BenchRecord {
  std::string solver;
  int depth = 0;
  int branching = 0;
  std::uint64_t tree_size = 0;  // B^(2d)
  std::uint64_t leaf_evaluations = 0;
  double wall_ms_mean = 0.0;
  double wall_ms_std = 0.0;
  double value = 0.0;
  int repeats = 0;
  std::string error;
};

/// The bench game for one (depth, branching) cell: `depth` decision points
/// spaced `window` apart on the base scenario.
RunConfig bench_cell_config(const BenchSpec& spec, int depth, int branching);

/// Times each solver on each cell, sequentially so timings do not contend.
/// Records are sorted by tree size, then depth, then solver order.
std::vector<BenchRecord> run_scaling_bench(const BenchSpec& spec);

struct DeviationOutcome {
  double equilibrium_value = 0.0;  // Blue security value at the root
  double deviated_value = 0.0;     // Blue utility of the played line
  std::vector<ActionPair> played;
  double red_equilibrium_utility() const { return -equilibrium_value; }
  double red_deviated_utility() const { return -deviated_value; }
};

/// Blue plays its security action at every node it reaches (re-solved
/// exactly from that node); Red always plays `red_action`.
DeviationOutcome run_deviation(const BklGame& game, int red_action);

/// Dense trajectory of a committed path, stopping at depletion exactly as
/// the game transitions do.
Trajectory replay_trajectory(const BklGame& game, const std::vector<ActionPair>& path);

/// Fixed (phi, psi) from the initial state for `duration`, split at the
/// scenario's decision times so they appear as samples.
Trajectory simulate_fixed(const Scenario& scenario, double phi, double psi, double duration);

}  // namespace bkl
