#pragma once

// File formats read by the plotting scripts, plus JSON forms of the model
// objects. Numbers are written with round-trip precision.

#include <string>
#include <vector>

#include "bkl/config.hpp"
#include "bkl/experiments.hpp"
#include "bkl/integrator.hpp"

namespace bkl {

Json topology_to_json(const NetworkTopology& topo);
NetworkTopology topology_from_json(const Json& doc);
Json params_to_json(const BklParameters& params);
BklParameters params_from_json(const Json& doc);
Json state_to_json(const SystemState& state);

/// t,pop_blue,pop_red,order_blue,order_red,mean_beta,mean_rho,phi,psi
std::string trajectory_csv(const Trajectory& trajectory, MeanPhaseMode mode);

/// stage,phi,psi,pop_blue,pop_red: one row per decision point reached, with
/// the populations at that point and the lags chosen there. The final row
/// carries the end state and empty lags.
std::string path_csv(const BklGame& game, const std::vector<ActionPair>& path);

Json report_to_json(const SolveReport& report);

/// zeta_b,zeta_r,solver,value; failed cells are left out.
std::string heatmap_csv(const SweepResult& result);
Json error_stats_to_json(const SweepResult& result);

/// solver,depth,branching,tree_size,leaf_evals,wall_ms_mean,wall_ms_std
std::string bench_csv(const std::vector<BenchRecord>& records);
Json bench_summary_to_json(const std::vector<BenchRecord>& records);

std::string format_number(double value);

/// Writes the whole file or throws kIo.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace bkl
